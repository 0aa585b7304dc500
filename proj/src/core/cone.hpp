#pragma once

#include <Eigen/Dense>

#include <memory>
#include <vector>

#include "core/grid.hpp"
#include "core/metric_ops.hpp"
#include "core/quadric.hpp"
#include "core/semiflat.hpp"

namespace g2sf::cone {

/// Closed-form codomain metric: exact values and Christoffel symbols at a
/// point. Codomain metrics are callables, not grids, so the tension field
/// sees no interpolation error on the target side.
class CodomainMetric {
public:
    virtual ~CodomainMetric() = default;
    virtual int dim() const = 0;
    virtual Eigen::MatrixXd metric(const Eigen::VectorXd& y) const = 0;
    /// gamma[k](a,b) = Gamma^k_ab
    virtual std::vector<Eigen::MatrixXd> christoffel(const Eigen::VectorXd& y) const = 0;
};

/// Flat R^{p,q}: metric diag(+-1), vanishing symbols.
class FlatMetric : public CodomainMetric {
public:
    explicit FlatMetric(Signature sig) : sig_(sig) {}
    int dim() const override { return sig_.dim(); }
    Eigen::MatrixXd metric(const Eigen::VectorXd&) const override;
    std::vector<Eigen::MatrixXd> christoffel(const Eigen::VectorXd&) const override;

private:
    Signature sig_;
};

/// Unit round 2-sphere in stereographic coordinates: 4/(1+|y|^2)^2 delta.
class SphereStereographic : public CodomainMetric {
public:
    int dim() const override { return 2; }
    Eigen::MatrixXd metric(const Eigen::VectorXd& y) const override;
    std::vector<Eigen::MatrixXd> christoffel(const Eigen::VectorXd& y) const override;
};

/// Cone over a closed-form base: coordinates (r, y), metric dr^2 + r^2 h(y).
/// Symbols follow the cone table
///   Gamma^k_ij = base, Gamma^0_ij = -r h_ij, Gamma^k_0j = delta^k_j / r,
///   Gamma^0_00 = Gamma^0_0j = Gamma^k_00 = 0.
class ConeMetric : public CodomainMetric {
public:
    explicit ConeMetric(std::shared_ptr<const CodomainMetric> base) : base_(std::move(base)) {}
    int dim() const override { return base_->dim() + 1; }
    Eigen::MatrixXd metric(const Eigen::VectorXd& y) const override;
    std::vector<Eigen::MatrixXd> christoffel(const Eigen::VectorXd& y) const override;

private:
    std::shared_ptr<const CodomainMetric> base_;
};

/// Christoffel symbols of a sampled metric by central differences
/// (one-sided at boundaries); components k-major over symmetric pairs.
inline GridField christoffel(const GridField& metric) { return christoffel_field(metric); }

/// A sampled map between a gridded domain with sampled metric and a
/// closed-form codomain.
struct MapBetween {
    GridField domain_metric;  // sym_count(d) components
    GridField map;            // codomain->dim() components
    std::shared_ptr<const CodomainMetric> codomain;
};

/// tau^g = g^{ij} (d2_ij phi^g - Gamma^k_ij d_k phi^g
///                 + Gamma^g_ab(phi) d_i phi^a d_j phi^b).
GridField tension_field(const MapBetween& m);

struct RadialReport {
    double tau0_sup = 0.0;          // sup |tau^0 formula| over the r-range
    double gamma_match = 0.0;       // sup |tau_hat^g (direct) - tau^g(phi)/r^2|
    double radial_match = 0.0;      // sup |tau_hat^0 (direct) - closed form|
    double scaling_residual = 0.0;  // |4 tau_hat^g(r=2) - tau_hat^g(r=1)| sup
    double base_tension_sup = 0.0;  // sup |tau(phi)| on the base
};

/// Check the radial-extension relations two ways: the closed forms
/// tau^g(phi_hat) = tau^g(phi)/r^2, tau^0(phi_hat) = (1/r) g^{ij}(g_ij - pullback_ij)
/// against a direct tension-field evaluation on an explicit (d+1)-dim cone
/// grid (r is the first coordinate). r0 < 1 < 2 < r1 is required so the
/// 1/r^2 scaling can be sampled at interior nodes.
RadialReport radial_tension_relations(const MapBetween& m, double r0, double r1, std::size_t nr);

struct ConeImmersionResult {
    semiflat::ImmersionField u;
    double metric_residual = 0.0;  // sup |pullback - (dr^2 + r^2 g_Sigma)| (margin 2)
};

/// u(x,y,r) = r * phi(x,y) identified with Lambda^2 R^4 through the frozen
/// split basis; r is the last grid axis. Requires signature (3,3), h0 = +1,
/// and a positive definite induced surface metric.
ConeImmersionResult cone_immersion(const quadric::SurfaceMap& phi, double r0, double r1,
                                   std::size_t nr);

}  // namespace g2sf::cone
