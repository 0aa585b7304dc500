#pragma once

#include <array>
#include <cstddef>

#include "core/grid.hpp"

namespace g2sf::semiflat {

// Residual sup-norms are taken over nodes at least this far from every
// boundary. One-sided stencils switch truncation-error branches at the
// boundary layer, and differentiating across the switch costs one order.
inline constexpr int kResidualMargin = 2;

// Lambda^2 R^4 components are ordered lexicographically: (12,13,14,23,24,34).
// The intersection pairing of two 2-forms, p ^ q = wedge_pairing(p,q) dx^{1234}.
inline double wedge_pairing(const double* p, const double* q) {
    return p[0] * q[5] + p[5] * q[0] - p[1] * q[4] - p[4] * q[1] + p[2] * q[3] + p[3] * q[2];
}

// Frozen orthonormal basis of (Lambda^2 R^4, Q/2): rows 0..2 self-dual
// (pairing +2 with themselves), rows 3..5 anti-self-dual (pairing -2). This is
// the identification R^{3,3} ~ Lambda^2 R^4 used by the quadric and cone
// modules.
inline constexpr std::array<std::array<double, 6>, 6> kSplitBasis = {{
    {1, 0, 0, 0, 0, 1},    // e12 + e34
    {0, 1, 0, 0, -1, 0},   // e13 - e24
    {0, 0, -1, -1, 0, 0},  // -e14 - e23
    {1, 0, 0, 0, 0, -1},   // e12 - e34
    {0, 1, 0, 0, 1, 0},    // e13 + e24
    {0, 0, -1, 1, 0, 0},   // -e14 + e23
}};

/// Sampled map u: B -> Lambda^2 R^4 on a 3D base grid (6 components in the
/// order above) together with the constant fibre volume tau.
struct ImmersionField {
    GridField u;
    double tau = 1.0;

    ImmersionField(GridField u_, double tau_);
};

/// Pull back the intersection form: 2 h(A,B) tau dx^{1234} = u_*(A) ^ u_*(B).
/// Output has 6 symmetric components (metric_ops order); every node is
/// checked positive definite, failures report the node and eigenvalues.
GridField pullback_metric(const ImmersionField& u);

/// The constructed G2 structure on B x T^4. All fibre dependence is through
/// constant monomials, so phi and psi live as finite component tables over
/// the base grid:
///   phi = sqrt(det h) db^{123} + db^mu ^ theta_mu,
///   psi = tau dx^{1234} + (*_3 db^mu) ^ theta_mu.
struct SemiflatG2 {
    GridField h;          // 6 symmetric components
    GridField sqrt_det_h; // 1 component
    GridField theta;      // 18 = 3 x 6, mu-major
    GridField psi_cross;  // 18 = 3 x 6, base-pair-major in order (db12, db13, db23)
    double tau = 1.0;
};

SemiflatG2 build_phi_psi(const ImmersionField& u);

struct ClosureResiduals {
    SupNorm dphi;
    SupNorm dpsi;
};

/// Sup norms of the discrete d(phi) and d(psi) over interior nodes.
/// d(phi) vanishes for any immersion (mixed discrete partials commute);
/// d(psi) is small precisely when u is harmonic.
ClosureResiduals closure_residuals(const SemiflatG2& s);

/// Laplace-Beltrami of u componentwise:
///   g^{mu nu} d2u/db^mu db^nu + (Delta b^gamma) du/db^gamma,
/// with Delta b^gamma = -g^{mu nu} Gamma^gamma_{mu nu} from the pulled-back h.
GridField harmonicity_residual(const ImmersionField& u);

/// The 35 lexicographic components of phi as a 3-form on R^7 at one node
/// (axes 1..3 base, 4..7 fibre).
std::array<double, 35> phi_components_at(const SemiflatG2& s, std::size_t node);

/// Max over nodes and mu of |*_4 theta_mu - theta_mu| where *_4 uses the
/// fibre block of the metric recovered from phi by the G2 volume formula.
SupNorm theta_selfduality_residual(const SemiflatG2& s);

struct ScalingSymmetryReport {
    double lambda = 0.0;
    double lie_residual = 0.0;            // sup |L_V phi - lambda phi - 2 lambda dvol_B|
    double div_residual = 0.0;            // sup |div(V) - 3 lambda|
    double metric_scaling_residual = 0.0; // sup |h(t) - e^{2(t-t0)} h(t0)|
};

/// Build u(x,y,t) = e^t u0(x,y) on a 3D grid, V = d/dt, and measure the
/// scaling-symmetry relations. u0 is a 2D grid with 6 components and must be
/// nowhere null for the pairing (u0 ^ u0 != 0).
ScalingSymmetryReport scaling_symmetry_check(const GridField& u0, double t0, double t1,
                                             std::size_t nt, double tau = 1.0);

struct GaugeSlice {
    GridField r;
    GridField s;
    double integrability_residual = 0.0;  // sup |dr/dy - ds/dx|
    double c_gradient_residual = 0.0;     // sup |grad c|, 2c dx^{1234} = u0 ^ u0
};

/// Gauge functions of a 2D slice: r u^u = -u^u_x, s u^u = -u^u_y.
GaugeSlice gauge_slice(const GridField& u0);

}  // namespace g2sf::semiflat
