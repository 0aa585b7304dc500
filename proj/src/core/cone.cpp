#include "core/cone.hpp"

#include <cmath>

#include "core/errors.hpp"
#include "core/parallel.hpp"

namespace g2sf::cone {

Eigen::MatrixXd FlatMetric::metric(const Eigen::VectorXd&) const {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(sig_.dim(), sig_.dim());
    for (int i = 0; i < sig_.dim(); ++i) g(i, i) = sig_.eps(i);
    return g;
}

std::vector<Eigen::MatrixXd> FlatMetric::christoffel(const Eigen::VectorXd&) const {
    return std::vector<Eigen::MatrixXd>(static_cast<std::size_t>(sig_.dim()),
                                        Eigen::MatrixXd::Zero(sig_.dim(), sig_.dim()));
}

Eigen::MatrixXd SphereStereographic::metric(const Eigen::VectorXd& y) const {
    double f = 4.0 / std::pow(1.0 + y.squaredNorm(), 2);
    return f * Eigen::MatrixXd::Identity(2, 2);
}

std::vector<Eigen::MatrixXd> SphereStereographic::christoffel(const Eigen::VectorXd& y) const {
    // conformal metric e^{2s} delta with s = ln 2 - ln(1+|y|^2):
    // Gamma^k_ab = delta_ka s_b + delta_kb s_a - delta_ab s_k
    double denom = 1.0 + y.squaredNorm();
    Eigen::Vector2d ds = -2.0 * y / denom;
    std::vector<Eigen::MatrixXd> out(2, Eigen::MatrixXd::Zero(2, 2));
    for (int k = 0; k < 2; ++k)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                double v = 0.0;
                if (k == a) v += ds(b);
                if (k == b) v += ds(a);
                if (a == b) v -= ds(k);
                out[static_cast<std::size_t>(k)](a, b) = v;
            }
    return out;
}

Eigen::MatrixXd ConeMetric::metric(const Eigen::VectorXd& y) const {
    const int n = base_->dim();
    double r = y(0);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n + 1, n + 1);
    g(0, 0) = 1.0;
    g.block(1, 1, n, n) = r * r * base_->metric(y.tail(n));
    return g;
}

std::vector<Eigen::MatrixXd> ConeMetric::christoffel(const Eigen::VectorXd& y) const {
    const int n = base_->dim();
    double r = y(0);
    Eigen::VectorXd yb = y.tail(n);
    Eigen::MatrixXd gb = base_->metric(yb);
    auto gammab = base_->christoffel(yb);
    std::vector<Eigen::MatrixXd> out(static_cast<std::size_t>(n + 1),
                                     Eigen::MatrixXd::Zero(n + 1, n + 1));
    // Gamma^0_ij = -r g_ij
    out[0].block(1, 1, n, n) = -r * gb;
    for (int k = 0; k < n; ++k) {
        auto& m = out[static_cast<std::size_t>(k + 1)];
        m.block(1, 1, n, n) = gammab[static_cast<std::size_t>(k)];
        // Gamma^k_0j = Gamma^k_j0 = delta^k_j / r
        m(0, k + 1) = 1.0 / r;
        m(k + 1, 0) = 1.0 / r;
    }
    return out;
}

GridField tension_field(const MapBetween& m) {
    const int d = m.domain_metric.dim();
    const int n = m.codomain->dim();
    require(m.map.same_grid(m.domain_metric), ErrorKind::invalid_argument,
            "tension_field: map and metric must share the grid");
    require(m.map.components() == n, ErrorKind::invalid_argument,
            "tension_field: map components must match the codomain dimension");
    require(m.domain_metric.components() == sym_count(d), ErrorKind::invalid_argument,
            "tension_field: metric needs d(d+1)/2 components");

    GridField gamma_dom = christoffel_field(m.domain_metric);
    std::vector<GridField> dphi;
    for (int a = 0; a < d; ++a) dphi.push_back(derivative(m.map, a));
    std::vector<GridField> d2phi(static_cast<std::size_t>(sym_count(d)));
    for (int a = 0; a < d; ++a)
        d2phi[static_cast<std::size_t>(sym_index(d, a, a))] = second_derivative_same_axis(m.map, a);
    for (int a = 0; a < d; ++a)
        for (int b = a + 1; b < d; ++b)
            d2phi[static_cast<std::size_t>(sym_index(d, a, b))] = derivative(dphi[static_cast<std::size_t>(a)], b);

    GridField out = m.map.like(n);
    parallel_for(m.map.node_count(), [&](std::size_t node) {
        Eigen::MatrixXd ginv = sym_unpack(m.domain_metric, node, d).inverse();
        Eigen::VectorXd y(n);
        for (int c = 0; c < n; ++c) y(c) = m.map.at(node, c);
        auto gamma_cod = m.codomain->christoffel(y);
        for (int g = 0; g < n; ++g) {
            double acc = 0.0;
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    double term = d2phi[static_cast<std::size_t>(sym_index(d, i, j))].at(node, g);
                    for (int k = 0; k < d; ++k)
                        term -= gamma_dom.at(node, k * sym_count(d) + sym_index(d, i, j)) *
                                dphi[static_cast<std::size_t>(k)].at(node, g);
                    for (int a = 0; a < n; ++a)
                        for (int b = 0; b < n; ++b)
                            term += gamma_cod[static_cast<std::size_t>(g)](a, b) *
                                    dphi[static_cast<std::size_t>(i)].at(node, a) *
                                    dphi[static_cast<std::size_t>(j)].at(node, b);
                    acc += ginv(i, j) * term;
                }
            out.at(node, g) = acc;
        }
    });
    return out;
}

RadialReport radial_tension_relations(const MapBetween& m, double r0, double r1, std::size_t nr) {
    const int d = m.domain_metric.dim();
    const int n = m.codomain->dim();
    require(d <= 2, ErrorKind::invalid_argument,
            "radial_tension_relations: cone grids support base dimension <= 2");
    require(r0 > 0.0 && r1 > r0 && nr >= 5, ErrorKind::invalid_argument,
            "radial_tension_relations: need 0 < r0 < r1 and nr >= 5");

    RadialReport rep;
    GridField tau_base = tension_field(m);
    rep.base_tension_sup = sup_norm(tau_base, semiflat::kResidualMargin).value;

    // pullback of the codomain metric and the closed-form tau^0
    std::vector<GridField> dphi;
    for (int a = 0; a < d; ++a) dphi.push_back(derivative(m.map, a));
    GridField tau0_base = m.map.like(1);
    parallel_for(m.map.node_count(), [&](std::size_t node) {
        Eigen::VectorXd y(n);
        for (int c = 0; c < n; ++c) y(c) = m.map.at(node, c);
        Eigen::MatrixXd h = m.codomain->metric(y);
        Eigen::MatrixXd g = sym_unpack(m.domain_metric, node, d);
        Eigen::MatrixXd ginv = g.inverse();
        double acc = 0.0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                double pb = 0.0;
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b)
                        pb += h(a, b) * dphi[static_cast<std::size_t>(i)].at(node, a) *
                              dphi[static_cast<std::size_t>(j)].at(node, b);
                acc += ginv(i, j) * (g(i, j) - pb);
            }
        tau0_base.at(node, 0) = acc;  // (1/r) factor applied per r below
    });

    // explicit cone grid: r first, then the base axes
    std::array<std::size_t, 3> shape{nr, m.map.shape()[0], m.map.shape()[1]};
    std::array<double, 3> origin{r0, m.map.origin()[0], m.map.origin()[1]};
    std::array<double, 3> spacing{(r1 - r0) / static_cast<double>(nr - 1), m.map.spacing()[0],
                                  m.map.spacing()[1]};
    const int cd = d + 1;
    GridField cone_metric(cd, shape, origin, spacing, sym_count(cd));
    GridField cone_map(cd, shape, origin, spacing, n + 1);
    parallel_for(cone_metric.node_count(), [&](std::size_t node) {
        auto idx = cone_metric.unflat(node);
        double r = cone_metric.coord(0, idx[0]);
        std::size_t base_node = m.map.flat(idx[1], d > 1 ? idx[2] : 0);
        Eigen::MatrixXd g = sym_unpack(m.domain_metric, base_node, d);
        Eigen::MatrixXd ghat = Eigen::MatrixXd::Zero(cd, cd);
        ghat(0, 0) = 1.0;
        ghat.block(1, 1, d, d) = r * r * g;
        sym_pack(cone_metric, node, ghat);
        cone_map.at(node, 0) = r;
        for (int c = 0; c < n; ++c) cone_map.at(node, c + 1) = m.map.at(base_node, c);
    });
    MapBetween hat{std::move(cone_metric), std::move(cone_map),
                   std::make_shared<ConeMetric>(m.codomain)};
    GridField tau_hat = tension_field(hat);

    const int margin = semiflat::kResidualMargin;
    auto worst_gamma = parallel_max(tau_hat.node_count(), [&](std::size_t node) -> double {
        if (!tau_hat.is_interior(node, margin)) return -1.0;
        auto idx = tau_hat.unflat(node);
        double r = tau_hat.coord(0, idx[0]);
        std::size_t base_node = m.map.flat(idx[1], d > 1 ? idx[2] : 0);
        double worst = 0.0;
        for (int c = 0; c < n; ++c)
            worst = std::max(worst, std::abs(tau_hat.at(node, c + 1) -
                                             tau_base.at(base_node, c) / (r * r)));
        return worst;
    });
    rep.gamma_match = std::max(worst_gamma.value, 0.0);

    auto worst_radial = parallel_max(tau_hat.node_count(), [&](std::size_t node) -> double {
        if (!tau_hat.is_interior(node, margin)) return -1.0;
        auto idx = tau_hat.unflat(node);
        double r = tau_hat.coord(0, idx[0]);
        std::size_t base_node = m.map.flat(idx[1], d > 1 ? idx[2] : 0);
        return std::abs(tau_hat.at(node, 0) - tau0_base.at(base_node, 0) / r);
    });
    rep.radial_match = std::max(worst_radial.value, 0.0);

    auto worst_tau0 = parallel_max(m.map.node_count(), [&](std::size_t node) -> double {
        if (!m.map.is_interior(node, margin)) return -1.0;
        double sup = 0.0;
        for (std::size_t k = 0; k < nr; ++k) {
            double r = r0 + (r1 - r0) * static_cast<double>(k) / static_cast<double>(nr - 1);
            sup = std::max(sup, std::abs(tau0_base.at(node, 0) / r));
        }
        return sup;
    });
    rep.tau0_sup = std::max(worst_tau0.value, 0.0);

    // 1/r^2 law sampled at r = 1 and r = 2 when both are interior node values
    double hr = (r1 - r0) / static_cast<double>(nr - 1);
    auto r_index = [&](double rv) -> long {
        double k = (rv - r0) / hr;
        long kk = std::lround(k);
        if (std::abs(k - static_cast<double>(kk)) > 1e-9) return -1;
        if (kk < margin || kk + margin >= static_cast<long>(nr)) return -1;
        return kk;
    };
    long k1 = r_index(1.0), k2 = r_index(2.0);
    if (k1 >= 0 && k2 >= 0) {
        auto worst_scale = parallel_max(m.map.node_count(), [&](std::size_t node) -> double {
            if (!m.map.is_interior(node, margin)) return -1.0;
            auto idx = m.map.unflat(node);
            std::size_t n1 = tau_hat.flat(static_cast<std::size_t>(k1), idx[0], d > 1 ? idx[1] : 0);
            std::size_t n2 = tau_hat.flat(static_cast<std::size_t>(k2), idx[0], d > 1 ? idx[1] : 0);
            double worst = 0.0;
            for (int c = 0; c < n; ++c)
                worst = std::max(worst, std::abs(4.0 * tau_hat.at(n2, c + 1) - tau_hat.at(n1, c + 1)));
            return worst;
        });
        rep.scaling_residual = std::max(worst_scale.value, 0.0);
    } else {
        rep.scaling_residual = -1.0;  // r = 1, 2 not resolvable on this r-grid
    }
    return rep;
}

ConeImmersionResult cone_immersion(const quadric::SurfaceMap& phi, double r0, double r1,
                                   std::size_t nr) {
    require(phi.sig.p == 3 && phi.sig.q == 3, ErrorKind::invalid_argument,
            "cone_immersion: surface must live in signature (3,3)");
    require(phi.h0 == 1.0, ErrorKind::invalid_argument,
            "cone_immersion: needs the unit quadric (h0 = +1)");
    require(r0 > 0.0 && r1 > r0 && nr >= 3, ErrorKind::invalid_argument,
            "cone_immersion: need 0 < r0 < r1 (the apex is excluded) and nr >= 3");

    // induced surface metric must be positive definite
    GridField gx = derivative(phi.phi, 0);
    GridField gy = derivative(phi.phi, 1);
    auto sig_inner = [&](const GridField& a, std::size_t node, const GridField& b) {
        double acc = 0.0;
        for (int m = 0; m < 6; ++m) acc += phi.sig.eps(m) * a.at(node, m) * b.at(node, m);
        return acc;
    };
    auto indefinite = parallel_find_first(phi.phi.node_count(), [&](std::size_t node) {
        double exx = sig_inner(gx, node, gx);
        double exy = sig_inner(gx, node, gy);
        double eyy = sig_inner(gy, node, gy);
        return !(exx > 0.0 && exx * eyy - exy * exy > 0.0);
    });
    if (indefinite.first)
        fail_numeric("cone_immersion: induced surface metric not positive definite at node " +
                     format_node(phi.phi, indefinite.second));

    const std::size_t nx = phi.phi.shape()[0], ny = phi.phi.shape()[1];
    GridField u(3, {nx, ny, nr}, {phi.phi.origin()[0], phi.phi.origin()[1], r0},
                {phi.phi.spacing()[0], phi.phi.spacing()[1], (r1 - r0) / static_cast<double>(nr - 1)},
                6);
    parallel_for(u.node_count(), [&](std::size_t node) {
        auto idx = u.unflat(node);
        double r = u.coord(2, idx[2]);
        std::size_t base = phi.phi.flat(idx[0], idx[1]);
        for (int c = 0; c < 6; ++c) {
            double acc = 0.0;
            for (int m = 0; m < 6; ++m) acc += phi.phi.at(base, m) * semiflat::kSplitBasis[static_cast<std::size_t>(m)][static_cast<std::size_t>(c)];
            u.at(node, c) = r * acc;
        }
    });
    semiflat::ImmersionField field(std::move(u), 1.0);

    GridField pb = semiflat::pullback_metric(field);
    auto worst = parallel_max(pb.node_count(), [&](std::size_t node) -> double {
        if (!pb.is_interior(node, semiflat::kResidualMargin)) return -1.0;
        auto idx = pb.unflat(node);
        double r = pb.coord(2, idx[2]);
        std::size_t base = phi.phi.flat(idx[0], idx[1]);
        double exx = sig_inner(gx, base, gx);
        double exy = sig_inner(gx, base, gy);
        double eyy = sig_inner(gy, base, gy);
        double res = 0.0;
        res = std::max(res, std::abs(pb.at(node, sym_index(3, 0, 0)) - r * r * exx));
        res = std::max(res, std::abs(pb.at(node, sym_index(3, 0, 1)) - r * r * exy));
        res = std::max(res, std::abs(pb.at(node, sym_index(3, 1, 1)) - r * r * eyy));
        res = std::max(res, std::abs(pb.at(node, sym_index(3, 0, 2))));
        res = std::max(res, std::abs(pb.at(node, sym_index(3, 1, 2))));
        res = std::max(res, std::abs(pb.at(node, sym_index(3, 2, 2)) - 1.0));
        return res;
    });
    return {std::move(field), std::max(worst.value, 0.0)};
}

}  // namespace g2sf::cone
