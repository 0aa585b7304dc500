#include <doctest.h>

#include <cmath>

#include "core/cone.hpp"
#include "fixtures.hpp"

using namespace g2sf;
using namespace g2sf::cone;

namespace {

// round-sphere metric sampled in stereographic coordinates
GridField sphere_metric_grid(std::size_t n, double w = 0.8) {
    GridField g(2, {n, n, 1}, {-w / 2, -w / 2, 0},
                {w / static_cast<double>(n - 1), w / static_cast<double>(n - 1), 1.0}, 3);
    for (std::size_t node = 0; node < g.node_count(); ++node) {
        auto p = g.point(node);
        double f = 4.0 / std::pow(1.0 + p[0] * p[0] + p[1] * p[1], 2);
        g.at(node, 0) = f;
        g.at(node, 1) = 0.0;
        g.at(node, 2) = f;
    }
    return g;
}

GridField stereographic_map(std::size_t n, double w = 0.8) {
    GridField m(2, {n, n, 1}, {-w / 2, -w / 2, 0},
                {w / static_cast<double>(n - 1), w / static_cast<double>(n - 1), 1.0}, 3);
    for (std::size_t node = 0; node < m.node_count(); ++node) {
        auto p = m.point(node);
        double x = p[0], y = p[1], d = 1 + x * x + y * y;
        m.at(node, 0) = 2 * x / d;
        m.at(node, 1) = 2 * y / d;
        m.at(node, 2) = (1 - x * x - y * y) / d;
    }
    return m;
}

}  // namespace

TEST_CASE("christoffel: flat metric vanishes exactly") {
    GridField flat(2, {9, 9, 1}, {0, 0, 0}, {0.1, 0.1, 1}, 3);
    for (std::size_t node = 0; node < flat.node_count(); ++node) {
        flat.at(node, 0) = 1.0;
        flat.at(node, 2) = 1.0;
    }
    CHECK(sup_norm(christoffel(flat)).value == 0.0);
}

TEST_CASE("christoffel: sphere metric matches the closed form at O(h^2)") {
    SphereStereographic sph;
    double prev = 0.0;
    int level = 0;
    for (std::size_t n : {17, 33, 65}) {
        GridField g = sphere_metric_grid(n);
        GridField gam = christoffel(g);
        double worst = 0.0;
        for (std::size_t node = 0; node < g.node_count(); ++node) {
            if (!g.is_interior(node, 2)) continue;
            auto p = g.point(node);
            auto exact = sph.christoffel(Eigen::Vector2d(p[0], p[1]));
            for (int k = 0; k < 2; ++k)
                for (int i = 0; i < 2; ++i)
                    for (int j = i; j < 2; ++j)
                        worst = std::max(worst,
                                         std::abs(gam.at(node, k * 3 + sym_index(2, i, j)) -
                                                  exact[static_cast<std::size_t>(k)](i, j)));
        }
        if (level > 0) CHECK(prev / worst > 3.4);
        prev = worst;
        ++level;
    }
}

TEST_CASE("christoffel: the cone table for two distinct links") {
    // builds dr^2 + r^2 g_Sigma on a 3D grid and compares every symbol class
    // of the table against the numeric symbols
    auto check_cone_table = [](const GridField& base_metric, double tol) {
        std::size_t nr = 17;
        auto sh = base_metric.shape();
        GridField ghat(3, {nr, sh[0], sh[1]}, {1.0, base_metric.origin()[0], base_metric.origin()[1]},
                       {1.0 / static_cast<double>(nr - 1), base_metric.spacing()[0],
                        base_metric.spacing()[1]},
                       6);
        for (std::size_t node = 0; node < ghat.node_count(); ++node) {
            auto idx = ghat.unflat(node);
            double r = ghat.coord(0, idx[0]);
            std::size_t bn = base_metric.flat(idx[1], idx[2]);
            Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
            m(0, 0) = 1.0;
            m(1, 1) = r * r * base_metric.at(bn, 0);
            m(1, 2) = m(2, 1) = r * r * base_metric.at(bn, 1);
            m(2, 2) = r * r * base_metric.at(bn, 2);
            sym_pack(ghat, node, m);
        }
        GridField gam_hat = christoffel(ghat);
        GridField gam_base = christoffel(base_metric);
        double worst = 0.0;
        for (std::size_t node = 0; node < ghat.node_count(); ++node) {
            if (!ghat.is_interior(node, 2)) continue;
            auto idx = ghat.unflat(node);
            double r = ghat.coord(0, idx[0]);
            std::size_t bn = base_metric.flat(idx[1], idx[2]);
            auto ghat_at = [&](int k, int i, int j) { return gam_hat.at(node, k * 6 + sym_index(3, i, j)); };
            // Gamma^0_00 = Gamma^0_0j = Gamma^k_00 = 0
            worst = std::max(worst, std::abs(ghat_at(0, 0, 0)));
            for (int j = 1; j < 3; ++j) {
                worst = std::max(worst, std::abs(ghat_at(0, 0, j)));
                worst = std::max(worst, std::abs(ghat_at(j, 0, 0)));
            }
            // Gamma^k_0j = delta^k_j / r
            for (int k = 1; k < 3; ++k)
                for (int j = 1; j < 3; ++j)
                    worst = std::max(worst, std::abs(ghat_at(k, 0, j) - (k == j ? 1.0 / r : 0.0)));
            // Gamma^0_ij = -r g_ij
            worst = std::max(worst, std::abs(ghat_at(0, 1, 1) + r * base_metric.at(bn, 0)));
            worst = std::max(worst, std::abs(ghat_at(0, 1, 2) + r * base_metric.at(bn, 1)));
            worst = std::max(worst, std::abs(ghat_at(0, 2, 2) + r * base_metric.at(bn, 2)));
            // Gamma^k_ij = base symbols
            for (int k = 1; k < 3; ++k)
                for (int i = 1; i < 3; ++i)
                    for (int j = i; j < 3; ++j)
                        worst = std::max(worst, std::abs(ghat_at(k, i, j) -
                                                         gam_base.at(bn, (k - 1) * 3 + sym_index(2, i - 1, j - 1))));
        }
        CHECK(worst <= tol);
    };

    // sphere link
    check_cone_table(sphere_metric_grid(17), 5e-3);
    // flat-torus link
    GridField flat(2, {9, 9, 1}, {0, 0, 0}, {0.25, 0.25, 1}, 3);
    for (std::size_t node = 0; node < flat.node_count(); ++node) {
        flat.at(node, 0) = 1.0;
        flat.at(node, 2) = 1.0;
    }
    check_cone_table(flat, 1e-10);
}

TEST_CASE("tension: identity map of the flat torus vanishes") {
    std::size_t n = 17;
    GridField g(2, {n, n, 1}, {0, 0, 0}, {0.1, 0.1, 1}, 3);
    GridField mp = g.like(2);
    for (std::size_t node = 0; node < g.node_count(); ++node) {
        auto p = g.point(node);
        g.at(node, 0) = 1.0;
        g.at(node, 2) = 1.0;
        mp.at(node, 0) = p[0];
        mp.at(node, 1) = p[1];
    }
    MapBetween m{g, mp, std::make_shared<FlatMetric>(Signature(2, 0))};
    CHECK(sup_norm(tension_field(m)).value < 1e-12);
}

TEST_CASE("tension: stereographic sphere into flat R^3 equals -2 phi") {
    double prev = 0.0;
    int level = 0;
    for (std::size_t n : {17, 33, 65}) {
        MapBetween m{sphere_metric_grid(n), stereographic_map(n),
                     std::make_shared<FlatMetric>(Signature(3, 0))};
        GridField tau = tension_field(m);
        double worst = 0.0;
        for (std::size_t node = 0; node < tau.node_count(); ++node) {
            if (!tau.is_interior(node, 2)) continue;
            for (int c = 0; c < 3; ++c)
                worst = std::max(worst, std::abs(tau.at(node, c) + 2.0 * m.map.at(node, c)));
        }
        if (level > 0) CHECK(prev / worst > 3.4);
        prev = worst;
        ++level;
    }
}

TEST_CASE("tension: Clifford torus into flat R^6 equals -2 phi") {
    std::size_t n = 65;
    GridField phi = fixtures::clifford_torus(n);
    GridField g(2, phi.shape(), phi.origin(), phi.spacing(), 3);
    for (std::size_t node = 0; node < g.node_count(); ++node) {
        g.at(node, 0) = 1.0;  // induced metric of the fixture is the identity
        g.at(node, 2) = 1.0;
    }
    MapBetween m{g, phi, std::make_shared<FlatMetric>(Signature(6, 0))};
    GridField tau = tension_field(m);
    double worst = 0.0;
    for (std::size_t node = 0; node < tau.node_count(); ++node) {
        if (!tau.is_interior(node, 2)) continue;
        for (int c = 0; c < 6; ++c)
            worst = std::max(worst, std::abs(tau.at(node, c) + 2.0 * phi.at(node, c)));
    }
    double h = phi.max_spacing();
    CHECK(worst <= 10 * h * h);
}

TEST_CASE("radial extension: Riemannian immersion has exactly vanishing tau^0") {
    std::size_t n = 33;
    GridField phi = stereographic_map(n);
    auto flat = std::make_shared<FlatMetric>(Signature(3, 0));
    // domain metric := discrete pullback, so g - pullback cancels identically
    GridField gx = derivative(phi, 0), gy = derivative(phi, 1);
    GridField dom = phi.like(3);
    for (std::size_t node = 0; node < phi.node_count(); ++node) {
        double exx = 0, exy = 0, eyy = 0;
        for (int c = 0; c < 3; ++c) {
            exx += gx.at(node, c) * gx.at(node, c);
            exy += gx.at(node, c) * gy.at(node, c);
            eyy += gy.at(node, c) * gy.at(node, c);
        }
        dom.at(node, 0) = exx;
        dom.at(node, 1) = exy;
        dom.at(node, 2) = eyy;
    }
    MapBetween m{dom, phi, flat};
    auto rep = radial_tension_relations(m, 0.75, 2.25, 13);
    CHECK(rep.tau0_sup <= 1e-10);
    double h = phi.max_spacing();
    CHECK(rep.gamma_match <= 10 * h * h);
    CHECK(rep.radial_match <= 10 * h * h);
    CHECK(rep.scaling_residual >= 0.0);
    CHECK(rep.scaling_residual <= 10 * h * h);
}

TEST_CASE("radial extension: non-immersion metric matches the trace formula") {
    // flat domain metric under the sphere map: tau^0 = (1/r) g^{ij}(g - pullback)_ij != 0
    std::size_t n = 33;
    GridField phi = stereographic_map(n);
    GridField dom = phi.like(3);
    for (std::size_t node = 0; node < phi.node_count(); ++node) {
        dom.at(node, 0) = 1.0;
        dom.at(node, 2) = 1.0;
    }
    MapBetween m{dom, phi, std::make_shared<FlatMetric>(Signature(3, 0))};
    auto rep = radial_tension_relations(m, 0.75, 2.25, 13);
    CHECK(rep.tau0_sup > 0.1);  // genuinely non-immersive
    double h = phi.max_spacing();
    CHECK(rep.radial_match <= 10 * h * h);
    CHECK(rep.gamma_match <= 10 * h * h);
}

TEST_CASE("cone immersion: the unit-sphere link closes the pipeline") {
    quadric::SurfaceMap sm(fixtures::angular_sphere(33), Signature(3, 3), 1.0);
    auto ci = cone_immersion(sm, 1.0, 2.0, 33);
    double h = ci.u.u.max_spacing();
    CHECK(ci.metric_residual <= 10 * h * h);
    auto s = semiflat::build_phi_psi(ci.u);
    auto cr = semiflat::closure_residuals(s);
    CHECK(cr.dphi.value <= 1e-11);
    CHECK(cr.dpsi.value <= 10 * h * h);
    CHECK(sup_norm(semiflat::harmonicity_residual(ci.u), semiflat::kResidualMargin).value <=
          10 * h * h);
}

TEST_CASE("cone immersion: input guards") {
    // scaled off the quadric: the SurfaceMap invariant itself rejects it
    GridField off = fixtures::angular_sphere(9);
    for (auto& v : off.values()) v *= 2.0;
    CHECK_THROWS_AS(quadric::SurfaceMap(off, Signature(3, 3), 1.0), Error);

    // hyperboloid in a mixed-signature 3-plane: on the quadric but with an
    // indefinite induced metric
    std::size_t n = 9;
    GridField hyp(2, {n, n, 1}, {0.1, 0, 0}, {0.1, 0.1, 1}, 6);
    for (std::size_t node = 0; node < hyp.node_count(); ++node) {
        auto p = hyp.point(node);
        hyp.at(node, 0) = std::cosh(p[0]);
        hyp.at(node, 3) = std::sinh(p[0]) * std::cos(p[1]);
        hyp.at(node, 4) = std::sinh(p[0]) * std::sin(p[1]);
    }
    quadric::SurfaceMap sm(hyp, Signature(3, 3), 1.0);
    CHECK_THROWS_AS(cone_immersion(sm, 0.5, 1.5, 9), Error);

    // apex excluded
    quadric::SurfaceMap good(fixtures::angular_sphere(9), Signature(3, 3), 1.0);
    CHECK_THROWS_AS(cone_immersion(good, 0.0, 1.0, 9), Error);
}
