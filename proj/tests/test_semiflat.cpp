#include <doctest.h>

#include <cmath>

#include "core/g2.hpp"
#include "core/semiflat.hpp"
#include "fixtures.hpp"

using namespace g2sf;
using namespace g2sf::semiflat;

TEST_CASE("pullback metric: self-dual frame gives the identity") {
    ImmersionField f(fixtures::linear_immersion(7), 1.0);
    GridField h = pullback_metric(f);
    for (std::size_t node = 0; node < h.node_count(); ++node) {
        CHECK(h.at(node, 0) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(h.at(node, 3) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(h.at(node, 5) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(std::abs(h.at(node, 1)) < 1e-14);
        CHECK(std::abs(h.at(node, 2)) < 1e-14);
        CHECK(std::abs(h.at(node, 4)) < 1e-14);
    }
}

TEST_CASE("pullback metric: bilinearity in the scale") {
    GridField u = fixtures::linear_immersion(7);
    GridField cu = u;
    for (auto& v : cu.values()) v *= 2.5;
    GridField h = pullback_metric(ImmersionField(u, 1.0));
    GridField hc = pullback_metric(ImmersionField(cu, 1.0));
    for (std::size_t node = 0; node < h.node_count(); ++node)
        for (int c = 0; c < 6; ++c)
            CHECK(hc.at(node, c) == doctest::Approx(2.5 * 2.5 * h.at(node, c)).epsilon(1e-12));
}

TEST_CASE("pullback metric: tau scales the metric") {
    GridField u = fixtures::linear_immersion(7);
    GridField h2 = pullback_metric(ImmersionField(u, 2.0));
    CHECK(h2.at(0, 0) == doctest::Approx(0.5));
    CHECK_THROWS_AS(ImmersionField(u, 0.0), Error);
}

TEST_CASE("pullback metric: rank-deficient immersion is rejected with a node") {
    GridField u = fixtures::linear_immersion(7);
    // kill all dependence on b^3
    for (std::size_t node = 0; node < u.node_count(); ++node) {
        auto idx = u.unflat(node);
        std::size_t base = u.flat(idx[0], idx[1], 0);
        for (int c = 0; c < 6; ++c) u.at(node, c) = u.at(base, c);
    }
    try {
        pullback_metric(ImmersionField(u, 1.0));
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::numeric);
        CHECK(std::string(e.what()).find("eigenvalues") != std::string::npos);
        CHECK(std::string(e.what()).find("node") != std::string::npos);
    }
}

TEST_CASE("build: linear immersion reproduces the normal-form tables") {
    ImmersionField f(fixtures::linear_immersion(7), 1.0);
    SemiflatG2 s = build_phi_psi(f);
    std::size_t node = f.u.flat(3, 3, 3);
    CHECK(s.sqrt_det_h.at(node, 0) == doctest::Approx(1.0));
    for (int mu = 0; mu < 3; ++mu)
        for (int c = 0; c < 6; ++c)
            CHECK(s.theta.at(node, 6 * mu + c) ==
                  doctest::Approx(kSplitBasis[static_cast<std::size_t>(mu)][static_cast<std::size_t>(c)])
                      .epsilon(1e-13));
    // psi = dx^{1234} + db^{23} ^ omega_1 - db^{13} ^ omega_2 + db^{12} ^ omega_3
    for (int c = 0; c < 6; ++c) {
        CHECK(s.psi_cross.at(node, 0 + c) == doctest::Approx(kSplitBasis[2][static_cast<std::size_t>(c)]).epsilon(1e-13));
        CHECK(s.psi_cross.at(node, 6 + c) == doctest::Approx(-kSplitBasis[1][static_cast<std::size_t>(c)]).epsilon(1e-13));
        CHECK(s.psi_cross.at(node, 12 + c) == doctest::Approx(kSplitBasis[0][static_cast<std::size_t>(c)]).epsilon(1e-13));
    }
}

TEST_CASE("flat case: residuals at machine precision, recovered metric splits") {
    ImmersionField f(fixtures::linear_immersion(9), 1.0);
    SemiflatG2 s = build_phi_psi(f);
    auto cr = closure_residuals(s);
    CHECK(cr.dphi.value <= 1e-12);
    CHECK(cr.dpsi.value <= 1e-12);
    CHECK(sup_norm(harmonicity_residual(f), 1).value <= 1e-12);
    CHECK(theta_selfduality_residual(s).value <= 1e-12);

    // the G2 volume formula recovers h on the base block and the fibre
    // volume tau on the fibre block
    auto comps = phi_components_at(s, f.u.flat(4, 4, 4));
    auto mv = g2_metric_dense(comps);
    CHECK((mv.metric - Eigen::Matrix<double, 7, 7>::Identity()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("cone fixture: dphi machine zero, dpsi and harmonicity O(h^2)") {
    double prev_dpsi = 0.0, prev_harm = 0.0;
    int level = 0;
    for (std::size_t n : {9, 17, 33}) {
        ImmersionField f(fixtures::sphere_cone_immersion(n, n), 1.0);
        SemiflatG2 s = build_phi_psi(f);
        auto cr = closure_residuals(s);
        double harm = sup_norm(harmonicity_residual(f), kResidualMargin).value;
        double h = f.u.max_spacing();
        CHECK(cr.dphi.value <= 1e-11);
        CHECK(cr.dpsi.value <= 10 * h * h);
        CHECK(harm <= 10 * h * h);
        if (level > 0) {
            CHECK(std::log2(prev_dpsi / cr.dpsi.value) > 1.5);
            CHECK(std::log2(prev_harm / harm) > 1.5);
        }
        prev_dpsi = cr.dpsi.value;
        prev_harm = harm;
        ++level;
    }
}

TEST_CASE("theta self-duality holds at every node of the cone fixture") {
    ImmersionField f(fixtures::sphere_cone_immersion(9, 9), 1.0);
    SemiflatG2 s = build_phi_psi(f);
    CHECK(theta_selfduality_residual(s).value <= 1e-11);
}

TEST_CASE("fibre volume: nontrivial tau shows up in the recovered metric") {
    ImmersionField f(fixtures::sphere_cone_immersion(9, 9), 1.7);
    SemiflatG2 s = build_phi_psi(f);
    std::size_t node = f.u.flat(4, 4, 4);
    auto comps = phi_components_at(s, node);
    auto mv = g2_metric_dense(comps);
    // base block equals h
    Eigen::Matrix3d base = mv.metric.block<3, 3>(0, 0);
    Eigen::Matrix3d hm;
    hm << s.h.at(node, 0), s.h.at(node, 1), s.h.at(node, 2), s.h.at(node, 1), s.h.at(node, 3),
        s.h.at(node, 4), s.h.at(node, 2), s.h.at(node, 4), s.h.at(node, 5);
    CHECK((base - hm).cwiseAbs().maxCoeff() < 1e-10);
    // fibre volume = sqrt(det of fibre block) = tau
    Eigen::Matrix4d fibre = mv.metric.block<4, 4>(3, 3);
    CHECK(std::sqrt(fibre.determinant()) == doctest::Approx(1.7).epsilon(1e-10));
    // cross block vanishes
    CHECK(mv.metric.block<3, 4>(0, 3).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("perturbed immersion: dphi still closed, dpsi and harmonicity bounded below") {
    for (std::size_t n : {9, 17, 33}) {
        GridField u = fixtures::sphere_cone_immersion(n, n);
        for (std::size_t node = 0; node < u.node_count(); ++node) {
            auto p = u.point(node);
            u.at(node, 0) += 0.1 * p[0] * p[0];
        }
        ImmersionField f(u, 1.0);
        SemiflatG2 s = build_phi_psi(f);
        auto cr = closure_residuals(s);
        CHECK(cr.dphi.value <= 1e-11);
        CHECK(cr.dpsi.value >= 1e-2);
        CHECK(sup_norm(harmonicity_residual(f), kResidualMargin).value >= 1e-2);
    }
}

TEST_CASE("harmonicity residual matches the closed-form oracle for a quadratic bump") {
    // u = b^mu omega_mu + eps (b^1)^2 e_12: h = diag(1 + 2 eps b1, 1, 1),
    // Delta u_12 = eps/(1+2 eps b1), Delta u_34 = -eps/(1+2 eps b1)^2,
    // all other components harmonic.
    const double eps = 0.05;
    GridField u = fixtures::linear_immersion(17);
    for (std::size_t node = 0; node < u.node_count(); ++node) {
        auto p = u.point(node);
        u.at(node, 0) += eps * p[0] * p[0];
    }
    ImmersionField f(u, 1.0);
    GridField res = harmonicity_residual(f);
    for (std::size_t node : {u.flat(8, 8, 8), u.flat(5, 9, 7), u.flat(10, 4, 6)}) {
        double b1 = u.point(node)[0];
        double d = 1.0 + 2.0 * eps * b1;
        CHECK(res.at(node, 0) == doctest::Approx(eps / d).epsilon(1e-6));
        CHECK(res.at(node, 5) == doctest::Approx(-eps / (d * d)).epsilon(1e-6));
        CHECK(std::abs(res.at(node, 1)) < 1e-9);
        CHECK(std::abs(res.at(node, 3)) < 1e-9);
    }
}

TEST_CASE("scaling symmetry: the cone slice scales with lambda = 1") {
    GridField u0 = fixtures::sphere_slice(17);
    auto rep = scaling_symmetry_check(u0, 0.0, 0.5, 17);
    CHECK(rep.lambda == doctest::Approx(1.0).epsilon(1e-3));
    // O(h^2) when both the slice and the t-axis refine together
    auto rep2 = scaling_symmetry_check(fixtures::sphere_slice(33), 0.0, 0.5, 33);
    CHECK(rep2.lambda == doctest::Approx(1.0).epsilon(3e-4));
    CHECK(rep2.lie_residual < 0.4 * rep.lie_residual);
    CHECK(rep2.div_residual < 0.4 * rep.div_residual);
    CHECK(rep2.metric_scaling_residual < 0.4 * rep.metric_scaling_residual);

    // scale invariance of the check
    GridField u0s = u0;
    for (auto& v : u0s.values()) v *= 3.0;
    auto rep3 = scaling_symmetry_check(u0s, 0.0, 0.5, 17);
    CHECK(rep3.lambda == doctest::Approx(rep.lambda).epsilon(1e-12));
}

TEST_CASE("scaling symmetry: null slice rejected") {
    GridField u0(2, {7, 7, 1}, {0, 0, 0}, {0.1, 0.1, 1}, 6);
    for (std::size_t node = 0; node < u0.node_count(); ++node)
        for (int c = 0; c < 6; ++c)
            u0.at(node, c) = semiflat::kSplitBasis[0][static_cast<std::size_t>(c)] +
                             semiflat::kSplitBasis[3][static_cast<std::size_t>(c)];  // null direction
    CHECK_THROWS_AS(scaling_symmetry_check(u0, 0.0, 0.5, 9), Error);
}

TEST_CASE("gauge slice: normalized cone slice has r = s = 0") {
    // r, s vanish identically at the continuum; the discrete values carry the
    // stencil truncation and refine quadratically
    GridField u0 = fixtures::sphere_slice(33);
    double h = u0.max_spacing();
    auto gs = gauge_slice(u0);
    CHECK(sup_norm(gs.r).value <= 10 * h * h);
    CHECK(sup_norm(gs.s).value <= 10 * h * h);
    CHECK(gs.integrability_residual <= 10 * h * h);
    CHECK(gs.c_gradient_residual < 1e-10);  // u ^ u = 2 exactly on this slice
    auto gs2 = gauge_slice(fixtures::sphere_slice(65));
    CHECK(sup_norm(gs2.r).value < 0.3 * sup_norm(gs.r).value);
}

TEST_CASE("gauge slice: conformal factor shows up as minus its gradient") {
    // By the defining relations r u^u = -u^(u_x): multiplying a normalized
    // slice by e^rho gives r = -d_x rho, s = -d_y rho (the corrective gauge
    // that removes it has gradient +(r, s)).
    GridField u0 = fixtures::sphere_slice(33);
    auto rho = [](double x, double y) { return 0.3 * x * x - 0.2 * x * y; };
    GridField us = u0;
    for (std::size_t node = 0; node < us.node_count(); ++node) {
        auto p = us.point(node);
        double f = std::exp(rho(p[0], p[1]));
        for (int c = 0; c < 6; ++c) us.at(node, c) *= f;
    }
    auto gs = gauge_slice(us);
    double h = us.max_spacing();
    double worst_r = 0.0, worst_s = 0.0;
    for (std::size_t node = 0; node < us.node_count(); ++node) {
        if (!us.is_interior(node, 1)) continue;
        auto p = us.point(node);
        double rho_x = 0.6 * p[0] - 0.2 * p[1];
        double rho_y = -0.2 * p[0];
        worst_r = std::max(worst_r, std::abs(gs.r.at(node, 0) + rho_x));
        worst_s = std::max(worst_s, std::abs(gs.s.at(node, 0) + rho_y));
    }
    CHECK(worst_r <= 10 * h * h);
    CHECK(worst_s <= 10 * h * h);
    CHECK(gs.integrability_residual <= 10 * h * h);

    // generic perturbation: diagnostic only, no exception
    GridField up = u0;
    for (std::size_t node = 0; node < up.node_count(); ++node) {
        auto p = up.point(node);
        up.at(node, 1) += 0.05 * p[0] * p[1] * p[1];
    }
    auto gp = gauge_slice(up);
    CHECK(gp.integrability_residual >= 0.0);
}

TEST_CASE("gauge slice: vanishing pairing rejected") {
    GridField u0(2, {7, 7, 1}, {0, 0, 0}, {0.1, 0.1, 1}, 6);
    for (std::size_t node = 0; node < u0.node_count(); ++node)
        for (int c = 0; c < 6; ++c)
            u0.at(node, c) = semiflat::kSplitBasis[0][static_cast<std::size_t>(c)] +
                             semiflat::kSplitBasis[3][static_cast<std::size_t>(c)];
    CHECK_THROWS_AS(gauge_slice(u0), Error);
}
