#include <doctest.h>

#include <cmath>

#include "core/quadric.hpp"
#include "fixtures.hpp"

using namespace g2sf;
using namespace g2sf::quadric;

TEST_CASE("surface map: quadric constraint enforced") {
    GridField off = fixtures::stereographic_sphere(9);
    for (auto& v : off.values()) v *= 2.0;  // <phi,phi> = 4
    CHECK_THROWS_AS(SurfaceMap(off, Signature(3, 3), 1.0), Error);
}

TEST_CASE("harmonicity and conformality gates on the fixtures") {
    double prev_h = 0.0, prev_c = 0.0;
    int level = 0;
    for (std::size_t n : {17, 33, 65}) {
        SurfaceMap m(fixtures::stereographic_sphere(n), Signature(3, 3), 1.0);
        double harm = sup_norm(harmonicity_residual(m), 2).value;
        double conf = sup_norm(conformality_residual(m), 2).value;
        double h = m.phi.max_spacing();
        CHECK(harm <= 10 * h * h);
        CHECK(conf <= 10 * h * h);
        if (level > 0) {
            CHECK(prev_h / harm > 3.0);
            CHECK(prev_c / conf > 3.0);
        }
        prev_h = harm;
        prev_c = conf;
        ++level;
    }
    SurfaceMap torus(fixtures::clifford_torus(65), Signature(6, 0), 1.0);
    double h = torus.phi.max_spacing();
    CHECK(sup_norm(harmonicity_residual(torus), 2).value <= 10 * h * h);
    CHECK(sup_norm(conformality_residual(torus), 2).value <= 10 * h * h);
}

TEST_CASE("non-conformal parametrization is flagged by the residuals") {
    // stretch the sphere chart: (x, 2y)
    std::size_t n = 33;
    GridField phi(2, {n, n, 1}, {-0.4, -0.2, 0}, {0.8 / (n - 1), 0.4 / (n - 1), 1.0}, 6);
    for (std::size_t node = 0; node < phi.node_count(); ++node) {
        auto p = phi.point(node);
        double x = p[0], y = 2.0 * p[1], d = 1 + x * x + y * y;
        phi.at(node, 0) = 2 * x / d;
        phi.at(node, 1) = 2 * y / d;
        phi.at(node, 2) = (1 - x * x - y * y) / d;
    }
    SurfaceMap m(phi, Signature(3, 3), 1.0);
    CHECK(sup_norm(conformality_residual(m), 2).value > 0.1);
    auto s = build_sequence(m);
    CHECK(s.classification == Classification::inapplicable);
}

TEST_CASE("non-minimal surface: harmonicity residual bounded below") {
    // squashed sphere renormalized onto the quadric: conformal enough to
    // sample but nowhere minimal
    std::size_t n = 33;
    GridField phi(2, {n, n, 1}, {-0.4, -0.4, 0}, {0.8 / (n - 1), 0.8 / (n - 1), 1.0}, 6);
    for (std::size_t node = 0; node < phi.node_count(); ++node) {
        auto p = phi.point(node);
        double x = p[0], y = p[1], d = 1 + x * x + y * y;
        double v[3] = {2 * x / d, 2 * y / d, 2.0 * (1 - x * x - y * y) / d};  // stretched pole axis
        double norm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        phi.at(node, 0) = v[0] / norm;
        phi.at(node, 1) = v[1] / norm;
        phi.at(node, 2) = v[2] / norm;
    }
    SurfaceMap m(phi, Signature(3, 3), 1.0);
    CHECK(sup_norm(harmonicity_residual(m), 2).value > 0.1);
}

TEST_CASE("sphere: totally geodesic, r = 1, degenerate with early termination") {
    SurfaceMap m(fixtures::stereographic_sphere(65), Signature(3, 3), 1.0);
    auto s = build_sequence(m);
    CHECK(s.isotropy_order == 1);
    CHECK(s.classification == Classification::degenerate);
    CHECK(s.note.find("level 2") != std::string::npos);
    // phi_2 ~ 0 and h_2 ~ 0 on the analyzed subdomain
    double h = m.phi.max_spacing();
    double phi2 = 0.0, h2 = 0.0;
    for (std::size_t node = 0; node < m.phi.node_count(); ++node) {
        if (!m.phi.is_interior(node, s.margin)) continue;
        for (int c = 0; c < 12; ++c) phi2 = std::max(phi2, std::abs(s.level(2).values()[node * 12 + static_cast<std::size_t>(c)]));
        h2 = std::max(h2, std::abs(s.h_level(2).at(node, 0)));
    }
    CHECK(phi2 <= 10 * h * h);
    CHECK(h2 <= 10 * h * h);

    auto rel = verify_sequence_relations(s);
    CHECK(rel.hermitian_orthogonality <= 10 * h * h);
    CHECK(rel.recursion_z <= 10 * h * h);
    CHECK(rel.recursion_zbar <= 10 * h * h);
}

TEST_CASE("clifford torus: r = 2 superconformal with the frozen level constants") {
    std::size_t n = 129;
    SurfaceMap m(fixtures::clifford_torus(n), Signature(6, 0), 1.0);
    auto s = build_sequence(m);
    double h = m.phi.max_spacing();
    CHECK(s.isotropy_order == 2);
    CHECK(s.classification == Classification::superconformal);

    // golden level constants 1/2, 1/4, 1/8 (verified analytically from the
    // fixture: h_i = <phi_i, conj phi_i> with phi_i the plain z-derivatives)
    const double expected[3] = {0.5, 0.25, 0.125};
    for (int i = 1; i <= 3; ++i) {
        double mn = 1e300, mx = -1e300;
        const GridField& hf = s.h_level(i);
        for (std::size_t node = 0; node < hf.node_count(); ++node) {
            if (!hf.is_interior(node, s.margin)) continue;
            mn = std::min(mn, hf.at(node, 0));
            mx = std::max(mx, hf.at(node, 0));
        }
        CHECK(std::abs(mn - expected[i - 1]) <= 10 * h * h);
        CHECK(std::abs(mx - expected[i - 1]) <= 10 * h * h);
        CHECK(mx - mn <= 10 * h * h);  // spatially constant
        CHECK(s.eps_level(i) == 1);
    }

    auto rel = verify_sequence_relations(s);
    CHECK(rel.hermitian_orthogonality <= 10 * h * h);
    CHECK(rel.top_orthogonality <= 10 * h * h);
    CHECK(rel.top_holomorphy <= 10 * h * h);
    CHECK(rel.recursion_z <= 10 * h * h);
    CHECK(rel.recursion_zbar <= 10 * h * h);
    CHECK(rel.toda_h_form <= 10 * h * h);
}

TEST_CASE("corrupted sequence: swapped levels break the recursion relations") {
    SurfaceMap m(fixtures::clifford_torus(65), Signature(6, 0), 1.0);
    auto s = build_sequence(m);
    std::swap(s.phi[1], s.phi[2]);  // pairwise orthogonality survives a swap
    auto rel = verify_sequence_relations(s);
    CHECK(rel.recursion_z > 0.1);
    CHECK(rel.recursion_zbar > 0.1);

    // corrupting a single level against the others does break orthogonality
    auto s2 = build_sequence(m);
    s2.phi[2] = s2.phi[0];
    auto rel2 = verify_sequence_relations(s2);
    CHECK(rel2.hermitian_orthogonality > 0.1);
}

TEST_CASE("induced metric must be positive") {
    // put the sphere into negative slots: h_1 < 0
    std::size_t n = 17;
    GridField phi(2, {n, n, 1}, {-0.4, -0.4, 0}, {0.8 / (n - 1), 0.8 / (n - 1), 1.0}, 6);
    for (std::size_t node = 0; node < phi.node_count(); ++node) {
        auto p = phi.point(node);
        double x = p[0], y = p[1], d = 1 + x * x + y * y;
        phi.at(node, 3) = 2 * x / d;
        phi.at(node, 4) = 2 * y / d;
        phi.at(node, 5) = (1 - x * x - y * y) / d;
    }
    // <phi,phi> = -1: a valid surface in the h0 = -1 quadric, but the induced
    // metric is negative definite
    SurfaceMap m(phi, Signature(3, 3), -1.0);
    CHECK_THROWS_AS(build_sequence(m), Error);
}

TEST_CASE("toda data: torus signs, constants, holomorphic q") {
    SurfaceMap m(fixtures::clifford_torus(129), Signature(6, 0), 1.0);
    auto s = build_sequence(m);
    auto td = extract_toda_data(s);
    double h = m.phi.max_spacing();
    REQUIRE(td.mu.size() == 3);
    CHECK(td.mu[0] == 1);  // definite signature: all eps = +1, all mu = +1
    CHECK(td.mu[1] == 1);
    CHECK(td.mu[2] == 1);
    CHECK(td.eps_tilde == 1);
    CHECK(td.toda_residual <= 10 * h * h);
    CHECK(td.q_holomorphy <= 10 * h * h);
    // |q| = sqrt(h_3) = 2^{-3/2}, constant
    for (std::size_t node : {m.phi.flat(64, 64), m.phi.flat(30, 90)})
        CHECK(std::abs(td.q.cplx(node, 0)) == doctest::Approx(std::pow(2.0, -1.5)).epsilon(1e-2));
}

TEST_CASE("toda data: superminimal input has no q") {
    SurfaceMap m(fixtures::stereographic_sphere(33), Signature(3, 3), 1.0);
    auto s = build_sequence(m);
    // r = 1 in ambient dimension 6: degenerate, and extraction must refuse
    CHECK_THROWS_AS(extract_toda_data(s), Error);
}

TEST_CASE("toda data: (3,3) sign pattern is forced by the hermitian signature") {
    // A synthetic superconformal record in signature (3,3), h0 = +1:
    // counting positive directions of the hermitian form on
    // (phi0, phi1, conj phi1, phi2, conj phi2, phit) forces
    // eps = (+1, -1) and eps~ = -1, i.e. mu = (1, -1, 1).
    // (No closed-form superconformal (3,3) fixture is available without
    // integrating a Toda frame, so the sign logic is exercised directly.)
    int h0 = 1, eps1 = 1, eps2 = -1, eps_tilde = -1;
    int positives = 1 * (h0 > 0) + 2 * (eps1 > 0) + 2 * (eps2 > 0) + 1 * (eps_tilde > 0);
    CHECK(positives == 3);  // matches p = 3
    std::vector<int> eps0_chain = {h0, eps1, eps2};
    std::vector<int> mu;
    for (std::size_t i = 1; i < eps0_chain.size(); ++i)
        mu.push_back(eps0_chain[i - 1] * eps0_chain[i]);
    mu.push_back(eps_tilde * eps2);
    CHECK(mu == std::vector<int>{1, -1, 1});
}

TEST_CASE("weierstrass: constant null curve integrates to a plane") {
    HolomorphicCurve c;
    c.sig = Signature(2, 3);
    c.coefficients = {{{1, 0}, {0, 1}, {0, 0}, {0, 0}, {0, 0}}};
    c.base_point = {0.5, 0, 0, 0, 0};
    CHECK(curve_null_polynomial(c).coeff.empty());
    GridField phi = weierstrass_integrate(c, -1, 1, -1, 1, 17);
    for (std::size_t node = 0; node < phi.node_count(); ++node) {
        auto p = phi.point(node);
        CHECK(phi.at(node, 0) == doctest::Approx(0.5 + p[0]).epsilon(1e-14));
        CHECK(phi.at(node, 1) == doctest::Approx(-p[1]).epsilon(1e-14));
        CHECK(std::abs(phi.at(node, 2)) < 1e-14);
    }
}

TEST_CASE("weierstrass: quadratic null curve is flat-harmonic and conformal") {
    // tau = (1 - z^2, i(1 + z^2), 2iz, 0, 0): <tau,tau> = 0 exactly,
    // <tau, conj tau> = 2 (1 - |z|^2)^2 > 0 away from the unit circle
    HolomorphicCurve c;
    c.sig = Signature(2, 3);
    c.coefficients = {{{1, 0}, {0, 1}, {0, 0}, {0, 0}, {0, 0}},
                      {{0, 0}, {0, 0}, {0, 2}, {0, 0}, {0, 0}},
                      {{-1, 0}, {0, 1}, {0, 0}, {0, 0}, {0, 0}}};
    c.base_point = {0, 0, 0, 0, 0};
    CHECK(curve_null_polynomial(c).coeff.empty());
    GridField phi = weierstrass_integrate(c, -0.6, 0.6, -0.6, 0.6, 65);

    GridField lx = second_derivative_same_axis(phi, 0);
    GridField ly = second_derivative_same_axis(phi, 1);
    double harm = 0.0;
    for (std::size_t node = 0; node < phi.node_count(); ++node)
        for (int cc = 0; cc < 5; ++cc)
            harm = std::max(harm, std::abs(0.25 * (lx.at(node, cc) + ly.at(node, cc))));
    CHECK(harm <= 1e-10);  // cubic data: compact stencils are exact

    // <phi_z, phi_z> = <tau,tau>/4 = 0 and <phi_z, conj phi_z> = <tau, conj tau>/4 > 0
    GridField phic = phi.like(10);
    for (std::size_t node = 0; node < phi.node_count(); ++node)
        for (int cc = 0; cc < 5; ++cc) phic.at(node, 2 * cc) = phi.at(node, cc);
    auto [dz, dzb] = wirtinger(phic);
    Signature sig(2, 3);
    for (std::size_t node : {phi.flat(32, 32), phi.flat(10, 50)}) {
        std::complex<double> null = 0.0;
        double herm = 0.0;
        for (int cc = 0; cc < 5; ++cc) {
            null += static_cast<double>(sig.eps(cc)) * dz.cplx(node, cc) * dz.cplx(node, cc);
            herm += sig.eps(cc) * std::norm(dz.cplx(node, cc));
        }
        double hg = phi.max_spacing();
        CHECK(std::abs(null) <= 10 * hg * hg);
        auto p = phi.point(node);
        double z2 = p[0] * p[0] + p[1] * p[1];
        CHECK(std::abs(herm - 0.5 * (1 - z2) * (1 - z2)) <= 10 * hg * hg);
    }
}

TEST_CASE("weierstrass: non-null curve rejected exactly") {
    HolomorphicCurve c;
    c.sig = Signature(2, 3);
    c.coefficients = {{{1, 0}, {1, 0}, {0, 0}, {0, 0}, {0, 0}}};  // <tau,tau> = 2
    c.base_point = {0, 0, 0, 0, 0};
    CHECK_THROWS_AS(weierstrass_integrate(c, -1, 1, -1, 1, 9), Error);
}

TEST_CASE("weierstrass: degenerate hermitian norm rejected with a node") {
    // the quadratic curve degenerates on |z| = 1: include it in the domain
    HolomorphicCurve c;
    c.sig = Signature(2, 3);
    c.coefficients = {{{1, 0}, {0, 1}, {0, 0}, {0, 0}, {0, 0}},
                      {{0, 0}, {0, 0}, {0, 2}, {0, 0}, {0, 0}},
                      {{-1, 0}, {0, 1}, {0, 0}, {0, 0}, {0, 0}}};
    c.base_point = {0, 0, 0, 0, 0};
    CHECK_THROWS_AS(weierstrass_integrate(c, 0.0, 2.0, -1.0, 1.0, 9), Error);
}

TEST_CASE("curve files round-trip") {
    HolomorphicCurve c;
    c.sig = Signature(2, 3);
    c.coefficients = {{{1, 0}, {0, 1}, {0, 0}, {0, 0}, {0, 0}},
                      {{0, 0}, {0, 0}, {0, 2}, {0, 0}, {0, 0}}};
    c.base_point = {0, 0.25, 0, 0, -1};
    auto back = parse_curve(curve_to_text(c));
    CHECK(back.sig.p == 2);
    CHECK(back.sig.q == 3);
    CHECK(back.coefficients == c.coefficients);
    CHECK(back.base_point == c.base_point);
    CHECK_THROWS_AS(parse_curve("{"), Error);
    CHECK_THROWS_AS(parse_curve("{\"format_version\":1,\"kind\":\"grid3d\"}"), Error);
}
