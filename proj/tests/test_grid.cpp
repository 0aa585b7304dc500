#include <doctest.h>

#include <cmath>
#include <random>

#include "core/grid.hpp"
#include "core/grid_io.hpp"
#include "fixtures.hpp"

using namespace g2sf;

namespace {

GridField grid2(std::size_t n, double lo, double hi, int comps) {
    double h = (hi - lo) / static_cast<double>(n - 1);
    return GridField(2, {n, n, 1}, {lo, lo, 0}, {h, h, 1}, comps);
}

}  // namespace

TEST_CASE("exterior derivative: affine data is exact") {
    // f = x^1 dx^2 on a 3D grid -> dx^1 ^ dx^2, no other components
    std::size_t n = 7;
    GridField f(3, {n, n, n}, {0, 0, 0}, {0.2, 0.2, 0.2}, 3);
    for (std::size_t node = 0; node < f.node_count(); ++node) {
        auto p = f.point(node);
        f.at(node, 1) = p[0];  // coefficient of dx^2
    }
    GridField d = exterior_derivative_grid(f, 1);
    REQUIRE(d.components() == 3);  // (12, 13, 23)
    for (std::size_t node = 0; node < d.node_count(); ++node) {
        CHECK(d.at(node, 0) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(std::abs(d.at(node, 1)) < 1e-14);
        CHECK(std::abs(d.at(node, 2)) < 1e-14);
    }
}

TEST_CASE("exterior derivative: analytic oracle and observed order on sin") {
    double prev = 0.0;
    for (int level = 0; level < 3; ++level) {
        std::size_t n = 17u << level;
        GridField f(3, {n + 1, 5, 5}, {0, 0, 0},
                    {1.0 / static_cast<double>(n), 0.25, 0.25}, 1);
        for (std::size_t node = 0; node < f.node_count(); ++node)
            f.at(node, 0) = std::sin(f.point(node)[0]);
        GridField d = exterior_derivative_grid(f, 0);
        double worst = 0.0;
        for (std::size_t node = 0; node < d.node_count(); ++node) {
            auto p = d.point(node);
            worst = std::max(worst, std::abs(d.at(node, 0) - std::cos(p[0])));
            CHECK(std::abs(d.at(node, 1)) < 1e-14);
            CHECK(std::abs(d.at(node, 2)) < 1e-14);
        }
        if (level > 0) {
            double order = std::log2(prev / worst);
            CHECK(order > 1.8);
            CHECK(order < 2.2);
        }
        prev = worst;
    }
}

TEST_CASE("exterior derivative: constant 2-form and d(d(smooth))") {
    std::size_t n = 9;
    GridField c(3, {n, n, n}, {0, 0, 0}, {0.1, 0.1, 0.1}, 3);
    for (std::size_t node = 0; node < c.node_count(); ++node)
        for (int k = 0; k < 3; ++k) c.at(node, k) = 2.0 - k;
    CHECK(sup_norm(exterior_derivative_grid(c, 2)).value == 0.0);

    GridField f(3, {n, n, n}, {0, 0, 0}, {0.1, 0.1, 0.1}, 1);
    for (std::size_t node = 0; node < f.node_count(); ++node) {
        auto p = f.point(node);
        f.at(node, 0) = std::sin(p[0] + 2 * p[1]) * std::exp(p[2]);
    }
    // difference operators along distinct axes commute, so dd is roundoff
    GridField dd = exterior_derivative_grid(exterior_derivative_grid(f, 0), 1);
    CHECK(sup_norm(dd).value < 1e-10);
}

TEST_CASE("exterior derivative: dimension guard") {
    GridField f = grid2(5, 0, 1, 1);
    CHECK_THROWS_AS(exterior_derivative_grid(f, 2), Error);
}

TEST_CASE("wirtinger: holomorphic and antiholomorphic monomials") {
    std::size_t n = 65;
    GridField f = grid2(n, -0.5, 0.5, 2);
    GridField g = grid2(n, -0.5, 0.5, 2);
    GridField k = grid2(n, -0.5, 0.5, 2);
    for (std::size_t node = 0; node < f.node_count(); ++node) {
        auto p = f.point(node);
        std::complex<double> z(p[0], p[1]);
        f.set_cplx(node, 0, z);
        g.set_cplx(node, 0, std::norm(z));
        k.set_cplx(node, 0, std::conj(z) * std::conj(z));
    }
    auto [fz, fzb] = wirtinger(f);
    auto [gz, gzb] = wirtinger(g);
    auto [kz, kzb] = wirtinger(k);
    for (std::size_t node = 0; node < f.node_count(); ++node) {
        auto p = f.point(node);
        std::complex<double> z(p[0], p[1]);
        CHECK(std::abs(fz.cplx(node, 0) - 1.0) < 1e-13);
        CHECK(std::abs(fzb.cplx(node, 0)) < 1e-13);
        CHECK(std::abs(gz.cplx(node, 0) - std::conj(z)) < 1e-12);
        CHECK(std::abs(gzb.cplx(node, 0) - z) < 1e-12);
        CHECK(std::abs(kz.cplx(node, 0)) < 1e-12);
        CHECK(std::abs(kzb.cplx(node, 0) - 2.0 * std::conj(z)) < 1e-12);
    }
}

TEST_CASE("wirtinger annihilates sampled holomorphic powers") {
    // central stencils are exact on polynomials of degree <= 2; the cubic
    // carries the analytic truncation error h^2 (2 h^2 in the one-sided
    // boundary layer), which the k = 3 bound pins exactly
    for (std::size_t n : {65, 129}) {
        GridField f = grid2(n, 0.0, 1.0, 2);
        double h = f.step(0);
        for (int k = 1; k <= 3; ++k) {
            for (std::size_t node = 0; node < f.node_count(); ++node) {
                auto p = f.point(node);
                f.set_cplx(node, 0, std::pow(std::complex<double>(p[0], p[1]), k));
            }
            auto [dz, dzb] = wirtinger(f);
            double worst = 0.0, worst_z = 0.0;
            for (std::size_t node = 0; node < f.node_count(); ++node) {
                worst = std::max(worst, std::abs(dzb.cplx(node, 0)));
                if (!f.is_interior(node, 1)) continue;  // mixed edge stencils lose the cancellation
                std::complex<double> zc(f.point(node)[0], f.point(node)[1]);
                worst_z = std::max(worst_z, std::abs(dz.cplx(node, 0) -
                                                     double(k) * std::pow(zc, k - 1)));
            }
            if (k <= 2)
                CHECK(worst <= 1e-12);
            else
                CHECK(worst <= 2.0 * h * h + 1e-12);
            CHECK(worst_z <= 1e-12);  // d/dz of holomorphic powers is exact here
        }
    }
}

TEST_CASE("wirtinger requires a 2D grid") {
    GridField f(1, {9, 1, 1}, {0, 0, 0}, {0.1, 1, 1}, 2);
    CHECK_THROWS_AS(wirtinger(f), Error);
}

TEST_CASE("grid file round-trip is bitwise exact") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> dist(-1e3, 1e3);
    GridField a(3, {4, 5, 3}, {0.1, -0.2, 0.3}, {0.25, 1.0 / 3.0, 0.125}, 2);
    for (auto& v : a.values()) v = dist(rng);
    GridField b(3, {4, 5, 3}, {0.1, -0.2, 0.3}, {0.25, 1.0 / 3.0, 0.125}, 7);
    for (auto& v : b.values()) v = dist(rng) * 1e-17;

    GridDoc doc;
    doc.add("alpha", a);
    doc.add("beta", b);
    std::string text = to_text(doc);
    GridDoc back = from_text(text);
    REQUIRE(back.fields.size() == 2);
    CHECK(back.fields[0].first == "alpha");
    CHECK(back.get("alpha").values() == a.values());
    CHECK(back.get("beta").values() == b.values());
    CHECK(back.get("alpha").origin() == a.origin());
    CHECK(back.get("alpha").spacing() == a.spacing());
    // serialize again: identical text
    CHECK(to_text(back) == text);
}

TEST_CASE("grid file rejects malformed input") {
    CHECK_THROWS_AS(from_text("not json"), Error);
    CHECK_THROWS_AS(from_text("{\"format_version\": 2}"), Error);
    CHECK_THROWS_AS(from_text("{\"format_version\":1,\"kind\":\"grid9d\"}"), Error);
}

TEST_CASE("grid invariants") {
    CHECK_THROWS_AS(GridField(3, {2, 5, 5}, {0, 0, 0}, {1, 1, 1}, 1), Error);
    CHECK_THROWS_AS(GridField(2, {5, 5, 1}, {0, 0, 0}, {0.0, 1, 1}, 1), Error);
    CHECK_THROWS_AS(GridField(2, {5, 5, 1}, {0, 0, 0}, {1, 1, 1}, 0), Error);
}

TEST_CASE("trim drops boundary layers and shifts the origin") {
    GridField f = grid2(7, 0.0, 0.6, 1);
    for (std::size_t node = 0; node < f.node_count(); ++node) f.at(node, 0) = static_cast<double>(node);
    GridField t = trim(f, 1);
    CHECK(t.shape()[0] == 5);
    CHECK(t.origin()[0] == doctest::Approx(0.1));
    CHECK(t.at(0, 0) == f.at(f.flat(1, 1), 0));
}
