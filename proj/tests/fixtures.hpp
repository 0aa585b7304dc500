#pragma once

// Shared fixtures and independent oracles for the test suites.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <functional>
#include <random>

#include "core/form.hpp"
#include "core/grid.hpp"
#include "core/semiflat.hpp"

namespace fixtures {

using namespace g2sf;

// ---- exterior-algebra oracles ------------------------------------------

// Wedge by brute-force antisymmetrization over permutations of the combined
// index tuple; independent of the production sign bookkeeping.
template <typename K>
Form<K> naive_wedge(const Form<K>& a, const Form<K>& b) {
    int k = a.degree() + b.degree();
    if (k > a.dim()) return Form<K>(a.dim(), a.dim());
    Form<K> out(a.dim(), k);
    for (const auto& [ma, ca] : a.terms())
        for (const auto& [mb, cb] : b.terms()) {
            auto axes_a = mask_axes(ma);
            auto axes_b = mask_axes(mb);
            std::vector<int> tuple = axes_a;
            tuple.insert(tuple.end(), axes_b.begin(), axes_b.end());
            // bubble sort counting swaps; duplicate index kills the term
            bool dup = false;
            int swaps = 0;
            for (std::size_t i = 0; i < tuple.size() && !dup; ++i)
                for (std::size_t j = i + 1; j < tuple.size(); ++j) {
                    if (tuple[i] == tuple[j]) {
                        dup = true;
                        break;
                    }
                    if (tuple[i] > tuple[j]) {
                        std::swap(tuple[i], tuple[j]);
                        ++swaps;
                    }
                }
            if (dup) continue;
            Mask m = 0;
            for (int ax : tuple) m |= Mask(1) << ax;
            out.add(m, K(swaps % 2 == 0 ? 1 : -1) * ca * cb);
        }
    return out;
}

// Solve a ^ X = <a, b> dvol over the monomial basis for X = *b; the defining
// identity as a linear system, no sign rules involved.
inline FormR brute_force_hodge(const FormR& b, const Signature& sig, int orientation) {
    int n = b.dim();
    int k = b.degree();
    FormR out(n, n - k);
    Mask full = (Mask(1) << n) - 1;
    // For each complementary monomial e^J there is exactly one monomial e^I
    // (I = J^c) with e^I ^ e^J = +-dvol, so each coefficient solves directly:
    // coeff_J * (e^{J^c} ^ e^J -> dvol sign) = <e^{J^c}, b> * orientation.
    for (Mask j : increasing_subsets(n, n - k)) {
        Mask i = full & ~j;
        FormR ei = FormR(n, k);
        ei.set(i, Rat(1));
        Rat rhs = inner(ei, b, sig) * Rat(orientation);
        int lhs_sign = wedge_sign(i, j);
        out.set(j, rhs / Rat(lhs_sign));
    }
    return out;
}

inline FormR random_form(std::mt19937& rng, int n, int k) {
    std::uniform_int_distribution<int> num(-9, 9);
    std::uniform_int_distribution<int> den(1, 4);
    FormR f(n, k);
    for (Mask m : increasing_subsets(n, k)) f.set(m, Rat(num(rng), den(rng)));
    return f;
}

// ---- grid fixtures -------------------------------------------------------

inline GridField scalar_grid_3d(std::size_t n, double lo, double hi,
                                const std::function<double(double, double, double)>& f) {
    double h = (hi - lo) / static_cast<double>(n - 1);
    GridField out(3, {n, n, n}, {lo, lo, lo}, {h, h, h}, 1);
    for (std::size_t node = 0; node < out.node_count(); ++node) {
        auto p = out.point(node);
        out.at(node, 0) = f(p[0], p[1], p[2]);
    }
    return out;
}

// Linear immersion through the self-dual frame: u(b) = b^mu omega_mu.
inline GridField linear_immersion(std::size_t n) {
    double h = 1.0 / static_cast<double>(n - 1);
    GridField u(3, {n, n, n}, {0, 0, 0}, {h, h, h}, 6);
    for (std::size_t node = 0; node < u.node_count(); ++node) {
        auto p = u.point(node);
        for (int c = 0; c < 6; ++c)
            u.at(node, c) = p[0] * semiflat::kSplitBasis[0][static_cast<std::size_t>(c)] +
                            p[1] * semiflat::kSplitBasis[1][static_cast<std::size_t>(c)] +
                            p[2] * semiflat::kSplitBasis[2][static_cast<std::size_t>(c)];
    }
    return u;
}

// Unit-sphere direction in the definite 3-plane, spherical angles (a, b).
inline void sphere_direction(double a, double b, double out[3]) {
    out[0] = std::cos(a) * std::cos(b);
    out[1] = std::sin(a) * std::cos(b);
    out[2] = std::sin(b);
}

// u(a, b, r) = r * n(a, b) in the self-dual 3-plane: the flat minimal cone.
// Angles in [-w/2, w/2]^2, radius last axis.
inline GridField sphere_cone_immersion(std::size_t nxy, std::size_t nr, double w = 1.0,
                                       double r0 = 1.0, double r1 = 2.0) {
    GridField u(3, {nxy, nxy, nr}, {-w / 2, -w / 2, r0},
                {w / static_cast<double>(nxy - 1), w / static_cast<double>(nxy - 1),
                 (r1 - r0) / static_cast<double>(nr - 1)},
                6);
    for (std::size_t node = 0; node < u.node_count(); ++node) {
        auto p = u.point(node);
        double nv[3];
        sphere_direction(p[0], p[1], nv);
        for (int c = 0; c < 6; ++c)
            u.at(node, c) =
                p[2] * (nv[0] * semiflat::kSplitBasis[0][static_cast<std::size_t>(c)] +
                        nv[1] * semiflat::kSplitBasis[1][static_cast<std::size_t>(c)] +
                        nv[2] * semiflat::kSplitBasis[2][static_cast<std::size_t>(c)]);
    }
    return u;
}

// 2D slice of the cone at r = 1 (the unit-sphere directions themselves).
inline GridField sphere_slice(std::size_t n, double w = 0.8) {
    GridField u(2, {n, n, 1}, {-w / 2, -w / 2, 0},
                {w / static_cast<double>(n - 1), w / static_cast<double>(n - 1), 1.0}, 6);
    for (std::size_t node = 0; node < u.node_count(); ++node) {
        auto p = u.point(node);
        double nv[3];
        sphere_direction(p[0], p[1], nv);
        for (int c = 0; c < 6; ++c)
            u.at(node, c) = nv[0] * semiflat::kSplitBasis[0][static_cast<std::size_t>(c)] +
                            nv[1] * semiflat::kSplitBasis[1][static_cast<std::size_t>(c)] +
                            nv[2] * semiflat::kSplitBasis[2][static_cast<std::size_t>(c)];
    }
    return u;
}

// Stereographic round sphere in the definite 3-plane of R^{3,3}.
inline GridField stereographic_sphere(std::size_t n, double w = 0.8) {
    GridField phi(2, {n, n, 1}, {-w / 2, -w / 2, 0},
                  {w / static_cast<double>(n - 1), w / static_cast<double>(n - 1), 1.0}, 6);
    for (std::size_t node = 0; node < phi.node_count(); ++node) {
        auto p = phi.point(node);
        double x = p[0], y = p[1], d = 1 + x * x + y * y;
        phi.at(node, 0) = 2 * x / d;
        phi.at(node, 1) = 2 * y / d;
        phi.at(node, 2) = (1 - x * x - y * y) / d;
        phi.at(node, 3) = phi.at(node, 4) = phi.at(node, 5) = 0.0;
    }
    return phi;
}

// Angular unit sphere in the definite 3-plane (gentler derivatives).
inline GridField angular_sphere(std::size_t n, double w = 1.0) {
    GridField phi(2, {n, n, 1}, {-w / 2, -w / 2, 0},
                  {w / static_cast<double>(n - 1), w / static_cast<double>(n - 1), 1.0}, 6);
    for (std::size_t node = 0; node < phi.node_count(); ++node) {
        auto p = phi.point(node);
        double nv[3];
        sphere_direction(p[0], p[1], nv);
        phi.at(node, 0) = nv[0];
        phi.at(node, 1) = nv[1];
        phi.at(node, 2) = nv[2];
        phi.at(node, 3) = phi.at(node, 4) = phi.at(node, 5) = 0.0;
    }
    return phi;
}

// Superconformal Clifford torus in S^5 subset R^{6,0}.
inline GridField clifford_torus(std::size_t n) {
    double L = 2.0 * M_PI, h = L / static_cast<double>(n - 1);
    GridField phi(2, {n, n, 1}, {0, 0, 0}, {h, h, 1.0}, 6);
    for (std::size_t node = 0; node < phi.node_count(); ++node) {
        auto p = phi.point(node);
        for (int k = 0; k < 3; ++k) {
            double th = 2.0 * M_PI * k / 3.0;
            double u = std::sqrt(2.0) * (p[0] * std::cos(th) + p[1] * std::sin(th));
            phi.at(node, 2 * k) = std::cos(u) / std::sqrt(3.0);
            phi.at(node, 2 * k + 1) = std::sin(u) / std::sqrt(3.0);
        }
    }
    return phi;
}

// Radially symmetric solution of det Hess = 1: f'(rho) = (rho^3 + 1)^{1/3},
// values by high-order quadrature (the ODE oracle for the Monge-Ampere MMS).
inline GridField radial_ma_potential(std::size_t n, double lo = 0.55, double hi = 1.45) {
    auto fp = [](double rho) { return std::cbrt(rho * rho * rho + 1.0); };
    auto F = [&](double rho) {
        return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(fp, 1.0, rho, 10,
                                                                             1e-14);
    };
    return scalar_grid_3d(n, lo, hi, [&](double x, double y, double z) {
        return F(std::sqrt(x * x + y * y + z * z));
    });
}

// Pointwise value order check at the aligned center node of dyadic grids.
inline double center_value(const GridField& f, int c = 0) {
    auto sh = f.shape();
    return f.at(f.flat((sh[0] - 1) / 2, (sh[1] - 1) / 2, f.dim() > 2 ? (sh[2] - 1) / 2 : 0), c);
}

}  // namespace fixtures
