#include "core/semiflat.hpp"

#include <cmath>
#include <sstream>

#include "core/errors.hpp"
#include "core/g2.hpp"
#include "core/metric_ops.hpp"
#include "core/parallel.hpp"

namespace g2sf::semiflat {

ImmersionField::ImmersionField(GridField u_, double tau_) : u(std::move(u_)), tau(tau_) {
    require(u.dim() == 3, ErrorKind::invalid_argument, "ImmersionField: base grid must be 3D");
    require(u.components() == 6, ErrorKind::invalid_argument,
            "ImmersionField: u needs the 6 components of a 2-form on T^4");
    require(tau > 0.0, ErrorKind::invalid_argument, "ImmersionField: tau must be positive");
}

namespace {

bool sym3_positive_definite(const Eigen::Matrix3d& m) {
    if (m(0, 0) <= 0.0) return false;
    if (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) <= 0.0) return false;
    return m.determinant() > 0.0;
}

[[noreturn]] void report_indefinite(const GridField& h, std::size_t node, const char* who) {
    Eigen::Matrix3d m = sym_unpack(h, node, 3);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m);
    std::ostringstream os;
    os << who << ": pulled-back metric not positive definite at node " << format_node(h, node)
       << "; eigenvalues";
    for (int i = 0; i < 3; ++i) os << " " << es.eigenvalues()(i);
    fail_numeric(os.str());
}

}  // namespace

GridField pullback_metric(const ImmersionField& f) {
    std::array<GridField, 3> du = {derivative(f.u, 0), derivative(f.u, 1), derivative(f.u, 2)};
    GridField h = f.u.like(6);
    const double inv2tau = 1.0 / (2.0 * f.tau);
    parallel_for(f.u.node_count(), [&](std::size_t node) {
        double p[3][6];
        for (int m = 0; m < 3; ++m)
            for (int c = 0; c < 6; ++c) p[m][c] = du[static_cast<std::size_t>(m)].at(node, c);
        for (int a = 0; a < 3; ++a)
            for (int b = a; b < 3; ++b)
                h.at(node, sym_index(3, a, b)) = inv2tau * wedge_pairing(p[a], p[b]);
    });
    auto bad = parallel_find_first(h.node_count(), [&](std::size_t node) {
        return !sym3_positive_definite(sym_unpack(h, node, 3));
    });
    if (bad.first) report_indefinite(h, bad.second, "pullback_metric");
    return h;
}

SemiflatG2 build_phi_psi(const ImmersionField& f) {
    SemiflatG2 s;
    s.tau = f.tau;
    s.h = pullback_metric(f);
    {
        // a definite associative form needs the image frame positively
        // oriented against the self-dual 3-plane, not just h > 0
        std::array<GridField, 3> du = {derivative(f.u, 0), derivative(f.u, 1), derivative(f.u, 2)};
        auto bad = parallel_find_first(f.u.node_count(), [&](std::size_t node) {
            Eigen::Matrix3d c;
            for (int mu = 0; mu < 3; ++mu) {
                double p[6];
                for (int k = 0; k < 6; ++k) p[k] = du[static_cast<std::size_t>(mu)].at(node, k);
                for (int m = 0; m < 3; ++m)
                    c(m, mu) = 0.5 * wedge_pairing(p, kSplitBasis[static_cast<std::size_t>(m)].data());
            }
            return c.determinant() <= 0.0;
        });
        if (bad.first)
            fail_numeric("build_phi_psi: image frame is negatively oriented against the "
                         "self-dual 3-plane at node " + format_node(f.u, bad.second) +
                         "; reorder two base axes to fix the orientation");
    }
    s.sqrt_det_h = f.u.like(1);
    s.theta = f.u.like(18);
    s.psi_cross = f.u.like(18);

    std::array<GridField, 3> du = {derivative(f.u, 0), derivative(f.u, 1), derivative(f.u, 2)};
    parallel_for(f.u.node_count(), [&](std::size_t node) {
        Eigen::Matrix3d hm = sym_unpack(s.h, node, 3);
        double det = hm.determinant();
        double vol = std::sqrt(det);
        s.sqrt_det_h.at(node, 0) = vol;
        Eigen::Matrix3d hinv = hm.inverse();
        for (int mu = 0; mu < 3; ++mu)
            for (int c = 0; c < 6; ++c)
                s.theta.at(node, 6 * mu + c) = du[static_cast<std::size_t>(mu)].at(node, c);
        // *_3 db^mu on base pairs (db12, db13, db23):
        //   (db12) <- vol * h^{mu 2}, (db13) <- -vol * h^{mu 1}, (db23) <- vol * h^{mu 0}
        for (int c = 0; c < 6; ++c) {
            double t0 = s.theta.at(node, 0 + c), t1 = s.theta.at(node, 6 + c), t2 = s.theta.at(node, 12 + c);
            s.psi_cross.at(node, 0 + c) = vol * (hinv(0, 2) * t0 + hinv(1, 2) * t1 + hinv(2, 2) * t2);
            s.psi_cross.at(node, 6 + c) = -vol * (hinv(0, 1) * t0 + hinv(1, 1) * t1 + hinv(2, 1) * t2);
            s.psi_cross.at(node, 12 + c) = vol * (hinv(0, 0) * t0 + hinv(1, 0) * t1 + hinv(2, 0) * t2);
        }
    });
    return s;
}

ClosureResiduals closure_residuals(const SemiflatG2& s) {
    ClosureResiduals out;
    // d(phi): the dvol_h term contributes no 4-form monomial over a 3D base,
    // so only the antisymmetrized base derivatives of theta remain.
    for (int c = 0; c < 6; ++c) {
        GridField slice = s.theta.like(3);
        parallel_for(slice.node_count(), [&](std::size_t node) {
            for (int mu = 0; mu < 3; ++mu) slice.at(node, mu) = s.theta.at(node, 6 * mu + c);
        });
        GridField d = exterior_derivative_grid(slice, 1);
        SupNorm sn = sup_norm(d, kResidualMargin);
        if (sn.value > out.dphi.value) out.dphi = sn;
    }
    // d(psi): tau is constant, so only the base derivative of the cross part.
    for (int c = 0; c < 6; ++c) {
        GridField slice = s.psi_cross.like(3);
        parallel_for(slice.node_count(), [&](std::size_t node) {
            for (int a = 0; a < 3; ++a) slice.at(node, a) = s.psi_cross.at(node, 6 * a + c);
        });
        GridField d = exterior_derivative_grid(slice, 2);
        SupNorm sn = sup_norm(d, kResidualMargin);
        if (sn.value > out.dpsi.value) out.dpsi = sn;
    }
    return out;
}

GridField harmonicity_residual(const ImmersionField& f) {
    GridField h = pullback_metric(f);
    GridField gamma = christoffel_field(h);

    std::array<GridField, 3> du = {derivative(f.u, 0), derivative(f.u, 1), derivative(f.u, 2)};
    std::array<GridField, 6> d2u;  // symmetric pair order
    for (int a = 0; a < 3; ++a)
        d2u[static_cast<std::size_t>(sym_index(3, a, a))] = second_derivative_same_axis(f.u, a);
    d2u[static_cast<std::size_t>(sym_index(3, 0, 1))] = derivative(du[0], 1);
    d2u[static_cast<std::size_t>(sym_index(3, 0, 2))] = derivative(du[0], 2);
    d2u[static_cast<std::size_t>(sym_index(3, 1, 2))] = derivative(du[1], 2);

    GridField out = f.u.like(6);
    parallel_for(f.u.node_count(), [&](std::size_t node) {
        Eigen::Matrix3d hinv = sym_unpack(h, node, 3).inverse();
        double laplace_b[3];
        for (int g = 0; g < 3; ++g) {
            double acc = 0.0;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    acc += hinv(a, b) * gamma.at(node, g * 6 + sym_index(3, a, b));
            laplace_b[g] = -acc;
        }
        for (int c = 0; c < 6; ++c) {
            double acc = 0.0;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    acc += hinv(a, b) * d2u[static_cast<std::size_t>(sym_index(3, a, b))].at(node, c);
            for (int g = 0; g < 3; ++g) acc += laplace_b[g] * du[static_cast<std::size_t>(g)].at(node, c);
            out.at(node, c) = acc;
        }
    });
    return out;
}

std::array<double, 35> phi_components_at(const SemiflatG2& s, std::size_t node) {
    std::array<double, 35> comps{};
    const auto& l3 = lambda3_r7_indices();
    auto pos = [&](Mask m) {
        for (std::size_t i = 0; i < l3.size(); ++i)
            if (l3[i] == m) return i;
        fail_invalid("phi_components_at: bad mask");
    };
    comps[pos(0b0000111)] = s.sqrt_det_h.at(node, 0);
    auto fiber_pairs = increasing_subsets(4, 2);
    for (int mu = 0; mu < 3; ++mu)
        for (std::size_t c = 0; c < 6; ++c) {
            Mask fibre = fiber_pairs[c] << 3;
            comps[pos((Mask(1) << mu) | fibre)] = s.theta.at(node, 6 * mu + static_cast<int>(c));
        }
    return comps;
}

namespace {

// Hodge star on 2-forms of R^4 for a metric G (orientation +dx^{1234}).
void star2_4d(const Eigen::Matrix4d& g, const double* t, double* out) {
    Eigen::Matrix4d ginv = g.inverse();
    double vol = std::sqrt(g.determinant());
    auto pairs = increasing_subsets(4, 2);
    double raised[6];
    for (std::size_t ab = 0; ab < 6; ++ab) {
        auto axes = mask_axes(pairs[ab]);
        double acc = 0.0;
        for (std::size_t cd = 0; cd < 6; ++cd) {
            auto src = mask_axes(pairs[cd]);
            acc += (ginv(axes[0], src[0]) * ginv(axes[1], src[1]) -
                    ginv(axes[0], src[1]) * ginv(axes[1], src[0])) *
                   t[cd];
        }
        raised[ab] = acc;
    }
    for (std::size_t cd = 0; cd < 6; ++cd) {
        Mask comp = 0b1111 & ~pairs[cd];
        std::size_t ab = 0;
        while (pairs[ab] != comp) ++ab;
        out[cd] = vol * wedge_sign(comp, pairs[cd]) * raised[ab];
    }
}

}  // namespace

SupNorm theta_selfduality_residual(const SemiflatG2& s) {
    auto m = parallel_max(s.theta.node_count(), [&](std::size_t node) -> double {
        auto comps = phi_components_at(s, node);
        auto mv = g2_metric_dense(comps);
        Eigen::Matrix4d fibre = mv.metric.block<4, 4>(3, 3);
        double worst = 0.0;
        for (int mu = 0; mu < 3; ++mu) {
            double t[6], st[6];
            for (int c = 0; c < 6; ++c) t[c] = s.theta.at(node, 6 * mu + c);
            star2_4d(fibre, t, st);
            for (int c = 0; c < 6; ++c) worst = std::max(worst, std::abs(st[c] - t[c]));
        }
        return worst;
    });
    return {m.value, m.index};
}

ScalingSymmetryReport scaling_symmetry_check(const GridField& u0, double t0, double t1,
                                             std::size_t nt, double tau) {
    require(u0.dim() == 2 && u0.components() == 6, ErrorKind::invalid_argument,
            "scaling_symmetry_check: u0 must be a 2D grid with 6 components");
    require(nt >= 3 && t1 > t0, ErrorKind::invalid_argument,
            "scaling_symmetry_check: need an increasing t-range with >= 3 samples");

    double scale = 0.0;
    for (std::size_t node = 0; node < u0.node_count(); ++node)
        for (int c = 0; c < 6; ++c) scale = std::max(scale, std::abs(u0.at(node, c)));
    auto null_node = parallel_find_first(u0.node_count(), [&](std::size_t node) {
        double p[6];
        for (int c = 0; c < 6; ++c) p[c] = u0.at(node, c);
        return std::abs(wedge_pairing(p, p)) <= 1e-10 * scale * scale;
    });
    if (null_node.first)
        fail_numeric("scaling_symmetry_check: u0 ^ u0 vanishes at node " +
                     format_node(u0, null_node.second));

    GridField u3(3, {u0.shape()[0], u0.shape()[1], nt}, {u0.origin()[0], u0.origin()[1], t0},
                 {u0.spacing()[0], u0.spacing()[1], (t1 - t0) / static_cast<double>(nt - 1)}, 6);
    parallel_for(u3.node_count(), [&](std::size_t node) {
        auto idx = u3.unflat(node);
        double et = std::exp(u3.coord(2, idx[2]));
        std::size_t n0 = u0.flat(idx[0], idx[1]);
        for (int c = 0; c < 6; ++c) u3.at(node, c) = et * u0.at(n0, c);
    });

    ImmersionField field(std::move(u3), tau);
    SemiflatG2 s = build_phi_psi(field);
    GridField dtheta = derivative(s.theta, 2);
    GridField dvol_t = derivative(s.sqrt_det_h, 2);

    ScalingSymmetryReport rep;
    double num = parallel_sum(s.theta.node_count(), [&](std::size_t node) {
        double acc = 0.0;
        for (int c = 0; c < 18; ++c) acc += dtheta.at(node, c) * s.theta.at(node, c);
        return acc;
    });
    double den = parallel_sum(s.theta.node_count(), [&](std::size_t node) {
        double acc = 0.0;
        for (int c = 0; c < 18; ++c) acc += s.theta.at(node, c) * s.theta.at(node, c);
        return acc;
    });
    require(den > 0.0, ErrorKind::numeric, "scaling_symmetry_check: vanishing theta");
    const double lambda = num / den;
    rep.lambda = lambda;

    auto lie = parallel_max(s.theta.node_count(), [&](std::size_t node) -> double {
        if (!s.theta.is_interior(node, kResidualMargin)) return -1.0;
        double worst = 0.0;
        for (int c = 0; c < 18; ++c)
            worst = std::max(worst, std::abs(dtheta.at(node, c) - lambda * s.theta.at(node, c)));
        worst = std::max(worst, std::abs(dvol_t.at(node, 0) - 3.0 * lambda * s.sqrt_det_h.at(node, 0)));
        return worst;
    });
    rep.lie_residual = std::max(lie.value, 0.0);

    auto divr = parallel_max(s.sqrt_det_h.node_count(), [&](std::size_t node) -> double {
        if (!s.sqrt_det_h.is_interior(node, kResidualMargin)) return -1.0;
        return std::abs(dvol_t.at(node, 0) / s.sqrt_det_h.at(node, 0) - 3.0 * lambda);
    });
    rep.div_residual = std::max(divr.value, 0.0);

    const GridField& uu = field.u;
    auto msr = parallel_max(s.h.node_count(), [&](std::size_t node) -> double {
        auto idx = uu.unflat(node);
        double factor = std::exp(2.0 * (uu.coord(2, idx[2]) - t0));
        std::size_t base = uu.flat(idx[0], idx[1], 0);
        double worst = 0.0;
        for (int c = 0; c < 6; ++c)
            worst = std::max(worst, std::abs(s.h.at(node, c) - factor * s.h.at(base, c)));
        return worst;
    });
    rep.metric_scaling_residual = msr.value;
    return rep;
}

GaugeSlice gauge_slice(const GridField& u0) {
    require(u0.dim() == 2 && u0.components() == 6, ErrorKind::invalid_argument,
            "gauge_slice: u0 must be a 2D grid with 6 components");
    double scale = 0.0;
    for (std::size_t node = 0; node < u0.node_count(); ++node)
        for (int c = 0; c < 6; ++c) scale = std::max(scale, std::abs(u0.at(node, c)));
    auto null_node = parallel_find_first(u0.node_count(), [&](std::size_t node) {
        double p[6];
        for (int c = 0; c < 6; ++c) p[c] = u0.at(node, c);
        return std::abs(wedge_pairing(p, p)) <= 1e-10 * scale * scale;
    });
    if (null_node.first)
        fail_numeric("gauge_slice: u0 ^ u0 vanishes at node " + format_node(u0, null_node.second));

    GridField ux = derivative(u0, 0);
    GridField uy = derivative(u0, 1);
    GaugeSlice out{u0.like(1), u0.like(1), 0.0, 0.0};
    GridField c_field = u0.like(1);
    parallel_for(u0.node_count(), [&](std::size_t node) {
        double p[6], px[6], py[6];
        for (int c = 0; c < 6; ++c) {
            p[c] = u0.at(node, c);
            px[c] = ux.at(node, c);
            py[c] = uy.at(node, c);
        }
        double uu = wedge_pairing(p, p);
        out.r.at(node, 0) = -wedge_pairing(p, px) / uu;
        out.s.at(node, 0) = -wedge_pairing(p, py) / uu;
        c_field.at(node, 0) = 0.5 * uu;
    });
    GridField ry = derivative(out.r, 1);
    GridField sx = derivative(out.s, 0);
    auto integ = parallel_max(u0.node_count(), [&](std::size_t node) -> double {
        if (!u0.is_interior(node, 1)) return -1.0;
        return std::abs(ry.at(node, 0) - sx.at(node, 0));
    });
    out.integrability_residual = std::max(integ.value, 0.0);
    GridField cx = derivative(c_field, 0);
    GridField cy = derivative(c_field, 1);
    auto grad = parallel_max(u0.node_count(), [&](std::size_t node) -> double {
        if (!u0.is_interior(node, 1)) return -1.0;
        return std::max(std::abs(cx.at(node, 0)), std::abs(cy.at(node, 0)));
    });
    out.c_gradient_residual = std::max(grad.value, 0.0);
    return out;
}

}  // namespace g2sf::semiflat
