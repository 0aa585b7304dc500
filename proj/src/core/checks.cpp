#include "core/checks.hpp"

#include <cmath>
#include <sstream>

#include "core/errors.hpp"
#include "core/g2.hpp"
#include "core/parallel.hpp"

namespace g2sf::checks {

namespace {

std::string rat_str(const Rat& r) {
    std::ostringstream os;
    os << r.numerator();
    if (r.denominator() != 1) os << "/" << r.denominator();
    return os.str();
}

void emit_form(std::ostringstream& os, const char* label, const FormR& f) {
    for (Mask m : increasing_subsets(f.dim(), f.degree())) {
        Rat c = f.coeff(m);
        if (c == Rat(0)) continue;
        os << label << " " << mask_to_string(m) << " " << rat_str(c) << "\n";
    }
}

}  // namespace

std::string g2_tables_text() {
    auto pair = standard_forms();
    auto mv = metric_from_three_form(pair.phi);
    std::ostringstream os;
    os << "g2sf-tables v1\n";
    emit_form(os, "phi0", pair.phi);
    emit_form(os, "psi0", pair.psi);
    for (int i = 0; i < 7; ++i) {
        os << "metric row" << (i + 1);
        for (int j = 0; j < 7; ++j)
            os << " " << rat_str(mv.metric[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
        os << "\n";
    }
    os << "dvol e1234567 " << rat_str(mv.dvol_coeff) << "\n";
    os << "lambda2-basis 12 13 14 23 24 34\n";
    auto q = lambda2_pairing();
    for (int i = 0; i < 6; ++i) {
        os << "pairing row" << (i + 1);
        for (int j = 0; j < 6; ++j) os << " " << q(i, j);
        os << "\n";
    }
    return os.str();
}

report::Report semiflat_verify(const semiflat::ImmersionField& u, double tol) {
    const double h = u.u.max_spacing();
    if (tol <= 0.0) tol = 10.0 * h * h;
    auto s = semiflat::build_phi_psi(u);
    auto cr = semiflat::closure_residuals(s);
    GridField harm = semiflat::harmonicity_residual(u);
    auto harm_sup = sup_norm(harm, semiflat::kResidualMargin);
    auto sd = semiflat::theta_selfduality_residual(s);

    report::Report rep;
    rep.note("grid", std::to_string(u.u.shape()[0]) + "x" + std::to_string(u.u.shape()[1]) + "x" +
                         std::to_string(u.u.shape()[2]));
    rep.note("tau", std::to_string(u.tau));
    rep.add("dphi", cr.dphi.value, tol, format_node(u.u, cr.dphi.node));
    rep.add("dpsi", cr.dpsi.value, tol, format_node(u.u, cr.dpsi.node));
    rep.add("harmonicity", harm_sup.value, tol, format_node(u.u, harm_sup.node));
    rep.add("theta_selfdual", sd.value, 1e-10, format_node(u.u, sd.node));
    return rep;
}

report::Report ma_check(const GridField& phi, double tol) {
    auto hm = ma::hessian_metric(phi);
    auto mr = ma::ma_residual(phi);
    const double h = phi.max_spacing();
    double det_scale = sup_norm(mr.det, 1).value;
    if (tol <= 0.0) tol = 10.0 * h * h * std::max(1.0, det_scale);

    report::Report rep;
    rep.note("grid", std::to_string(phi.shape()[0]) + "x" + std::to_string(phi.shape()[1]) + "x" +
                         std::to_string(phi.shape()[2]));
    rep.note("hessian_positive_definite", hm.positive_definite ? "true" : "false");
    auto gd = sup_norm(mr.grad_det, ma::kThirdDerivativeMargin);
    auto tf = sup_norm(mr.trace_form, ma::kThirdDerivativeMargin);
    rep.add("grad_det", gd.value, tol, format_node(phi, gd.node));
    rep.add("trace_form", tf.value, tol, format_node(phi, tf.node));
    // Jacobi: d det H = det H tr(H^-1 dH) componentwise
    auto cross = parallel_max(phi.node_count(), [&](std::size_t node) -> double {
        if (!phi.is_interior(node, ma::kThirdDerivativeMargin)) return -1.0;
        double worst = 0.0;
        for (int a = 0; a < 3; ++a)
            worst = std::max(worst, std::abs(mr.grad_det.at(node, a) -
                                             mr.det.at(node, 0) * mr.trace_form.at(node, a)));
        return worst;
    });
    rep.add("jacobi_cross", std::max(cross.value, 0.0), tol);
    rep.add("hessian_spd", hm.positive_definite ? 0.0 : 1.0, 0.5,
            hm.positive_definite ? "" : format_node(phi, hm.first_bad_node));
    return rep;
}

report::Report quadric_analyze(const quadric::SurfaceMap& m, double tol_scale) {
    const double h = m.phi.max_spacing();
    const double gate = tol_scale * h * h;
    report::Report rep;
    rep.note("signature", std::to_string(m.sig.p) + "," + std::to_string(m.sig.q));
    rep.note("h0", std::to_string(static_cast<int>(m.h0)));

    auto s = quadric::build_sequence(m, tol_scale);
    rep.note("classification", quadric::to_string(s.classification));
    rep.note("detail", s.note);
    rep.add("harmonicity_gate", s.harmonicity_gate_residual, std::nullopt);
    rep.add("conformality_gate", s.conformality_gate_residual, std::nullopt);
    if (s.classification == quadric::Classification::inapplicable) {
        rep.add("sequence_built", 1.0, 0.5);
        return rep;
    }
    rep.note("isotropy_order", std::to_string(s.isotropy_order));
    rep.note("margin", std::to_string(s.margin));
    {
        std::string eps;
        for (std::size_t i = 0; i < s.eps.size(); ++i)
            eps += (i ? "," : "") + std::to_string(s.eps[i]);
        rep.note("eps", eps);
    }
    for (int i = 1; i <= s.isotropy_order + 1; ++i) {
        double mn = 0.0, mx = 0.0;
        bool first = true;
        const GridField& hf = s.h_level(i);
        for (std::size_t node = 0; node < hf.node_count(); ++node) {
            if (!hf.is_interior(node, s.margin)) continue;
            double v = hf.at(node, 0);
            mn = first ? v : std::min(mn, v);
            mx = first ? v : std::max(mx, v);
            first = false;
        }
        rep.note("h" + std::to_string(i) + "_range",
                 std::to_string(mn) + ".." + std::to_string(mx));
        rep.add("h" + std::to_string(i) + "_constancy", mx - mn, std::nullopt);
    }
    auto rel = quadric::verify_sequence_relations(s);
    rep.add("orthogonality", rel.hermitian_orthogonality, gate);
    rep.add("top_orthogonality", rel.top_orthogonality, gate);
    rep.add("top_holomorphy", rel.top_holomorphy, gate);
    rep.add("recursion_z", rel.recursion_z, gate);
    rep.add("recursion_zbar", rel.recursion_zbar, gate);
    rep.add("toda_h_form", rel.toda_h_form, gate);
    if (s.classification == quadric::Classification::superconformal && m.sig.dim() % 2 == 0) {
        auto td = quadric::extract_toda_data(s);
        std::string mu;
        for (std::size_t i = 0; i < td.mu.size(); ++i) mu += (i ? "," : "") + std::to_string(td.mu[i]);
        rep.note("mu", mu);
        rep.note("eps_tilde", std::to_string(td.eps_tilde));
        rep.add("signed_toda", td.toda_residual, gate);
        rep.add("q_holomorphy", td.q_holomorphy, gate);
    }
    return rep;
}

report::Report cone_verify(const quadric::SurfaceMap& m) {
    const double h = m.phi.max_spacing();
    const double tol = 10.0 * h * h;
    report::Report rep;

    // Riemannian-immersion structure: domain metric = discrete pullback of
    // the flat ambient metric under phi
    auto flat = std::make_shared<cone::FlatMetric>(m.sig);
    GridField gx = derivative(m.phi, 0);
    GridField gy = derivative(m.phi, 1);
    GridField dom = m.phi.like(3);
    parallel_for(m.phi.node_count(), [&](std::size_t node) {
        double exx = 0, exy = 0, eyy = 0;
        for (int c = 0; c < m.sig.dim(); ++c) {
            double e = m.sig.eps(c);
            exx += e * gx.at(node, c) * gx.at(node, c);
            exy += e * gx.at(node, c) * gy.at(node, c);
            eyy += e * gy.at(node, c) * gy.at(node, c);
        }
        dom.at(node, 0) = exx;
        dom.at(node, 1) = exy;
        dom.at(node, 2) = eyy;
    });
    cone::MapBetween mb{std::move(dom), m.phi, flat};
    auto rr = cone::radial_tension_relations(mb, 0.75, 2.25, 13);
    rep.add("tau0", rr.tau0_sup, 1e-10);
    rep.add("gamma_match", rr.gamma_match, tol);
    rep.add("radial_match", rr.radial_match, tol);
    rep.add("r2_scaling", rr.scaling_residual, tol);
    rep.add("base_tension", rr.base_tension_sup, std::nullopt);
    return rep;
}

report::Report toda_lift_check(const GridField& w1, const Poly& q, double tol) {
    const double h = w1.max_spacing();
    if (tol <= 0.0) tol = 50.0 * h * h;
    auto lift = toda::tzitzeica_lift(w1, q);
    auto cs = toda::curvature_signs(lift.w1, lift.w2);
    report::Report rep;
    auto r1 = sup_norm(lift.residual1, 1);
    auto r2 = sup_norm(lift.residual2, 1);
    rep.add("lift_residual_1", r1.value, tol, format_node(w1, r1.node));
    rep.add("lift_residual_2", r2.value, tol, format_node(w1, r2.node));
    rep.add("k1_positive", -cs.min_k1, 0.0);
    rep.add("k2_negative", cs.max_k2, 0.0);
    rep.note("min_K1", std::to_string(cs.min_k1));
    rep.note("max_K2", std::to_string(cs.max_k2));
    return rep;
}

report::Report toda_solution_report(const toda::TodaSolution& sol, double tol) {
    report::Report rep;
    rep.add("newton_residual", sol.residual_sup, tol);
    rep.note("iterations", std::to_string(sol.iterations));
    rep.note("converged", sol.converged ? "true" : "false");
    rep.note("exponent_clamped", sol.exponent_clamped ? "true" : "false");
    return rep;
}

std::string trace_to_csv(const toda::TodaSolution& sol) {
    std::ostringstream os;
    os << "iteration,residual_norm,step_scale,clamped\n";
    for (const auto& t : sol.trace)
        os << t.iteration << "," << t.residual_norm << "," << t.step_scale << ","
           << (t.clamped ? 1 : 0) << "\n";
    return os.str();
}

}  // namespace g2sf::checks
