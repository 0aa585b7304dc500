#include "core/quadric.hpp"

#include <json.hpp>

#include <cmath>
#include <sstream>

#include "core/errors.hpp"
#include "core/parallel.hpp"

namespace g2sf::quadric {

using cplx = std::complex<double>;

namespace {

// bilinear <a,b> = sum eps_m a_m b_m on complex vectors stored at a node
cplx bilinear(const GridField& a, std::size_t na, const GridField& b, std::size_t nb,
              const Signature& sig) {
    cplx acc = 0.0;
    for (int m = 0; m < sig.dim(); ++m)
        acc += static_cast<double>(sig.eps(m)) * a.cplx(na, m) * b.cplx(nb, m);
    return acc;
}

// hermitian h(a,b) = <a, conj b>
cplx hermitian(const GridField& a, std::size_t na, const GridField& b, std::size_t nb,
               const Signature& sig) {
    cplx acc = 0.0;
    for (int m = 0; m < sig.dim(); ++m)
        acc += static_cast<double>(sig.eps(m)) * a.cplx(na, m) * std::conj(b.cplx(nb, m));
    return acc;
}

GridField complexify(const GridField& real_field) {
    GridField out = real_field.like(2 * real_field.components());
    parallel_for(real_field.node_count(), [&](std::size_t node) {
        for (int m = 0; m < real_field.components(); ++m) {
            out.at(node, 2 * m) = real_field.at(node, m);
            out.at(node, 2 * m + 1) = 0.0;
        }
    });
    return out;
}

struct MarginStats {
    double sup_abs = 0.0;
    double min_abs = 0.0;
    double max_val = 0.0;
    double min_val = 0.0;
};

MarginStats scalar_stats(const GridField& f, int margin) {
    MarginStats st;
    bool first = true;
    for (std::size_t node = 0; node < f.node_count(); ++node) {
        if (!f.is_interior(node, margin)) continue;
        double v = f.at(node, 0);
        if (first) {
            st = {std::abs(v), std::abs(v), v, v};
            first = false;
        } else {
            st.sup_abs = std::max(st.sup_abs, std::abs(v));
            st.min_abs = std::min(st.min_abs, std::abs(v));
            st.max_val = std::max(st.max_val, v);
            st.min_val = std::min(st.min_val, v);
        }
    }
    require(!first, ErrorKind::invalid_argument, "scalar_stats: empty analyzed subdomain");
    return st;
}

}  // namespace

SurfaceMap::SurfaceMap(GridField phi_, Signature sig_, double h0_)
    : phi(std::move(phi_)), sig(sig_), h0(h0_) {
    require(phi.dim() == 2, ErrorKind::invalid_argument, "SurfaceMap: needs a 2D grid");
    require(phi.components() == sig.dim(), ErrorKind::invalid_argument,
            "SurfaceMap: component count must equal p+q");
    require(h0 == 1.0 || h0 == -1.0, ErrorKind::invalid_argument, "SurfaceMap: h0 must be +1 or -1");
    double scale = 0.0;
    for (std::size_t node = 0; node < phi.node_count(); ++node) {
        double n2 = 0.0;
        for (int m = 0; m < phi.components(); ++m) n2 += phi.at(node, m) * phi.at(node, m);
        scale = std::max(scale, n2);
    }
    const double tol = 1e-10 * std::max(1.0, scale);
    auto bad = parallel_find_first(phi.node_count(), [&](std::size_t node) {
        double q = 0.0;
        for (int m = 0; m < phi.components(); ++m)
            q += sig.eps(m) * phi.at(node, m) * phi.at(node, m);
        return std::abs(q - h0) > tol;
    });
    if (bad.first)
        fail_numeric("SurfaceMap: <phi,phi> != h0 at node " + format_node(phi, bad.second));
}

GridField harmonicity_residual(const SurfaceMap& m) {
    GridField phic = complexify(m.phi);
    auto [dz, dzb] = wirtinger(phic);
    GridField lap = m.phi.like(m.phi.components());
    {
        GridField lx = second_derivative_same_axis(m.phi, 0);
        GridField ly = second_derivative_same_axis(m.phi, 1);
        parallel_for(lap.node_count(), [&](std::size_t node) {
            for (int c = 0; c < m.phi.components(); ++c)
                lap.at(node, c) = 0.25 * (lx.at(node, c) + ly.at(node, c));
        });
    }
    GridField out = m.phi.like(1);
    parallel_for(m.phi.node_count(), [&](std::size_t node) {
        cplx h1 = hermitian(dz, node, dz, node, m.sig);  // <phi_z, conj phi_z> = <phi_z, phi_zbar>
        double lambda = -h1.real() / m.h0;
        double acc = 0.0;
        for (int c = 0; c < m.phi.components(); ++c) {
            double v = lap.at(node, c) - lambda * m.phi.at(node, c);
            acc += v * v;
        }
        out.at(node, 0) = std::sqrt(acc);
    });
    return out;
}

GridField conformality_residual(const SurfaceMap& m) {
    GridField phic = complexify(m.phi);
    auto [dz, dzb] = wirtinger(phic);
    GridField out = m.phi.like(1);
    parallel_for(m.phi.node_count(), [&](std::size_t node) {
        out.at(node, 0) = std::abs(bilinear(dz, node, dz, node, m.sig));
    });
    return out;
}

const char* to_string(Classification c) {
    switch (c) {
        case Classification::superminimal: return "superminimal";
        case Classification::superconformal: return "superconformal";
        case Classification::degenerate: return "degenerate";
        case Classification::inapplicable: return "inapplicable";
    }
    return "?";
}

namespace {

GridField hermitian_norm_field(const GridField& phi_i, const Signature& sig) {
    GridField h = phi_i.like(1);
    parallel_for(phi_i.node_count(), [&](std::size_t node) {
        h.at(node, 0) = hermitian(phi_i, node, phi_i, node, sig).real();
    });
    return h;
}

double bilinear_sup(const GridField& phi_i, const Signature& sig, int margin) {
    double sup = 0.0;
    for (std::size_t node = 0; node < phi_i.node_count(); ++node) {
        if (!phi_i.is_interior(node, margin)) continue;
        sup = std::max(sup, std::abs(bilinear(phi_i, node, phi_i, node, sig)));
    }
    return sup;
}

}  // namespace

HarmonicSequence build_sequence(const SurfaceMap& m, double tol_scale) {
    HarmonicSequence s;
    s.sig = m.sig;
    s.h0 = m.h0;
    const double hg = m.phi.max_spacing();
    s.gate = tol_scale * hg * hg;
    const int dim = m.sig.dim();
    const int cap = (dim - 1) / 2;

    // entry gates: the input must actually be a conformal minimal surface
    GridField harm = harmonicity_residual(m);
    GridField conf = conformality_residual(m);
    s.harmonicity_gate_residual = sup_norm(harm, 2).value;
    s.conformality_gate_residual = sup_norm(conf, 2).value;

    s.phi.push_back(complexify(m.phi));
    auto [dz0, dzb0] = wirtinger(s.phi[0]);
    s.phi.push_back(dz0);

    GridField h1 = hermitian_norm_field(s.phi[1], m.sig);
    {
        auto st = scalar_stats(h1, 2);
        require(st.min_val > 0.0, ErrorKind::numeric,
                "build_sequence: induced metric h_1 = <phi_z, phi_zbar> not positive on the "
                "analyzed subdomain");
    }

    double harm_scale = 0.0, conf_scale = 0.0;
    {
        auto st = scalar_stats(h1, 2);
        conf_scale = st.sup_abs;
        // phi_zzbar = lambda phi with |lambda| = |h1/h0|, so h1 sets the scale
        harm_scale = st.sup_abs;
    }
    if (s.harmonicity_gate_residual > s.gate * std::max(1.0, harm_scale) ||
        s.conformality_gate_residual > s.gate * std::max(1.0, conf_scale)) {
        s.classification = Classification::inapplicable;
        s.note = "input fails the harmonicity/conformality gate (residuals " +
                 std::to_string(s.harmonicity_gate_residual) + ", " +
                 std::to_string(s.conformality_gate_residual) + ")";
        s.margin = 2;
        return s;
    }

    double prev_scale = std::abs(m.h0);
    int r = 0;
    std::string stop_reason;
    for (int i = 1;; ++i) {
        GridField hi = (i == 1) ? h1 : hermitian_norm_field(s.phi[static_cast<std::size_t>(i)], m.sig);
        const int margin_i = i + 1;
        auto st = scalar_stats(hi, margin_i);
        const double vanish_gate = s.gate * std::max(prev_scale, 1e-300);
        const bool nonvanishing = st.min_abs > vanish_gate;
        if (st.max_val > vanish_gate && st.min_val < -vanish_gate) {
            // genuinely mixed signs: find the first offending node for the report
            int sign_ref = st.max_val > -st.min_val ? 1 : -1;
            std::size_t bad = 0;
            for (std::size_t node = 0; node < hi.node_count(); ++node) {
                if (!hi.is_interior(node, margin_i)) continue;
                if (sign_ref * hi.at(node, 0) < -vanish_gate) {
                    bad = node;
                    break;
                }
            }
            fail_numeric("build_sequence: h_" + std::to_string(i) +
                         " changes sign across the subdomain (first offending node " +
                         format_node(hi, bad) + ")");
        }
        const double iso = bilinear_sup(s.phi[static_cast<std::size_t>(i)], m.sig, margin_i);
        const bool isotropic = iso <= s.gate * std::max(st.sup_abs, 1e-300);

        s.h.push_back(hi);
        if (nonvanishing) {
            int eps_i = st.max_val > 0.0 ? 1 : -1;
            s.eps.push_back(eps_i);
            GridField wi = hi.like(1);
            parallel_for(hi.node_count(), [&](std::size_t node) {
                wi.at(node, 0) = 0.5 * std::log(std::abs(hi.at(node, 0)));
            });
            s.w.push_back(wi);
        } else {
            s.eps.push_back(0);
            s.w.push_back(hi.like(1));
        }

        if (i <= cap && nonvanishing && isotropic) {
            r = i;
            // phi_{i+1} = (phi_i)_z - (<(phi_i)_z, conj phi_i>/h_i) phi_i
            auto [dzi, dzbi] = wirtinger(s.phi[static_cast<std::size_t>(i)]);
            GridField next = dzi.like(dzi.components());
            const GridField& cur = s.phi[static_cast<std::size_t>(i)];
            parallel_for(next.node_count(), [&](std::size_t node) {
                cplx num = hermitian(dzi, node, cur, node, m.sig);
                cplx coef = num / hi.at(node, 0);
                for (int c = 0; c < dim; ++c)
                    next.set_cplx(node, c, dzi.cplx(node, c) - coef * cur.cplx(node, c));
            });
            s.phi.push_back(next);
            continue;
        }
        if (!nonvanishing)
            stop_reason = "h_" + std::to_string(i) + " vanishes";
        else if (!isotropic)
            stop_reason = "<phi_" + std::to_string(i) + ", phi_" + std::to_string(i) + "> != 0";
        else
            stop_reason = "isotropy cap reached";
        break;
    }

    require(r >= 1, ErrorKind::numeric,
            "build_sequence: no isotropy (sequence stops at level 1: " + stop_reason + ")");
    s.isotropy_order = r;
    s.margin = r + 2;

    const int top = r + 1;
    auto top_st = scalar_stats(s.h_level(top), s.margin);
    const double top_gate = s.gate * std::max(scalar_stats(s.h_level(r), s.margin).sup_abs, 1e-300);
    if (dim == 2 * r + 2 || dim == 2 * r + 3) {
        if (top_st.sup_abs <= top_gate) {
            s.classification = Classification::superminimal;
            s.note = "h_" + std::to_string(top) + " = 0";
        } else if (top_st.min_abs > top_gate) {
            s.classification = Classification::superconformal;
            s.note = "h_" + std::to_string(top) + " nonvanishing (" + stop_reason + ")";
        } else {
            std::size_t excluded = 0, analyzed = 0;
            const GridField& hf = s.h_level(top);
            for (std::size_t node = 0; node < hf.node_count(); ++node) {
                if (!hf.is_interior(node, s.margin)) continue;
                ++analyzed;
                if (std::abs(hf.at(node, 0)) <= top_gate) ++excluded;
            }
            s.classification = Classification::degenerate;
            s.note = "h_" + std::to_string(top) + " vanishes on part of the subdomain (" +
                     std::to_string(excluded) + " of " + std::to_string(analyzed) +
                     " analyzed nodes below gate)";
        }
    } else {
        s.classification = Classification::degenerate;
        s.note = "sequence terminates at level " + std::to_string(top) + " (" + stop_reason +
                 "); ambient dimension " + std::to_string(dim) + " not in {" +
                 std::to_string(2 * r + 2) + ", " + std::to_string(2 * r + 3) + "}";
    }
    return s;
}

SequenceRelationReport verify_sequence_relations(const HarmonicSequence& s) {
    SequenceRelationReport rep;
    require(s.classification != Classification::inapplicable, ErrorKind::invalid_argument,
            "verify_sequence_relations: sequence was not built");
    const int r = s.isotropy_order;
    const int dim = s.sig.dim();
    const int margin = s.margin;
    const std::size_t nodes = s.phi[0].node_count();

    // pairwise hermitian orthogonality among levels 0..r, and the top level
    for (std::size_t node = 0; node < nodes; ++node) {
        if (!s.phi[0].is_interior(node, margin)) continue;
        for (int i = 0; i <= r; ++i)
            for (int j = i; j <= r; ++j) {
                if (j > i) {
                    double v = std::abs(hermitian(s.level(i), node, s.level(j), node, s.sig));
                    rep.hermitian_orthogonality = std::max(rep.hermitian_orthogonality, v);
                }
                if (j >= 1) {
                    double v = std::abs(bilinear(s.level(i), node, s.level(j), node, s.sig));
                    rep.hermitian_orthogonality = std::max(rep.hermitian_orthogonality, v);
                }
            }
        for (int j = 0; j <= r; ++j) {
            double v1 = std::abs(hermitian(s.level(r + 1), node, s.level(j), node, s.sig));
            double v2 = std::abs(bilinear(s.level(r + 1), node, s.level(j), node, s.sig));
            rep.top_orthogonality = std::max(rep.top_orthogonality, std::max(v1, v2));
        }
    }

    // holomorphy of <phi_{r+1}, phi_{r+1}>
    {
        GridField q2 = s.phi[0].like(2);
        parallel_for(nodes, [&](std::size_t node) {
            q2.set_cplx(node, 0, bilinear(s.level(r + 1), node, s.level(r + 1), node, s.sig));
        });
        auto [dz, dzb] = wirtinger(q2);
        for (std::size_t node = 0; node < nodes; ++node) {
            if (!q2.is_interior(node, margin)) continue;
            rep.top_holomorphy = std::max(rep.top_holomorphy, std::abs(dzb.cplx(node, 0)));
        }
    }

    // recursion relations and the h-form Toda equations
    for (int i = 1; i <= r + 1; ++i) {
        auto [dzi, dzbi] = wirtinger(s.level(i));
        const GridField& hi = s.h_level(i);
        const GridField& hprev_f = (i >= 2) ? s.h_level(i - 1) : hi;  // unused for i == 1
        if (i <= r) {
            GridField wc = s.w_level(i).like(2);
            parallel_for(nodes, [&](std::size_t node) {
                wc.at(node, 0) = s.w_level(i).at(node, 0);
                wc.at(node, 1) = 0.0;
            });
            auto [dwz, dwzb] = wirtinger(wc);
            for (std::size_t node = 0; node < nodes; ++node) {
                if (!hi.is_interior(node, margin)) continue;
                for (int c = 0; c < dim; ++c) {
                    cplx lhs = dzi.cplx(node, c);
                    cplx rhs = s.level(i + 1).cplx(node, c) +
                               2.0 * dwz.cplx(node, 0) * s.level(i).cplx(node, c);
                    rep.recursion_z = std::max(rep.recursion_z, std::abs(lhs - rhs));
                }
            }
            // 2 (w_i)_zzbar = h_{i+1}/h_i - h_i/h_{i-1}
            GridField wxx = second_derivative_same_axis(s.w_level(i), 0);
            GridField wyy = second_derivative_same_axis(s.w_level(i), 1);
            for (std::size_t node = 0; node < nodes; ++node) {
                if (!hi.is_interior(node, margin)) continue;
                double lhs = 0.5 * (wxx.at(node, 0) + wyy.at(node, 0));
                double hnext = s.h_level(i + 1).at(node, 0);
                double hcur = hi.at(node, 0);
                double hprev = (i >= 2) ? hprev_f.at(node, 0) : s.h0;
                double rhs = hnext / hcur - hcur / hprev;
                rep.toda_h_form = std::max(rep.toda_h_form, std::abs(lhs - rhs));
            }
        }
        // (phi_i)_zbar = -(h_i/h_{i-1}) phi_{i-1}
        for (std::size_t node = 0; node < nodes; ++node) {
            if (!hi.is_interior(node, margin)) continue;
            double hcur = hi.at(node, 0);
            double hprev = (i >= 2) ? hprev_f.at(node, 0) : s.h0;
            for (int c = 0; c < dim; ++c) {
                cplx lhs = dzbi.cplx(node, c);
                cplx rhs = -(hcur / hprev) * s.level(i - 1).cplx(node, c);
                rep.recursion_zbar = std::max(rep.recursion_zbar, std::abs(lhs - rhs));
            }
        }
    }
    return rep;
}

TodaData extract_toda_data(const HarmonicSequence& s) {
    const int r = s.isotropy_order;
    const int dim = s.sig.dim();
    if (s.classification == Classification::superminimal)
        fail_numeric("extract_toda_data: q undefined (h_{r+1} = 0)");
    require(dim % 2 == 0 && dim == 2 * r + 2, ErrorKind::invalid_argument,
            "extract_toda_data: needs even ambient dimension with p+q = 2r+2");
    require(s.classification == Classification::superconformal, ErrorKind::numeric,
            "extract_toda_data: sequence is not superconformal (" + s.note + ")");

    TodaData out;
    const GridField& top = s.level(r + 1);
    const std::size_t nodes = top.node_count();
    out.phit = s.phi[0].like(dim);
    out.q = s.phi[0].like(2);

    // phit: the common real direction of Re/Im of phi_{r+1}, unit for <,>,
    // sign-aligned along the grid for continuity.
    std::vector<double> prev(static_cast<std::size_t>(dim), 0.0);
    bool have_prev = false;
    for (std::size_t node = 0; node < nodes; ++node) {
        double a2 = 0.0, b2 = 0.0;
        for (int c = 0; c < dim; ++c) {
            double re = top.cplx(node, c).real(), im = top.cplx(node, c).imag();
            a2 += s.sig.eps(c) * re * re;
            b2 += s.sig.eps(c) * im * im;
        }
        bool use_re = std::abs(a2) >= std::abs(b2);
        double n2 = use_re ? a2 : b2;
        require(std::abs(n2) > 0.0, ErrorKind::numeric, "extract_toda_data: phi_{r+1} vanishes");
        double inv = 1.0 / std::sqrt(std::abs(n2));
        double dot_prev = 0.0;
        std::vector<double> v(static_cast<std::size_t>(dim));
        for (int c = 0; c < dim; ++c) {
            double comp = use_re ? top.cplx(node, c).real() : top.cplx(node, c).imag();
            v[static_cast<std::size_t>(c)] = comp * inv;
            dot_prev += v[static_cast<std::size_t>(c)] * prev[static_cast<std::size_t>(c)];
        }
        double flip = (have_prev && dot_prev < 0.0) ? -1.0 : 1.0;
        if (!have_prev) {
            int big = 0;
            for (int c = 1; c < dim; ++c)
                if (std::abs(v[static_cast<std::size_t>(c)]) > std::abs(v[static_cast<std::size_t>(big)])) big = c;
            if (v[static_cast<std::size_t>(big)] < 0.0) flip = -1.0;
        }
        for (int c = 0; c < dim; ++c) {
            double val = flip * v[static_cast<std::size_t>(c)];
            out.phit.at(node, c) = val;
            prev[static_cast<std::size_t>(c)] = val;
        }
        have_prev = true;
    }
    // eps~ = <phit, phit>, constant by construction
    {
        double n2 = 0.0;
        for (int c = 0; c < dim; ++c) n2 += s.sig.eps(c) * out.phit.at(0, c) * out.phit.at(0, c);
        out.eps_tilde = n2 > 0.0 ? 1 : -1;
    }
    // q = eps~ <phi_{r+1}, phit>
    parallel_for(nodes, [&](std::size_t node) {
        cplx acc = 0.0;
        for (int c = 0; c < dim; ++c)
            acc += static_cast<double>(s.sig.eps(c)) * top.cplx(node, c) * out.phit.at(node, c);
        out.q.set_cplx(node, 0, static_cast<double>(out.eps_tilde) * acc);
    });

    // signs: eps_0 = sign h0, mu_i = eps_{i-1} eps_i, mu_{r+1} = eps~ eps_r
    int eps0 = s.h0 > 0 ? 1 : -1;
    out.mu.resize(static_cast<std::size_t>(r + 1));
    for (int i = 1; i <= r; ++i) {
        int prev_eps = (i == 1) ? eps0 : s.eps_level(i - 1);
        require(s.eps_level(i) != 0, ErrorKind::numeric, "extract_toda_data: vanishing h level");
        out.mu[static_cast<std::size_t>(i - 1)] = prev_eps * s.eps_level(i);
    }
    out.mu[static_cast<std::size_t>(r)] = out.eps_tilde * s.eps_level(r);

    // signed Toda residuals in the w variables
    const int margin = s.margin;
    for (int i = 1; i <= r; ++i) {
        GridField wxx = second_derivative_same_axis(s.w_level(i), 0);
        GridField wyy = second_derivative_same_axis(s.w_level(i), 1);
        for (std::size_t node = 0; node < nodes; ++node) {
            if (!out.q.is_interior(node, margin)) continue;
            double lhs = 0.5 * (wxx.at(node, 0) + wyy.at(node, 0));
            double wi = s.w_level(i).at(node, 0);
            double wprev = (i >= 2) ? s.w_level(i - 1).at(node, 0) : 0.0;
            double lower = out.mu[static_cast<std::size_t>(i - 1)] * std::exp(2.0 * wi - 2.0 * wprev);
            double upper;
            if (i < r) {
                double wnext = s.w_level(i + 1).at(node, 0);
                upper = out.mu[static_cast<std::size_t>(i)] * std::exp(2.0 * wnext - 2.0 * wi);
            } else {
                double qq = std::norm(out.q.cplx(node, 0));
                upper = out.mu[static_cast<std::size_t>(r)] * qq * std::exp(-2.0 * wi);
            }
            out.toda_residual = std::max(out.toda_residual, std::abs(lhs - upper + lower));
        }
    }
    {
        auto [dz, dzb] = wirtinger(out.q);
        for (std::size_t node = 0; node < nodes; ++node) {
            if (!out.q.is_interior(node, margin)) continue;
            out.q_holomorphy = std::max(out.q_holomorphy, std::abs(dzb.cplx(node, 0)));
        }
    }
    return out;
}

namespace {

using nlohmann::json;

}  // namespace

HolomorphicCurve parse_curve(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        fail_invalid(std::string("curve file: malformed JSON: ") + e.what());
    }
    try {
        require(j.at("format_version").get<int>() == 1, ErrorKind::invalid_argument,
                "curve file: unsupported format_version");
        require(j.at("kind").get<std::string>() == "curve", ErrorKind::invalid_argument,
                "curve file: kind must be 'curve'");
        HolomorphicCurve c;
        c.sig = Signature(j.at("signature").at("p").get<int>(), j.at("signature").at("q").get<int>());
        int degree = j.at("degree").get<int>();
        require(degree >= 0, ErrorKind::invalid_argument, "curve file: negative degree");
        auto coeffs = j.at("coefficients");
        require(static_cast<int>(coeffs.size()) == degree + 1, ErrorKind::invalid_argument,
                "curve file: need degree+1 coefficient vectors");
        for (const auto& vec : coeffs) {
            require(static_cast<int>(vec.size()) == c.sig.dim(), ErrorKind::invalid_argument,
                    "curve file: coefficient vector length must be p+q");
            std::vector<cplx> row;
            for (const auto& entry : vec) {
                require(entry.size() == 2, ErrorKind::invalid_argument,
                        "curve file: entries are [re, im] pairs");
                row.emplace_back(entry[0].get<double>(), entry[1].get<double>());
            }
            c.coefficients.push_back(std::move(row));
        }
        if (j.contains("base_point"))
            c.base_point = j.at("base_point").get<std::vector<double>>();
        else
            c.base_point.assign(static_cast<std::size_t>(c.sig.dim()), 0.0);
        require(static_cast<int>(c.base_point.size()) == c.sig.dim(), ErrorKind::invalid_argument,
                "curve file: base_point length must be p+q");
        return c;
    } catch (const json::exception& e) {
        fail_invalid(std::string("curve file: ") + e.what());
    }
}

std::string curve_to_text(const HolomorphicCurve& c) {
    json j;
    j["format_version"] = 1;
    j["kind"] = "curve";
    j["signature"] = {{"p", c.sig.p}, {"q", c.sig.q}};
    j["degree"] = c.degree();
    j["coefficients"] = json::array();
    for (const auto& row : c.coefficients) {
        json jr = json::array();
        for (const auto& v : row) jr.push_back({v.real(), v.imag()});
        j["coefficients"].push_back(std::move(jr));
    }
    j["base_point"] = c.base_point;
    return j.dump(2) + "\n";
}

Poly curve_null_polynomial(const HolomorphicCurve& c) {
    Poly p;
    if (c.coefficients.empty()) return p;
    p.coeff.assign(2 * c.coefficients.size() - 1, 0.0);
    for (std::size_t a = 0; a < c.coefficients.size(); ++a)
        for (std::size_t b = 0; b < c.coefficients.size(); ++b) {
            cplx acc = 0.0;
            for (int m = 0; m < c.sig.dim(); ++m)
                acc += static_cast<double>(c.sig.eps(m)) * c.coefficients[a][static_cast<std::size_t>(m)] *
                       c.coefficients[b][static_cast<std::size_t>(m)];
            p.coeff[a + b] += acc;
        }
    p.normalize();
    return p;
}

GridField weierstrass_integrate(const HolomorphicCurve& c, double x0, double x1, double y0,
                                double y1, std::size_t n) {
    require(n >= 3, ErrorKind::invalid_argument, "weierstrass_integrate: need n >= 3");
    require(x1 > x0 && y1 > y0, ErrorKind::invalid_argument,
            "weierstrass_integrate: empty domain");
    require(!c.coefficients.empty(), ErrorKind::invalid_argument,
            "weierstrass_integrate: empty curve");
    Poly null_poly = curve_null_polynomial(c);
    require(null_poly.coeff.empty(), ErrorKind::invalid_argument,
            "weierstrass_integrate: <tau,tau> is not the zero polynomial (" +
                poly_to_string(null_poly) + ")");

    const int dim = c.sig.dim();
    GridField out(2, {n, n, 1}, {x0, y0, 0.0},
                  {(x1 - x0) / static_cast<double>(n - 1), (y1 - y0) / static_cast<double>(n - 1), 1.0},
                  dim);
    // exact antiderivative: A_{k+1} = c_k / (k+1)
    std::vector<std::vector<cplx>> anti(c.coefficients.size() + 1,
                                        std::vector<cplx>(static_cast<std::size_t>(dim), 0.0));
    for (std::size_t k = 0; k < c.coefficients.size(); ++k)
        for (int m = 0; m < dim; ++m)
            anti[k + 1][static_cast<std::size_t>(m)] =
                c.coefficients[k][static_cast<std::size_t>(m)] / static_cast<double>(k + 1);

    auto positivity_fail = parallel_find_first(out.node_count(), [&](std::size_t node) {
        auto p = out.point(node);
        cplx z(p[0], p[1]);
        double acc = 0.0;
        for (int m = 0; m < dim; ++m) {
            cplx tau = 0.0;
            for (std::size_t k = c.coefficients.size(); k-- > 0;)
                tau = tau * z + c.coefficients[k][static_cast<std::size_t>(m)];
            acc += c.sig.eps(m) * std::norm(tau);
        }
        return acc <= 0.0;
    });
    if (positivity_fail.first)
        fail_numeric("weierstrass_integrate: <tau, conj tau> <= 0 at node " +
                     format_node(out, positivity_fail.second));

    parallel_for(out.node_count(), [&](std::size_t node) {
        auto p = out.point(node);
        cplx z(p[0], p[1]);
        for (int m = 0; m < dim; ++m) {
            cplx acc = 0.0;
            for (std::size_t k = anti.size(); k-- > 0;) acc = acc * z + anti[k][static_cast<std::size_t>(m)];
            out.at(node, m) = c.base_point[static_cast<std::size_t>(m)] + acc.real();
        }
    });
    return out;
}

}  // namespace g2sf::quadric
