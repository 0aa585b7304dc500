#include "g2sf/g2sf.h"

#include <json.hpp>

#include <cstring>
#include <string>

#include "core/checks.hpp"
#include "core/errors.hpp"
#include "core/grid_io.hpp"
#include "core/parallel.hpp"

using namespace g2sf;

struct g2sf_grid {
    GridDoc doc;
};

struct g2sf_report {
    report::Report rep;
};

namespace {

thread_local std::string t_last_error;

g2sf_status status_of(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::invalid_argument: return G2SF_ERROR_INVALID_ARGUMENT;
        case ErrorKind::io: return G2SF_ERROR_IO;
        case ErrorKind::numeric: return G2SF_ERROR_NUMERIC;
    }
    return G2SF_ERROR_INVALID_ARGUMENT;
}

template <typename F>
g2sf_status guarded(F&& f) {
    try {
        f();
        return G2SF_OK;
    } catch (const Error& e) {
        t_last_error = e.what();
        return status_of(e);
    } catch (const std::exception& e) {
        t_last_error = e.what();
        return G2SF_ERROR_INVALID_ARGUMENT;
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

const GridField& named_or_single(const GridDoc& doc, const std::string& name, int components) {
    if (doc.has(name)) {
        const GridField& f = doc.get(name);
        require(components <= 0 || f.components() == components, ErrorKind::invalid_argument,
                "field '" + name + "' must have " + std::to_string(components) + " components");
        return f;
    }
    if (doc.fields.size() == 1 &&
        (components <= 0 || doc.fields[0].second.components() == components))
        return doc.fields[0].second;
    fail_invalid("grid document has no suitable field '" + name + "'");
}

semiflat::ImmersionField immersion_of(const GridDoc& doc, double tau_override) {
    const GridField& u = named_or_single(doc, "u", 6);
    double tau = tau_override;
    if (tau <= 0.0) {
        tau = 1.0;
        if (doc.has("tau")) tau = doc.get("tau").at(0, 0);
    }
    return semiflat::ImmersionField(u, tau);
}

GridDoc doc_of_immersion(const semiflat::ImmersionField& f) {
    GridDoc doc = GridDoc::from_field("u", f.u);
    GridField tau = f.u.like(1);
    for (auto& v : tau.values()) v = f.tau;
    doc.add("tau", std::move(tau));
    return doc;
}

quadric::SurfaceMap surface_of(const GridDoc& doc, int p, int q, double h0) {
    Signature sig(p, q);
    const GridField& phi = named_or_single(doc, "phi", sig.dim());
    return quadric::SurfaceMap(phi, sig, h0);
}

using nlohmann::json;

toda::NewtonControls newton_of(const json& j) {
    toda::NewtonControls nc;
    if (j.contains("newton")) {
        const auto& n = j.at("newton");
        if (n.contains("tol")) nc.tol = n.at("tol").get<double>();
        if (n.contains("max_iter")) nc.max_iter = n.at("max_iter").get<int>();
        if (n.contains("max_backtrack")) nc.max_backtrack = n.at("max_backtrack").get<int>();
    }
    return nc;
}

GridField geometry_of(const json& j) {
    auto shape = j.at("shape").get<std::vector<std::size_t>>();
    require(shape.size() == 2, ErrorKind::invalid_argument, "toda config: shape must be [nx, ny]");
    const auto& d = j.at("domain");
    double x0 = d.at("x0").get<double>(), x1 = d.at("x1").get<double>();
    double y0 = d.at("y0").get<double>(), y1 = d.at("y1").get<double>();
    require(x1 > x0 && y1 > y0, ErrorKind::invalid_argument, "toda config: empty domain");
    return GridField(2, {shape[0], shape[1], 1}, {x0, y0, 0},
                     {(x1 - x0) / static_cast<double>(shape[0] - 1),
                      (y1 - y0) / static_cast<double>(shape[1] - 1), 1.0},
                     1);
}

std::vector<double> boundary_values_of(const json& j, int rank) {
    std::vector<double> vals(static_cast<std::size_t>(rank), 0.0);
    if (!j.contains("boundary")) return vals;
    const auto& b = j.at("boundary");
    std::string type = b.at("type").get<std::string>();
    if (type == "zero") return vals;
    if (type == "constant") {
        auto v = b.at("values").get<std::vector<double>>();
        require(static_cast<int>(v.size()) == rank, ErrorKind::invalid_argument,
                "toda config: boundary.values must have one entry per unknown");
        return v;
    }
    fail_invalid("toda config: boundary.type must be 'zero' or 'constant'");
}

}  // namespace

extern "C" {

const char* g2sf_version(void) { return "1.0.0"; }

const char* g2sf_last_error(void) { return t_last_error.c_str(); }

void g2sf_string_free(char* s) { std::free(s); }

void g2sf_set_threads(int n) { set_worker_count(n); }

g2sf_status g2sf_grid_read(const char* path, g2sf_grid** out) {
    return guarded([&] {
        require(path && out, ErrorKind::invalid_argument, "grid_read: null argument");
        *out = new g2sf_grid{read_grid_file(path)};
    });
}

g2sf_status g2sf_grid_write(const g2sf_grid* grid, const char* path) {
    return guarded([&] {
        require(grid && path, ErrorKind::invalid_argument, "grid_write: null argument");
        write_grid_file(path, grid->doc);
    });
}

g2sf_status g2sf_grid_create(int dim, const int64_t* shape, const double* origin,
                             const double* spacing, g2sf_grid** out) {
    return guarded([&] {
        require(shape && origin && spacing && out, ErrorKind::invalid_argument,
                "grid_create: null argument");
        require(dim >= 1 && dim <= 3, ErrorKind::invalid_argument,
                "grid_create: dimension must be 1..3");
        auto* g = new g2sf_grid{};
        g->doc.dim = dim;
        for (int a = 0; a < 3; ++a) {
            g->doc.shape[static_cast<std::size_t>(a)] =
                a < dim ? static_cast<std::size_t>(shape[a]) : 1;
            g->doc.origin[static_cast<std::size_t>(a)] = a < dim ? origin[a] : 0.0;
            g->doc.spacing[static_cast<std::size_t>(a)] = a < dim ? spacing[a] : 1.0;
        }
        *out = g;
    });
}

g2sf_status g2sf_grid_add_field(g2sf_grid* grid, const char* name, int components,
                                const double* data, size_t count) {
    return guarded([&] {
        require(grid && name && data, ErrorKind::invalid_argument, "grid_add_field: null argument");
        GridField f(grid->doc.dim, grid->doc.shape, grid->doc.origin, grid->doc.spacing, components);
        require(f.values().size() == count, ErrorKind::invalid_argument,
                "grid_add_field: data length must be components * node count");
        std::memcpy(f.values().data(), data, count * sizeof(double));
        grid->doc.add(name, std::move(f));
    });
}

void g2sf_grid_free(g2sf_grid* grid) { delete grid; }

int g2sf_grid_dim(const g2sf_grid* grid) { return grid ? grid->doc.dim : 0; }

void g2sf_grid_shape(const g2sf_grid* grid, int64_t out[3]) {
    for (int a = 0; a < 3; ++a)
        out[a] = grid ? static_cast<int64_t>(grid->doc.shape[static_cast<std::size_t>(a)]) : 0;
}

void g2sf_grid_origin(const g2sf_grid* grid, double out[3]) {
    for (int a = 0; a < 3; ++a)
        out[a] = grid ? grid->doc.origin[static_cast<std::size_t>(a)] : 0.0;
}

void g2sf_grid_spacing(const g2sf_grid* grid, double out[3]) {
    for (int a = 0; a < 3; ++a)
        out[a] = grid ? grid->doc.spacing[static_cast<std::size_t>(a)] : 1.0;
}

int g2sf_grid_field_count(const g2sf_grid* grid) {
    return grid ? static_cast<int>(grid->doc.fields.size()) : 0;
}

const char* g2sf_grid_field_name(const g2sf_grid* grid, int index) {
    if (!grid || index < 0 || index >= static_cast<int>(grid->doc.fields.size())) return nullptr;
    return grid->doc.fields[static_cast<std::size_t>(index)].first.c_str();
}

int g2sf_grid_field_components(const g2sf_grid* grid, int index) {
    if (!grid || index < 0 || index >= static_cast<int>(grid->doc.fields.size())) return 0;
    return grid->doc.fields[static_cast<std::size_t>(index)].second.components();
}

g2sf_status g2sf_grid_field_data(const g2sf_grid* grid, const char* name, const double** data,
                                 size_t* count) {
    return guarded([&] {
        require(grid && name && data && count, ErrorKind::invalid_argument,
                "grid_field_data: null argument");
        const GridField& f = grid->doc.get(name);
        *data = f.values().data();
        *count = f.values().size();
    });
}

g2sf_status g2sf_report_render(const g2sf_report* rep, char** text) {
    return guarded([&] {
        require(rep && text, ErrorKind::invalid_argument, "report_render: null argument");
        *text = dup_string(rep->rep.render());
    });
}

int g2sf_report_entry_count(const g2sf_report* rep) {
    return rep ? static_cast<int>(rep->rep.entries.size()) : 0;
}

const char* g2sf_report_entry_name(const g2sf_report* rep, int index) {
    if (!rep || index < 0 || index >= static_cast<int>(rep->rep.entries.size())) return nullptr;
    return rep->rep.entries[static_cast<std::size_t>(index)].name.c_str();
}

double g2sf_report_entry_value(const g2sf_report* rep, int index) {
    if (!rep || index < 0 || index >= static_cast<int>(rep->rep.entries.size())) return 0.0;
    return rep->rep.entries[static_cast<std::size_t>(index)].value;
}

int g2sf_report_entry_passed(const g2sf_report* rep, int index) {
    if (!rep || index < 0 || index >= static_cast<int>(rep->rep.entries.size())) return 0;
    return rep->rep.entries[static_cast<std::size_t>(index)].pass ? 1 : 0;
}

int g2sf_report_passed(const g2sf_report* rep) { return rep && rep->rep.passed() ? 1 : 0; }

void g2sf_report_free(g2sf_report* rep) { delete rep; }

g2sf_status g2sf_order_estimate(const g2sf_report* at_h, const g2sf_report* at_h2,
                                const g2sf_report* at_h4, g2sf_report** out) {
    return guarded([&] {
        require(at_h && at_h2 && at_h4 && out, ErrorKind::invalid_argument,
                "order_estimate: null argument");
        *out = new g2sf_report{report::order_estimate(at_h->rep, at_h2->rep, at_h4->rep)};
    });
}

g2sf_status g2sf_g2_tables(char** text) {
    return guarded([&] {
        require(text, ErrorKind::invalid_argument, "g2_tables: null argument");
        *text = dup_string(checks::g2_tables_text());
    });
}

g2sf_status g2sf_semiflat_build(const g2sf_grid* u, double tau_override, g2sf_grid** out) {
    return guarded([&] {
        require(u && out, ErrorKind::invalid_argument, "semiflat_build: null argument");
        auto field = immersion_of(u->doc, tau_override);
        auto s = semiflat::build_phi_psi(field);
        GridDoc doc = GridDoc::from_field("h", s.h);
        doc.add("sqrt_det_h", s.sqrt_det_h);
        doc.add("theta", s.theta);
        doc.add("psi_cross", s.psi_cross);
        GridField tau = s.h.like(1);
        for (auto& v : tau.values()) v = s.tau;
        doc.add("tau", std::move(tau));
        *out = new g2sf_grid{std::move(doc)};
    });
}

g2sf_status g2sf_semiflat_verify(const g2sf_grid* u, double tau_override, double tol,
                                 g2sf_report** out) {
    return guarded([&] {
        require(u && out, ErrorKind::invalid_argument, "semiflat_verify: null argument");
        *out = new g2sf_report{checks::semiflat_verify(immersion_of(u->doc, tau_override), tol)};
    });
}

g2sf_status g2sf_ma_check(const g2sf_grid* phi, double tol, g2sf_report** out) {
    return guarded([&] {
        require(phi && out, ErrorKind::invalid_argument, "ma_check: null argument");
        *out = new g2sf_report{checks::ma_check(named_or_single(phi->doc, "phi", 1), tol)};
    });
}

g2sf_status g2sf_ma_embed(const g2sf_grid* phi, g2sf_grid** out) {
    return guarded([&] {
        require(phi && out, ErrorKind::invalid_argument, "ma_embed: null argument");
        auto field = ma::cylindrical_embed(named_or_single(phi->doc, "phi", 1));
        *out = new g2sf_grid{doc_of_immersion(field)};
    });
}

g2sf_status g2sf_quadric_analyze(const g2sf_grid* phi, int p, int q, double h0, double tol_scale,
                                 g2sf_report** out) {
    return guarded([&] {
        require(phi && out, ErrorKind::invalid_argument, "quadric_analyze: null argument");
        auto m = surface_of(phi->doc, p, q, h0);
        *out = new g2sf_report{checks::quadric_analyze(m, tol_scale > 0 ? tol_scale : 10.0)};
    });
}

g2sf_status g2sf_quadric_weierstrass(const char* curve_text, double x0, double x1, double y0,
                                     double y1, int64_t n, g2sf_grid** out) {
    return guarded([&] {
        require(curve_text && out, ErrorKind::invalid_argument, "weierstrass: null argument");
        require(n >= 3, ErrorKind::invalid_argument, "weierstrass: n must be >= 3");
        auto curve = quadric::parse_curve(curve_text);
        GridField phi =
            quadric::weierstrass_integrate(curve, x0, x1, y0, y1, static_cast<std::size_t>(n));
        *out = new g2sf_grid{GridDoc::from_field("phi", std::move(phi))};
    });
}

g2sf_status g2sf_toda_solve(const char* config_text, g2sf_grid** w_out, char** trace_csv,
                            g2sf_report** report_out) {
    return guarded([&] {
        require(config_text, ErrorKind::invalid_argument, "toda_solve: null config");
        json j;
        try {
            j = json::parse(config_text);
        } catch (const std::exception& e) {
            fail_invalid(std::string("toda config: malformed JSON: ") + e.what());
        }
        toda::TodaSolution sol;
        double tol = 1e-10;
        try {
            require(j.at("format_version").get<int>() == 1, ErrorKind::invalid_argument,
                    "toda config: unsupported format_version");
            require(j.at("kind").get<std::string>() == "toda_problem", ErrorKind::invalid_argument,
                    "toda config: kind must be 'toda_problem'");
            std::string equation = j.value("equation", std::string("toda"));
            GridField geom = geometry_of(j);
            Poly qp = parse_poly(j.value("q", std::string("0")));
            toda::NewtonControls nc = newton_of(j);
            tol = nc.tol;
            if (equation == "tzitzeica") {
                toda::TzitzeicaProblem p;
                p.geometry = geom;
                p.q = qp;
                p.boundary = geom.like(1);
                auto bv = boundary_values_of(j, 1);
                for (auto& v : p.boundary.values()) v = bv[0];
                p.newton = nc;
                sol = toda::tzitzeica_solve(p);
            } else if (equation == "toda") {
                toda::TodaProblem p;
                p.rank = j.at("rank").get<int>();
                p.mu = j.at("mu").get<std::vector<int>>();
                p.geometry = geom;
                p.q = qp;
                auto bv = boundary_values_of(j, p.rank);
                for (int i = 0; i < p.rank; ++i) {
                    GridField b = geom.like(1);
                    for (auto& v : b.values()) v = bv[static_cast<std::size_t>(i)];
                    p.boundary.push_back(std::move(b));
                }
                p.newton = nc;
                sol = toda::solve_newton(p);
            } else {
                fail_invalid("toda config: equation must be 'toda' or 'tzitzeica'");
            }
        } catch (const json::exception& e) {
            fail_invalid(std::string("toda config: ") + e.what());
        }
        if (w_out) {
            GridDoc doc;
            for (std::size_t i = 0; i < sol.w.size(); ++i)
                doc.add("w" + std::to_string(i + 1), sol.w[i]);
            *w_out = new g2sf_grid{std::move(doc)};
        }
        if (trace_csv) *trace_csv = dup_string(checks::trace_to_csv(sol));
        if (report_out) *report_out = new g2sf_report{checks::toda_solution_report(sol, tol)};
        require(sol.converged, ErrorKind::numeric,
                "toda_solve: Newton did not converge (residual " +
                    std::to_string(sol.residual_sup) + " after " + std::to_string(sol.iterations) +
                    " iterations)");
    });
}

g2sf_status g2sf_toda_lift(const g2sf_grid* w1, const char* q_poly, double tol,
                           g2sf_report** report_out, g2sf_grid** pair_out) {
    return guarded([&] {
        require(w1 && q_poly, ErrorKind::invalid_argument, "toda_lift: null argument");
        const GridField& w1f = named_or_single(w1->doc, "w1", 1);
        Poly q = parse_poly(q_poly);
        if (report_out) *report_out = new g2sf_report{checks::toda_lift_check(w1f, q, tol)};
        if (pair_out) {
            auto lift = toda::tzitzeica_lift(w1f, q);
            GridDoc doc = GridDoc::from_field("w1", lift.w1);
            doc.add("w2", lift.w2);
            *pair_out = new g2sf_grid{std::move(doc)};
        }
    });
}

g2sf_status g2sf_cone_extend(const g2sf_grid* phi, double r0, double r1, int64_t nr,
                             g2sf_grid** out) {
    return guarded([&] {
        require(phi && out, ErrorKind::invalid_argument, "cone_extend: null argument");
        auto m = surface_of(phi->doc, 3, 3, 1.0);
        auto res = cone::cone_immersion(m, r0, r1, static_cast<std::size_t>(nr));
        *out = new g2sf_grid{doc_of_immersion(res.u)};
    });
}

g2sf_status g2sf_cone_verify(const g2sf_grid* phi, g2sf_report** out) {
    return guarded([&] {
        require(phi && out, ErrorKind::invalid_argument, "cone_verify: null argument");
        auto m = surface_of(phi->doc, 3, 3, 1.0);
        *out = new g2sf_report{checks::cone_verify(m)};
    });
}

}  // extern "C"
