// g2sf command line: thin shell over the public C API.
//
// Exit codes: 0 success / all checks pass, 1 a reported check failed,
// 2 usage error (bad flags, malformed config, unreadable path),
// 3 numeric failure (divergence, singular or indefinite data).

#include <CLI11.hpp>
#include <g2sf/g2sf.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

struct GridDeleter {
    void operator()(g2sf_grid* g) const { g2sf_grid_free(g); }
};
struct ReportDeleter {
    void operator()(g2sf_report* r) const { g2sf_report_free(r); }
};
using GridPtr = std::unique_ptr<g2sf_grid, GridDeleter>;
using ReportPtr = std::unique_ptr<g2sf_report, ReportDeleter>;

int exit_of(g2sf_status st) {
    switch (st) {
        case G2SF_OK: return kExitOk;
        case G2SF_ERROR_INVALID_ARGUMENT: return kExitUsage;
        case G2SF_ERROR_IO: return kExitUsage;
        case G2SF_ERROR_NUMERIC: return kExitNumeric;
    }
    return kExitUsage;
}

[[noreturn]] void die(g2sf_status st) {
    std::cerr << "g2sf: error: " << g2sf_last_error() << "\n";
    std::exit(exit_of(st));
}

void check(g2sf_status st) {
    if (st != G2SF_OK) die(st);
}

GridPtr read_grid(const std::string& path) {
    g2sf_grid* g = nullptr;
    check(g2sf_grid_read(path.c_str(), &g));
    return GridPtr(g);
}

void write_grid(const g2sf_grid* g, const std::string& path) {
    check(g2sf_grid_write(g, path.c_str()));
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::cerr << "g2sf: error: cannot open '" << path << "'\n";
        std::exit(kExitUsage);
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void put_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "g2sf: error: cannot write '" << path << "'\n";
        std::exit(kExitUsage);
    }
    out << text;
}

// print to stdout, optionally tee to a file, exit by pass/fail
int emit_report(g2sf_report* rep, const std::string& report_path) {
    char* text = nullptr;
    check(g2sf_report_render(rep, &text));
    std::cout << text;
    if (!report_path.empty()) put_file(report_path, text);
    g2sf_string_free(text);
    return g2sf_report_passed(rep) ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"g2sf: semi-flat G2 structures, minimal immersions, Toda reductions"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "worker threads (0 = default)");

    // ---- g2 ----
    auto* g2 = app.add_subcommand("g2", "G2 form algebra");
    g2->require_subcommand(1);
    auto* g2_tables = g2->add_subcommand("tables", "emit the standard form tables");
    std::string g2_out;
    g2_tables->add_option("--output", g2_out, "write tables to a file as well");

    // ---- semiflat ----
    auto* sf = app.add_subcommand("semiflat", "semi-flat structures from immersions");
    sf->require_subcommand(1);
    auto* sf_build = sf->add_subcommand("build", "build phi/psi tables from an immersion grid");
    std::string sf_in, sf_out;
    double sf_tau = 0.0;
    sf_build->add_option("--input", sf_in, "immersion grid (field 'u')")->required();
    sf_build->add_option("--tau", sf_tau, "fibre volume (overrides the grid's tau field)");
    sf_build->add_option("--output", sf_out, "output grid")->required();

    auto* sf_verify = sf->add_subcommand("verify", "closure and harmonicity residuals");
    std::vector<std::string> sf_inputs;
    std::string sf_report;
    double sf_vtau = 0.0, sf_tol = 0.0;
    sf_verify->add_option("--input", sf_inputs, "immersion grid(s); pass three for orders")
        ->required()
        ->expected(1, 3);
    sf_verify->add_option("--tau", sf_vtau, "fibre volume override");
    sf_verify->add_option("--tol", sf_tol, "pass tolerance (default 10 h^2)");
    sf_verify->add_option("--report", sf_report, "also write the report here");

    // ---- ma ----
    auto* ma = app.add_subcommand("ma", "Monge-Ampere reductions");
    ma->require_subcommand(1);
    auto* ma_check = ma->add_subcommand("check", "Monge-Ampere operator diagnostics");
    std::string ma_in, ma_report;
    double ma_tol = 0.0;
    ma_check->add_option("--input", ma_in, "potential grid (field 'phi')")->required();
    ma_check->add_option("--tol", ma_tol, "pass tolerance");
    ma_check->add_option("--report", ma_report, "also write the report here");
    auto* ma_embed = ma->add_subcommand("embed", "cylindrical embedding into an immersion grid");
    std::string ma_ein, ma_eout;
    ma_embed->add_option("--input", ma_ein, "potential grid")->required();
    ma_embed->add_option("--output", ma_eout, "output immersion grid")->required();

    // ---- quadric ----
    auto* qd = app.add_subcommand("quadric", "minimal surfaces in quadrics");
    qd->require_subcommand(1);
    auto* qd_an = qd->add_subcommand("analyze", "harmonic sequence analysis");
    std::string qd_in, qd_sig = "3,3", qd_report;
    double qd_h0 = 1.0, qd_tolscale = 10.0;
    qd_an->add_option("--input", qd_in, "surface grid (field 'phi')")->required();
    qd_an->add_option("--signature", qd_sig, "ambient signature p,q (default 3,3)");
    qd_an->add_option("--h0", qd_h0, "quadric level, +1 or -1");
    qd_an->add_option("--tol-scale", qd_tolscale, "gate constant C in C h^2 (default 10)");
    qd_an->add_option("--report", qd_report, "also write the report here");
    auto* qd_w = qd->add_subcommand("weierstrass", "integrate a null holomorphic curve");
    std::string qd_curve, qd_wout, qd_domain = "-1,1,-1,1";
    int64_t qd_n = 65;
    qd_w->add_option("--curve", qd_curve, "curve file (JSON)")->required();
    qd_w->add_option("--domain", qd_domain, "x0,x1,y0,y1");
    qd_w->add_option("--n", qd_n, "nodes per axis");
    qd_w->add_option("--output", qd_wout, "output surface grid")->required();

    // ---- toda ----
    auto* td = app.add_subcommand("toda", "affine Toda / Tzitzeica solver");
    td->require_subcommand(1);
    auto* td_solve = td->add_subcommand("solve", "damped Newton solve from a config file");
    std::string td_cfg, td_out, td_trace, td_report;
    td_solve->add_option("--config", td_cfg, "problem config (JSON)")->required();
    td_solve->add_option("--output", td_out, "solution grid");
    td_solve->add_option("--trace", td_trace, "Newton trace CSV");
    td_solve->add_option("--report", td_report, "also write the report here");
    auto* td_lift = td->add_subcommand("lift", "Tzitzeica -> rank-2 system lift");
    std::string td_w1, td_q = "z", td_lreport, td_lout;
    double td_ltol = 0.0;
    td_lift->add_option("--w1", td_w1, "w1 grid")->required();
    td_lift->add_option("--q", td_q, "holomorphic q as a polynomial in z");
    td_lift->add_option("--tol", td_ltol, "pass tolerance (default 50 h^2)");
    td_lift->add_option("--report", td_lreport, "also write the report here");
    td_lift->add_option("--output", td_lout, "write the lifted pair grid");

    // ---- cone ----
    auto* cn = app.add_subcommand("cone", "cones over quadric surfaces");
    cn->require_subcommand(1);
    auto* cn_ext = cn->add_subcommand("extend", "radially extend a surface to an immersion");
    std::string cn_in, cn_out;
    double cn_r0 = 0.5, cn_r1 = 1.5;
    int64_t cn_nr = 33;
    cn_ext->add_option("--input", cn_in, "surface grid, signature (3,3)")->required();
    cn_ext->add_option("--r0", cn_r0, "inner radius (> 0)");
    cn_ext->add_option("--r1", cn_r1, "outer radius");
    cn_ext->add_option("--nr", cn_nr, "radial nodes");
    cn_ext->add_option("--output", cn_out, "output immersion grid")->required();
    auto* cn_ver = cn->add_subcommand("verify", "radial-extension relations");
    std::string cn_vin, cn_vreport;
    cn_ver->add_option("--input", cn_vin, "surface grid, signature (3,3)")->required();
    cn_ver->add_option("--report", cn_vreport, "also write the report here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }

    if (threads > 0) g2sf_set_threads(threads);

    if (g2_tables->parsed()) {
        char* text = nullptr;
        check(g2sf_g2_tables(&text));
        std::cout << text;
        if (!g2_out.empty()) put_file(g2_out, text);
        g2sf_string_free(text);
        return kExitOk;
    }
    if (sf_build->parsed()) {
        GridPtr u = read_grid(sf_in);
        g2sf_grid* out = nullptr;
        check(g2sf_semiflat_build(u.get(), sf_tau, &out));
        GridPtr holder(out);
        write_grid(out, sf_out);
        return kExitOk;
    }
    if (sf_verify->parsed()) {
        std::vector<ReportPtr> reps;
        for (const auto& path : sf_inputs) {
            GridPtr u = read_grid(path);
            g2sf_report* rep = nullptr;
            check(g2sf_semiflat_verify(u.get(), sf_vtau, sf_tol, &rep));
            reps.emplace_back(rep);
        }
        if (reps.size() == 3) {
            g2sf_report* orders = nullptr;
            check(g2sf_order_estimate(reps[0].get(), reps[1].get(), reps[2].get(), &orders));
            ReportPtr holder(orders);
            return emit_report(orders, sf_report);
        }
        return emit_report(reps.back().get(), sf_report);
    }
    if (ma_check->parsed()) {
        GridPtr phi = read_grid(ma_in);
        g2sf_report* rep = nullptr;
        check(g2sf_ma_check(phi.get(), ma_tol, &rep));
        ReportPtr holder(rep);
        return emit_report(rep, ma_report);
    }
    if (ma_embed->parsed()) {
        GridPtr phi = read_grid(ma_ein);
        g2sf_grid* out = nullptr;
        check(g2sf_ma_embed(phi.get(), &out));
        GridPtr holder(out);
        write_grid(out, ma_eout);
        return kExitOk;
    }
    if (qd_an->parsed()) {
        int p = 3, q = 3;
        if (std::sscanf(qd_sig.c_str(), "%d,%d", &p, &q) != 2) {
            std::cerr << "g2sf: error: --signature expects 'p,q'\n";
            return kExitUsage;
        }
        GridPtr phi = read_grid(qd_in);
        g2sf_report* rep = nullptr;
        check(g2sf_quadric_analyze(phi.get(), p, q, qd_h0, qd_tolscale, &rep));
        ReportPtr holder(rep);
        return emit_report(rep, qd_report);
    }
    if (qd_w->parsed()) {
        double x0, x1, y0, y1;
        if (std::sscanf(qd_domain.c_str(), "%lf,%lf,%lf,%lf", &x0, &x1, &y0, &y1) != 4) {
            std::cerr << "g2sf: error: --domain expects 'x0,x1,y0,y1'\n";
            return kExitUsage;
        }
        std::string curve = slurp(qd_curve);
        g2sf_grid* out = nullptr;
        check(g2sf_quadric_weierstrass(curve.c_str(), x0, x1, y0, y1, qd_n, &out));
        GridPtr holder(out);
        write_grid(out, qd_wout);
        return kExitOk;
    }
    if (td_solve->parsed()) {
        std::string cfg = slurp(td_cfg);
        g2sf_grid* w = nullptr;
        char* trace = nullptr;
        g2sf_report* rep = nullptr;
        g2sf_status st = g2sf_toda_solve(cfg.c_str(), &w, &trace, &rep);
        GridPtr wh(w);
        ReportPtr rh(rep);
        if (trace && !td_trace.empty()) put_file(td_trace, trace);
        if (trace) g2sf_string_free(trace);
        if (w && !td_out.empty()) write_grid(w, td_out);
        if (rep) {
            char* text = nullptr;
            check(g2sf_report_render(rep, &text));
            std::cout << text;
            if (!td_report.empty()) put_file(td_report, text);
            g2sf_string_free(text);
        }
        if (st != G2SF_OK) {
            std::cerr << "g2sf: error: " << g2sf_last_error() << "\n";
            return exit_of(st);
        }
        return kExitOk;
    }
    if (td_lift->parsed()) {
        GridPtr w1 = read_grid(td_w1);
        g2sf_report* rep = nullptr;
        g2sf_grid* pair = nullptr;
        check(g2sf_toda_lift(w1.get(), td_q.c_str(), td_ltol, &rep,
                             td_lout.empty() ? nullptr : &pair));
        ReportPtr rh(rep);
        GridPtr ph(pair);
        if (pair && !td_lout.empty()) write_grid(pair, td_lout);
        return emit_report(rep, td_lreport);
    }
    if (cn_ext->parsed()) {
        GridPtr phi = read_grid(cn_in);
        g2sf_grid* out = nullptr;
        check(g2sf_cone_extend(phi.get(), cn_r0, cn_r1, cn_nr, &out));
        GridPtr holder(out);
        write_grid(out, cn_out);
        return kExitOk;
    }
    if (cn_ver->parsed()) {
        GridPtr phi = read_grid(cn_vin);
        g2sf_report* rep = nullptr;
        check(g2sf_cone_verify(phi.get(), &rep));
        ReportPtr holder(rep);
        return emit_report(rep, cn_vreport);
    }
    return kExitUsage;
}
