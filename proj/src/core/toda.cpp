#include "core/toda.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <random>

#include "core/errors.hpp"
#include "core/parallel.hpp"

namespace g2sf::toda {

namespace {

constexpr double kExpClamp = 50.0;

double guarded_exp(double arg, bool& clamped) {
    if (arg > kExpClamp) {
        clamped = true;
        arg = kExpClamp;
    } else if (arg < -kExpClamp) {
        clamped = true;
        arg = -kExpClamp;
    }
    return std::exp(arg);
}

void check_geometry(const GridField& g, const char* who) {
    require(g.dim() == 2 && g.components() == 1, ErrorKind::invalid_argument,
            std::string(who) + ": geometry must be a scalar 2D field");
    require(g.size(0) >= 5 && g.size(1) >= 5, ErrorKind::invalid_argument,
            std::string(who) + ": grid must be at least 5x5");
}

GridField sample_poly(const GridField& geom, const Poly& q) {
    GridField out = geom.like(2);
    parallel_for(geom.node_count(), [&](std::size_t node) {
        auto p = geom.point(node);
        out.set_cplx(node, 0, q.eval({p[0], p[1]}));
    });
    return out;
}

// Pointwise nonlinear part N and its Jacobian dN (m x m, row-major) so that
// F_i = (1/2) Lap(w_i) - N_i(w).
class PointSystem {
public:
    virtual ~PointSystem() = default;
    virtual int fields() const = 0;
    virtual void eval(std::size_t node, const double* w, double* n_out, double* dn_out,
                      bool& clamped) const = 0;
};

class TodaPointSystem : public PointSystem {
public:
    TodaPointSystem(const TodaProblem& p, GridField q_samples)
        : rank_(p.rank), mu_(p.mu), q_(std::move(q_samples)) {
        for (const auto& f : p.forcing) forcing_.push_back(&f);
    }
    int fields() const override { return rank_; }
    void eval(std::size_t node, const double* w, double* n_out, double* dn_out,
              bool& clamped) const override {
        const int m = rank_;
        std::fill(dn_out, dn_out + m * m, 0.0);
        for (int i = 1; i <= m; ++i) {
            double wi = w[i - 1];
            double wprev = (i >= 2) ? w[i - 2] : 0.0;
            double lower = mu_[static_cast<std::size_t>(i - 1)] * guarded_exp(2.0 * wi - 2.0 * wprev, clamped);
            double upper;
            double dupper_dwi, dupper_dwnext = 0.0;
            if (i < m) {
                double wnext = w[i];
                upper = mu_[static_cast<std::size_t>(i)] * guarded_exp(2.0 * wnext - 2.0 * wi, clamped);
                dupper_dwi = -2.0 * upper;
                dupper_dwnext = 2.0 * upper;
            } else {
                double qq = std::norm(q_.cplx(node, 0));
                upper = mu_[static_cast<std::size_t>(m)] * qq * guarded_exp(-2.0 * wi, clamped);
                dupper_dwi = -2.0 * upper;
            }
            double f = forcing_.empty() ? 0.0 : forcing_[static_cast<std::size_t>(i - 1)]->at(node, 0);
            n_out[i - 1] = upper - lower + f;
            double* row = dn_out + (i - 1) * m;
            row[i - 1] += dupper_dwi - 2.0 * lower;
            if (i < m) row[i] += dupper_dwnext;
            if (i >= 2) row[i - 2] += 2.0 * lower;
        }
    }

private:
    int rank_;
    std::vector<int> mu_;
    GridField q_;
    std::vector<const GridField*> forcing_;
};

class TzitzeicaPointSystem : public PointSystem {
public:
    TzitzeicaPointSystem(GridField q_samples, const GridField* forcing)
        : q_(std::move(q_samples)), forcing_(forcing) {}
    int fields() const override { return 1; }
    void eval(std::size_t node, const double* w, double* n_out, double* dn_out,
              bool& clamped) const override {
        double qq = std::norm(q_.cplx(node, 0));
        double e4 = guarded_exp(-4.0 * w[0], clamped);
        double e2 = guarded_exp(2.0 * w[0], clamped);
        double f = forcing_ ? forcing_->at(node, 0) : 0.0;
        n_out[0] = -qq * e4 - e2 + f;
        dn_out[0] = 4.0 * qq * e4 - 2.0 * e2;
    }

private:
    GridField q_;
    const GridField* forcing_;
};

// transfinite (Coons) interpolation of Dirichlet data
GridField coons_init(const GridField& boundary) {
    GridField out = boundary.like(1);
    const std::size_t nx = out.size(0), ny = out.size(1);
    auto bv = [&](std::size_t i, std::size_t j) { return boundary.at(boundary.flat(i, j), 0); };
    parallel_for(out.node_count(), [&](std::size_t node) {
        auto idx = out.unflat(node);
        double u = static_cast<double>(idx[0]) / static_cast<double>(nx - 1);
        double v = static_cast<double>(idx[1]) / static_cast<double>(ny - 1);
        double val = (1 - u) * bv(0, idx[1]) + u * bv(nx - 1, idx[1]) + (1 - v) * bv(idx[0], 0) +
                     v * bv(idx[0], ny - 1) -
                     ((1 - u) * (1 - v) * bv(0, 0) + u * (1 - v) * bv(nx - 1, 0) +
                      (1 - u) * v * bv(0, ny - 1) + u * v * bv(nx - 1, ny - 1));
        out.at(node, 0) = val;
    });
    return out;
}

struct Assembled {
    Eigen::VectorXd residual;          // -F at interior unknowns
    double sup = 0.0;
    bool clamped = false;
};

class NewtonWorkspace {
public:
    NewtonWorkspace(const GridField& geom, const PointSystem& sys) : geom_(geom), sys_(sys) {
        const std::size_t nx = geom.size(0), ny = geom.size(1);
        index_.assign(geom.node_count(), SIZE_MAX);
        for (std::size_t i = 1; i + 1 < nx; ++i)
            for (std::size_t j = 1; j + 1 < ny; ++j) {
                index_[geom.flat(i, j)] = interior_.size();
                interior_.push_back(geom.flat(i, j));
            }
        m_ = sys.fields();
        n_unknowns_ = interior_.size() * static_cast<std::size_t>(m_);
        ax_ = 0.5 / (geom.step(0) * geom.step(0));
        ay_ = 0.5 / (geom.step(1) * geom.step(1));
    }

    int m() const { return m_; }
    std::size_t unknowns() const { return n_unknowns_; }
    const std::vector<std::size_t>& interior() const { return interior_; }

    // (1/2) Lap w_i at an interior node (five-point; boundary values read from w)
    double half_laplacian(const std::vector<GridField>& w, int i, std::size_t node) const {
        std::size_t sx = geom_.stride(0), sy = geom_.stride(1);
        const GridField& f = w[static_cast<std::size_t>(i)];
        return ax_ * (f.at(node + sx, 0) - 2.0 * f.at(node, 0) + f.at(node - sx, 0)) +
               ay_ * (f.at(node + sy, 0) - 2.0 * f.at(node, 0) + f.at(node - sy, 0));
    }

    Assembled residual(const std::vector<GridField>& w) const {
        Assembled out;
        out.residual.resize(static_cast<Eigen::Index>(n_unknowns_));
        std::vector<double> wv(static_cast<std::size_t>(m_)), nv(static_cast<std::size_t>(m_)),
            dn(static_cast<std::size_t>(m_ * m_));
        double sup = 0.0;
        bool clamped = false;
        for (std::size_t k = 0; k < interior_.size(); ++k) {
            std::size_t node = interior_[k];
            for (int i = 0; i < m_; ++i) wv[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(i)].at(node, 0);
            sys_.eval(node, wv.data(), nv.data(), dn.data(), clamped);
            for (int i = 0; i < m_; ++i) {
                double F = half_laplacian(w, i, node) - nv[static_cast<std::size_t>(i)];
                out.residual(static_cast<Eigen::Index>(k * static_cast<std::size_t>(m_) + static_cast<std::size_t>(i))) = F;
                sup = std::max(sup, std::abs(F));
            }
        }
        out.sup = sup;
        out.clamped = clamped;
        return out;
    }

    Eigen::SparseMatrix<double> jacobian(const std::vector<GridField>& w, bool& clamped) const {
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(n_unknowns_ * static_cast<std::size_t>(4 + m_));
        std::vector<double> wv(static_cast<std::size_t>(m_)), nv(static_cast<std::size_t>(m_)),
            dn(static_cast<std::size_t>(m_ * m_));
        std::size_t sx = geom_.stride(0), sy = geom_.stride(1);
        for (std::size_t k = 0; k < interior_.size(); ++k) {
            std::size_t node = interior_[k];
            for (int i = 0; i < m_; ++i) wv[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(i)].at(node, 0);
            sys_.eval(node, wv.data(), nv.data(), dn.data(), clamped);
            for (int i = 0; i < m_; ++i) {
                auto row = static_cast<Eigen::Index>(k * static_cast<std::size_t>(m_) + static_cast<std::size_t>(i));
                trips.emplace_back(row, row, -2.0 * (ax_ + ay_));
                for (std::size_t nb : {node - sx, node + sx}) {
                    if (index_[nb] != SIZE_MAX)
                        trips.emplace_back(row, static_cast<Eigen::Index>(index_[nb] * static_cast<std::size_t>(m_) + static_cast<std::size_t>(i)), ax_);
                }
                for (std::size_t nb : {node - sy, node + sy}) {
                    if (index_[nb] != SIZE_MAX)
                        trips.emplace_back(row, static_cast<Eigen::Index>(index_[nb] * static_cast<std::size_t>(m_) + static_cast<std::size_t>(i)), ay_);
                }
                for (int j = 0; j < m_; ++j) {
                    double v = -dn[static_cast<std::size_t>(i * m_ + j)];
                    if (v != 0.0)
                        trips.emplace_back(row, static_cast<Eigen::Index>(k * static_cast<std::size_t>(m_) + static_cast<std::size_t>(j)), v);
                }
            }
        }
        Eigen::SparseMatrix<double> jac(static_cast<Eigen::Index>(n_unknowns_),
                                        static_cast<Eigen::Index>(n_unknowns_));
        jac.setFromTriplets(trips.begin(), trips.end());
        return jac;
    }

    void apply_step(std::vector<GridField>& w, const Eigen::VectorXd& delta, double scale) const {
        for (std::size_t k = 0; k < interior_.size(); ++k)
            for (int i = 0; i < m_; ++i)
                w[static_cast<std::size_t>(i)].at(interior_[k], 0) +=
                    scale * delta(static_cast<Eigen::Index>(k * static_cast<std::size_t>(m_) + static_cast<std::size_t>(i)));
    }

private:
    const GridField& geom_;
    const PointSystem& sys_;
    std::vector<std::size_t> index_;
    std::vector<std::size_t> interior_;
    int m_ = 0;
    std::size_t n_unknowns_ = 0;
    double ax_ = 0.0, ay_ = 0.0;
};

TodaSolution newton_drive(const GridField& geom, const PointSystem& sys,
                          const std::vector<const GridField*>& boundary, const NewtonControls& nc) {
    NewtonWorkspace ws(geom, sys);
    TodaSolution sol;
    sol.w.clear();
    for (const GridField* b : boundary) sol.w.push_back(coons_init(*b));

    for (int iter = 0; iter < nc.max_iter; ++iter) {
        Assembled asm0 = ws.residual(sol.w);
        sol.exponent_clamped = sol.exponent_clamped || asm0.clamped;
        NewtonTraceEntry entry;
        entry.iteration = iter;
        entry.residual_norm = asm0.residual.norm();
        entry.clamped = asm0.clamped;
        if (asm0.sup <= nc.tol) {
            sol.trace.push_back(entry);
            sol.converged = true;
            sol.iterations = iter;
            sol.residual_sup = asm0.sup;
            return sol;
        }
        bool jac_clamped = false;
        Eigen::SparseMatrix<double> jac = ws.jacobian(sol.w, jac_clamped);
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.analyzePattern(jac);
        lu.factorize(jac);
        if (lu.info() != Eigen::Success) {
            sol.trace.push_back(entry);
            sol.converged = false;
            sol.iterations = iter;
            sol.residual_sup = asm0.sup;
            fail_numeric("solve_newton: Jacobian factorization failed at iteration " +
                         std::to_string(iter));
        }
        Eigen::VectorXd delta = lu.solve(-asm0.residual);

        double scale = 1.0;
        bool accepted = false;
        for (int bt = 0; bt <= nc.max_backtrack; ++bt) {
            std::vector<GridField> trial = sol.w;
            ws.apply_step(trial, delta, scale);
            Assembled asmt = ws.residual(trial);
            if (std::isfinite(asmt.residual.norm()) && asmt.residual.norm() < entry.residual_norm) {
                sol.w = std::move(trial);
                sol.exponent_clamped = sol.exponent_clamped || asmt.clamped;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        entry.step_scale = scale;
        sol.trace.push_back(entry);
        if (!accepted) {
            sol.converged = false;
            sol.iterations = iter + 1;
            sol.residual_sup = asm0.sup;
            return sol;  // divergence reported through the flag and trace
        }
    }
    Assembled fin = ws.residual(sol.w);
    sol.converged = fin.sup <= nc.tol;
    sol.iterations = nc.max_iter;
    sol.residual_sup = fin.sup;
    NewtonTraceEntry entry;
    entry.iteration = nc.max_iter;
    entry.residual_norm = fin.residual.norm();
    sol.trace.push_back(entry);
    return sol;
}

}  // namespace

void TodaProblem::validate() const {
    check_geometry(geometry, "TodaProblem");
    require(rank >= 1, ErrorKind::invalid_argument, "TodaProblem: rank must be >= 1");
    require(static_cast<int>(mu.size()) == rank + 1, ErrorKind::invalid_argument,
            "TodaProblem: need rank+1 signs mu");
    for (int s : mu)
        require(s == 1 || s == -1, ErrorKind::invalid_argument, "TodaProblem: mu entries must be +-1");
    require(static_cast<int>(boundary.size()) == rank, ErrorKind::invalid_argument,
            "TodaProblem: need one boundary field per unknown");
    for (const auto& b : boundary) {
        require(b.same_grid(geometry) && b.components() == 1, ErrorKind::invalid_argument,
                "TodaProblem: boundary fields must live on the problem grid");
        for (double v : b.values())
            require(std::isfinite(v), ErrorKind::invalid_argument,
                    "TodaProblem: boundary data must be finite");
    }
    require(forcing.empty() || static_cast<int>(forcing.size()) == rank, ErrorKind::invalid_argument,
            "TodaProblem: forcing must be empty or one field per unknown");
    for (const auto& f : forcing)
        require(f.same_grid(geometry) && f.components() == 1, ErrorKind::invalid_argument,
                "TodaProblem: forcing fields must live on the problem grid");
    if (q_field)
        require(q_field->same_grid(geometry) && q_field->components() == 2,
                ErrorKind::invalid_argument, "TodaProblem: q_field must be complex on the grid");
}

GridField TodaProblem::q_samples() const {
    if (q_field) return *q_field;
    return sample_poly(geometry, q);
}

std::vector<GridField> toda_residual(const TodaProblem& p, const std::vector<GridField>& w) {
    p.validate();
    require(static_cast<int>(w.size()) == p.rank, ErrorKind::invalid_argument,
            "toda_residual: field count mismatch");
    for (const auto& wi : w)
        require(wi.same_grid(p.geometry) && wi.components() == 1, ErrorKind::invalid_argument,
                "toda_residual: state fields must live on the problem grid");
    TodaPointSystem sys(p, p.q_samples());
    NewtonWorkspace ws(p.geometry, sys);
    std::vector<GridField> out(static_cast<std::size_t>(p.rank), p.geometry.like(1));
    Assembled a = ws.residual(w);
    for (std::size_t k = 0; k < ws.interior().size(); ++k)
        for (int i = 0; i < p.rank; ++i)
            out[static_cast<std::size_t>(i)].at(ws.interior()[k], 0) =
                a.residual(static_cast<Eigen::Index>(k * static_cast<std::size_t>(p.rank) + static_cast<std::size_t>(i)));
    return out;
}

TodaSolution solve_newton(const TodaProblem& p) {
    p.validate();
    TodaPointSystem sys(p, p.q_samples());
    std::vector<const GridField*> bnd;
    for (const auto& b : p.boundary) bnd.push_back(&b);
    return newton_drive(p.geometry, sys, bnd, p.newton);
}

double jacobian_directional_check(const TodaProblem& p, const std::vector<GridField>& w,
                                  int directions, unsigned seed) {
    p.validate();
    TodaPointSystem sys(p, p.q_samples());
    NewtonWorkspace ws(p.geometry, sys);
    bool clamped = false;
    Eigen::SparseMatrix<double> jac = ws.jacobian(w, clamped);
    std::mt19937 rng(seed);
    std::normal_distribution<double> dist;
    double worst = 0.0;
    const double eps = 1e-5;
    for (int d = 0; d < directions; ++d) {
        Eigen::VectorXd dir(static_cast<Eigen::Index>(ws.unknowns()));
        for (Eigen::Index i = 0; i < dir.size(); ++i) dir(i) = dist(rng);
        std::vector<GridField> wp = w, wm = w;
        ws.apply_step(wp, dir, eps);
        ws.apply_step(wm, dir, -eps);
        Eigen::VectorXd fd = (ws.residual(wp).residual - ws.residual(wm).residual) / (2.0 * eps);
        Eigen::VectorXd jd = jac * dir;
        double denom = jd.norm();
        worst = std::max(worst, (fd - jd).norm() / (denom > 0 ? denom : 1.0));
    }
    return worst;
}

GridField tzitzeica_residual(const TzitzeicaProblem& p, const GridField& w) {
    check_geometry(p.geometry, "tzitzeica_residual");
    GridField qs = p.q_field ? *p.q_field : sample_poly(p.geometry, p.q);
    TzitzeicaPointSystem sys(std::move(qs), p.forcing ? &*p.forcing : nullptr);
    NewtonWorkspace ws(p.geometry, sys);
    std::vector<GridField> wv = {w};
    Assembled a = ws.residual(wv);
    GridField out = p.geometry.like(1);
    for (std::size_t k = 0; k < ws.interior().size(); ++k)
        out.at(ws.interior()[k], 0) = a.residual(static_cast<Eigen::Index>(k));
    return out;
}

TodaSolution tzitzeica_solve(const TzitzeicaProblem& p) {
    check_geometry(p.geometry, "tzitzeica_solve");
    require(p.boundary.same_grid(p.geometry) && p.boundary.components() == 1,
            ErrorKind::invalid_argument, "tzitzeica_solve: boundary field must live on the grid");
    GridField qs = p.q_field ? *p.q_field : sample_poly(p.geometry, p.q);
    TzitzeicaPointSystem sys(std::move(qs), p.forcing ? &*p.forcing : nullptr);
    std::vector<const GridField*> bnd = {&p.boundary};
    return newton_drive(p.geometry, sys, bnd, p.newton);
}

LiftResult tzitzeica_lift(const GridField& w1, const Poly& q,
                          const std::optional<GridField>& q_field) {
    require(w1.dim() == 2 && w1.components() == 1, ErrorKind::invalid_argument,
            "tzitzeica_lift: w1 must be a scalar 2D field");
    GridField qs = q_field ? *q_field : sample_poly(w1, q);
    require(qs.same_grid(w1) && qs.components() == 2, ErrorKind::invalid_argument,
            "tzitzeica_lift: q samples must be complex on the w1 grid");
    // A zero of q between grid nodes is as fatal as one on a node: flag any
    // node where |q| is small against the first-order variation 2h |q_z|.
    auto [qz, qzb] = wirtinger(qs);
    const double hg = w1.max_spacing();
    auto zero = parallel_find_first(w1.node_count(), [&](std::size_t node) {
        double mag = std::abs(qs.cplx(node, 0));
        return mag <= 2.0 * hg * std::abs(qz.cplx(node, 0)) + 1e-300;
    });
    if (zero.first)
        fail_numeric("tzitzeica_lift: q vanishes on or near the domain (node " +
                     format_node(w1, zero.second) +
                     "); the reduction H_2 = q qbar / H_1 needs nonvanishing q");

    LiftResult out{w1, w1.like(1), w1.like(1), w1.like(1), 0.0};
    parallel_for(w1.node_count(), [&](std::size_t node) {
        out.w2.at(node, 0) = std::log(std::abs(qs.cplx(node, 0))) - w1.at(node, 0);
    });

    TodaProblem d23;
    d23.rank = 2;
    d23.mu = {1, -1, 1};
    d23.geometry = w1.like(1);
    d23.q_field = qs;
    d23.boundary = {w1.like(1), w1.like(1)};
    std::vector<GridField> w = {out.w1, out.w2};
    auto res = toda_residual(d23, w);
    out.residual1 = res[0];
    out.residual2 = res[1];
    out.residual_sup = std::max(sup_norm(out.residual1, 1).value, sup_norm(out.residual2, 1).value);
    return out;
}

CurvatureSigns curvature_signs(const GridField& w1, const GridField& w2) {
    require(w1.dim() == 2 && w1.components() == 1 && w2.same_grid(w1) && w2.components() == 1,
            ErrorKind::invalid_argument, "curvature_signs: need two scalar fields on one 2D grid");
    GridField diff = w1.like(1);
    parallel_for(w1.node_count(), [&](std::size_t node) {
        diff.at(node, 0) = w2.at(node, 0) - w1.at(node, 0);
    });
    auto quarter_lap = [](const GridField& f) {
        GridField fxx = second_derivative_same_axis(f, 0);
        GridField fyy = second_derivative_same_axis(f, 1);
        GridField out = f.like(1);
        parallel_for(f.node_count(), [&](std::size_t node) {
            out.at(node, 0) = 0.25 * (fxx.at(node, 0) + fyy.at(node, 0));
        });
        return out;
    };
    GridField l1 = quarter_lap(w1);
    GridField l2 = quarter_lap(diff);
    CurvatureSigns out{w1.like(1), w1.like(1), 0.0, 0.0, false};
    parallel_for(w1.node_count(), [&](std::size_t node) {
        out.k1.at(node, 0) = -4.0 * std::exp(-2.0 * w1.at(node, 0)) * l1.at(node, 0);
        out.k2.at(node, 0) = -4.0 * std::exp(-2.0 * diff.at(node, 0)) * l2.at(node, 0);
    });
    bool first = true;
    for (std::size_t node = 0; node < w1.node_count(); ++node) {
        if (!w1.is_interior(node, 1)) continue;
        double k1 = out.k1.at(node, 0), k2 = out.k2.at(node, 0);
        if (first) {
            out.min_k1 = k1;
            out.max_k2 = k2;
            first = false;
        } else {
            out.min_k1 = std::min(out.min_k1, k1);
            out.max_k2 = std::max(out.max_k2, k2);
        }
    }
    out.solution_like = out.min_k1 > 0.0 && out.max_k2 < 0.0;
    return out;
}

}  // namespace g2sf::toda
