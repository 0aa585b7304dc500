#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/grid.hpp"
#include "core/poly.hpp"

namespace g2sf::toda {

struct NewtonControls {
    double tol = 1e-10;      // residual sup-norm target
    int max_iter = 25;
    int max_backtrack = 20;  // halvings in the line search
};

/// Discretized signed affine Toda system for fields w_1..w_r on a rectangle,
///   F_i = 2 (w_i)_zzbar - mu_{i+1} e^{2w_{i+1}-2w_i} + mu_i e^{2w_i-2w_{i-1}} - f_i,
///   F_r = 2 (w_r)_zzbar - mu_{r+1} q qbar e^{-2w_r} + mu_r e^{2w_r-2w_{r-1}} - f_r,
/// with w_0 = 0 and (.)_zzbar = (1/4) five-point Laplacian. The specialization
/// r = 2, mu = (1,-1,1) is the D3 system of the unit (3,3) quadric.
struct TodaProblem {
    int rank = 2;
    std::vector<int> mu;               // rank+1 signs in {+1,-1}
    GridField geometry;                // 2D 1-component field fixing shape/origin/spacing
    Poly q;                            // holomorphic q as a polynomial in z
    std::optional<GridField> q_field;  // sampled q (2 components) overriding the polynomial
    std::vector<GridField> boundary;   // rank fields; only boundary nodes are read
    std::vector<GridField> forcing;    // rank fields or empty (zero forcing)
    NewtonControls newton;

    void validate() const;
    GridField q_samples() const;  // 2-component complex field of q on the grid
};

/// PDE residual fields of a given state (zero on boundary nodes).
std::vector<GridField> toda_residual(const TodaProblem& p, const std::vector<GridField>& w);

struct NewtonTraceEntry {
    int iteration = 0;
    double residual_norm = 0.0;  // 2-norm over interior unknowns before the step
    double step_scale = 1.0;     // accepted line-search scale
    bool clamped = false;        // an exponential argument hit the guard
};

struct TodaSolution {
    std::vector<GridField> w;
    double residual_sup = 0.0;
    std::vector<NewtonTraceEntry> trace;
    bool converged = false;
    int iterations = 0;
    bool exponent_clamped = false;
};

/// Damped Newton with an analytically assembled sparse Jacobian
/// (five-point Laplacian blocks plus pointwise exponential couplings) and a
/// backtracking line search on the residual 2-norm. The initial guess is the
/// transfinite (Coons) interpolation of the boundary data.
TodaSolution solve_newton(const TodaProblem& p);

/// Directional-derivative check of the assembled Jacobian:
/// max over `directions` random directions of
/// |J d - (F(w+eps d) - F(w-eps d))/(2 eps)| / |J d|.
double jacobian_directional_check(const TodaProblem& p, const std::vector<GridField>& w,
                                  int directions, unsigned seed);

/// The elliptic affine sphere equation
///   2 (w)_zzbar = -q qbar e^{-4w} - e^{2w} + f,
/// same Newton machinery with a single unknown field.
struct TzitzeicaProblem {
    GridField geometry;
    Poly q;
    std::optional<GridField> q_field;
    GridField boundary;
    std::optional<GridField> forcing;
    NewtonControls newton;
};

TodaSolution tzitzeica_solve(const TzitzeicaProblem& p);

/// Residual field of the Tzitzeica equation for a given w (zero on boundary).
GridField tzitzeica_residual(const TzitzeicaProblem& p, const GridField& w);

/// The reduction H_2 = q qbar / H_1: w_2 = ln|q| - w_1 turns a Tzitzeica
/// solution into a solution of the r=2, mu=(1,-1,1) system. Returns the pair
/// and the system residuals of the lifted pair (zero forcing).
struct LiftResult {
    GridField w1;
    GridField w2;
    GridField residual1;  // d23 system residual, first equation
    GridField residual2;  // second equation
    double residual_sup = 0.0;
};

LiftResult tzitzeica_lift(const GridField& w1, const Poly& q,
                          const std::optional<GridField>& q_field = std::nullopt);

/// Curvature diagnostics: K1 = -4 e^{-2w1} (w1)_zzbar for a_1 = e^{2w1} and
/// K2 = -4 e^{-2(w2-w1)} (w2-w1)_zzbar for a_2 = e^{2w2-2w1}. For a true
/// solution of the d23 system K1 > 0 and K2 < 0 strictly.
struct CurvatureSigns {
    GridField k1;
    GridField k2;
    double min_k1 = 0.0;  // over interior nodes
    double max_k2 = 0.0;
    bool solution_like = false;  // min_k1 > 0 and max_k2 < 0
};

CurvatureSigns curvature_signs(const GridField& w1, const GridField& w2);

}  // namespace g2sf::toda
