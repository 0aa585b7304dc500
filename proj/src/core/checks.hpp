#pragma once

#include <string>

#include "core/cone.hpp"
#include "core/monge_ampere.hpp"
#include "core/quadric.hpp"
#include "core/report.hpp"
#include "core/semiflat.hpp"
#include "core/toda.hpp"

namespace g2sf::checks {

/// Component tables of the standard pair, the recovered metric/volume, and
/// the Lambda^2 pairing matrix, in a frozen golden-file format.
std::string g2_tables_text();

/// dphi, dpsi, harmonicity and theta self-duality sups of the semi-flat
/// structure built from u. tol <= 0 selects the default 10 h^2.
report::Report semiflat_verify(const semiflat::ImmersionField& u, double tol = 0.0);

/// Monge-Ampere diagnostics of a potential: the two operator routes, their
/// Jacobi cross-difference, and the Hessian definiteness. tol <= 0 selects
/// 10 h^2 * max(1, sup|det H|).
report::Report ma_check(const GridField& phi, double tol = 0.0);

/// Harmonic sequence analysis: gates, levels, classification, the six
/// relation residuals, and Toda data when superconformal.
report::Report quadric_analyze(const quadric::SurfaceMap& m, double tol_scale = 10.0);

/// Surface + radial-extension checks: tau^0 for the Riemannian-immersion
/// structure (domain metric = discrete pullback), closed-form vs direct cone
/// tension, and the 1/r^2 law.
report::Report cone_verify(const quadric::SurfaceMap& m);

/// Residuals of the lifted pair (w1, ln|q| - w1) against the r=2, mu=(1,-1,1)
/// system, plus the curvature-sign diagnostics. tol <= 0 selects 50 h^2.
report::Report toda_lift_check(const GridField& w1, const Poly& q, double tol = 0.0);

/// Solver outcome as a report (residual, iterations, convergence).
report::Report toda_solution_report(const toda::TodaSolution& sol, double tol);

std::string trace_to_csv(const toda::TodaSolution& sol);

}  // namespace g2sf::checks
