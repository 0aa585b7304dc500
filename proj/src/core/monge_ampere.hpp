#pragma once

#include <cstddef>

#include "core/grid.hpp"
#include "core/semiflat.hpp"

namespace g2sf::ma {

// Fields built from third derivatives of the potential (grad_det, trace_form,
// dual Hessians) chain three difference operators, so their sups are taken
// one node deeper than the usual residual margin.
inline constexpr int kThirdDerivativeMargin = semiflat::kResidualMargin + 1;

/// Discrete Hessian of a scalar potential on a 3D grid: compact (1,-2,1)
/// stencils on the diagonal, symmetric cross stencils for mixed entries
/// (so the result is symmetric by construction). 6 components in the
/// symmetric order (00,01,02,11,12,22).
struct HessianMetric {
    GridField hess;
    bool positive_definite = true;   // over interior nodes (margin 1)
    std::size_t first_bad_node = 0;  // meaningful when not positive definite
};

HessianMetric hessian_metric(const GridField& phi);

/// The two routes to the Monge-Ampere operator's gradient:
///   grad_det_a  = d_a det H(phi)        (differencing the determinant field)
///   trace_form_a = psi^{ij} phi_{aij}   (psi = H^{-1}, third derivatives by
///                                        differencing the Hessian field)
/// Jacobi's formula says grad_det = det H * trace_form.
struct MaResidual {
    GridField grad_det;    // 3 components
    GridField trace_form;  // 3 components
    GridField det;         // 1 component, det H at each node
};

MaResidual ma_residual(const GridField& phi);

/// sup |d det A - det A * tr(A^-1 dA)| over interior nodes of a matrix-valued
/// 1D field (components row-major d x d).
double jacobi_identity_check(const GridField& a);

/// Legendre dual data sampled on the scattered image of the node gradients.
/// All dual-side derivatives are taken by the chain rule through the forward
/// map (Jacobian = Hessian), so checks happen at matched points only and no
/// re-gridding or interpolation is involved.
struct DualPair {
    GridField v;    // 3 components: v = grad phi at each node
    GridField psi;  // 1 component: psi(v) = u . v - phi(u)
    double gradient_involution_residual = 0.0;  // sup |grad_v psi - u|
    double hessian_inverse_residual = 0.0;      // sup |Hess_v psi - H(phi)^{-1}|
    double double_dual_residual = 0.0;          // sup |(psi dualized back) - phi|
};

DualPair legendre_dual(const GridField& phi);

/// Cylindrical embedding into the semi-flat pipeline: the circle coordinate
/// t = x^0 occupies the fourth fibre slot, so in the lexicographic
/// Lambda^2 R^4 basis
///   u~_{i4} = u_i  and  (u~_{23}, u~_{13}, u~_{12}) = (v^1, -v^2, v^3).
/// (The sqrt(2) of the isometry and the 1/sqrt(2) of its normalization
/// cancel; components carry unit coefficients, which makes the pulled-back
/// metric equal the Hessian metric exactly for tau = 1.)
semiflat::ImmersionField cylindrical_embed(const GridField& phi);

}  // namespace g2sf::ma
