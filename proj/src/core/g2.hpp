#pragma once

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "core/form.hpp"

namespace g2sf {

/// The standard associative/coassociative pair on R^7,
///   phi0 = e123 + e1^(e45+e67) + e2^(e46-e57) + e3^(-e47-e56)
///   psi0 = e4567 + e23^(e45+e67) + e31^(e46-e57) + e12^(-e47-e56)
/// with psi0 = *phi0 for the euclidean metric and positive orientation.
struct G2FormPair {
    FormR phi;
    FormR psi;
};

G2FormPair standard_forms();

/// Exact metric recovery from a 3-form on R^7 via
///   g(A,B) dvol = (1/6) phi ^ i_A phi ^ i_B phi.
/// The bilinear coefficient matrix b determines g and dvol through the
/// det-closure g = b / det(b)^{1/9}, dvol = det(b)^{1/9} e^{1..7} (7 = 9-2:
/// this is the unique normalization making g(A,B) dvol = B(A,B) with dvol the
/// unit volume form of g). Requires b positive definite after a global
/// orientation flip; `orientation` reports the flip (+1 normally).
struct MetricVolumeR {
    std::array<std::array<Rat, 7>, 7> metric;
    Rat dvol_coeff;    // dvol = dvol_coeff * e^{1..7}
    int orientation;   // sign absorbed into dvol
};
struct MetricVolumeD {
    Eigen::MatrixXd metric;
    double dvol_coeff;
    int orientation;
};

/// Exact path; throws ErrorKind::numeric if the bilinear form is not definite
/// or det(b) is not a perfect rational ninth power.
MetricVolumeR metric_from_three_form(const FormR& phi);
/// Floating-point path for general coefficients.
MetricVolumeD metric_from_three_form(const FormD& phi);

struct CoassociativeCheck {
    bool is_coassociative = false;
    double restriction_norm = 0.0;
};

/// phi restricted to the span of 4 independent vectors: max |phi(v_i,v_j,v_k)|
/// over basis triples; coassociative iff <= 1e-12.
CoassociativeCheck coassociative_check(const FormD& phi, const Eigen::Matrix<double, 7, 4>& plane);

/// The deformation 2-form i_nu phi restricted to a coassociative plane,
/// expressed in the plane's own basis coordinates. Self-dual for the induced
/// metric and the orientation inherited from psi = *phi.
FormD deformation_form(const FormD& phi, const Eigen::Matrix<double, 7, 4>& plane,
                       const Eigen::Matrix<double, 7, 1>& nu);

/// Frames splitting R^7 into an associative 3-plane and a coassociative
/// 4-plane, with phi/psi in the normal form of the standard pair.
struct FramedSplitting {
    Eigen::Matrix<double, 7, 3> a;  // associative frame a_1..a_3 (columns)
    Eigen::Matrix<double, 7, 4> e;  // coassociative frame e_1..e_4 (columns)
    double max_component_error;     // componentwise mismatch against the normal form
};

/// Given phi, psi and an orthonormal coassociative frame e_1..e_4, produce the
/// unique a_1..a_3 with i_{a_mu} phi| = (e12+e34, e13-e24, -e14-e23) and check
/// that phi and psi then match the normal form to 1e-10 componentwise.
FramedSplitting normal_form_check(const FormD& phi, const FormD& psi,
                                  const Eigen::Matrix<double, 7, 4>& vertical_frame);

using Mat4i = Eigen::Matrix<long long, 4, 4>;
using Mat6i = Eigen::Matrix<long long, 6, 6>;

/// Induced action of M in SL(4,Z) on Lambda^2 R^4 in the lexicographic basis
/// (e12, e13, e14, e23, e24, e34). Exact integers; preserves the wedge pairing
/// Q (anti-diagonal +1,-1,+1,+1,-1,+1) and has determinant one.
Mat6i sl4_induced_action(const Mat4i& m);

/// The wedge pairing matrix Q on Lambda^2 R^4 in the lexicographic basis:
/// Q(alpha,beta) e^{1234} = alpha ^ beta.
Mat6i lambda2_pairing();

/// Exact integer determinant (Bareiss fraction-free elimination).
long long integer_determinant(Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic> m);

/// Dense fast path used in per-node loops: metric + volume coefficient from
/// the 35 lexicographic components of a 3-form on R^7. Same math as
/// metric_from_three_form(FormD), without the generic container overhead.
struct DenseMetricVolume {
    Eigen::Matrix<double, 7, 7> metric;
    double dvol_coeff;
};
DenseMetricVolume g2_metric_dense(const std::array<double, 35>& phi_components);

/// Lexicographic Lambda^3(R^7) index table (35 masks) shared with the dense path.
const std::vector<Mask>& lambda3_r7_indices();

}  // namespace g2sf
