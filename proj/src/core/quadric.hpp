#pragma once

#include <complex>
#include <string>
#include <vector>

#include "core/form.hpp"
#include "core/grid.hpp"
#include "core/poly.hpp"

namespace g2sf::quadric {

/// Conformal surface in the quadric Q_{h0} = { <x,x> = h0 } of R^{p,q},
/// sampled on a 2D grid identified with z = x + iy. phi has p+q real
/// components; <phi,phi> = h0 must hold at every node.
struct SurfaceMap {
    GridField phi;
    Signature sig;
    double h0 = 1.0;

    SurfaceMap(GridField phi_, Signature sig_, double h0_);
};

/// Per-node norm of phi_zzbar + (<phi_z,phi_zbar>/h0) phi (1 component).
GridField harmonicity_residual(const SurfaceMap& m);

/// Per-node |<phi_z,phi_z>| (1 component).
GridField conformality_residual(const SurfaceMap& m);

enum class Classification { superminimal, superconformal, degenerate, inapplicable };

const char* to_string(Classification c);

/// The harmonic sequence phi_0 = phi, phi_1 = phi_z,
///   phi_{i+1} = (phi_i)_z - (<(phi_i)_z, conj phi_i>/h_i) phi_i,
/// built while h_i = <phi_i, conj phi_i> is nonvanishing and
/// <phi_i, phi_i> ~ 0 on the analyzed subdomain.
///
/// Error-branch bookkeeping: phi_i carries i chained difference operators, so
/// its values are clean only at nodes >= i from the boundary. Gates for level
/// i are evaluated at margin i+1, and the final analyzed subdomain uses
/// margin r+2 (deep enough for one more derivative of the top level).
struct HarmonicSequence {
    Signature sig;
    double h0 = 1.0;
    int isotropy_order = 0;  // r
    Classification classification = Classification::inapplicable;
    std::string note;

    std::vector<GridField> phi;  // complex fields phi_0 .. phi_{r+1}, 2(p+q) comps
    std::vector<GridField> h;    // h[i] = h_{i+1}: real, i = 0 .. r
    std::vector<int> eps;        // eps[i] = sign of h_{i+1}; 0 when vanishing
    std::vector<GridField> w;    // w[i] = 0.5 ln |h_{i+1}| where defined

    int margin = 2;      // analyzed subdomain margin (r+2)
    double gate = 0.0;   // absolute floor factor: tol_scale * hgrid^2
    double harmonicity_gate_residual = 0.0;
    double conformality_gate_residual = 0.0;

    const GridField& level(int i) const { return phi.at(static_cast<std::size_t>(i)); }
    const GridField& h_level(int i) const { return h.at(static_cast<std::size_t>(i - 1)); }
    int eps_level(int i) const { return eps.at(static_cast<std::size_t>(i - 1)); }
    const GridField& w_level(int i) const { return w.at(static_cast<std::size_t>(i - 1)); }
};

/// tol_scale is the C in the vanishing gates C * hgrid^2 * (local scale).
HarmonicSequence build_sequence(const SurfaceMap& m, double tol_scale = 10.0);

/// Sup-norms over the analyzed subdomain for the six sequence relations.
struct SequenceRelationReport {
    double hermitian_orthogonality = 0.0;  // pairwise, levels 0..r
    double top_orthogonality = 0.0;        // phi_{r+1} against levels 0..r
    double top_holomorphy = 0.0;           // |d/dzbar <phi_{r+1},phi_{r+1}>|
    double recursion_z = 0.0;              // (phi_i)_z = phi_{i+1} + 2 (w_i)_z phi_i
    double recursion_zbar = 0.0;           // (phi_i)_zbar = -(h_i/h_{i-1}) phi_{i-1}
    double toda_h_form = 0.0;              // 2 (w_i)_zzbar = h_{i+1}/h_i - h_i/h_{i-1}
};

SequenceRelationReport verify_sequence_relations(const HarmonicSequence& s);

/// Toda data of a superconformal surface in even ambient dimension
/// (p+q = 2r+2): the real unit field phit with phi_{r+1} = q phit, the
/// holomorphic function q, the signs mu_i = eps_{i-1} eps_i (eps_0 = sign h0,
/// mu_{r+1} = eps~ eps_r), and the residuals of the signed Toda system
///   2(w_i)_zzb = mu_{i+1} e^{2w_{i+1}-2w_i} - mu_i e^{2w_i-2w_{i-1}},
///   2(w_r)_zzb = mu_{r+1} q qbar e^{-2w_r} - mu_r e^{2w_r-2w_{r-1}}.
struct TodaData {
    std::vector<int> mu;        // mu_1 .. mu_{r+1}
    int eps_tilde = 0;          // <phit, phit>
    GridField phit;             // p+q real components
    GridField q;                // complex scalar (2 components)
    double toda_residual = 0.0;
    double q_holomorphy = 0.0;  // sup |dq/dzbar|
};

TodaData extract_toda_data(const HarmonicSequence& s);

/// Null holomorphic polynomial curve tau(z) in the complexification of
/// R^{p,q}; the Weierstrass representation of a flat-space minimal surface.
struct HolomorphicCurve {
    Signature sig;
    std::vector<std::vector<std::complex<double>>> coefficients;  // [k][component]
    std::vector<double> base_point;  // phi(0), p+q entries (defaults to 0)

    int degree() const { return static_cast<int>(coefficients.size()) - 1; }
};

HolomorphicCurve parse_curve(const std::string& text);
std::string curve_to_text(const HolomorphicCurve& c);

/// <tau(z), tau(z)> as a polynomial; the curve is admissible iff this is
/// exactly the zero polynomial (coefficientwise).
Poly curve_null_polynomial(const HolomorphicCurve& c);

/// phi(z) = phi(0) + Re int_0^z tau; exact polynomial antiderivative
/// evaluated on the grid. Throws if <tau,tau> != 0 as a polynomial or if
/// <tau, conj tau> <= 0 somewhere on the domain.
GridField weierstrass_integrate(const HolomorphicCurve& c, double x0, double x1, double y0,
                                double y1, std::size_t n);

}  // namespace g2sf::quadric
