#include "core/g2.hpp"

#include <cmath>
#include <sstream>

namespace g2sf {

G2FormPair standard_forms() {
    using F = FormR;
    F phi = F::monomial(7, {1, 2, 3}) + F::monomial(7, {1, 4, 5}) + F::monomial(7, {1, 6, 7}) +
            F::monomial(7, {2, 4, 6}) - F::monomial(7, {2, 5, 7}) - F::monomial(7, {3, 4, 7}) -
            F::monomial(7, {3, 5, 6});
    F psi = F::monomial(7, {4, 5, 6, 7}) + F::monomial(7, {2, 3, 4, 5}) + F::monomial(7, {2, 3, 6, 7}) -
            F::monomial(7, {1, 3, 4, 6}) + F::monomial(7, {1, 3, 5, 7}) - F::monomial(7, {1, 2, 4, 7}) -
            F::monomial(7, {1, 2, 5, 6});
    return {phi, psi};
}

namespace {

template <typename K>
std::array<std::array<K, 7>, 7> bilinear_volume_matrix(const Form<K>& phi) {
    require(phi.dim() == 7 && phi.degree() == 3, ErrorKind::invalid_argument,
            "metric_from_three_form: need a 3-form on R^7");
    constexpr Mask kFull = (Mask(1) << 7) - 1;
    std::array<Form<K>, 7> iphi;
    for (int a = 0; a < 7; ++a) {
        std::vector<K> v(7, K(0));
        v[static_cast<std::size_t>(a)] = K(1);
        iphi[static_cast<std::size_t>(a)] = interior_product(v, phi);
    }
    std::array<std::array<K, 7>, 7> b{};
    for (int a = 0; a < 7; ++a) {
        Form<K> pa = wedge(phi, iphi[static_cast<std::size_t>(a)]);  // 5-form
        for (int c = a; c < 7; ++c) {
            K acc(0);
            for (const auto& [m5, c5] : pa.terms()) {
                Mask comp = kFull & ~m5;
                K c2 = iphi[static_cast<std::size_t>(c)].coeff(comp);
                if (c2 == K(0)) continue;
                acc = acc + K(wedge_sign(m5, comp)) * c5 * c2;
            }
            acc = acc / K(6);
            b[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)] = acc;
            b[static_cast<std::size_t>(c)][static_cast<std::size_t>(a)] = acc;
        }
    }
    return b;
}

// exact determinant by fraction-free elimination on rationals
Rat rational_det7(std::array<std::array<Rat, 7>, 7> m) {
    Rat det(1);
    for (int col = 0; col < 7; ++col) {
        int pivot = -1;
        for (int r = col; r < 7; ++r)
            if (m[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] != Rat(0)) {
                pivot = r;
                break;
            }
        if (pivot < 0) return Rat(0);
        if (pivot != col) {
            std::swap(m[static_cast<std::size_t>(pivot)], m[static_cast<std::size_t>(col)]);
            det = -det;
        }
        Rat p = m[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
        det *= p;
        for (int r = col + 1; r < 7; ++r) {
            Rat f = m[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] / p;
            for (int c = col; c < 7; ++c)
                m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] -=
                    f * m[static_cast<std::size_t>(col)][static_cast<std::size_t>(c)];
        }
    }
    return det;
}

// leading principal minors all positive <=> positive definite (Sylvester)
bool rational_positive_definite(const std::array<std::array<Rat, 7>, 7>& b) {
    std::array<std::array<Rat, 7>, 7> m = b;
    // fraction-free-ish elimination tracking leading minors
    Rat prev(1);
    for (int k = 0; k < 7; ++k) {
        // minor of order k+1 via elimination state: pivot must stay positive
        Rat p = m[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)];
        if (!(p > Rat(0))) return false;
        for (int r = k + 1; r < 7; ++r) {
            Rat f = m[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)] / p;
            for (int c = k; c < 7; ++c)
                m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] -=
                    f * m[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)];
        }
        prev = p;
    }
    return true;
}

std::optional<BigInt> integer_nth_root(const BigInt& v, unsigned n) {
    if (v < 0) return std::nullopt;
    if (v == 0) return BigInt(0);
    // binary search on the exact integer root
    BigInt lo = 1, hi = 1;
    while (boost::multiprecision::pow(hi, n) < v) hi <<= 1;
    while (lo < hi) {
        BigInt mid = (lo + hi) / 2;
        if (boost::multiprecision::pow(mid, n) < v)
            lo = mid + 1;
        else
            hi = mid;
    }
    if (boost::multiprecision::pow(lo, n) == v) return lo;
    return std::nullopt;
}

std::optional<Rat> rational_ninth_root(const Rat& r) {
    if (r <= Rat(0)) return std::nullopt;
    auto n = integer_nth_root(r.numerator(), 9);
    auto d = integer_nth_root(r.denominator(), 9);
    if (!n || !d) return std::nullopt;
    return Rat(*n, *d);
}

}  // namespace

MetricVolumeR metric_from_three_form(const FormR& phi) {
    auto b = bilinear_volume_matrix(phi);
    int orientation = 1;
    if (!rational_positive_definite(b)) {
        std::array<std::array<Rat, 7>, 7> nb = b;
        for (auto& row : nb)
            for (auto& v : row) v = -v;
        if (rational_positive_definite(nb)) {
            orientation = -1;
            b = nb;
        } else {
            fail_numeric("metric_from_three_form: bilinear form is not definite (3-form not of G2 type)");
        }
    }
    Rat det = rational_det7(b);
    auto root = rational_ninth_root(det);
    require(root.has_value(), ErrorKind::numeric,
            "metric_from_three_form: det is not a perfect rational ninth power; "
            "use the floating-point path");
    MetricVolumeR out;
    for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 7; ++j)
            out.metric[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                b[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] / *root;
    out.dvol_coeff = Rat(orientation) * (*root);
    out.orientation = orientation;
    return out;
}

namespace {

MetricVolumeD close_metric(Eigen::MatrixXd b) {
    b = ((b + b.transpose()) / 2.0).eval();
    int orientation = 1;
    Eigen::LLT<Eigen::MatrixXd> llt(b);
    if (llt.info() != Eigen::Success) {
        Eigen::LLT<Eigen::MatrixXd> lltn((-b).eval());
        if (lltn.info() == Eigen::Success) {
            orientation = -1;
            b = -b;
        } else {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
            std::ostringstream os;
            os << "metric_from_three_form: bilinear form not definite; eigenvalues:";
            for (int i = 0; i < es.eigenvalues().size(); ++i) os << " " << es.eigenvalues()(i);
            fail_numeric(os.str());
        }
    }
    double det = b.determinant();
    require(det > 0.0, ErrorKind::numeric, "metric_from_three_form: vanishing determinant");
    double root = std::pow(det, 1.0 / 9.0);
    MetricVolumeD out;
    out.metric = b / root;
    out.dvol_coeff = orientation * root;
    out.orientation = orientation;
    return out;
}

}  // namespace

MetricVolumeD metric_from_three_form(const FormD& phi) {
    auto b = bilinear_volume_matrix(phi);
    Eigen::MatrixXd m(7, 7);
    for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 7; ++j)
            m(i, j) = b[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return close_metric(std::move(m));
}

namespace {

double evaluate_three_form(const FormD& phi, const Eigen::Matrix<double, 7, 1>& v1,
                           const Eigen::Matrix<double, 7, 1>& v2, const Eigen::Matrix<double, 7, 1>& v3) {
    auto vec = [](const Eigen::Matrix<double, 7, 1>& v) {
        std::vector<double> out(7);
        for (int i = 0; i < 7; ++i) out[static_cast<std::size_t>(i)] = v(i);
        return out;
    };
    FormD a = interior_product(vec(v1), phi);
    FormD b = interior_product(vec(v2), a);
    FormD c = interior_product(vec(v3), b);
    return c.coeff(0);
}

}  // namespace

CoassociativeCheck coassociative_check(const FormD& phi, const Eigen::Matrix<double, 7, 4>& plane) {
    require(phi.dim() == 7 && phi.degree() == 3, ErrorKind::invalid_argument,
            "coassociative_check: need a 3-form on R^7");
    Eigen::FullPivLU<Eigen::MatrixXd> lu(plane);
    require(lu.rank() == 4, ErrorKind::invalid_argument,
            "coassociative_check: spanning vectors are linearly dependent");
    CoassociativeCheck out;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            for (int k = j + 1; k < 4; ++k) {
                double v = evaluate_three_form(phi, plane.col(i), plane.col(j), plane.col(k));
                out.restriction_norm = std::max(out.restriction_norm, std::abs(v));
            }
    out.is_coassociative = out.restriction_norm <= 1e-12;
    return out;
}

namespace {

FormD restrict_two_form(const FormD& sigma, const Eigen::Matrix<double, 7, 4>& plane) {
    FormD out(4, 2);
    auto vec = [](const Eigen::Matrix<double, 7, 1>& v) {
        std::vector<double> o(7);
        for (int i = 0; i < 7; ++i) o[static_cast<std::size_t>(i)] = v(i);
        return o;
    };
    for (int i = 0; i < 4; ++i) {
        FormD si = interior_product(vec(plane.col(i)), sigma);
        for (int j = i + 1; j < 4; ++j) {
            double v = interior_product(vec(plane.col(j)), si).coeff(0);
            if (v != 0.0) out.set((Mask(1) << i) | (Mask(1) << j), v);
        }
    }
    return out;
}

}  // namespace

FormD deformation_form(const FormD& phi, const Eigen::Matrix<double, 7, 4>& plane,
                       const Eigen::Matrix<double, 7, 1>& nu) {
    auto check = coassociative_check(phi, plane);
    require(check.is_coassociative, ErrorKind::numeric,
            "deformation_form: plane is not coassociative (phi restriction = " +
                std::to_string(check.restriction_norm) + ")");
    std::vector<double> v(7);
    for (int i = 0; i < 7; ++i) v[static_cast<std::size_t>(i)] = nu(i);
    return restrict_two_form(interior_product(v, phi), plane);
}

FramedSplitting normal_form_check(const FormD& phi, const FormD& psi,
                                  const Eigen::Matrix<double, 7, 4>& vertical_frame) {
    auto check = coassociative_check(phi, vertical_frame);
    require(check.restriction_norm <= 1e-10, ErrorKind::numeric,
            "normal_form_check: vertical frame does not span a coassociative plane");

    auto mv = metric_from_three_form(phi);
    const Eigen::MatrixXd& g = mv.metric;
    Eigen::Matrix4d gram = vertical_frame.transpose() * g * vertical_frame;
    require((gram - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() <= 1e-8,
            ErrorKind::invalid_argument,
            "normal_form_check: vertical frame is not orthonormal in the recovered metric");

    // horizontal space: kernel of e^T g (3-dimensional)
    Eigen::MatrixXd etg = vertical_frame.transpose() * g;  // 4x7
    Eigen::FullPivLU<Eigen::MatrixXd> lu(etg);
    Eigen::MatrixXd horiz = lu.kernel();  // 7x3
    require(horiz.cols() == 3, ErrorKind::numeric,
            "normal_form_check: horizontal distribution is not 3-dimensional");

    // target self-dual forms on the plane
    FormD omega1 = FormD::monomial(4, {1, 2}) + FormD::monomial(4, {3, 4});
    FormD omega2 = FormD::monomial(4, {1, 3}) - FormD::monomial(4, {2, 4});
    FormD omega3 = -1.0 * FormD::monomial(4, {1, 4}) - 1.0 * FormD::monomial(4, {2, 3});
    std::array<FormD, 3> targets{omega1, omega2, omega3};

    // 6x3 system: columns = restricted deformation forms of the horizontal basis
    auto lam2 = increasing_subsets(4, 2);
    Eigen::MatrixXd sys(6, 3);
    for (int m = 0; m < 3; ++m) {
        Eigen::Matrix<double, 7, 1> x = horiz.col(m);
        std::vector<double> v(7);
        for (int i = 0; i < 7; ++i) v[static_cast<std::size_t>(i)] = x(i);
        FormD sm = restrict_two_form(interior_product(v, phi), vertical_frame);
        for (std::size_t r = 0; r < lam2.size(); ++r) sys(static_cast<int>(r), m) = sm.coeff(lam2[r]);
    }
    FramedSplitting out;
    out.e = vertical_frame;
    for (int mu = 0; mu < 3; ++mu) {
        Eigen::VectorXd rhs(6);
        for (std::size_t r = 0; r < lam2.size(); ++r) rhs(static_cast<int>(r)) = targets[static_cast<std::size_t>(mu)].coeff(lam2[r]);
        Eigen::Vector3d c = sys.colPivHouseholderQr().solve(rhs);
        require((sys * c - rhs).cwiseAbs().maxCoeff() <= 1e-8, ErrorKind::numeric,
                "normal_form_check: no frame realizes the normal form (deformation forms "
                "do not span the self-dual targets)");
        out.a.col(mu) = horiz * c;
    }

    // componentwise comparison against the standard pair in the (a, e) coframe
    auto std_pair = standard_forms();
    FormD phi0 = to_double_form(std_pair.phi);
    FormD psi0 = to_double_form(std_pair.psi);
    Eigen::Matrix<double, 7, 7> frame;
    frame.block<7, 3>(0, 0) = out.a;
    frame.block<7, 4>(0, 3) = out.e;

    auto vec = [&](int col) {
        std::vector<double> v(7);
        for (int i = 0; i < 7; ++i) v[static_cast<std::size_t>(i)] = frame(i, col);
        return v;
    };
    double err = 0.0;
    for (int i = 0; i < 7; ++i) {
        FormD fi = interior_product(vec(i), phi);
        FormD gi = interior_product(vec(i), psi);
        for (int j = i + 1; j < 7; ++j) {
            FormD fij = interior_product(vec(j), fi);
            FormD gij = interior_product(vec(j), gi);
            for (int k = j + 1; k < 7; ++k) {
                double val = interior_product(vec(k), fij).coeff(0);
                Mask m = (Mask(1) << i) | (Mask(1) << j) | (Mask(1) << k);
                err = std::max(err, std::abs(val - phi0.coeff(m)));
                FormD gijk = interior_product(vec(k), gij);
                for (int l = k + 1; l < 7; ++l) {
                    double w = interior_product(vec(l), gijk).coeff(0);
                    Mask m4 = m | (Mask(1) << l);
                    err = std::max(err, std::abs(w - psi0.coeff(m4)));
                }
            }
        }
    }
    out.max_component_error = err;
    require(err <= 1e-10, ErrorKind::numeric,
            "normal_form_check: forms deviate from the normal form by " + std::to_string(err));
    return out;
}

long long integer_determinant(Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic> m) {
    const int n = static_cast<int>(m.rows());
    long long sign = 1;
    long long prev = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (m(k, k) == 0) {
            int p = -1;
            for (int r = k + 1; r < n; ++r)
                if (m(r, k) != 0) {
                    p = r;
                    break;
                }
            if (p < 0) return 0;
            m.row(k).swap(m.row(p));
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j)
                m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
        prev = m(k, k);
    }
    return sign * m(n - 1, n - 1);
}

Mat6i lambda2_pairing() {
    // basis (e12, e13, e14, e23, e24, e34); Q(a,b) e^{1234} = a ^ b
    Mat6i q = Mat6i::Zero();
    q(0, 5) = q(5, 0) = 1;
    q(1, 4) = q(4, 1) = -1;
    q(2, 3) = q(3, 2) = 1;
    return q;
}

Mat6i sl4_induced_action(const Mat4i& m) {
    Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic> md = m.cast<long long>();
    require(integer_determinant(md) == 1, ErrorKind::invalid_argument,
            "sl4_induced_action: matrix must have determinant one");
    auto pairs = increasing_subsets(4, 2);
    Mat6i out;
    for (std::size_t r = 0; r < pairs.size(); ++r) {
        auto kl = mask_axes(pairs[r]);
        for (std::size_t c = 0; c < pairs.size(); ++c) {
            auto ij = mask_axes(pairs[c]);
            out(static_cast<int>(r), static_cast<int>(c)) =
                m(kl[0], ij[0]) * m(kl[1], ij[1]) - m(kl[0], ij[1]) * m(kl[1], ij[0]);
        }
    }
    return out;
}

const std::vector<Mask>& lambda3_r7_indices() {
    static const std::vector<Mask> idx = increasing_subsets(7, 3);
    return idx;
}

namespace {

// static sign/complement tables over 7 axes for the dense path
struct DenseTables {
    std::vector<Mask> l2 = increasing_subsets(7, 2);
    std::vector<Mask> l3 = increasing_subsets(7, 3);
    std::vector<Mask> l5 = increasing_subsets(7, 5);
    std::array<int, 128> l5_pos{};  // mask -> position in l5
    std::array<std::array<signed char, 128>, 128> sgn{};
    DenseTables() {
        l5_pos.fill(-1);
        for (std::size_t i = 0; i < l5.size(); ++i) l5_pos[l5[i]] = static_cast<int>(i);
        for (Mask a = 0; a < 128; ++a)
            for (Mask b = 0; b < 128; ++b) sgn[a][b] = static_cast<signed char>(wedge_sign(a, b));
    }
};

const DenseTables& tables() {
    static const DenseTables t;
    return t;
}

}  // namespace

DenseMetricVolume g2_metric_dense(const std::array<double, 35>& phi_components) {
    const auto& t = tables();
    constexpr Mask kFull = 127;

    //  i_A phi, dense over 2-form masks
    double iphi[7][128] = {};
    for (std::size_t ci = 0; ci < t.l3.size(); ++ci) {
        Mask m = t.l3[ci];
        double c = phi_components[ci];
        if (c == 0.0) continue;
        for (int axis = 0; axis < 7; ++axis) {
            if (!mask_contains(m, axis)) continue;
            iphi[axis][m & ~(Mask(1) << axis)] += removal_sign(m, axis) * c;
        }
    }

    Eigen::Matrix<double, 7, 7> b;
    std::vector<double> p5(t.l5.size());
    for (int a = 0; a < 7; ++a) {
        std::fill(p5.begin(), p5.end(), 0.0);
        for (std::size_t ci = 0; ci < t.l3.size(); ++ci) {
            double c3 = phi_components[ci];
            if (c3 == 0.0) continue;
            Mask m3 = t.l3[ci];
            for (Mask m2 : t.l2) {
                int s = t.sgn[m3][m2];
                if (s == 0) continue;
                double c2 = iphi[a][m2];
                if (c2 == 0.0) continue;
                p5[static_cast<std::size_t>(t.l5_pos[m3 | m2])] += s * c3 * c2;
            }
        }
        for (int bcol = 0; bcol < 7; ++bcol) {
            double acc = 0.0;
            for (std::size_t i5 = 0; i5 < t.l5.size(); ++i5) {
                Mask m5 = t.l5[i5];
                Mask comp = kFull & ~m5;
                double c2 = iphi[bcol][comp];
                if (c2 == 0.0) continue;
                acc += t.sgn[m5][comp] * p5[i5] * c2;
            }
            b(a, bcol) = acc / 6.0;
        }
    }
    auto mv = close_metric(b);
    DenseMetricVolume out;
    out.metric = mv.metric;
    out.dvol_coeff = mv.dvol_coeff;
    return out;
}

}  // namespace g2sf
