#pragma once

#include <complex>
#include <string>
#include <vector>

namespace g2sf {

/// Polynomial in z with complex coefficients, coeff[k] * z^k.
struct Poly {
    std::vector<std::complex<double>> coeff;

    std::complex<double> eval(std::complex<double> z) const {
        std::complex<double> acc = 0.0;
        for (std::size_t k = coeff.size(); k-- > 0;) acc = acc * z + coeff[k];
        return acc;
    }
    int degree() const { return static_cast<int>(coeff.size()) - 1; }
    void normalize() {
        while (!coeff.empty() && coeff.back() == std::complex<double>(0.0)) coeff.pop_back();
    }
};

Poly operator+(const Poly& a, const Poly& b);
Poly operator-(const Poly& a, const Poly& b);
Poly operator*(const Poly& a, const Poly& b);
Poly pow(const Poly& a, int n);

/// Parse a polynomial in z with complex coefficients. Accepted forms include
/// "z", "0", "2.5", "i", "3i", "1+2i", "(1-2i)*z^2 + 3*z - 0.5i", "z^3-1".
Poly parse_poly(const std::string& text);

std::string poly_to_string(const Poly& p);

}  // namespace g2sf
