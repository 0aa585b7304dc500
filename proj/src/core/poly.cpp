#include "core/poly.hpp"

#include <cctype>
#include <sstream>

#include "core/errors.hpp"

namespace g2sf {

Poly operator+(const Poly& a, const Poly& b) {
    Poly out = a;
    if (b.coeff.size() > out.coeff.size()) out.coeff.resize(b.coeff.size(), 0.0);
    for (std::size_t k = 0; k < b.coeff.size(); ++k) out.coeff[k] += b.coeff[k];
    out.normalize();
    return out;
}

Poly operator-(const Poly& a, const Poly& b) {
    Poly out = a;
    if (b.coeff.size() > out.coeff.size()) out.coeff.resize(b.coeff.size(), 0.0);
    for (std::size_t k = 0; k < b.coeff.size(); ++k) out.coeff[k] -= b.coeff[k];
    out.normalize();
    return out;
}

Poly operator*(const Poly& a, const Poly& b) {
    Poly out;
    if (a.coeff.empty() || b.coeff.empty()) return out;
    out.coeff.assign(a.coeff.size() + b.coeff.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.coeff.size(); ++i)
        for (std::size_t j = 0; j < b.coeff.size(); ++j) out.coeff[i + j] += a.coeff[i] * b.coeff[j];
    out.normalize();
    return out;
}

Poly pow(const Poly& a, int n) {
    require(n >= 0, ErrorKind::invalid_argument, "poly pow: negative exponent");
    Poly out;
    out.coeff = {1.0};
    Poly base = a;
    while (n > 0) {
        if (n & 1) out = out * base;
        base = base * base;
        n >>= 1;
    }
    return out;
}

namespace {

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    Poly parse() {
        Poly p = expr();
        skip_ws();
        require(pos_ == s_.size(), ErrorKind::invalid_argument,
                "polynomial: unexpected trailing input at '" + s_.substr(pos_) + "'");
        return p;
    }

private:
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool peek(char c) {
        skip_ws();
        return pos_ < s_.size() && s_[pos_] == c;
    }
    bool accept(char c) {
        if (peek(c)) {
            ++pos_;
            return true;
        }
        return false;
    }

    Poly expr() {
        Poly acc;
        bool neg = accept('-');
        acc = term();
        if (neg) acc = Poly{} - acc;
        for (;;) {
            if (accept('+'))
                acc = acc + term();
            else if (accept('-'))
                acc = acc - term();
            else
                return acc;
        }
    }

    Poly term() {
        Poly acc = factor();
        for (;;) {
            if (accept('*')) {
                acc = acc * factor();
                continue;
            }
            // juxtaposition: "3z", "2i", "3(z+1)"
            skip_ws();
            if (pos_ < s_.size() && (s_[pos_] == 'z' || s_[pos_] == 'i' || s_[pos_] == '(')) {
                acc = acc * factor();
                continue;
            }
            return acc;
        }
    }

    Poly factor() {
        skip_ws();
        require(pos_ < s_.size(), ErrorKind::invalid_argument, "polynomial: unexpected end of input");
        Poly base;
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            base = expr();
            require(accept(')'), ErrorKind::invalid_argument, "polynomial: missing ')'");
        } else if (c == 'z') {
            ++pos_;
            base.coeff = {0.0, 1.0};
        } else if (c == 'i') {
            ++pos_;
            base.coeff = {{0.0, 1.0}};
        } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t used = 0;
            double v = std::stod(s_.substr(pos_), &used);
            pos_ += used;
            if (pos_ < s_.size() && s_[pos_] == 'i') {
                ++pos_;
                base.coeff = {{0.0, v}};
            } else {
                base.coeff = {{v, 0.0}};
            }
        } else {
            fail_invalid(std::string("polynomial: unexpected character '") + c + "'");
        }
        if (accept('^')) {
            skip_ws();
            require(pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])),
                    ErrorKind::invalid_argument, "polynomial: exponent must be a nonnegative integer");
            std::size_t used = 0;
            int n = std::stoi(s_.substr(pos_), &used);
            pos_ += used;
            base = pow(base, n);
        }
        return base;
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

}  // namespace

Poly parse_poly(const std::string& text) {
    Parser p(text);
    Poly out = p.parse();
    out.normalize();
    return out;
}

std::string poly_to_string(const Poly& p) {
    if (p.coeff.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (std::size_t k = 0; k < p.coeff.size(); ++k) {
        auto c = p.coeff[k];
        if (c == std::complex<double>(0.0)) continue;
        if (!first) os << " + ";
        os << "(" << c.real() << (c.imag() < 0 ? "" : "+") << c.imag() << "i)";
        if (k >= 1) os << "*z";
        if (k >= 2) os << "^" << k;
        first = false;
    }
    if (first) return "0";
    return os.str();
}

}  // namespace g2sf
