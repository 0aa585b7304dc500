#include "core/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "core/errors.hpp"

namespace g2sf::report {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

constexpr double kRoundoffFloor = 1e-12;

}  // namespace

Entry& Report::add(const std::string& name, double value, std::optional<double> tol,
                   const std::string& location) {
    Entry e;
    e.name = name;
    e.value = value;
    e.location = location;
    e.tol = tol;
    e.pass = !tol || value <= *tol;
    entries.push_back(std::move(e));
    return entries.back();
}

void Report::note(const std::string& key, const std::string& value) {
    notes.emplace_back(key, value);
}

bool Report::passed() const {
    for (const auto& e : entries)
        if (!e.pass) return false;
    return true;
}

std::string Report::render() const {
    std::ostringstream os;
    os << "g2sf-report v1\n";
    for (const auto& [k, v] : notes) os << "note " << k << "=" << v << "\n";
    for (const auto& e : entries) {
        os << "check " << e.name << " sup=" << fmt(e.value);
        os << " at=" << (e.location.empty() ? "-" : e.location);
        if (e.tol)
            os << " tol=" << fmt(*e.tol);
        else
            os << " tol=none";
        os << " pass=" << (e.pass ? "true" : "false");
        if (e.order) os << " order=" << fmt(*e.order);
        os << "\n";
    }
    os << "status " << (passed() ? "PASS" : "FAIL") << "\n";
    return os.str();
}

Report order_estimate(const Report& at_h, const Report& at_h2, const Report& at_h4) {
    require(at_h.entries.size() == at_h2.entries.size() &&
                at_h.entries.size() == at_h4.entries.size(),
            ErrorKind::invalid_argument, "order_estimate: reports have different check sets");
    Report out;
    out.note("orders_from", "3-level refinement series");
    for (std::size_t i = 0; i < at_h.entries.size(); ++i) {
        const Entry& a = at_h.entries[i];
        const Entry& b = at_h2.entries[i];
        const Entry& c = at_h4.entries[i];
        require(a.name == b.name && a.name == c.name, ErrorKind::invalid_argument,
                "order_estimate: reports have different check sets (mismatch at '" + a.name + "')");
        Entry& e = out.add(a.name, c.value, a.tol, c.location);
        if (a.value <= kRoundoffFloor && b.value <= kRoundoffFloor && c.value <= kRoundoffFloor) {
            out.note("roundoff_floor", a.name);
            continue;
        }
        double s1 = std::max(a.value, 1e-300), s2 = std::max(b.value, 1e-300),
               s3 = std::max(c.value, 1e-300);
        double order = 0.5 * (std::log2(s1 / s2) + std::log2(s2 / s3));
        e.order = order;
        if (order < 0.5) out.note("non_converging", a.name);
    }
    return out;
}

}  // namespace g2sf::report
