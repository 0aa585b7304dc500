#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace g2sf::report {

/// One named check: a sup-norm, where it was attained, the tolerance it is
/// judged against (nullopt = informational), and optionally an observed
/// convergence order from a refinement series.
struct Entry {
    std::string name;
    double value = 0.0;
    std::string location;
    std::optional<double> tol;
    bool pass = true;
    std::optional<double> order;
};

struct Report {
    std::vector<Entry> entries;
    std::vector<std::pair<std::string, std::string>> notes;

    Entry& add(const std::string& name, double value, std::optional<double> tol,
               const std::string& location = "");
    void note(const std::string& key, const std::string& value);
    bool passed() const;

    /// Frozen plain-text schema (v1): one `check` line per entry plus `note`
    /// lines and a final `status` line. The same rendering is the
    /// machine-parseable form (space-separated key=value tokens).
    std::string render() const;
};

/// Observed orders from three reports at h, h/2, h/4: per matching check the
/// mean of the two successive log2 sup ratios. Checks already at the
/// roundoff floor are marked instead of ordered. Reports must carry
/// identical check lists.
Report order_estimate(const Report& at_h, const Report& at_h2, const Report& at_h4);

}  // namespace g2sf::report
