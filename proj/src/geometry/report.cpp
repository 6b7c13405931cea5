#include "rfk/report.hpp"

#include <algorithm>
#include <cmath>

namespace rfk {

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::Holds: return "Holds";
    case Verdict::HoldsWithEquality: return "HoldsWithEquality";
    case Verdict::Violated: return "Violated";
    }
    return "Violated";
}

Verdict classify_margins(std::span<const double> margins, double tolerance) {
    if (margins.empty()) return Verdict::Holds;
    double worst = margins.front();
    bool all_equal = true;
    for (double m : margins) {
        worst = std::min(worst, m);
        if (!(std::abs(m) <= tolerance)) all_equal = false;
    }
    if (!(worst >= -tolerance)) return Verdict::Violated;
    return all_equal ? Verdict::HoldsWithEquality : Verdict::Holds;
}

void finalize(VerificationReport& report) {
    report.worst_margin = report.margins.empty()
                              ? 0.0
                              : *std::min_element(report.margins.begin(), report.margins.end());
    report.verdict = classify_margins(report.margins, report.tolerance);
}

nlohmann::json to_json(const VerificationReport& report, bool with_points) {
    nlohmann::json j;
    j["schema"] = 1;
    j["check"] = report.check;
    j["verdict"] = to_string(report.verdict);
    j["worst_margin"] = report.worst_margin;
    j["tolerance"] = report.tolerance;
    j["meta"] = report.meta;
    if (with_points) {
        j["grid"] = report.grid;
        j["margins"] = report.margins;
    }
    return j;
}

} // namespace rfk
