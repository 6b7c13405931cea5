#pragma once

#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace rfk {

enum class Verdict { Holds, HoldsWithEquality, Violated };

std::string to_string(Verdict v);

/// Outcome of one inequality check. Margins are signed slacks (negative means
/// the inequality fails at that point); `tolerance` is in the same units.
struct VerificationReport {
    std::string check;
    std::vector<double> grid;
    std::vector<double> margins;
    double worst_margin = 0.0;
    double tolerance = 0.0;
    Verdict verdict = Verdict::Holds;
    nlohmann::json meta = nlohmann::json::object();

    bool holds() const { return verdict != Verdict::Violated; }
};

/// Violated iff min margin < -tol; HoldsWithEquality iff every |margin| <= tol.
Verdict classify_margins(std::span<const double> margins, double tolerance);

/// Fills worst_margin and verdict from margins and tolerance.
void finalize(VerificationReport& report);

/// `{schema, check, verdict, worst_margin, tolerance, meta}`; per-point
/// margins are included when `with_points` is set.
nlohmann::json to_json(const VerificationReport& report, bool with_points = false);

} // namespace rfk
