#pragma once

#include <string>
#include <vector>

namespace qvel {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;  ///< measured values against thresholds, human readable
    double seconds = 0.0;
};

/// Runs the twelve acceptance checks with fixed grids. Deterministic apart from `seconds`.
std::vector<CriterionResult> run_acceptance();

/// "[PASS] 3 frequency-match: ..." style line.
std::string format_result(const CriterionResult& r);

}  // namespace qvel
