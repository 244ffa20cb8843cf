#pragma once

#include <map>
#include <string>
#include <vector>

namespace mfg {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string measured;                 ///< one-line summary of the measured quantities
    std::map<std::string, double> values; ///< logged constants
    double seconds = 0;
};

struct CriterionInfo {
    int id;
    std::string name;
};

/// The acceptance criteria, in order.
const std::vector<CriterionInfo>& criteria();

/// Runs one criterion. Exceptions inside the check are reported as a failure.
CriterionResult run_criterion(int id);

/// Runs the listed criteria (all when empty).
std::vector<CriterionResult> run_verification(const std::vector<int>& ids = {});

}  // namespace mfg
