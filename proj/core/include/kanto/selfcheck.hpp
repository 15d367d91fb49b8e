#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace kanto {

struct CheckResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

// Runs the acceptance criteria (all twelve when ids is empty), printing one
// line per criterion to os as it completes:
//   [PASS] 04 dual-stability  worst m*=86 max_tv0=1.80  (1.2s)
// Tolerances are fixed here, not parameters; the suite is the contract.
std::vector<CheckResult> run_acceptance(std::ostream& os, const std::vector<int>& ids = {});

bool all_passed(const std::vector<CheckResult>& results);

} // namespace kanto
