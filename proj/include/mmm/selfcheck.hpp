#pragma once
#include <iosfwd>
#include <string>
#include <vector>

#include "mmm/mmm_core.hpp"

namespace mmm {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail; // populated on failure
};

struct SelfCheckReport {
    std::vector<CheckResult> checks;
    int passed = 0;
    int failed = 0;
    bool all_passed() const { return failed == 0; }
};

// Deterministic invariant suite over the core identities: parity, arbitrage
// bounds, chi-square identities, solver round-trips, limit invariances,
// sandwich bounds, a quick Monte Carlo cross-check.
SelfCheckReport run_selfcheck(const ModelParams& params, int threads = 1);

void print_report(const SelfCheckReport& report, std::ostream& out);

} // namespace mmm
