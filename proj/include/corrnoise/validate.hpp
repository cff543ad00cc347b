// validate.hpp — Named self-check suites (cross-engine agreement, invariants,
// closed-form oracles) with optional fault injection to prove they bite.

#pragma once

#include <string>
#include <vector>

#include "corrnoise/config.hpp"
#include "corrnoise/experiments.hpp"

namespace corrnoise {

struct SuiteResult {
    std::string name;
    bool passed{false};
    std::string detail;
};

struct ValidationReport {
    std::vector<SuiteResult> suites;
    ScenarioResult result; // rows/summary for write_outputs
    bool all_passed() const;
};

// Runs every suite; a suite that throws is reported as failed with the
// exception text. `config.inject_fault` corrupts one suite on purpose.
ValidationReport run_validate(const ScenarioConfig& config);

} // namespace corrnoise
