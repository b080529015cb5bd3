#pragma once

// Named verification suites over the library: each suite runs a fixed list
// of checks across the configured signatures and returns per-check records
// (identifier, anchor, measured values, residual, tolerance, pass flag).
// The acceptance harness and the CLI front end both drive these; the checks
// themselves never print or exit.

#include "minrep/compact_model.hpp"

#include <string>
#include <vector>

namespace minrep {

struct CheckValue {
    std::string name;
    double value;
};

// One verified relation.  `anchor` is a short description of the identity
// being checked, or "plumbing" for orchestration-level checks.  Records
// with `informational` set report a measured quantity without affecting the
// pass/fail outcome of the run.  `criterion` groups records under the
// acceptance criteria (1..10); 0 marks supporting checks.
struct CheckRecord {
    std::string id;
    std::string anchor = "plumbing";
    std::string relation;
    std::vector<CheckValue> values;
    double residual = 0.0;
    double tol = 0.0;
    bool informational = false;
    bool pass = true;
    int criterion = 0;
    double runtime_s = 0.0;
};

struct SuiteReport {
    std::string suite;
    std::vector<CheckRecord> checks;
    double runtime_s = 0.0;

    // True when every non-informational check passes.
    bool passed() const;
    int failed_count() const;
};

struct VerifyConfig {
    std::vector<Signature> signatures;  // defaults to the five desk-scale ones
    unsigned long seed = 1234;
    double tol_scale = 1.0;  // multiplies every tolerance

    static VerifyConfig defaults();
};

// "geometry", "specfun", "cone", "flat", "compact".
const std::vector<std::string>& suite_names();

// Runs one suite; throws std::invalid_argument for an unknown name.
SuiteReport run_suite(const std::string& name, const VerifyConfig& cfg);

std::vector<SuiteReport> run_all(const VerifyConfig& cfg);

}  // namespace minrep
