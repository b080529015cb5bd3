// Acceptance gate: runs every verification suite at the default
// configuration and prints one pass/fail line per acceptance criterion.
// Exit status 0 iff every non-informational check passes.

#include "minrep/verify.hpp"

#include <chrono>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

using namespace minrep;

namespace {

const char* criterion_name(int c) {
    switch (c) {
        case 1: return "lowest Bessel vector closed form";
        case 2: return "Plancherel chain for the N-form";
        case 3: return "hyperplane norm chain and axis independence";
        case 4: return "wave-equation membership of synthesized solutions";
        case 5: return "special-function identities";
        case 6: return "Lie algebra operator relations";
        case 7: return "unitarity of the parabolic action";
        case 8: return "conformal geometry of the two pictures";
        case 9: return "cross-picture constants";
        case 10: return "conserved quantities and wave energy";
        default: return "supporting checks";
    }
}

struct Tally {
    int total = 0;
    int failed = 0;
    int informational = 0;
    double worst_margin = 0.0;  // max residual / tol over gated checks
    std::vector<std::string> failures;
};

}  // namespace

int main() {
    auto t0 = std::chrono::steady_clock::now();
    VerifyConfig cfg = VerifyConfig::defaults();
    std::map<int, Tally> tallies;
    bool all_pass = true;

    for (const auto& rep : run_all(cfg)) {
        std::printf("suite %-8s  %3zu checks  %6.1fs  %s\n",
                    rep.suite.c_str(), rep.checks.size(), rep.runtime_s,
                    rep.passed() ? "ok" : "FAIL");
        for (const CheckRecord& c : rep.checks) {
            Tally& t = tallies[c.criterion];
            ++t.total;
            if (c.informational) {
                ++t.informational;
                continue;
            }
            if (c.tol > 0.0)
                t.worst_margin =
                    std::max(t.worst_margin, c.residual / c.tol);
            if (!c.pass) {
                ++t.failed;
                all_pass = false;
                t.failures.push_back(c.id + "  residual=" +
                                     std::to_string(c.residual) + " tol=" +
                                     std::to_string(c.tol));
            }
        }
    }

    std::printf("\n");
    for (int c = 1; c <= 10; ++c) {
        const Tally& t = tallies[c];
        std::printf("criterion %2d (%s): %s  [%d checks, %d informational, "
                    "worst residual/tol %.2e]\n",
                    c, criterion_name(c), t.failed == 0 ? "PASS" : "FAIL",
                    t.total, t.informational, t.worst_margin);
        for (const std::string& f : t.failures)
            std::printf("    failed: %s\n", f.c_str());
    }
    const Tally& support = tallies[0];
    std::printf("supporting checks: %s  [%d checks]\n",
                support.failed == 0 ? "PASS" : "FAIL", support.total);
    for (const std::string& f : support.failures)
        std::printf("    failed: %s\n", f.c_str());
    if (support.failed > 0) all_pass = false;

    double secs = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    std::printf("\ntotal runtime %.1fs  overall %s\n", secs,
                all_pass ? "PASS" : "FAIL");
    return all_pass ? 0 : 1;
}
