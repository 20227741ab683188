#pragma once

#include <string>
#include <vector>

namespace csalsa {

struct CheckResult {
    std::string suite;
    std::string name;
    bool pass = false;
    std::string detail;
};

struct SelftestOptions {
    bool quick = false;
    /// Negative control: injects an error into one adjoint path so the
    /// adjoint suite must fail on a correct build.
    bool perturb_adjoint = false;
    std::uint64_t seed = 12345;
};

/// Dense-oracle, adjoint, Parseval, prox-oracle and constrained-denoising
/// suites at small sizes. Everything is checked against brute-force or
/// closed-form references built independently of the fast paths.
std::vector<CheckResult> run_selftest(const SelftestOptions& opts);

} // namespace csalsa
