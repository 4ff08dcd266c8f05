#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sl2ode {

/// One invariant check: the measured value and the bound it must stay under.
struct CheckResult {
    std::string check;
    double value = 0;
    double threshold = 0;
    bool pass = false;
};

/// Run a named suite of library invariants: "algebra" (commutation relations),
/// "actions" (identity, composition, fundamental fields), "reconstruction"
/// (cross-validation, closed forms, inversion round trips), "superposition"
/// (derivative-ratio invariance, rule residuals, conserved quantities), or
/// "all".  Deterministic for a fixed seed.  UsageError on an unknown name.
std::vector<CheckResult> verify_suite(const std::string& suite, std::uint64_t seed);

} // namespace sl2ode
