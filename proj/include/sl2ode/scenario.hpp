#pragma once

#include <array>
#include <string>
#include <vector>

#include "sl2ode/coefficient.hpp"
#include "sl2ode/superposition.hpp"
#include "sl2ode/systems.hpp"

namespace sl2ode {

/// Config for `solve` (one initial state) and `bench` (one or more).
struct Scenario {
    SystemKind kind = SystemKind::riccati();
    Coefficient b1 = Coefficient::constant(0);
    StateVec initial;
    std::vector<StateVec> initials;
    double t0 = 0;
    double t1 = 1;
    SolverConfig solver;
    std::string output;  ///< CSV file name, relative to the --out directory
};

struct ReconstructEntry {
    SystemKind kind = SystemKind::riccati();
    StateVec initial;
    std::string output;
};

/// Config for `reconstruct`: one reduced solve fans out to every entry.
struct ReconstructScenario {
    Coefficient b1 = Coefficient::constant(0);
    double t0 = 0;
    double t1 = 1;
    SolverConfig solver;
    std::vector<ReconstructEntry> entries;
};

/// Config for `invert`: recover the reduced path from particular solutions.
struct InvertScenario {
    SystemTag what = SystemTag::ks2;
    std::vector<std::string> inputs;  ///< trajectory CSV paths on a common grid
    double c0 = 0;                    ///< ks2 / ks3 coupling
    double c = 1;                     ///< Milne-Pinney coupling
    std::string output;
};

/// Config for `superpose`; mode selects which rule and which fields apply.
struct SuperposeScenario {
    std::string mode;  ///< "basic_ks3" or "mixed_ks2"

    // basic_ks3
    std::string input;
    std::array<double, 4> matrix{1, 0, 0, 1};

    // mixed_ks2
    std::vector<std::string> inputs;
    double c0 = 0;
    bool has_constants = false;
    MixedConstants constants;
    bool has_initial = false;
    StateVec ks2_initial;
    Coefficient b1 = Coefficient::constant(0);

    std::string output;
};

/// Each parser loads a JSON file and validates every field against the system
/// preconditions it can check statically; UsageError on any defect.
Scenario parse_solve_scenario(const std::string& config_path);
Scenario parse_bench_scenario(const std::string& config_path);
ReconstructScenario parse_reconstruct_scenario(const std::string& config_path);
InvertScenario parse_invert_scenario(const std::string& config_path);
SuperposeScenario parse_superpose_scenario(const std::string& config_path);

} // namespace sl2ode
