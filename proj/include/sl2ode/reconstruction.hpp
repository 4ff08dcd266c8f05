#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sl2ode/reduced.hpp"
#include "sl2ode/systems.hpp"

namespace sl2ode {

/// Sup-norm comparison of two trajectories on their shared grid prefix.
struct ResidualReport {
    double sup_error = 0;
    std::vector<std::pair<double, double>> per_sample;  // (t, error)
    std::string compared;
    bool truncated = false;
    std::vector<std::string> notes;
};

/// General solution of kind with initial state s0, obtained by pushing s0
/// along the group path: sample_k = act(kind, path.g[k], s0).  Going out of
/// chart at some grid point truncates the result there (meta records it).
Trajectory reconstruct(const SystemKind& kind, const ReducedPath& path, const StateVec& s0);

/// Recover the group path from two second-order solutions with v1(0)=v2(0)=0,
/// x1(0) != 0 != x2(0), x1(0)^2 != x2(0)^2, c0 != 0, on a shared grid.
/// Per sample: two 2x2 linear solves give delta^2, gamma^2, beta*delta,
/// alpha*gamma; signs extend from g(0)=e by continuity; alpha closes det=+1.
ReducedPath invert_ks2(const Trajectory& x1, const Trajectory& x2, double c0);

/// Same algebra on the (v, a) components of two third-order solutions with
/// a1(0)=a2(0)=0, v1(0) != 0 != v2(0), v1(0)^2 != v2(0)^2, c0 != 0.
ReducedPath invert_ks3(const Trajectory& x1, const Trajectory& x2, double c0);

/// Recover the group path from three Riccati solutions with pairwise distinct
/// initial values: per sample the three Moebius constraints form a homogeneous
/// 3x4 system; its null direction is scaled to det=+1 and sign-tracked from e.
ReducedPath invert_riccati(const Trajectory& x1, const Trajectory& x2, const Trajectory& x3);

/// Recover the group path from two Milne-Pinney solutions with v1(0)=v2(0)=0
/// and x1(0) != x2(0): per sample a damped Gauss-Newton solve of the four
/// action-matching equations plus det=+1, warm-started from the previous
/// sample.  Non-convergence truncates the path there.
ReducedPath invert_mp(const Trajectory& s1, const Trajectory& s2, double c);

/// Pointwise sup-norm difference over the longest shared prefix.
ResidualReport compare_trajectories(const Trajectory& a, const Trajectory& b);

/// Solve the group equation once, reconstruct kind from it, and compare with
/// direct integration of kind on the same grid.
ResidualReport cross_validate(const SystemKind& kind, const Coefficient& b1,
                              const StateVec& s0, double t0, double t1,
                              const SolverConfig& cfg);

} // namespace sl2ode
