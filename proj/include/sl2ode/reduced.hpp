#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "sl2ode/coefficient.hpp"
#include "sl2ode/mat2.hpp"
#include "sl2ode/systems.hpp"

namespace sl2ode {

/// Solution g(t) of the group equation g' = -(A3 + b1(t) A1) g with g(t0) = e,
/// sampled on the uniform grid t0 + k*dt.  One such path reconstructs the
/// general solution of every system family driven by the same b1.
struct ReducedPath {
    double t0 = 0;
    double dt = 0;
    std::vector<SL2Element> g;
    std::uint64_t b1_fingerprint = 0;

    struct Meta {
        std::string solver;
        double max_step_error = 0;
        double max_det_drift = 0;  // |det - 1| before reprojection
        bool truncated = false;
        double failure_time = std::numeric_limits<double>::quiet_NaN();
        std::string failure_reason;
        std::vector<std::string> warnings;
    } meta;

    std::size_t size() const { return g.size(); }
    double time_at(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
    double t_end() const { return g.empty() ? t0 : time_at(g.size() - 1); }
};

/// Integrate the group equation from the identity.
ReducedPath solve_reduced(const Coefficient& b1, double t0, double t1, const SolverConfig& cfg);

/// Right translation g(t) -> g(t) h.  The group equation is right-invariant,
/// so the result still solves it; entries are reprojected onto det = +1.
ReducedPath right_translate(const ReducedPath& path, const SL2Element& h);

/// Adapters between the group-valued path and the flattened 4-column trajectory.
Trajectory to_trajectory(const ReducedPath& path);
ReducedPath reduced_from_trajectory(const Trajectory& flat);

} // namespace sl2ode
