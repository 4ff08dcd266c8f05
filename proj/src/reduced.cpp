#include "sl2ode/reduced.hpp"

#include <cmath>

#include "sl2ode/errors.hpp"

namespace sl2ode {

ReducedPath solve_reduced(const Coefficient& b1, double t0, double t1, const SolverConfig& cfg) {
    const StateVec e{1, 0, 0, 1};
    Trajectory flat = integrate(SystemKind::reduced_sl2(), b1, e, t0, t1, cfg);

    ReducedPath path;
    path.t0 = flat.t0;
    path.dt = flat.dt;
    path.b1_fingerprint = b1.fingerprint();
    path.meta.solver = flat.meta.solver;
    path.meta.max_step_error = flat.meta.max_step_error;
    path.meta.max_det_drift = flat.meta.max_det_drift;
    path.meta.truncated = flat.meta.truncated;
    path.meta.failure_time = flat.meta.failure_time;
    path.meta.failure_reason = flat.meta.failure_reason;

    path.g.reserve(flat.samples.size());
    path.g.push_back(SL2Element::identity()); // exact by construction
    for (std::size_t k = 1; k < flat.samples.size(); ++k) {
        const StateVec& s = flat.samples[k];
        path.g.push_back({s[0], s[1], s[2], s[3]});
    }
    return path;
}

ReducedPath right_translate(const ReducedPath& path, const SL2Element& h) {
    if (!h.is_unimodular())
        throw UsageError("right_translate: translation element has determinant " +
                         std::to_string(h.det()) + ", expected 1");
    ReducedPath out = path;
    for (auto& g : out.g) g = project_unimodular(compose(g, h));
    return out;
}

Trajectory to_trajectory(const ReducedPath& path) {
    Trajectory out;
    out.kind = SystemKind::reduced_sl2();
    out.t0 = path.t0;
    out.dt = path.dt;
    out.meta.solver = path.meta.solver;
    out.meta.max_step_error = path.meta.max_step_error;
    out.meta.max_det_drift = path.meta.max_det_drift;
    out.meta.truncated = path.meta.truncated;
    out.meta.failure_time = path.meta.failure_time;
    out.meta.failure_reason = path.meta.failure_reason;
    out.meta.warnings = path.meta.warnings;
    out.samples.reserve(path.g.size());
    for (const auto& g : path.g) out.samples.push_back({g.alpha, g.beta, g.gamma, g.delta});
    return out;
}

ReducedPath reduced_from_trajectory(const Trajectory& flat) {
    if (flat.kind.tag != SystemTag::reduced_sl2)
        throw UsageError("reduced_from_trajectory: trajectory does not hold group samples");
    ReducedPath path;
    path.t0 = flat.t0;
    path.dt = flat.dt;
    path.meta.solver = flat.meta.solver;
    path.meta.max_step_error = flat.meta.max_step_error;
    path.meta.max_det_drift = flat.meta.max_det_drift;
    path.meta.truncated = flat.meta.truncated;
    path.meta.failure_time = flat.meta.failure_time;
    path.meta.failure_reason = flat.meta.failure_reason;
    path.meta.warnings = flat.meta.warnings;
    path.g.reserve(flat.samples.size());
    for (const auto& s : flat.samples) {
        SL2Element g{s[0], s[1], s[2], s[3]};
        if (!g.is_unimodular(1e-6))
            throw DomainError("reduced_from_trajectory: sample determinant " +
                              std::to_string(g.det()) + " is too far from 1");
        path.g.push_back(g);
    }
    return path;
}

} // namespace sl2ode
