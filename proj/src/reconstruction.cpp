#include "sl2ode/reconstruction.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>

#include "sl2ode/actions.hpp"
#include "sl2ode/errors.hpp"
#include "internal/linsolve.hpp"
#include "internal/symeig4.hpp"

namespace sl2ode {

namespace {

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

/// Validate that two trajectories sample the same uniform grid; returns the
/// shared prefix length.
std::size_t shared_grid(const Trajectory& a, const Trajectory& b, const char* who) {
    if (a.samples.empty() || b.samples.empty())
        throw UsageError(std::string(who) + ": empty input trajectory");
    const double scale = std::max({1.0, std::abs(a.t0), std::abs(a.dt)});
    if (std::abs(a.t0 - b.t0) > 1e-12 * scale || std::abs(a.dt - b.dt) > 1e-12 * scale)
        throw UsageError(std::string(who) + ": input trajectories do not share a grid");
    return std::min(a.size(), b.size());
}

void require_tag(const Trajectory& t, SystemTag tag, const char* who) {
    if (t.kind.tag != tag)
        throw UsageError(std::string(who) + ": expected a " + to_string(tag) +
                         " trajectory, got " + to_string(t.kind.tag));
}

void truncate_path(ReducedPath& path, double t, const std::string& why) {
    path.meta.truncated = true;
    path.meta.failure_time = t;
    path.meta.failure_reason = why;
}

/// One solution series for the shared second/third-order inversion:
/// q is the position-like component, w its derivative.
struct SeriesView {
    const Trajectory* traj;
    int iq, iw;
    double q(std::size_t k) const { return traj->samples[k][iq]; }
    double w(std::size_t k) const { return traj->samples[k][iw]; }
};

/// Shared inversion core.  Per sample the action of g = (alpha,beta;gamma,delta)
/// on an initial state (q0, 0) gives
///   q0/q(t)                 = delta^2 + c0 q0^2 gamma^2
///   -q0 w(t) / (2 q(t)^2)   = beta*delta + c0 q0^2 alpha*gamma
/// so two solutions determine {delta^2, gamma^2} and {beta*delta, alpha*gamma}
/// by 2x2 linear solves; signs extend from g(0)=e by continuity and alpha
/// closes unimodularity.
ReducedPath invert_second_order(const SeriesView& s1, const SeriesView& s2, double c0,
                                std::size_t n, const char* who) {
    const double q10 = s1.q(0), q20 = s2.q(0);
    if (std::abs(s1.w(0)) > 1e-9 || std::abs(s2.w(0)) > 1e-9)
        throw UsageError(std::string(who) + ": derivative components must vanish at t=0");
    if (q10 == 0.0 || q20 == 0.0)
        throw DegenerateInputError(std::string(who) + ": zero initial value");
    const double m1 = c0 * q10 * q10, m2 = c0 * q20 * q20;
    const double det_m = m2 - m1;
    if (std::abs(det_m) <= 1e-12 * std::max(1.0, std::abs(m1) + std::abs(m2)))
        throw DegenerateInputError(std::string(who) +
                                   ": singular system (equal squared initial values or zero coupling)");

    ReducedPath path;
    path.t0 = s1.traj->t0;
    path.dt = s1.traj->dt;
    path.meta.solver = who;
    path.g.reserve(n);
    path.g.push_back(SL2Element::identity());

    std::size_t clip_count = 0;
    double first_clip_t = 0;
    for (std::size_t k = 1; k < n; ++k) {
        const double t = path.time_at(k);
        const double q1 = s1.q(k), q2 = s2.q(k);
        if (q1 == 0.0 || q2 == 0.0) {
            truncate_path(path, t, "solution sample hit the excluded set");
            break;
        }
        const double r1 = q10 / q1, r2 = q20 / q2;
        const double l1 = -q10 * s1.w(k) / (2.0 * q1 * q1);
        const double l2 = -q20 * s2.w(k) / (2.0 * q2 * q2);
        double delta2 = (r1 * m2 - r2 * m1) / det_m;
        double gamma2 = (r2 - r1) / det_m;
        const double beta_delta = (l1 * m2 - l2 * m1) / det_m;
        const double alpha_gamma = (l2 - l1) / det_m;
        if (delta2 < 0 || gamma2 < 0) {
            if (clip_count++ == 0) first_clip_t = t;
            delta2 = std::max(delta2, 0.0);
            gamma2 = std::max(gamma2, 0.0);
        }
        const double dm = std::sqrt(delta2), gm = std::sqrt(gamma2);
        if (dm == 0.0 && gm == 0.0) {
            truncate_path(path, t, "recovered element has gamma = delta = 0");
            break;
        }
        // Fix the dominant entry positive, recover its partner row entry from
        // the matching product, and take the relative sign of the other column
        // that best matches the remaining product.  Closing unimodularity
        // through the dominant entry keeps every division well-conditioned
        // (dividing by the small entry would amplify the cancellation noise
        // near its zero crossings).  The leftover global +- flip is resolved
        // by continuity from the previous sample.
        SL2Element best;
        double best_score = 0;
        if (dm >= gm) {
            const double beta = beta_delta / dm;
            for (double sg : {1.0, -1.0}) {
                const double gamma = sg * gm;
                const double alpha = (1.0 + beta * gamma) / dm;
                const double score = std::abs(alpha * gamma - alpha_gamma);
                if (sg > 0 || score < best_score) {
                    best = {alpha, beta, gamma, dm};
                    best_score = score;
                }
            }
        } else {
            const double alpha = alpha_gamma / gm;
            for (double sd : {1.0, -1.0}) {
                const double delta = sd * dm;
                const double beta = (alpha * delta - 1.0) / gm;
                const double score = std::abs(beta * delta - beta_delta);
                if (sd > 0 || score < best_score) {
                    best = {alpha, beta, gm, delta};
                    best_score = score;
                }
            }
        }
        const SL2Element& prev = path.g.back();
        const SL2Element flipped{-best.alpha, -best.beta, -best.gamma, -best.delta};
        path.g.push_back(max_abs_diff(best, prev) <= max_abs_diff(flipped, prev) ? best
                                                                                 : flipped);
    }
    if (clip_count > 0)
        path.meta.warnings.push_back("clipped negative squared entries at " +
                                     std::to_string(clip_count) + " sample(s), first at t=" +
                                     fmt(first_clip_t));
    return path;
}

} // namespace

Trajectory reconstruct(const SystemKind& kind, const ReducedPath& path, const StateVec& s0) {
    if (kind.tag == SystemTag::reduced_sl2)
        throw UsageError("reconstruct: the group-valued system is the input, not a target");
    if (path.g.empty()) throw UsageError("reconstruct: empty group path");
    if (s0.dim != kind.dim())
        throw UsageError("reconstruct: initial state has dimension " + std::to_string(s0.dim) +
                         ", expected " + std::to_string(kind.dim()));
    if (auto why = kind.state_violation(s0))
        throw DomainError("reconstruct: initial state invalid: " + *why);

    Trajectory out;
    out.kind = kind;
    out.t0 = path.t0;
    out.dt = path.dt;
    out.meta.solver = "reconstruction";
    out.meta.max_step_error = path.meta.max_step_error;
    out.meta.max_det_drift = path.meta.max_det_drift;
    out.meta.warnings = path.meta.warnings;
    if (path.meta.truncated) {
        out.meta.truncated = true;
        out.meta.failure_time = path.meta.failure_time;
        out.meta.failure_reason = path.meta.failure_reason;
    }
    out.samples.reserve(path.size());
    for (std::size_t k = 0; k < path.size(); ++k) {
        StateVec s;
        try {
            s = act(kind, path.g[k], s0);
        } catch (const DomainError& e) {
            out.meta.truncated = true;
            out.meta.failure_time = path.time_at(k);
            out.meta.failure_reason = e.what();
            break;
        }
        if (!all_finite(s)) {
            out.meta.truncated = true;
            out.meta.failure_time = path.time_at(k);
            out.meta.failure_reason = "non-finite reconstructed state";
            break;
        }
        out.samples.push_back(s);
    }
    return out;
}

ReducedPath invert_ks2(const Trajectory& x1, const Trajectory& x2, double c0) {
    require_tag(x1, SystemTag::ks2, "invert_ks2");
    require_tag(x2, SystemTag::ks2, "invert_ks2");
    const std::size_t n = shared_grid(x1, x2, "invert_ks2");
    return invert_second_order({&x1, 0, 1}, {&x2, 0, 1}, c0, n, "invert-ks2");
}

ReducedPath invert_ks3(const Trajectory& x1, const Trajectory& x2, double c0) {
    require_tag(x1, SystemTag::ks3, "invert_ks3");
    require_tag(x2, SystemTag::ks3, "invert_ks3");
    const std::size_t n = shared_grid(x1, x2, "invert_ks3");
    return invert_second_order({&x1, 1, 2}, {&x2, 1, 2}, c0, n, "invert-ks3");
}

ReducedPath invert_riccati(const Trajectory& x1, const Trajectory& x2, const Trajectory& x3) {
    require_tag(x1, SystemTag::riccati, "invert_riccati");
    require_tag(x2, SystemTag::riccati, "invert_riccati");
    require_tag(x3, SystemTag::riccati, "invert_riccati");
    std::size_t n = shared_grid(x1, x2, "invert_riccati");
    n = std::min(n, shared_grid(x1, x3, "invert_riccati"));

    const std::array<const Trajectory*, 3> traj{&x1, &x2, &x3};
    std::array<double, 3> ic{};
    for (int i = 0; i < 3; ++i) ic[i] = traj[i]->samples[0][0];
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (std::abs(ic[i] - ic[j]) <= 1e-12 * std::max(1.0, std::abs(ic[i])))
                throw DegenerateInputError("invert_riccati: coincident initial values");

    ReducedPath path;
    path.t0 = x1.t0;
    path.dt = x1.dt;
    path.meta.solver = "invert-riccati";
    path.g.reserve(n);
    path.g.push_back(SL2Element::identity());

    for (std::size_t k = 1; k < n; ++k) {
        // Each solution pins one Moebius constraint
        //   alpha x_i(0) - beta + gamma x_i(0) x_i(t) - delta x_i(t) = 0;
        // stack them and take the null direction of the normal matrix.
        detail::Mat4 ata{};
        for (int i = 0; i < 3; ++i) {
            const double xi = traj[i]->samples[k][0];
            const std::array<double, 4> row{ic[i], -1.0, ic[i] * xi, -xi};
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c) ata[r][c] += row[r] * row[c];
        }
        const auto eig = detail::sym_eig4(ata);
        const double lmax = eig.values[3];
        if (!(lmax > 0) || eig.values[1] <= 1e-13 * lmax)
            throw DegenerateInputError("invert_riccati: solutions coincide at t=" +
                                       fmt(path.time_at(k)) + " (rank < 3)");
        const auto& u = eig.vectors[0];
        const double det_u = u[0] * u[3] - u[1] * u[2];
        if (det_u <= 1e-12)
            throw DegenerateInputError(
                "invert_riccati: null direction has non-positive determinant " + fmt(det_u) +
                " at t=" + fmt(path.time_at(k)));
        const double s = 1.0 / std::sqrt(det_u);
        SL2Element g{u[0] * s, u[1] * s, u[2] * s, u[3] * s};
        const SL2Element& prev = path.g.back();
        const SL2Element flipped{-g.alpha, -g.beta, -g.gamma, -g.delta};
        if (max_abs_diff(flipped, prev) < max_abs_diff(g, prev)) g = flipped;
        path.g.push_back(g);
    }
    return path;
}

namespace {

/// Residual of the Milne-Pinney matching problem at one grid sample:
/// both actions reproduce their observed states and det stays at +1.
std::optional<std::array<double, 5>> mp_residual(const SL2Element& g, double c,
                                                 const StateVec& s10, const StateVec& s20,
                                                 const std::array<double, 4>& target) {
    std::array<double, 5> r{};
    try {
        const StateVec a = act_mp(g, s10, c);
        const StateVec b = act_mp(g, s20, c);
        r = {a[0] - target[0], a[1] - target[1], b[0] - target[2], b[1] - target[3],
             g.det() - 1.0};
    } catch (const DomainError&) {
        return std::nullopt;
    }
    for (double v : r)
        if (!std::isfinite(v)) return std::nullopt;
    return r;
}

double norm2(const std::array<double, 5>& r) {
    double s = 0;
    for (double v : r) s += v * v;
    return std::sqrt(s);
}

double max_abs5(const std::array<double, 5>& r) {
    double m = 0;
    for (double v : r) m = std::max(m, std::abs(v));
    return m;
}

} // namespace

ReducedPath invert_mp(const Trajectory& s1, const Trajectory& s2, double c) {
    require_tag(s1, SystemTag::milne_pinney, "invert_mp");
    require_tag(s2, SystemTag::milne_pinney, "invert_mp");
    if (!(c > 0)) throw DomainError("invert_mp: coupling c must be positive");
    const std::size_t n = shared_grid(s1, s2, "invert_mp");
    const double x10 = s1.samples[0][0], x20 = s2.samples[0][0];
    if (std::abs(s1.samples[0][1]) > 1e-9 || std::abs(s2.samples[0][1]) > 1e-9)
        throw UsageError("invert_mp: velocities must vanish at t=0");
    if (std::abs(x10 - x20) <= 1e-12 * std::max(1.0, std::abs(x10)))
        throw DegenerateInputError("invert_mp: equal initial positions");

    ReducedPath path;
    path.t0 = s1.t0;
    path.dt = s1.dt;
    path.meta.solver = "invert-mp";
    path.g.reserve(n);
    path.g.push_back(SL2Element::identity());

    const StateVec s10{x10, 0.0}, s20{x20, 0.0};
    for (std::size_t k = 1; k < n; ++k) {
        const double t = path.time_at(k);
        const std::array<double, 4> target{s1.samples[k][0], s1.samples[k][1],
                                           s2.samples[k][0], s2.samples[k][1]};
        for (double v : target)
            if (!std::isfinite(v))
                throw DomainError("invert_mp: non-finite sample at t=" + fmt(t));
        if (target[0] <= 0 || target[2] <= 0)
            throw DomainError("invert_mp: non-positive position sample at t=" + fmt(t));
        const double scale = 1.0 + std::max({std::abs(target[0]), std::abs(target[1]),
                                             std::abs(target[2]), std::abs(target[3])});

        SL2Element g = path.g.back();  // warm start
        auto r = mp_residual(g, c, s10, s20, target);
        bool converged = false;
        for (int iter = 0; iter < 50 && r; ++iter) {
            if (max_abs5(*r) <= 1e-12 * scale) {
                converged = true;
                break;
            }
            // Forward-difference Jacobian columns in (alpha,beta,gamma,delta).
            std::array<std::array<double, 5>, 4> jt{};
            std::array<double*, 4> entry{&g.alpha, &g.beta, &g.gamma, &g.delta};
            bool jac_ok = true;
            for (int j = 0; j < 4 && jac_ok; ++j) {
                const double saved = *entry[j];
                const double h = 1e-7 * (1.0 + std::abs(saved));
                *entry[j] = saved + h;
                auto rp = mp_residual(g, c, s10, s20, target);
                *entry[j] = saved;
                if (!rp) {
                    jac_ok = false;
                    break;
                }
                for (int i = 0; i < 5; ++i) jt[j][i] = ((*rp)[i] - (*r)[i]) / h;
            }
            if (!jac_ok) break;
            std::array<std::array<double, 4>, 4> normal{};
            std::array<double, 4> rhs{};
            for (int a = 0; a < 4; ++a) {
                for (int b = 0; b < 4; ++b)
                    for (int i = 0; i < 5; ++i) normal[a][b] += jt[a][i] * jt[b][i];
                for (int i = 0; i < 5; ++i) rhs[a] -= jt[a][i] * (*r)[i];
            }
            double diag_scale = 0;
            for (int a = 0; a < 4; ++a) diag_scale = std::max(diag_scale, normal[a][a]);
            std::array<double, 4> step{};
            bool solved = false;
            for (double ridge : {0.0, 1e-12, 1e-8, 1e-4, 1.0}) {
                auto damped = normal;
                for (int a = 0; a < 4; ++a) damped[a][a] += ridge * diag_scale;
                if (detail::gauss_solve<4>(damped, rhs, step)) {
                    solved = true;
                    break;
                }
            }
            if (!solved) break;
            // Backtracking line search on the residual norm.
            const double r0 = norm2(*r);
            bool accepted = false;
            for (double lam = 1.0; lam >= 1.0 / (1 << 20); lam *= 0.5) {
                SL2Element cand{g.alpha + lam * step[0], g.beta + lam * step[1],
                                g.gamma + lam * step[2], g.delta + lam * step[3]};
                auto rc = mp_residual(cand, c, s10, s20, target);
                if (rc && norm2(*rc) < r0) {
                    g = cand;
                    r = rc;
                    accepted = true;
                    break;
                }
            }
            if (!accepted) break;
        }
        if (r && !converged && max_abs5(*r) <= 1e-10 * scale) converged = true;
        if (!converged) {
            truncate_path(path, t, "Gauss-Newton did not converge while matching the actions");
            break;
        }
        path.g.push_back(g);
    }
    return path;
}

ResidualReport compare_trajectories(const Trajectory& a, const Trajectory& b) {
    const std::size_t n = shared_grid(a, b, "compare_trajectories");
    if (a.samples[0].dim != b.samples[0].dim)
        throw UsageError("compare_trajectories: dimension mismatch");
    ResidualReport rep;
    rep.compared = to_string(a.kind.tag) + " (" + a.meta.solver + ") vs " +
                   to_string(b.kind.tag) + " (" + b.meta.solver + "), " +
                   std::to_string(n) + " shared samples";
    rep.per_sample.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double err = max_abs_diff(a.samples[k], b.samples[k]);
        rep.per_sample.emplace_back(a.time_at(k), err);
        rep.sup_error = std::max(rep.sup_error, err);
    }
    for (const Trajectory* t : {&a, &b}) {
        if (t->meta.truncated) {
            rep.truncated = true;
            rep.notes.push_back(to_string(t->kind.tag) + " trajectory truncated at t=" +
                                fmt(t->meta.failure_time) + ": " + t->meta.failure_reason);
        }
    }
    if (a.size() != b.size())
        rep.notes.push_back("sizes differ: " + std::to_string(a.size()) + " vs " +
                            std::to_string(b.size()));
    return rep;
}

ResidualReport cross_validate(const SystemKind& kind, const Coefficient& b1,
                              const StateVec& s0, double t0, double t1,
                              const SolverConfig& cfg) {
    const ReducedPath path = solve_reduced(b1, t0, t1, cfg);
    const Trajectory recon = reconstruct(kind, path, s0);
    const Trajectory direct = integrate(kind, b1, s0, t0, t1, cfg);
    ResidualReport rep = compare_trajectories(recon, direct);
    rep.compared = "group-path reconstruction vs direct integration, " + to_string(kind.tag) +
                   ", " + std::to_string(std::min(recon.size(), direct.size())) +
                   " shared samples";
    return rep;
}

} // namespace sl2ode
