#include "sl2ode/systems.hpp"

#include <cmath>
#include <string>

#include "sl2ode/errors.hpp"

namespace sl2ode {

std::string to_string(SystemTag tag) {
    switch (tag) {
        case SystemTag::riccati: return "riccati";
        case SystemTag::milne_pinney: return "milne_pinney";
        case SystemTag::harmonic_oscillator: return "harmonic_oscillator";
        case SystemTag::ks2: return "ks2";
        case SystemTag::ks3: return "ks3";
        case SystemTag::wei_norman: return "wei_norman";
        case SystemTag::reduced_sl2: return "reduced_sl2";
    }
    return "unknown";
}

SystemTag system_tag_from_string(const std::string& name) {
    if (name == "riccati") return SystemTag::riccati;
    if (name == "milne_pinney") return SystemTag::milne_pinney;
    if (name == "harmonic_oscillator") return SystemTag::harmonic_oscillator;
    if (name == "ks2") return SystemTag::ks2;
    if (name == "ks3") return SystemTag::ks3;
    if (name == "wei_norman") return SystemTag::wei_norman;
    if (name == "reduced_sl2") return SystemTag::reduced_sl2;
    throw UsageError("unknown system kind '" + name + "'");
}

SystemKind SystemKind::riccati() { return {SystemTag::riccati, 0, Coefficient::constant(0)}; }

SystemKind SystemKind::milne_pinney(double c) {
    if (!(c > 0)) throw UsageError("milne_pinney coupling c must be positive");
    return {SystemTag::milne_pinney, c, Coefficient::constant(0)};
}

SystemKind SystemKind::harmonic_oscillator() {
    return {SystemTag::harmonic_oscillator, 0, Coefficient::constant(0)};
}

SystemKind SystemKind::ks2(double c0) { return {SystemTag::ks2, 0, Coefficient::constant(c0)}; }

SystemKind SystemKind::ks3(double c0) { return {SystemTag::ks3, 0, Coefficient::constant(c0)}; }

SystemKind SystemKind::ks3_curve(Coefficient c0_of_x) {
    return {SystemTag::ks3, 0, std::move(c0_of_x)};
}

SystemKind SystemKind::wei_norman() { return {SystemTag::wei_norman, 0, Coefficient::constant(0)}; }

SystemKind SystemKind::reduced_sl2() { return {SystemTag::reduced_sl2, 0, Coefficient::constant(0)}; }

int SystemKind::dim() const {
    switch (tag) {
        case SystemTag::riccati: return 1;
        case SystemTag::milne_pinney:
        case SystemTag::harmonic_oscillator:
        case SystemTag::ks2: return 2;
        case SystemTag::ks3:
        case SystemTag::wei_norman: return 3;
        case SystemTag::reduced_sl2: return 4;
    }
    return 0;
}

std::optional<std::string> SystemKind::state_violation(const StateVec& s) const {
    switch (tag) {
        case SystemTag::milne_pinney:
            if (!(s[0] > 0)) return "x must stay positive, got x = " + std::to_string(s[0]);
            return std::nullopt;
        case SystemTag::ks2:
            if (s[0] == 0) return "x must stay nonzero";
            return std::nullopt;
        case SystemTag::ks3:
            if (s[1] == 0) return "v = dx/dt must stay nonzero";
            return std::nullopt;
        case SystemTag::reduced_sl2: {
            const double det = s[0] * s[3] - s[1] * s[2];
            if (!(det > 0)) return "determinant must stay positive, got " + std::to_string(det);
            return std::nullopt;
        }
        default:
            return std::nullopt;
    }
}

namespace {

// Generator triples of each family; the time-dependent system field is f3 + b1(t) f1.
StateVec riccati_gen(int i, const StateVec& s) {
    const double x = s[0];
    switch (i) {
        case 1: return {1};
        case 2: return {x};
        default: return {x * x};
    }
}

StateVec mp_gen(int i, double c, const StateVec& s) {
    const double x = s[0], v = s[1];
    switch (i) {
        case 1: return {0, -x};
        case 2: return {-0.5 * x, 0.5 * v};
        default: return {v, c / (x * x * x)};
    }
}

// The oscillator is the c = 0 member of the family above, but its drift has to
// stay exactly (v, 0): c / x^3 would turn into 0/0 when a swing crosses x = 0.
StateVec ho_gen(int i, const StateVec& s) {
    if (i == 3) return {s[1], 0};
    return mp_gen(i, 0.0, s);
}

StateVec ks2_gen(int i, double c0, const StateVec& s) {
    const double x = s[0], v = s[1];
    switch (i) {
        case 1: return {0, 2 * x};
        case 2: return {x, 2 * v};
        default: return {v, 1.5 * v * v / x - 2 * c0 * x * x * x};
    }
}

StateVec ks3_gen(int i, const Coefficient& c0, const StateVec& s) {
    const double x = s[0], v = s[1], a = s[2];
    switch (i) {
        case 1: return {0, 0, 2 * v};
        case 2: return {0, v, 2 * a};
        default: return {v, a, 1.5 * a * a / v - 2 * c0(x) * v * v * v};
    }
}

StateVec wn_gen(int i, const StateVec& s) {
    const double x = s[0], y = s[1];
    switch (i) {
        case 1: return {1, 0, 0};
        case 2: return {x, 1, 0};
        default: return {x * x, 2 * x, -std::exp(y)};
    }
}

// Right-invariant drift pieces for the group equation g' = -(A3 + b1 A1) g.
StateVec reduced_gen(int i, const StateVec& s) {
    switch (i) {
        case 1: return {-s[2], -s[3], 0, 0};          // -A1 g
        default: return {0, 0, s[0], s[1]};           // -A3 g
    }
}

} // namespace

StateVec eval_field(const SystemKind& kind, const Coefficient& b1, double t, const StateVec& s) {
    if (auto why = kind.state_violation(s))
        throw DomainError(to_string(kind.tag) + ": " + *why);
    const double b = b1(t);
    switch (kind.tag) {
        case SystemTag::riccati:
            return riccati_gen(3, s) + b * riccati_gen(1, s);
        case SystemTag::milne_pinney:
            return mp_gen(3, kind.c, s) + b * mp_gen(1, kind.c, s);
        case SystemTag::harmonic_oscillator:
            return ho_gen(3, s) + b * ho_gen(1, s);
        case SystemTag::ks2:
            return ks2_gen(3, kind.c0.constant_value(), s) + b * ks2_gen(1, 0, s);
        case SystemTag::ks3:
            return ks3_gen(3, kind.c0, s) + b * ks3_gen(1, kind.c0, s);
        case SystemTag::wei_norman:
            return wn_gen(3, s) + b * wn_gen(1, s);
        case SystemTag::reduced_sl2:
            return reduced_gen(3, s) + b * reduced_gen(1, s);
    }
    throw UsageError("corrupt system kind");
}

Field vg_field(const SystemKind& kind, int index) {
    if (index < 1 || index > 3)
        throw UsageError("vg_field: index must be 1, 2 or 3, got " + std::to_string(index));
    switch (kind.tag) {
        case SystemTag::riccati:
            return [index](const StateVec& s) { return riccati_gen(index, s); };
        case SystemTag::milne_pinney: {
            const double c = kind.c;
            return [index, c](const StateVec& s) { return mp_gen(index, c, s); };
        }
        case SystemTag::harmonic_oscillator:
            return [index](const StateVec& s) { return ho_gen(index, s); };
        case SystemTag::ks2: {
            const double c0 = kind.c0.constant_value();
            return [index, c0](const StateVec& s) { return ks2_gen(index, c0, s); };
        }
        case SystemTag::ks3: {
            const Coefficient c0 = kind.c0;
            return [index, c0](const StateVec& s) { return ks3_gen(index, c0, s); };
        }
        case SystemTag::wei_norman:
            return [index](const StateVec& s) { return wn_gen(index, s); };
        case SystemTag::reduced_sl2:
            throw UsageError("vg_field: the reduced family's generators are matrices; "
                             "use sl2_basis and commutator instead");
    }
    throw UsageError("corrupt system kind");
}

Field ks3_symmetry_field(int index) {
    switch (index) {
        case 1:
            return [](const StateVec&) { return StateVec{-1, 0, 0}; };
        case 2:
            return [](const StateVec& s) { return StateVec{s[0], s[1], s[2]}; };
        case 3:
            return [](const StateVec& s) {
                const double x = s[0], v = s[1], a = s[2];
                return StateVec{-x * x, -2 * v * x, -2 * (a * x + v * v)};
            };
        default:
            throw UsageError("ks3_symmetry_field: index must be 1, 2 or 3");
    }
}

StateVec lie_bracket_fd(const Field& X, const Field& Y, const StateVec& p, double h) {
    if (!(h >= 1e-6 && h <= 1e-3))
        throw UsageError("lie_bracket_fd: stencil step must lie in [1e-6, 1e-3]");
    const StateVec xp = X(p), yp = Y(p);
    auto directional = [&](const Field& f, const StateVec& dir) {
        return (1.0 / (2.0 * h)) * (f(p + h * dir) - f(p - h * dir));
    };
    // [X, Y] = DY.X - DX.Y
    return directional(Y, xp) - directional(X, yp);
}

namespace {

template <class F>
StateVec rk4_step(const F& f, double t, const StateVec& y, double h) {
    const StateVec k1 = f(t, y);
    const StateVec k2 = f(t + 0.5 * h, y + (0.5 * h) * k1);
    const StateVec k3 = f(t + 0.5 * h, y + (0.5 * h) * k2);
    const StateVec k4 = f(t + h, y + h * k3);
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// One grid cell [ta, tb] with the Fehlberg embedded 4(5) pair; the adaptive
// step h persists across cells.  Returns the state at tb.
template <class F>
StateVec rkf45_cell(const F& f, double ta, double tb, StateVec y, double tol, double& h,
                    long max_steps, long& steps_used, double& max_err) {
    double t = ta;
    while (t < tb) {
        if (++steps_used > max_steps)
            throw UsageError("rkf45: step budget max_steps exhausted");
        h = std::min(h, tb - t);
        if (h < 1e-14 * std::max(1.0, std::abs(t)))
            throw DomainError("rkf45: step size underflow (stiff or singular segment)");

        const StateVec k1 = f(t, y);
        const StateVec k2 = f(t + 0.25 * h, y + (0.25 * h) * k1);
        const StateVec k3 = f(t + 0.375 * h, y + h * ((3.0 / 32.0) * k1 + (9.0 / 32.0) * k2));
        const StateVec k4 = f(t + (12.0 / 13.0) * h,
                              y + h * ((1932.0 / 2197.0) * k1 - (7200.0 / 2197.0) * k2 +
                                       (7296.0 / 2197.0) * k3));
        const StateVec k5 = f(t + h, y + h * ((439.0 / 216.0) * k1 - 8.0 * k2 +
                                              (3680.0 / 513.0) * k3 - (845.0 / 4104.0) * k4));
        const StateVec k6 = f(t + 0.5 * h,
                              y + h * ((-8.0 / 27.0) * k1 + 2.0 * k2 - (3544.0 / 2565.0) * k3 +
                                       (1859.0 / 4104.0) * k4 - (11.0 / 40.0) * k5));
        const StateVec y5 = y + h * ((16.0 / 135.0) * k1 + (6656.0 / 12825.0) * k3 +
                                     (28561.0 / 56430.0) * k4 - (9.0 / 50.0) * k5 +
                                     (2.0 / 55.0) * k6);
        const StateVec y4 = y + h * ((25.0 / 216.0) * k1 + (1408.0 / 2565.0) * k3 +
                                     (2197.0 / 4104.0) * k4 - 0.2 * k5);

        double ratio = 0, raw = 0;
        for (int i = 0; i < y.dim; ++i) {
            const double e = std::abs(y5[i] - y4[i]);
            raw = std::max(raw, e);
            ratio = std::max(ratio, e / (tol * (1.0 + std::abs(y5[i]))));
        }
        if (ratio <= 1.0) {
            t += h;
            y = y5;
            max_err = std::max(max_err, raw);
        }
        const double grow = 0.9 * std::pow(ratio > 1e-12 ? 1.0 / ratio : 1e12, 0.2);
        h *= std::clamp(grow, 0.2, 5.0);
    }
    return y;
}

// Sign change of a protected coordinate between consecutive grid samples means
// the step jumped across the excluded set.
std::optional<std::string> crossing_violation(const SystemKind& kind, const StateVec& prev,
                                              const StateVec& next) {
    if (kind.tag == SystemTag::ks2 && prev[0] * next[0] < 0)
        return "x crossed 0 between samples";
    if (kind.tag == SystemTag::ks3 && prev[1] * next[1] < 0)
        return "v = dx/dt crossed 0 between samples";
    return std::nullopt;
}

} // namespace

Trajectory integrate(const SystemKind& kind, const Coefficient& b1, const StateVec& s0,
                     double t0, double t1, const SolverConfig& cfg) {
    if (!(cfg.dt > 0)) throw UsageError("solver: dt must be positive");
    if (!(cfg.tol > 0)) throw UsageError("solver: tol must be positive");
    if (cfg.max_steps <= 0) throw UsageError("solver: max_steps must be positive");
    if (!(t1 > t0)) throw UsageError("solver: t1 must exceed t0");
    if (s0.dim != kind.dim())
        throw UsageError(to_string(kind.tag) + ": initial state has dimension " +
                         std::to_string(s0.dim) + ", expected " + std::to_string(kind.dim()));

    const long n = std::lround((t1 - t0) / cfg.dt);
    if (n < 1 || std::abs(t0 + static_cast<double>(n) * cfg.dt - t1) >
                     1e-9 * std::max(1.0, std::abs(t1 - t0)))
        throw UsageError("solver: [t0, t1] is not an integer number of dt grid steps");
    if (n > cfg.max_steps) throw UsageError("solver: grid exceeds max_steps");

    if (!all_finite(s0)) throw DomainError(to_string(kind.tag) + ": initial state is not finite");
    if (auto why = kind.state_violation(s0))
        throw DomainError(to_string(kind.tag) + ": invalid initial state: " + *why);

    Trajectory out;
    out.kind = kind;
    out.t0 = t0;
    out.dt = cfg.dt;
    out.meta.solver = cfg.method == SolverConfig::Method::rk4 ? "rk4" : "rkf45";
    out.samples.reserve(static_cast<std::size_t>(n) + 1);
    out.samples.push_back(s0);

    auto f = [&](double t, const StateVec& y) { return eval_field(kind, b1, t, y); };

    StateVec y = s0;
    double h_adapt = cfg.dt;
    long steps_used = 0;
    const long est_stride = std::max<long>(1, n / 16);

    for (long k = 0; k < n; ++k) {
        const double ta = t0 + static_cast<double>(k) * cfg.dt;
        const double tb = t0 + static_cast<double>(k + 1) * cfg.dt;

        StateVec ynew;
        std::optional<std::string> fail;
        try {
            if (cfg.method == SolverConfig::Method::rk4) {
                if (++steps_used > cfg.max_steps) throw UsageError("rk4: max_steps exhausted");
                ynew = rk4_step(f, ta, y, cfg.dt);
                if (k % est_stride == 0) {
                    // occasional step-doubling comparison as the error estimate
                    const StateVec half =
                        rk4_step(f, ta + 0.5 * cfg.dt, rk4_step(f, ta, y, 0.5 * cfg.dt),
                                 0.5 * cfg.dt);
                    out.meta.max_step_error =
                        std::max(out.meta.max_step_error, max_abs_diff(ynew, half));
                }
            } else {
                ynew = rkf45_cell(f, ta, tb, y, cfg.tol, h_adapt, cfg.max_steps, steps_used,
                                  out.meta.max_step_error);
            }
        } catch (const DomainError& e) {
            fail = e.what();
        }

        if (!fail && !all_finite(ynew)) fail = "non-finite state";
        if (!fail)
            if (auto why = kind.state_violation(ynew)) fail = *why;
        if (!fail) fail = crossing_violation(kind, y, ynew);

        if (fail) {
            out.meta.truncated = true;
            out.meta.failure_time = tb;
            out.meta.failure_reason = *fail;
            break;
        }

        if (kind.tag == SystemTag::reduced_sl2) {
            const double det = ynew[0] * ynew[3] - ynew[1] * ynew[2];
            out.meta.max_det_drift = std::max(out.meta.max_det_drift, std::abs(det - 1.0));
            const double s = 1.0 / std::sqrt(det);
            for (int i = 0; i < 4; ++i) ynew[i] *= s;
        }

        out.samples.push_back(ynew);
        y = ynew;
    }
    return out;
}

} // namespace sl2ode
