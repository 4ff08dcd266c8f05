#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sl2ode/coefficient.hpp"
#include "sl2ode/state.hpp"

namespace sl2ode {

enum class SystemTag {
    riccati,             // x' = b1(t) + x^2
    milne_pinney,        // x'' = -b1(t) x + c/x^3,        x > 0
    harmonic_oscillator, // x'' = -b1(t) x
    ks2,                 // x'' = (3/2) x'^2/x - 2 c0 x^3 + 2 b1(t) x,   x != 0
    ks3,                 // x''' = (3/2) x''^2/x' - 2 c0(x) x'^3 + 2 b1(t) x',  x' != 0
    wei_norman,          // x' = b1 + x^2,  y' = 2x,  z' = -e^y
    reduced_sl2,         // g' = -(A3 + b1(t) A1) g,  flattened (alpha,beta,gamma,delta)
};

std::string to_string(SystemTag tag);
SystemTag system_tag_from_string(const std::string& name);

/// A system family together with its fixed parameters.
struct SystemKind {
    SystemTag tag = SystemTag::riccati;
    double c = 0;                                  // Milne-Pinney coupling, c > 0
    Coefficient c0 = Coefficient::constant(0);    // KS coupling: constant (second order)
                                                   // or a curve in x (third order)

    static SystemKind riccati();
    static SystemKind milne_pinney(double c);
    static SystemKind harmonic_oscillator();
    static SystemKind ks2(double c0);
    static SystemKind ks3(double c0);
    static SystemKind ks3_curve(Coefficient c0_of_x);
    static SystemKind wei_norman();
    static SystemKind reduced_sl2();

    int dim() const;

    /// Reason the state violates the family's invariant, or nullopt if fine.
    std::optional<std::string> state_violation(const StateVec& s) const;
};

/// Solution samples on the uniform grid t0 + k*dt.
struct Trajectory {
    SystemKind kind;
    double t0 = 0;
    double dt = 0;
    std::vector<StateVec> samples;

    struct Meta {
        std::string solver;
        double max_step_error = 0;      // embedded / step-doubling estimate
        double max_det_drift = 0;       // reduced_sl2 only: |det - 1| before projection
        bool truncated = false;
        double failure_time = std::numeric_limits<double>::quiet_NaN();
        std::string failure_reason;
        std::vector<std::string> warnings;
    } meta;

    std::size_t size() const { return samples.size(); }
    double time_at(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
    double t_end() const { return samples.empty() ? t0 : time_at(samples.size() - 1); }
};

struct SolverConfig {
    enum class Method { rk4, rkf45 };
    Method method = Method::rk4;
    double dt = 1e-4;    // output grid spacing; rk4 also steps with it
    double tol = 1e-10;  // rkf45 local error tolerance (absolute + relative)
    long max_steps = 100000000;
};

/// Right-hand side of kind's first-order system at (t, s).
/// Throws DomainError when s violates the family's invariant.
StateVec eval_field(const SystemKind& kind, const Coefficient& b1, double t, const StateVec& s);

/// March from t0 to t1 on the uniform grid.  A state-invariant violation or
/// non-finite value truncates the trajectory cleanly (meta records the event);
/// an invalid initial state throws DomainError.  reduced_sl2 states are
/// reprojected onto det = +1 after every accepted step.
Trajectory integrate(const SystemKind& kind, const Coefficient& b1, const StateVec& s0,
                     double t0, double t1, const SolverConfig& cfg);

/// Time-frozen vector field on the state space.
using Field = std::function<StateVec(const StateVec&)>;

/// Generator index 1..3 of the family's defining vector-field triple
/// (V1 multiplies b1(t), V3 is the drift; the system field is V3 + b1 V1).
Field vg_field(const SystemKind& kind, int index);

/// Symmetry generators of the third-order family with c0 = 0, index 1..3.
Field ks3_symmetry_field(int index);

/// Central-difference Lie bracket [X, Y](p) with stencil step h in [1e-6, 1e-3].
StateVec lie_bracket_fd(const Field& X, const Field& Y, const StateVec& p, double h);

} // namespace sl2ode
