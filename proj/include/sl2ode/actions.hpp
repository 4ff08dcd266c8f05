#pragma once

#include "sl2ode/mat2.hpp"
#include "sl2ode/state.hpp"
#include "sl2ode/systems.hpp"

namespace sl2ode {

/// Result of probing whether (g, state) lies in an action's chart.
/// witness is the action-specific quantity whose sign/vanishing decides it:
/// the Moebius denominator, the second-order conformal factor, the minimum of
/// the third-order denominator along the integration segment, ...
struct ActionDomainReport {
    bool valid = true;
    double witness = 0;
};

ActionDomainReport riccati_domain(const SL2Element& g, double x);
ActionDomainReport ks2_domain(const SL2Element& g, const StateVec& s, double c0);
ActionDomainReport ks3_domain(const SL2Element& g, const StateVec& s, double c0);
ActionDomainReport mp_domain(const SL2Element& g, const StateVec& s, double c);
ActionDomainReport wn_domain(const SL2Element& g, const StateVec& s);

/// Moebius action x -> (alpha x - beta) / (-gamma x + delta).
double act_riccati(const SL2Element& g, double x);

/// Second-order action on (x, v), x != 0, with constant coupling c0.
StateVec act_ks2(const SL2Element& g, const StateVec& s, double c0);

/// Third-order action on (x, v, a), v != 0, constant coupling; the first
/// component needs one scalar quadrature, done adaptively to quad_tol.
StateVec act_ks3(const SL2Element& g, const StateVec& s, double c0, double quad_tol = 1e-10);

/// Dissipative-oscillator action on (x, v), x > 0, coupling c > 0.
StateVec act_mp(const SL2Element& g, const StateVec& s, double c);

/// Exact linear action used for the zero-coupling oscillator.
StateVec act_ho(const SL2Element& g, const StateVec& s);

/// Control-coordinates action on (x, y, z).
StateVec act_wn(const SL2Element& g, const StateVec& s);

/// Dispatch on the system family (the coupling comes from kind).
StateVec act(const SystemKind& kind, const SL2Element& g, const StateVec& s,
             double quad_tol = 1e-10);

/// Central-difference check of the defining property
///   d/ds act(exp(-s A_index), p) |_{s=0}  =  V_index(p):
/// returns the sup-norm residual between the two sides.
double fundamental_field_check(const SystemKind& kind, int index, const StateVec& p,
                               double h = 1e-5);

} // namespace sl2ode
