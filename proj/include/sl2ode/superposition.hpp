#pragma once

#include <string>
#include <vector>

#include "sl2ode/coefficient.hpp"
#include "sl2ode/state.hpp"
#include "sl2ode/systems.hpp"

namespace sl2ode {

/// Projective coefficient matrix, normalized so alpha*delta - beta*gamma = det_sign
/// with det_sign in {+1, -1}.  The overall sign is canonical: alpha > 0 when
/// alpha != 0, else gamma > 0.  Default-constructed: the identity class.
struct PGL2Element {
    double alpha = 1;
    double beta = 0;
    double gamma = 0;
    double delta = 1;
    int det_sign = 1;

    double det() const { return alpha * delta - beta * gamma; }
};

/// Scale an invertible matrix to |det| = 1, record the determinant sign and fix
/// the canonical overall sign.  Throws DegenerateInputError when det is
/// numerically zero.
PGL2Element normalize_pgl2(double alpha, double beta, double gamma, double delta);

/// Constants selecting one solution of the second-order family from an
/// oscillator pair: x = 1 / [k1 x1^2 + k2 x2^2 + branch * 2 x1 x2 sqrt(k1 k2 - c0/W^2)].
/// i1, i2 are the conserved levels behind k1, k2 when derived from initial data.
struct MixedConstants {
    double k1 = 1;
    double k2 = 1;
    int branch = 1;  // +1 or -1
    double c0 = 0;
    double i1 = 0;
    double i2 = 0;
};

/// {f,t} from pointwise derivative data: j/v - 1.5 (a/v)^2 for (f', f'', f''') = (v, a, j).
/// Throws DomainError when v = 0.
double schwarzian_exact(double v, double a, double j);

/// Finite-difference Schwarzian of the first state component at grid index
/// t_index: 4th-order central stencils for f', f'' and a 2nd-order one for f''',
/// O(dt^2) accurate overall.  Needs three samples on each side of t_index
/// (UsageError at the boundary); DomainError when f' vanishes at the center.
double schwarzian_fd(const Trajectory& traj, int t_index);

/// Projective image (alpha*x + beta) / (gamma*x + delta).  Note the sign
/// convention differs from act_riccati, which realizes the group action of the
/// reduced equation.  Vanishing denominator: ChartError.
double mobius(const PGL2Element& A, double x);

/// Map one solution germ (x, v, a) of the third-order family with zero coupling
/// to another: ( mobius(A, x), I v/(gx+d)^2, I [a(gx+d) - 2 v^2 g]/(gx+d)^3 ).
/// Requires v != 0 (DomainError); vanishing denominator: ChartError.
StateVec basic_sr_ks3(const PGL2Element& A, const StateVec& s);

/// Result of fitting x2 ~ mobius(A, x1) across a shared grid.
struct MobiusFit {
    PGL2Element element;
    double max_misfit = 0;  // sup_k |mobius(element, x1_k) - x2_k|
    bool rank_deficient = false;
    std::vector<std::string> warnings;
};

/// Total-least-squares fit of the projective relation between two trajectories
/// on a shared grid (first state components).  A rank-deficient normal matrix
/// or an unnormalizable null direction yields the identity class plus a warning
/// instead of an error.
MobiusFit fit_mobius_relation(const Trajectory& x1, const Trajectory& x2);

/// Max-norm of the finite-difference Lie bracket [Z_which, X_t] at a point of
/// the third-order family with zero coupling, where X_t = V3 + b1(t) V1 is the
/// frozen system field and Z_1..Z_3 are its symmetry generators; expected ~ 0.
/// h is the central-difference step (must lie in [1e-6, 1e-3]).
double symmetry_residual(int which, const Coefficient& b1, const StateVec& point, double t,
                         double h = 1e-4);

/// Conserved pairing of a second-order state (x, v) with an oscillator state
/// (xi, vi) sharing the same drive: (xi v + 2 x vi)^2 / x^3 + 4 c0 x xi^2.
/// joint = (x, v, xi, vi); i in {1, 2} labels which oscillator the data came
/// from.  Throws DomainError when x = 0.
double first_integral(int i, const StateVec& joint, double c0);

/// x1 v2 - v1 x2; constant along any oscillator pair sharing one drive.
double wronskian(double x1, double v1, double x2, double v2);

/// Mixed rule: combine two oscillator states into a second-order family state
///   x = 1/D,  v = -2 [k1 x1 v1 + k2 x2 v2 + branch (x1 v2 + v1 x2) r] / D^2,
/// with r = sqrt(k1 k2 - c0/W^2) and D = k1 x1^2 + k2 x2^2 + branch 2 x1 x2 r.
/// Errors: vanishing wronskian -> DegenerateInputError, negative discriminant
/// or vanishing D -> DomainError.
StateVec mixed_sr_ks2(const StateVec& ho1, const StateVec& ho2, const MixedConstants& K);

/// Apply the rule along an oscillator pair on one shared grid.  The pair's
/// wronskian is conserved, so the branch root is evaluated once, at the first
/// sample; per-sample roots would chatter through the square root when the
/// discriminant sits at its zero boundary.  Grid mismatch -> UsageError; the
/// pointwise domain errors carry the offending grid time.
Trajectory mixed_sr_ks2(const Trajectory& ho1, const Trajectory& ho2, const MixedConstants& K);

/// Derive MixedConstants from initial data: i1, i2 via first_integral on the
/// joint initial states, k2 = i1/(4 W^2), k1 = i2/(4 W^2), branch fixed by
/// reproducing ks2_0 (tolerance 1e-8); DomainError when neither branch does.
MixedConstants constants_from_initial(const StateVec& ks2_0, const StateVec& ho1_0,
                                      const StateVec& ho2_0, double c0);

} // namespace sl2ode
