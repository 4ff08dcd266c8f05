#include "sl2ode/actions.hpp"

#include <cmath>
#include <string>

#include "sl2ode/errors.hpp"
#include "internal/quadrature.hpp"

namespace sl2ode {

namespace {

constexpr double kChartEps = 1e-14;

bool is_exact_identity(const SL2Element& g) {
    return g.alpha == 1.0 && g.beta == 0.0 && g.gamma == 0.0 && g.delta == 1.0;
}

void require_dim(const StateVec& s, int want, const char* action) {
    if (s.dim != want)
        throw UsageError(std::string(action) + ": state must have dimension " +
                         std::to_string(want) + ", got " + std::to_string(s.dim));
}

/// Minimum of q(l) = A l^2 + B l + 1 over the closed segment joining 0 and lb.
double quad_min_on_segment(double A, double B, double lb) {
    double m = std::min(1.0, (A * lb + B) * lb + 1.0);
    if (A > 0) {
        const double lstar = -B / (2.0 * A);
        const bool inside = (lb > 0) ? (lstar > 0 && lstar < lb) : (lstar < 0 && lstar > lb);
        if (inside) m = std::min(m, (A * lstar + B) * lstar + 1.0);
    }
    return m;
}

} // namespace

ActionDomainReport riccati_domain(const SL2Element& g, double x) {
    const double den = g.delta - g.gamma * x;
    const double scale = 1.0 + std::abs(g.gamma * x) + std::abs(g.delta);
    return {std::abs(den) > kChartEps * scale, den};
}

double act_riccati(const SL2Element& g, double x) {
    const auto rep = riccati_domain(g, x);
    if (!rep.valid)
        throw ChartError("moebius denominator -gamma*x + delta vanishes", rep.witness);
    return (g.alpha * x - g.beta) / rep.witness;
}

ActionDomainReport ks2_domain(const SL2Element& g, const StateVec& s, double c0) {
    if (s.dim != 2 || s[0] == 0.0) return {false, 0.0};
    const double x = s[0], v = s[1];
    const double t1 = g.delta - g.gamma * v / (2.0 * x);
    const double xg = x * g.gamma;
    const double f = t1 * t1 + c0 * xg * xg;
    // Scale by the magnitude sum of the two contributions: for c0 >= 0 it equals
    // f itself, so a unimodular element can never trip the guard there.
    const double scale = t1 * t1 + std::abs(c0) * xg * xg;
    return {f > kChartEps * scale, f};
}

StateVec act_ks2(const SL2Element& g, const StateVec& s, double c0) {
    require_dim(s, 2, "act_ks2");
    if (s[0] == 0.0) throw DomainError("act_ks2: x = 0 is outside the state space");
    const auto rep = ks2_domain(g, s, c0);
    if (!rep.valid)
        throw ChartError("act_ks2: conformal factor F <= 0", rep.witness);
    const double x = s[0], v = s[1], f = rep.witness;
    const double t1 = g.delta - g.gamma * v / (2.0 * x);
    const double num = (v * g.alpha - 2.0 * x * g.beta) * t1 -
                       2.0 * c0 * x * x * x * g.alpha * g.gamma;
    return {x / f, num / (f * f)};
}

ActionDomainReport ks3_domain(const SL2Element& g, const StateVec& s, double c0) {
    if (s.dim != 3 || s[1] == 0.0 || g.alpha == 0.0) return {false, 0.0};
    const double v = s[1], a = s[2];
    const double p = g.alpha * (a * g.alpha - 2.0 * v * g.beta) / (2.0 * v);
    const double va2 = v * g.alpha * g.alpha;
    const double ah = p * p + c0 * va2 * va2;
    const double bh = -2.0 * p;
    const double lb = g.gamma / g.alpha;
    if (!std::isfinite(p) || !std::isfinite(ah) || !std::isfinite(lb)) return {false, 0.0};
    const double m = quad_min_on_segment(ah, bh, lb);
    const double scale =
        1.0 + (p * p + std::abs(c0) * va2 * va2) * lb * lb + std::abs(bh * lb);
    return {m > kChartEps * scale, m};
}

StateVec act_ks3(const SL2Element& g, const StateVec& s, double c0, double quad_tol) {
    require_dim(s, 3, "act_ks3");
    if (s[1] == 0.0) throw DomainError("act_ks3: v = 0 is outside the state space");
    if (g.alpha == 0.0)
        throw ChartError("act_ks3: alpha = 0 is outside the chart", 0.0);
    if (is_exact_identity(g)) return s;
    const auto rep = ks3_domain(g, s, c0);
    if (!rep.valid)
        throw ChartError("act_ks3: denominator F vanishes on the integration segment",
                         rep.witness);

    // Work with the rescaled quadratic Fh(l) = alpha^2 * F(l) = ah l^2 + bh l + 1,
    // so Fh(0) = 1 regardless of g.
    const double x = s[0], v = s[1], a = s[2];
    const double p = g.alpha * (a * g.alpha - 2.0 * v * g.beta) / (2.0 * v);
    const double va2 = v * g.alpha * g.alpha;
    const double ah = p * p + c0 * va2 * va2;
    const double bh = -2.0 * p;
    const double lb = g.gamma / g.alpha;
    const double a2 = g.alpha * g.alpha;

    const double integral = detail::adaptive_simpson(
        [&](double l) { return 1.0 / ((ah * l + bh) * l + 1.0); }, 0.0, lb, quad_tol);
    const double fb = (ah * lb + bh) * lb + 1.0;
    return {x + v * a2 * integral,
            v * a2 / fb,
            -v * a2 * (2.0 * ah * lb + bh) / (fb * fb)};
}

ActionDomainReport mp_domain(const SL2Element& g, const StateVec& s, double c) {
    if (s.dim != 2 || c <= 0.0) return {false, c};
    const double x = s[0], v = s[1];
    if (x <= 0.0) return {false, x};
    const double pp = g.alpha * v + g.beta * x;
    const double den = pp * pp + c * g.alpha * g.alpha / (x * x);
    return {den > 0.0 && std::isfinite(den), den};
}

StateVec act_mp(const SL2Element& g, const StateVec& s, double c) {
    require_dim(s, 2, "act_mp");
    if (c <= 0.0) throw DomainError("act_mp: coupling c must be positive");
    if (s[0] <= 0.0) throw DomainError("act_mp: x must be positive");
    if (is_exact_identity(g)) return s;
    const double x = s[0], v = s[1];
    const double pp = g.alpha * v + g.beta * x;
    const double qq = g.gamma * v + g.delta * x;
    const double den = pp * pp + c * g.alpha * g.alpha / (x * x);
    if (!(den > 0.0) || !std::isfinite(den))
        throw ChartError("act_mp: denominator (alpha v + beta x)^2 + c alpha^2/x^2 vanishes",
                         den);
    const double gg = c * g.alpha * g.gamma / (x * x) + pp * qq;
    // new v equals sign(gg) * sqrt(den * gg^2 / (c + gg^2)), which simplifies
    // exactly to gg / new_x; the simplified form has no cancellation.
    const double xbar = std::sqrt((c + gg * gg) / den);
    return {xbar, gg / xbar};
}

ActionDomainReport wn_domain(const SL2Element& g, const StateVec& s) {
    if (s.dim != 3) return {false, 0.0};
    return riccati_domain(g, s[0]);
}

StateVec act_wn(const SL2Element& g, const StateVec& s) {
    require_dim(s, 3, "act_wn");
    const auto rep = riccati_domain(g, s[0]);
    if (!rep.valid)
        throw ChartError("act_wn: denominator delta - gamma*x vanishes", rep.witness);
    const double x = s[0], y = s[1], z = s[2], den = rep.witness;
    return {(g.alpha * x - g.beta) / den,
            y - 2.0 * std::log(std::abs(den)),
            z - std::exp(y) * g.gamma / den};
}

StateVec act_ho(const SL2Element& g, const StateVec& s) {
    require_dim(s, 2, "act_ho");
    return {g.delta * s[0] + g.gamma * s[1], g.beta * s[0] + g.alpha * s[1]};
}

StateVec act(const SystemKind& kind, const SL2Element& g, const StateVec& s,
             double quad_tol) {
    switch (kind.tag) {
        case SystemTag::riccati:
            require_dim(s, 1, "act");
            return {act_riccati(g, s[0])};
        case SystemTag::harmonic_oscillator:
            return act_ho(g, s);
        case SystemTag::milne_pinney:
            return act_mp(g, s, kind.c);
        case SystemTag::ks2:
            if (!kind.c0.is_constant())
                throw UsageError("act: second-order action needs a constant coupling");
            return act_ks2(g, s, kind.c0.constant_value());
        case SystemTag::ks3:
            if (!kind.c0.is_constant())
                throw UsageError("act: third-order action needs a constant coupling");
            return act_ks3(g, s, kind.c0.constant_value(), quad_tol);
        case SystemTag::wei_norman:
            return act_wn(g, s);
        case SystemTag::reduced_sl2:
            throw UsageError("act: the group-valued system has no point action; "
                             "use right translation on the path");
    }
    throw UsageError("act: unknown system tag");
}

double fundamental_field_check(const SystemKind& kind, int index, const StateVec& p,
                               double h) {
    if (!(h > 0.0) || !std::isfinite(h))
        throw UsageError("fundamental_field_check: h must be positive and finite");
    const Field field = vg_field(kind, index);
    const StateVec forward = act(kind, exp_basis(index, -h), p);
    const StateVec backward = act(kind, exp_basis(index, +h), p);
    const StateVec derivative = (1.0 / (2.0 * h)) * (forward - backward);
    return max_abs_diff(derivative, field(p));
}

} // namespace sl2ode
