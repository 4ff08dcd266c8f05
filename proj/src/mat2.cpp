#include "sl2ode/mat2.hpp"

#include <cmath>
#include <string>

#include "sl2ode/errors.hpp"

namespace sl2ode {

Mat2 AlgebraElement::mat() const {
    return {-0.5 * c2, c1, -c3, 0.5 * c2};
}

Mat2 sl2_basis(int index) {
    switch (index) {
        case 1: return {0, 1, 0, 0};
        case 2: return {-0.5, 0, 0, 0.5};
        case 3: return {0, 0, -1, 0};
        default: throw UsageError("sl2_basis: index must be 1, 2 or 3, got " + std::to_string(index));
    }
}

SL2Element exp_basis(int index, double s) {
    switch (index) {
        case 1: return {1, s, 0, 1};
        case 2: return {std::exp(-0.5 * s), 0, 0, std::exp(0.5 * s)};
        case 3: return {1, 0, -s, 1};
        default: throw UsageError("exp_basis: index must be 1, 2 or 3, got " + std::to_string(index));
    }
}

SL2Element exp_traceless(const Mat2& m) {
    if (std::abs(m.trace()) > 1e-12)
        throw UsageError("exp_traceless: matrix trace " + std::to_string(m.trace()) +
                         " exceeds the traceless tolerance 1e-12");
    // For traceless M, M^2 = -det(M) I, so exp(M) = C(q) I + S(q) M with
    // q = -det(M), C = cosh(sqrt q), S = sinh(sqrt q)/sqrt q (trig branch for q < 0).
    const double q = -m.det();
    double coshp, sinhc;
    if (std::abs(q) < 1e-6) {
        // series in q: cosh = sum q^k/(2k)!, sinhc = sum q^k/(2k+1)!
        coshp = 1.0 + q * (0.5 + q * (1.0 / 24.0 + q / 720.0));
        sinhc = 1.0 + q * (1.0 / 6.0 + q * (1.0 / 120.0 + q / 5040.0));
    } else if (q > 0) {
        const double r = std::sqrt(q);
        coshp = std::cosh(r);
        sinhc = std::sinh(r) / r;
    } else {
        const double r = std::sqrt(-q);
        coshp = std::cos(r);
        sinhc = std::sin(r) / r;
    }
    return {coshp + sinhc * m.a, sinhc * m.b, sinhc * m.c, coshp + sinhc * m.d};
}

SL2Element project_unimodular(const SL2Element& g) {
    const double det = g.det();
    if (!(det > 0))
        throw DegenerateInputError("project_unimodular: determinant " + std::to_string(det) +
                                   " is not positive");
    const double s = 1.0 / std::sqrt(det);
    return {g.alpha * s, g.beta * s, g.gamma * s, g.delta * s};
}

CanonicalCoords decompose_second_kind(const SL2Element& g) {
    if (!(g.alpha > 0))
        throw ChartError("decompose_second_kind: alpha must be positive for this chart", g.alpha);
    return {-g.beta / g.alpha, 2.0 * std::log(g.alpha), g.gamma / g.alpha};
}

SL2Element compose_second_kind(const CanonicalCoords& c) {
    // exp(-l3 A3) exp(-l2 A2) exp(-l1 A1), multiplied out by hand.
    const double e = std::exp(0.5 * c.lambda2);
    return {e, -c.lambda1 * e, c.lambda3 * e, 1.0 / e - c.lambda1 * c.lambda3 * e};
}

} // namespace sl2ode
