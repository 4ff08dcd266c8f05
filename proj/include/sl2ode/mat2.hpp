#pragma once

#include <cmath>

namespace sl2ode {

/// Plain 2x2 real matrix, row-major value type: (a b; c d).
struct Mat2 {
    double a = 0, b = 0, c = 0, d = 0;

    static constexpr Mat2 identity() { return {1, 0, 0, 1}; }
    static constexpr Mat2 zero() { return {0, 0, 0, 0}; }

    double det() const { return a * d - b * c; }
    double trace() const { return a + d; }

    Mat2 operator+(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
    Mat2 operator-(const Mat2& o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }
    Mat2 operator*(double s) const { return {a * s, b * s, c * s, d * s}; }
    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d,
                c * o.a + d * o.c, c * o.b + d * o.d};
    }
};

inline Mat2 operator*(double s, const Mat2& m) { return m * s; }

inline Mat2 commutator(const Mat2& x, const Mat2& y) { return x * y - y * x; }

inline double max_abs(const Mat2& m) {
    return std::max(std::max(std::abs(m.a), std::abs(m.b)),
                    std::max(std::abs(m.c), std::abs(m.d)));
}

inline double max_abs_diff(const Mat2& x, const Mat2& y) { return max_abs(x - y); }

/// Element of the unimodular group: (alpha beta; gamma delta) with det = +1.
/// Kept as a distinct type from Mat2 so group-valued interfaces are explicit.
struct SL2Element {
    double alpha = 1, beta = 0, gamma = 0, delta = 1;

    static constexpr SL2Element identity() { return {1, 0, 0, 1}; }

    Mat2 mat() const { return {alpha, beta, gamma, delta}; }
    double det() const { return alpha * delta - beta * gamma; }
    bool is_unimodular(double det_tol = 1e-9) const { return std::abs(det() - 1.0) <= det_tol; }
};

inline SL2Element compose(const SL2Element& g, const SL2Element& h) {
    return {g.alpha * h.alpha + g.beta * h.gamma, g.alpha * h.beta + g.beta * h.delta,
            g.gamma * h.alpha + g.delta * h.gamma, g.gamma * h.beta + g.delta * h.delta};
}

inline SL2Element inverse(const SL2Element& g) {
    return {g.delta, -g.beta, -g.gamma, g.alpha};
}

inline double max_abs_diff(const SL2Element& g, const SL2Element& h) {
    return max_abs_diff(g.mat(), h.mat());
}

/// Rescale a near-unimodular element exactly onto det = +1 (divide by sqrt(det)).
/// Throws DegenerateInputError when det <= 0.
SL2Element project_unimodular(const SL2Element& g);

/// Element c1*A1 + c2*A2 + c3*A3 of the traceless 2x2 algebra in the fixed basis below.
struct AlgebraElement {
    double c1 = 0, c2 = 0, c3 = 0;
    Mat2 mat() const;
};

/// Fixed basis of the traceless algebra:
///   A1 = (0 1; 0 0),  A2 = (-1/2 0; 0 1/2),  A3 = (0 0; -1 0),
/// with [A1, A3] = 2 A2, [A1, A2] = A1, [A2, A3] = A3.
Mat2 sl2_basis(int index);

/// Closed-form one-parameter subgroups exp(s * A_index).
SL2Element exp_basis(int index, double s);

/// Exponential of a traceless matrix (|trace| <= 1e-12 required), via the
/// cosh/cos closed form with a series fallback near zero.
SL2Element exp_traceless(const Mat2& m);

/// Canonical coordinates of the second kind for the chart alpha > 0:
///   g = exp(-lambda3 A3) * exp(-lambda2 A2) * exp(-lambda1 A1).
struct CanonicalCoords {
    double lambda1 = 0, lambda2 = 0, lambda3 = 0;
};

/// Coordinates of g in the chart above; requires g.alpha > 0 (ChartError otherwise).
CanonicalCoords decompose_second_kind(const SL2Element& g);

/// Exact product of the three factors; inverse of decompose_second_kind.
SL2Element compose_second_kind(const CanonicalCoords& coords);

} // namespace sl2ode
