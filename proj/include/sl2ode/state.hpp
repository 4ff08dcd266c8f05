#pragma once

#include <array>
#include <cmath>
#include <initializer_list>

namespace sl2ode {

/// Dense state vector of dimension <= 4; value type used by the steppers.
/// Dimension 1: Riccati.  2: Milne-Pinney / oscillator / second-order family.
/// 3: third-order family / control coordinates.  4: flattened group element.
struct StateVec {
    std::array<double, 4> v{};
    int dim = 0;

    StateVec() = default;
    StateVec(std::initializer_list<double> init) {
        for (double x : init) v[static_cast<std::size_t>(dim++)] = x;
    }

    static StateVec zero(int n) {
        StateVec s;
        s.dim = n;
        return s;
    }

    double& operator[](int i) { return v[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return v[static_cast<std::size_t>(i)]; }
};

inline StateVec operator+(const StateVec& x, const StateVec& y) {
    StateVec r = x;
    for (int i = 0; i < r.dim; ++i) r[i] += y[i];
    return r;
}

inline StateVec operator-(const StateVec& x, const StateVec& y) {
    StateVec r = x;
    for (int i = 0; i < r.dim; ++i) r[i] -= y[i];
    return r;
}

inline StateVec operator*(double s, const StateVec& x) {
    StateVec r = x;
    for (int i = 0; i < r.dim; ++i) r[i] *= s;
    return r;
}

inline double max_abs(const StateVec& x) {
    double m = 0;
    for (int i = 0; i < x.dim; ++i) m = std::max(m, std::abs(x[i]));
    return m;
}

inline double max_abs_diff(const StateVec& x, const StateVec& y) { return max_abs(x - y); }

inline bool all_finite(const StateVec& x) {
    for (int i = 0; i < x.dim; ++i)
        if (!std::isfinite(x[i])) return false;
    return true;
}

} // namespace sl2ode
