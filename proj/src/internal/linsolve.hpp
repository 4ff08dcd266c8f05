#pragma once

#include <array>
#include <cmath>

namespace sl2ode::detail {

// Solve A x = b for small n by Gaussian elimination with partial pivoting.
// Returns false when the pivot collapses (singular to machine precision).
template <int N>
bool gauss_solve(std::array<std::array<double, N>, N> a, std::array<double, N> b,
                 std::array<double, N>& x) {
    for (int col = 0; col < N; ++col) {
        int piv = col;
        for (int r = col + 1; r < N; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-300) return false;
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (int r = col + 1; r < N; ++r) {
            const double f = a[r][col] / a[col][col];
            for (int cc = col; cc < N; ++cc) a[r][cc] -= f * a[col][cc];
            b[r] -= f * b[col];
        }
    }
    for (int r = N - 1; r >= 0; --r) {
        double acc = b[r];
        for (int cc = r + 1; cc < N; ++cc) acc -= a[r][cc] * x[cc];
        x[r] = acc / a[r][r];
    }
    return true;
}

} // namespace sl2ode::detail
