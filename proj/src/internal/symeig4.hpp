#pragma once

#include <algorithm>
#include <array>
#include <cmath>

namespace sl2ode::detail {

using Mat4 = std::array<std::array<double, 4>, 4>;

struct EigenSym4 {
    std::array<double, 4> values;           // ascending
    std::array<std::array<double, 4>, 4> vectors; // vectors[i] pairs with values[i]
};

// Cyclic Jacobi diagonalization of a symmetric 4x4 matrix.  Deterministic,
// accurate to machine precision; plenty for the tiny normal matrices here.
inline EigenSym4 sym_eig4(Mat4 a) {
    Mat4 v{{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}};
    double scale = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) scale = std::max(scale, std::abs(a[i][j]));
    if (scale == 0) scale = 1;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0;
        for (int p = 0; p < 4; ++p)
            for (int q = p + 1; q < 4; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-30 * scale * scale) break;

        for (int p = 0; p < 4; ++p) {
            for (int q = p + 1; q < 4; ++q) {
                if (std::abs(a[p][q]) < 1e-300) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                const double app = a[p][p], aqq = a[q][q], apq = a[p][q];
                a[p][p] = app - t * apq;
                a[q][q] = aqq + t * apq;
                a[p][q] = a[q][p] = 0;
                for (int k = 0; k < 4; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = a[p][k] = c * akp - s * akq;
                    a[k][q] = a[q][k] = s * akp + c * akq;
                }
                for (int k = 0; k < 4; ++k) {
                    const double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }

    std::array<int, 4> order{0, 1, 2, 3};
    std::sort(order.begin(), order.end(), [&](int i, int j) { return a[i][i] < a[j][j]; });

    EigenSym4 out{};
    for (int i = 0; i < 4; ++i) {
        out.values[static_cast<std::size_t>(i)] = a[order[static_cast<std::size_t>(i)]][order[static_cast<std::size_t>(i)]];
        for (int k = 0; k < 4; ++k)
            out.vectors[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] =
                v[k][order[static_cast<std::size_t>(i)]];
    }
    return out;
}

} // namespace sl2ode::detail
