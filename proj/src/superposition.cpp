#include "sl2ode/superposition.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "internal/symeig4.hpp"
#include "sl2ode/errors.hpp"

namespace sl2ode {

namespace {

constexpr double kChartEps = 1e-14;

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

void require_pgl2(const PGL2Element& A) {
    if (A.det_sign != 1 && A.det_sign != -1)
        throw UsageError("projective element: det_sign must be +1 or -1");
    if (std::abs(A.det() - static_cast<double>(A.det_sign)) > 1e-6)
        throw UsageError("projective element is not normalized to det = " +
                         std::to_string(A.det_sign));
}

void require_dim(const StateVec& s, int dim, const char* what) {
    if (s.dim != dim)
        throw UsageError(std::string(what) + ": state has dimension " + std::to_string(s.dim) +
                         ", expected " + std::to_string(dim));
}

} // namespace

PGL2Element normalize_pgl2(double alpha, double beta, double gamma, double delta) {
    const double det = alpha * delta - beta * gamma;
    const double scale = std::max({std::abs(alpha), std::abs(beta), std::abs(gamma),
                                   std::abs(delta)});
    if (!std::isfinite(det) || std::abs(det) <= 1e-12 * std::max(1.0, scale * scale))
        throw DegenerateInputError("projective matrix is numerically singular");
    const double s = std::sqrt(std::abs(det));
    PGL2Element out{alpha / s, beta / s, gamma / s, delta / s, det > 0 ? 1 : -1};
    const double lead = out.alpha != 0.0 ? out.alpha : out.gamma;
    if (lead < 0) {
        out.alpha = -out.alpha;
        out.beta = -out.beta;
        out.gamma = -out.gamma;
        out.delta = -out.delta;
    }
    return out;
}

double schwarzian_exact(double v, double a, double j) {
    if (v == 0.0) throw DomainError("schwarzian needs a nonvanishing first derivative");
    const double r = a / v;
    return j / v - 1.5 * r * r;
}

double schwarzian_fd(const Trajectory& traj, int t_index) {
    const int n = static_cast<int>(traj.samples.size());
    if (n < 7) throw UsageError("schwarzian_fd: need at least seven samples");
    if (!(traj.dt > 0) || !std::isfinite(traj.dt))
        throw UsageError("schwarzian_fd: grid step must be positive");
    if (t_index < 3 || t_index > n - 4)
        throw UsageError("schwarzian_fd: index " + std::to_string(t_index) +
                         " needs three samples on each side");
    const double h = traj.dt;
    auto f = [&](int k) { return traj.samples[static_cast<std::size_t>(t_index + k)][0]; };
    const double fm2 = f(-2), fm1 = f(-1), f0 = f(0), fp1 = f(1), fp2 = f(2);
    const double d1 = (-fp2 + 8 * fp1 - 8 * fm1 + fm2) / (12 * h);
    const double d2 = (-fp2 + 16 * fp1 - 30 * f0 + 16 * fm1 - fm2) / (12 * h * h);
    const double d3 = (fp2 - 2 * fp1 + 2 * fm1 - fm2) / (2 * h * h * h);
    const double d1_scale =
        (std::abs(fp2) + 8 * std::abs(fp1) + 8 * std::abs(fm1) + std::abs(fm2)) / (12 * h);
    if (std::abs(d1) <= 1e-9 * std::max(1.0, d1_scale))
        throw DomainError("first derivative vanishes at the stencil center");
    return schwarzian_exact(d1, d2, d3);
}

double mobius(const PGL2Element& A, double x) {
    require_pgl2(A);
    const double den = A.gamma * x + A.delta;
    const double scale = 1 + std::abs(A.gamma * x) + std::abs(A.delta);
    if (std::abs(den) <= kChartEps * scale)
        throw ChartError("projective image leaves the chart", den);
    return (A.alpha * x + A.beta) / den;
}

StateVec basic_sr_ks3(const PGL2Element& A, const StateVec& s) {
    require_pgl2(A);
    require_dim(s, 3, "basic_sr_ks3");
    const double x = s[0], v = s[1], a = s[2];
    if (v == 0.0) throw DomainError("basic_sr_ks3: the germ needs v != 0");
    const double den = A.gamma * x + A.delta;
    const double scale = 1 + std::abs(A.gamma * x) + std::abs(A.delta);
    if (std::abs(den) <= kChartEps * scale)
        throw ChartError("projective image leaves the chart", den);
    const double sg = static_cast<double>(A.det_sign);
    const double d2 = den * den;
    return {(A.alpha * x + A.beta) / den, sg * v / d2,
            sg * (a * den - 2 * v * v * A.gamma) / (d2 * den)};
}

MobiusFit fit_mobius_relation(const Trajectory& x1, const Trajectory& x2) {
    const std::size_t n = x1.samples.size();
    if (n < 4 || x2.samples.size() != n)
        throw UsageError("fit_mobius_relation: need two trajectories with >= 4 samples "
                         "on one grid");
    const double gs = std::max({1.0, std::abs(x1.t0), std::abs(x1.dt)});
    if (std::abs(x1.t0 - x2.t0) > 1e-12 * gs || std::abs(x1.dt - x2.dt) > 1e-12 * gs)
        throw UsageError("fit_mobius_relation: trajectories live on different grids");

    // Total least squares on a*x1 + b - c*x1*x2 - d*x2 = 0: the smallest
    // eigenvector of the accumulated normal matrix.
    detail::Mat4 m{};
    bool identical = true;
    for (std::size_t k = 0; k < n; ++k) {
        const double p = x1.samples[k][0], q = x2.samples[k][0];
        identical = identical && p == q;
        const double row[4] = {p, 1, -p * q, -q};
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] += row[i] * row[j];
    }
    const auto eig = detail::sym_eig4(m);
    const auto& u = eig.vectors[0];
    const double det_u = u[0] * u[3] - u[1] * u[2];

    MobiusFit fit;
    if (eig.values[1] <= 1e-12 * std::max(eig.values[3], 1e-300) || std::abs(det_u) <= 1e-9) {
        fit.rank_deficient = true;
        fit.warnings.push_back("relation is rank deficient; returning the identity class");
    } else {
        fit.element = normalize_pgl2(u[0], u[1], u[2], u[3]);
    }
    if (identical)
        fit.warnings.push_back("trajectories coincide; the relation is the identity class");

    bool singular_noted = false;
    for (std::size_t k = 0; k < n; ++k) {
        const double p = x1.samples[k][0], q = x2.samples[k][0];
        const double den = fit.element.gamma * p + fit.element.delta;
        const double scale = 1 + std::abs(fit.element.gamma * p) + std::abs(fit.element.delta);
        if (std::abs(den) <= kChartEps * scale) {
            if (!singular_noted)
                fit.warnings.push_back("fitted relation is singular at t = " +
                                       fmt(x1.time_at(k)) + "; misfit skips such samples");
            singular_noted = true;
            continue;
        }
        fit.max_misfit =
            std::max(fit.max_misfit, std::abs((fit.element.alpha * p + fit.element.beta) / den - q));
    }
    return fit;
}

double symmetry_residual(int which, const Coefficient& b1, const StateVec& point, double t,
                         double h) {
    require_dim(point, 3, "symmetry_residual");
    if (point[1] == 0.0) throw DomainError("symmetry_residual: the point needs v != 0");
    const auto kind = SystemKind::ks3(0);
    const double bt = b1(t);
    const Field drift = vg_field(kind, 3);
    const Field drive = vg_field(kind, 1);
    const Field frozen = [&, bt](const StateVec& s) { return drift(s) + bt * drive(s); };
    const StateVec bracket = lie_bracket_fd(ks3_symmetry_field(which), frozen, point, h);
    if (!all_finite(bracket))
        throw DomainError("symmetry_residual: the difference stencil left the domain");
    return max_abs(bracket);
}

double first_integral(int i, const StateVec& joint, double c0) {
    if (i != 1 && i != 2) throw UsageError("first_integral: index must be 1 or 2");
    require_dim(joint, 4, "first_integral");
    const double x = joint[0], v = joint[1], xi = joint[2], vi = joint[3];
    if (x == 0.0) throw DomainError("first_integral: needs x != 0");
    const double num = xi * v + 2 * x * vi;
    return num * num / (x * x * x) + 4 * c0 * x * xi * xi;
}

double wronskian(double x1, double v1, double x2, double v2) { return x1 * v2 - v1 * x2; }

namespace {

// Branch root sqrt(k1 k2 - c0 / W^2); guards the wronskian and the sign.
double branch_root(double x1, double v1, double x2, double v2, const MixedConstants& K) {
    const double w = wronskian(x1, v1, x2, v2);
    if (std::abs(w) <= 1e-12 * std::max(1.0, std::abs(x1 * v2) + std::abs(v1 * x2)))
        throw DegenerateInputError("mixed_sr_ks2: oscillator pair has vanishing wronskian");
    const double ratio = K.c0 / (w * w);
    const double disc = K.k1 * K.k2 - ratio;
    if (disc < -1e-12 * std::max({1.0, std::abs(K.k1 * K.k2), std::abs(ratio)}))
        throw DomainError("mixed_sr_ks2: constants give discriminant " + fmt(disc) +
                          " < 0 for wronskian " + fmt(w));
    return std::sqrt(std::max(disc, 0.0));
}

StateVec mixed_point(double x1, double v1, double x2, double v2, const MixedConstants& K,
                     double root) {
    const double cross = 2 * x1 * x2 * root;
    const double den = K.k1 * x1 * x1 + K.k2 * x2 * x2 + K.branch * cross;
    const double den_scale =
        std::abs(K.k1) * x1 * x1 + std::abs(K.k2) * x2 * x2 + std::abs(cross);
    if (std::abs(den) <= 1e-14 * std::max(1.0, den_scale))
        throw DomainError("mixed_sr_ks2: singular point, vanishing denominator " + fmt(den));
    const double num_v = K.k1 * x1 * v1 + K.k2 * x2 * v2 + K.branch * (x1 * v2 + v1 * x2) * root;
    return {1 / den, -2 * num_v / (den * den)};
}

} // namespace

StateVec mixed_sr_ks2(const StateVec& ho1, const StateVec& ho2, const MixedConstants& K) {
    require_dim(ho1, 2, "mixed_sr_ks2");
    require_dim(ho2, 2, "mixed_sr_ks2");
    if (K.branch != 1 && K.branch != -1)
        throw UsageError("mixed_sr_ks2: branch must be +1 or -1");
    const double root = branch_root(ho1[0], ho1[1], ho2[0], ho2[1], K);
    return mixed_point(ho1[0], ho1[1], ho2[0], ho2[1], K, root);
}

Trajectory mixed_sr_ks2(const Trajectory& ho1, const Trajectory& ho2,
                        const MixedConstants& K) {
    if (K.branch != 1 && K.branch != -1)
        throw UsageError("mixed_sr_ks2: branch must be +1 or -1");
    if (ho1.size() == 0 || ho1.size() != ho2.size() ||
        std::abs(ho1.t0 - ho2.t0) > 1e-9 * std::max(1.0, std::abs(ho1.t0)) ||
        std::abs(ho1.dt - ho2.dt) > 1e-12 * std::max(1.0, ho1.dt))
        throw UsageError("mixed_sr_ks2: oscillator trajectories must share one grid");
    require_dim(ho1.samples.front(), 2, "mixed_sr_ks2");
    require_dim(ho2.samples.front(), 2, "mixed_sr_ks2");

    // The pair's wronskian is a constant of the shared motion, so the branch
    // root is pinned by the first sample.  Re-deriving it per sample would let
    // integration noise chatter through the square root when the discriminant
    // sits at its zero boundary, and the output would stop being smooth.
    const double root = branch_root(ho1.samples.front()[0], ho1.samples.front()[1],
                                    ho2.samples.front()[0], ho2.samples.front()[1], K);

    Trajectory out;
    out.kind = SystemKind::ks2(K.c0);
    out.t0 = ho1.t0;
    out.dt = ho1.dt;
    out.meta.solver = "superposition";
    out.samples.reserve(ho1.size());
    for (std::size_t k = 0; k < ho1.size(); ++k) {
        try {
            out.samples.push_back(mixed_point(ho1.samples[k][0], ho1.samples[k][1],
                                              ho2.samples[k][0], ho2.samples[k][1], K, root));
        } catch (const DomainError& e) {
            throw DomainError(std::string(e.what()) + " at t = " + fmt(out.time_at(k)));
        }
    }
    return out;
}

MixedConstants constants_from_initial(const StateVec& ks2_0, const StateVec& ho1_0,
                                      const StateVec& ho2_0, double c0) {
    require_dim(ks2_0, 2, "constants_from_initial");
    require_dim(ho1_0, 2, "constants_from_initial");
    require_dim(ho2_0, 2, "constants_from_initial");
    if (ks2_0[0] == 0.0)
        throw DomainError("constants_from_initial: initial position must be nonzero");
    const double w = wronskian(ho1_0[0], ho1_0[1], ho2_0[0], ho2_0[1]);
    if (std::abs(w) <=
        1e-12 * std::max(1.0, std::abs(ho1_0[0] * ho2_0[1]) + std::abs(ho1_0[1] * ho2_0[0])))
        throw DegenerateInputError("constants_from_initial: oscillator pair has vanishing "
                                   "wronskian");
    MixedConstants K;
    K.c0 = c0;
    K.i1 = first_integral(1, {ks2_0[0], ks2_0[1], ho1_0[0], ho1_0[1]}, c0);
    K.i2 = first_integral(2, {ks2_0[0], ks2_0[1], ho2_0[0], ho2_0[1]}, c0);
    K.k2 = K.i1 / (4 * w * w);
    K.k1 = K.i2 / (4 * w * w);
    const double tol = 1e-8 * (1 + max_abs(ks2_0));
    for (int branch : {1, -1}) {
        K.branch = branch;
        try {
            if (max_abs_diff(mixed_sr_ks2(ho1_0, ho2_0, K), ks2_0) <= tol) return K;
        } catch (const DomainError&) {
        }
    }
    throw DomainError("constants_from_initial: neither branch reproduces the initial state");
}

} // namespace sl2ode
