#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "sl2ode/errors.hpp"
#include "sl2ode/rng.hpp"
#include "sl2ode/superposition.hpp"
#include "sl2ode/systems.hpp"

using namespace sl2ode;

namespace {

SolverConfig grid(double dt) {
    SolverConfig cfg;
    cfg.dt = dt;
    return cfg;
}

Trajectory make_traj(const SystemKind& kind, double t0, double dt,
                     std::vector<StateVec> samples) {
    Trajectory tr;
    tr.kind = kind;
    tr.t0 = t0;
    tr.dt = dt;
    tr.samples = std::move(samples);
    return tr;
}

Trajectory sample_scalar(double t0, double dt, int n, const std::function<double(double)>& f) {
    std::vector<StateVec> ss;
    for (int k = 0; k < n; ++k) ss.push_back({f(t0 + k * dt)});
    return make_traj(SystemKind::riccati(), t0, dt, ss);
}

// 4th-order central derivative of a sampled state path.
StateVec fd4(const std::vector<StateVec>& s, std::size_t k, double dt) {
    const StateVec sum = (-1.0) * s[k + 2] + 8.0 * s[k + 1] + (-8.0) * s[k - 1] + s[k - 2];
    return (1.0 / (12.0 * dt)) * sum;
}

} // namespace

TEST_CASE("schwarzian from derivative data matches hand values") {
    CHECK(schwarzian_exact(1, 0, 0) == 0.0);
    CHECK(schwarzian_exact(1, 1, 1) == -0.5); // e^t at t = 0
    CHECK_THROWS_AS(schwarzian_exact(0, 1, 1), DomainError);

    // Projective curves (a t + b)/(g t + d) have vanishing Schwarzian.
    const double rows[4][4] = {
        {1.2, 0.4, -0.3, 1.0}, {0.8, -0.2, 0.5, 1.1}, {2, 1, 1, 1}, {1, 0, 0.7, 0.9}};
    for (const auto& r : rows) {
        const PGL2Element A = normalize_pgl2(r[0], r[1], r[2], r[3]);
        for (double t : {-0.4, 0.0, 0.3, 0.8}) {
            const double den = A.gamma * t + A.delta;
            if (std::abs(den) < 0.3) continue;
            const double d = static_cast<double>(A.det_sign);
            const double v = d / (den * den);
            const double a = -2 * A.gamma * d / (den * den * den);
            const double j = 6 * A.gamma * A.gamma * d / (den * den * den * den);
            CHECK(std::abs(schwarzian_exact(v, a, j)) < 1e-12);
        }
    }
}

TEST_CASE("projective normalization fixes determinant and sign") {
    const PGL2Element a = normalize_pgl2(2, 0, 0, 0.5);
    CHECK(a.alpha == 2.0);
    CHECK(a.delta == 0.5);
    CHECK(a.det_sign == 1);

    const PGL2Element b = normalize_pgl2(-1, 0, 0, 1);
    CHECK(b.alpha == 1.0);
    CHECK(b.delta == -1.0);
    CHECK(b.det_sign == -1);

    const PGL2Element c = normalize_pgl2(2, 0, 0, 2);
    CHECK(c.alpha == 1.0);
    CHECK(c.delta == 1.0);

    const PGL2Element d = normalize_pgl2(0, 1, -1, 0); // alpha = 0 -> gamma leads
    CHECK(d.alpha == 0.0);
    CHECK(d.beta == -1.0);
    CHECK(d.gamma == 1.0);
    CHECK(d.det_sign == 1);

    CHECK_THROWS_AS(normalize_pgl2(1, 2, 2, 4), DegenerateInputError);

    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const double w = rng.uniform_signed(0.2, 2.0), x = rng.uniform(-2, 2),
                     y = rng.uniform(-2, 2), z = rng.uniform_signed(0.2, 2.0);
        if (std::abs(w * z - x * y) < 0.05) continue;
        const PGL2Element e = normalize_pgl2(w, x, y, z);
        CHECK(std::abs(e.det() - e.det_sign) <= 1e-12);
        CHECK((e.alpha > 0 || (e.alpha == 0 && e.gamma > 0)));
    }
}

TEST_CASE("finite-difference schwarzian handles line, tangent, and guards") {
    const Trajectory line = sample_scalar(0, 1e-3, 1001, [](double t) { return t; });
    for (int k : {3, 500, 997}) CHECK(std::abs(schwarzian_fd(line, k)) < 1e-6);

    const Trajectory tan_traj =
        sample_scalar(0.25, 1e-3, 101, [](double t) { return std::tan(t); });
    CHECK(std::abs(schwarzian_fd(tan_traj, 50) - 2.0) < 1e-4); // {tan t, t} = 2

    CHECK_THROWS_AS(schwarzian_fd(tan_traj, 2), UsageError);
    CHECK_THROWS_AS(schwarzian_fd(tan_traj, 98), UsageError);
    CHECK_THROWS_AS(schwarzian_fd(sample_scalar(0, 1e-3, 6, [](double t) { return t; }), 3),
                    UsageError);

    // Center of a parabola: first derivative vanishes there.
    const Trajectory parab =
        sample_scalar(-3e-3, 1e-3, 7, [](double t) { return t * t; });
    CHECK_THROWS_AS(schwarzian_fd(parab, 3), DomainError);
}

TEST_CASE("finite-difference schwarzian recovers the drive of third-order motion") {
    const auto kind = SystemKind::ks3(0);
    const auto b1 = Coefficient::cosine(1, 1, 0);
    const Trajectory tr = integrate(kind, b1, {0, 1, 0}, 0, 1, grid(1e-3));
    REQUIRE_FALSE(tr.meta.truncated);
    for (int k = 100; k <= 900; k += 100) {
        const double t = tr.time_at(static_cast<std::size_t>(k));
        CHECK(std::abs(schwarzian_fd(tr, k) - 2 * std::cos(t)) < 1e-4);
    }
}

TEST_CASE("projective maps evaluate, compose, and guard the chart") {
    CHECK(mobius(PGL2Element{}, 0.7) == 0.7);
    CHECK(mobius(normalize_pgl2(2, 0, 0, 0.5), 1.0) == 4.0);

    Rng rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        const PGL2Element A = normalize_pgl2(rng.uniform(0.8, 1.2), rng.uniform(-0.1, 0.1),
                                             rng.uniform(-0.1, 0.1), rng.uniform(0.8, 1.2));
        const PGL2Element B = normalize_pgl2(rng.uniform(0.8, 1.2), rng.uniform(-0.1, 0.1),
                                             rng.uniform(-0.1, 0.1), rng.uniform(0.8, 1.2));
        const double x = rng.uniform(-1, 1);
        const PGL2Element AB =
            normalize_pgl2(A.alpha * B.alpha + A.beta * B.gamma, A.alpha * B.beta + A.beta * B.delta,
                           A.gamma * B.alpha + A.delta * B.gamma,
                           A.gamma * B.beta + A.delta * B.delta);
        CHECK(std::abs(mobius(A, mobius(B, x)) - mobius(AB, x)) < 1e-10);
    }

    const PGL2Element flip = normalize_pgl2(1, 0, 1, -1);
    try {
        mobius(flip, 1.0);
        FAIL("expected ChartError");
    } catch (const ChartError& e) {
        CHECK(e.witness == 0.0);
    }
    CHECK_THROWS_AS(mobius(PGL2Element{2, 0, 0, 2, 1}, 1.0), UsageError);
    CHECK_THROWS_AS(mobius(PGL2Element{1, 0, 0, 1, 0}, 1.0), UsageError);
}

TEST_CASE("basic rule: identity, projective line, derivative consistency") {
    const StateVec s{0.4, 1.2, -0.3};
    const StateVec id = basic_sr_ks3(PGL2Element{}, s);
    CHECK(id[0] == s[0]);
    CHECK(id[1] == s[1]);
    CHECK(id[2] == s[2]);

    // Germ of x1(t) = t maps to the germ of (alpha t + beta)/(gamma t + delta).
    const PGL2Element A = normalize_pgl2(2, 1, 1, 1);
    for (double t : {-0.4, 0.0, 0.7}) {
        const StateVec out = basic_sr_ks3(A, {t, 1, 0});
        const double den = A.gamma * t + A.delta;
        CHECK(out[0] == mobius(A, t));
        CHECK(std::abs(out[1] - 1 / (den * den)) < 1e-15);
        CHECK(std::abs(out[2] - (-2 * A.gamma / (den * den * den))) < 1e-14);
    }

    CHECK_THROWS_AS(basic_sr_ks3(A, {0.5, 0.0, 1.0}), DomainError);
    CHECK_THROWS_AS(basic_sr_ks3(normalize_pgl2(1, 0, 1, -1), {1, 1, 0}), ChartError);
    CHECK_THROWS_AS(basic_sr_ks3(A, {1, 1}), UsageError);
}

TEST_CASE("basic rule maps third-order solutions to solutions") {
    const auto kind = SystemKind::ks3(0);
    const auto b1 = Coefficient::cosine(1, 1, 0);
    const Trajectory tr = integrate(kind, b1, {0, 1, 0}, 0, 1, grid(1e-3));
    REQUIRE_FALSE(tr.meta.truncated);
    const PGL2Element A = normalize_pgl2(1, 0.3, -0.2, 1.1);

    std::vector<StateVec> mapped;
    for (const auto& sk : tr.samples) mapped.push_back(basic_sr_ks3(A, sk));
    const Trajectory img = make_traj(kind, tr.t0, tr.dt, mapped);

    double residual = 0;
    for (std::size_t k = 2; k + 2 < img.samples.size(); k += 10) {
        const StateVec rhs = eval_field(kind, b1, img.time_at(k), img.samples[k]);
        residual = std::max(residual, max_abs_diff(fd4(img.samples, k, img.dt), rhs));
    }
    CHECK(residual < 1e-6);

    for (int k : {200, 400, 600}) {
        const double t = img.time_at(static_cast<std::size_t>(k));
        CHECK(std::abs(schwarzian_fd(img, k) - 2 * std::cos(t)) < 1e-4);
    }
}

TEST_CASE("projective relation fit recovers synthetic and oracle pairs") {
    const Trajectory x1 = sample_scalar(0.1, 1e-3, 501, [](double t) { return std::tan(t); });
    const PGL2Element A = normalize_pgl2(1.2, 0.4, -0.3, 1.0);

    std::vector<StateVec> moved;
    for (const auto& sk : x1.samples) moved.push_back({mobius(A, sk[0])});
    const Trajectory x2 = make_traj(x1.kind, x1.t0, x1.dt, moved);

    const MobiusFit fit = fit_mobius_relation(x1, x2);
    CHECK_FALSE(fit.rank_deficient);
    CHECK(fit.max_misfit < 1e-8);
    CHECK(std::abs(fit.element.alpha - A.alpha) < 1e-7);
    CHECK(std::abs(fit.element.beta - A.beta) < 1e-7);
    CHECK(std::abs(fit.element.gamma - A.gamma) < 1e-7);
    CHECK(std::abs(fit.element.delta - A.delta) < 1e-7);

    const MobiusFit same = fit_mobius_relation(x1, x1);
    CHECK(same.max_misfit < 1e-12);
    CHECK(std::abs(same.element.alpha - 1) < 1e-9);
    CHECK(std::abs(same.element.beta) < 1e-9);
    CHECK(std::abs(same.element.gamma) < 1e-9);
    CHECK(std::abs(same.element.delta - 1) < 1e-9);
    CHECK_FALSE(same.warnings.empty());

    // Two solutions of one Schwarzian equation are projectively related.
    const auto kind = SystemKind::ks3(0);
    const auto b1 = Coefficient::cosine(1, 1, 0);
    const Trajectory o1 = integrate(kind, b1, {0, 1, 0}, 0, 1, grid(1e-3));
    const Trajectory o2 = integrate(kind, b1, {0.4, 0.8, 0.1}, 0, 1, grid(1e-3));
    REQUIRE_FALSE(o1.meta.truncated);
    REQUIRE_FALSE(o2.meta.truncated);
    CHECK(fit_mobius_relation(o1, o2).max_misfit < 1e-5);

    const Trajectory flat = sample_scalar(0.1, 1e-3, 501, [](double) { return 0.7; });
    const MobiusFit degenerate = fit_mobius_relation(x1, flat);
    CHECK(degenerate.rank_deficient);
    CHECK(degenerate.element.alpha == 1.0);
    CHECK_FALSE(degenerate.warnings.empty());

    const Trajectory off_grid =
        sample_scalar(0.2, 1e-3, 501, [](double t) { return std::tan(t); });
    CHECK_THROWS_AS(fit_mobius_relation(x1, off_grid), UsageError);
    CHECK_THROWS_AS(
        fit_mobius_relation(x1, sample_scalar(0.1, 1e-3, 3, [](double t) { return t; })),
        UsageError);
}

TEST_CASE("symmetry generators commute with the frozen field") {
    CHECK(symmetry_residual(1, Coefficient::cosine(1, 1, 0), {1, 1, 0}, 0.5) < 1e-5);
    CHECK(symmetry_residual(2, Coefficient::constant(0), {1, 2, 3}, 0.8) < 1e-5);
    CHECK(symmetry_residual(3, Coefficient::constant(1), {2, 1, 1}, 0) < 1e-5);

    const Coefficient drives[3] = {Coefficient::constant(0), Coefficient::constant(1),
                                   Coefficient::cosine(1, 1, 0)};
    Rng rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        const StateVec p{rng.uniform_signed(0.2, 1.5), rng.uniform_signed(0.5, 1.5),
                         rng.uniform(-1, 1)};
        const double t = rng.uniform(0, 2);
        for (int which = 1; which <= 3; ++which)
            for (const auto& b1 : drives) CHECK(symmetry_residual(which, b1, p, t) < 1e-5);
    }

    CHECK_THROWS_AS(symmetry_residual(1, drives[0], {1, 0, 1}, 0), DomainError);
    CHECK_THROWS_AS(symmetry_residual(4, drives[0], {1, 1, 1}, 0), UsageError);
    CHECK_THROWS_AS(symmetry_residual(1, drives[0], {1, 1, 1}, 0, 0.1), UsageError);
}

TEST_CASE("first integrals and wronskian are conserved along joint motion") {
    CHECK(first_integral(1, {1, 0, 1, 0}, 1) == 4.0);
    CHECK(first_integral(2, {1, 0.3, 0, 0}, 1) == 0.0);
    CHECK_THROWS_AS(first_integral(1, {0, 1, 1, 0}, 1), DomainError);
    CHECK_THROWS_AS(first_integral(3, {1, 0, 1, 0}, 1), UsageError);
    CHECK_THROWS_AS(first_integral(1, {1, 0, 1}, 1), UsageError);

    CHECK(wronskian(1, 2, 2, 4) == 0.0);

    const auto ho = SystemKind::harmonic_oscillator();
    const auto one = Coefficient::constant(1);
    const Trajectory c1 = integrate(ho, one, {1, 0}, 0, 1, grid(1e-3));
    const Trajectory s1 = integrate(ho, one, {0, 1}, 0, 1, grid(1e-3));
    REQUIRE_FALSE(c1.meta.truncated);
    REQUIRE(s1.size() == c1.size());
    for (std::size_t k = 0; k < c1.size(); k += 50) {
        const double t = c1.time_at(k);
        CHECK(std::abs(c1.samples[k][0] - std::cos(t)) < 1e-9);
        CHECK(std::abs(s1.samples[k][0] - std::sin(t)) < 1e-9);
        CHECK(std::abs(wronskian(c1.samples[k][0], c1.samples[k][1], s1.samples[k][0],
                                 s1.samples[k][1]) -
                       1.0) < 1e-9);
    }

    const auto b1 = Coefficient::cosine(1, 1, 0);
    const Trajectory ks = integrate(SystemKind::ks2(1), b1, {1, 0}, 0, 1, grid(1e-3));
    const Trajectory h1 = integrate(ho, b1, {1, 0}, 0, 1, grid(1e-3));
    const Trajectory h2 = integrate(ho, b1, {1, 1}, 0, 1, grid(1e-3));
    REQUIRE_FALSE(ks.meta.truncated);
    REQUIRE(h1.size() == ks.size());
    REQUIRE(h2.size() == ks.size());

    const double f10 = first_integral(1, {1, 0, 1, 0}, 1); // = 4
    const double f20 = first_integral(2, {1, 0, 1, 1}, 1); // = 8
    CHECK(f10 == 4.0);
    CHECK(f20 == 8.0);
    double w0 = wronskian(1, 0, 1, 1);
    for (std::size_t k = 0; k < ks.size(); k += 20) {
        const StateVec joint1{ks.samples[k][0], ks.samples[k][1], h1.samples[k][0],
                              h1.samples[k][1]};
        const StateVec joint2{ks.samples[k][0], ks.samples[k][1], h2.samples[k][0],
                              h2.samples[k][1]};
        CHECK(std::abs(first_integral(1, joint1, 1) - f10) / f10 < 1e-6);
        CHECK(std::abs(first_integral(2, joint2, 1) - f20) / f20 < 1e-6);
        CHECK(std::abs(wronskian(h1.samples[k][0], h1.samples[k][1], h2.samples[k][0],
                                 h2.samples[k][1]) -
                       w0) < 1e-8);
    }
}

TEST_CASE("mixed rule reproduces hand data and trivial reductions") {
    // Circular oscillator pair with k1 = k2 = 1, c0 = 1: the equilibrium x = 1.
    MixedConstants K;
    K.c0 = 1;
    for (int i = 0; i <= 10; ++i) {
        const double t = 0.1 * i;
        const StateVec out =
            mixed_sr_ks2({std::cos(t), -std::sin(t)}, {std::sin(t), std::cos(t)}, K);
        CHECK(std::abs(out[0] - 1) < 1e-7);
        CHECK(std::abs(out[1]) < 1e-7);
    }

    // c0 = 0, k2 = 0: collapses to x = 1/(k1 x1^2).
    MixedConstants ratio;
    ratio.k1 = 2;
    ratio.k2 = 0;
    const StateVec r = mixed_sr_ks2({0.8, 0.3}, {0.4, -1.1}, ratio);
    CHECK(r[0] == 1 / (2 * 0.8 * 0.8));
    CHECK(std::abs(r[1] - (-2 * 2 * 0.8 * 0.3 * r[0] * r[0])) < 1e-15);

    MixedConstants bad;
    bad.k1 = 0.1;
    bad.k2 = 0.1;
    bad.c0 = 1;
    CHECK_THROWS_AS(mixed_sr_ks2({1, 0}, {0, 1}, bad), DomainError);

    CHECK_THROWS_AS(mixed_sr_ks2({1, 2}, {2, 4}, K), DegenerateInputError);

    MixedConstants singular;
    singular.branch = -1;
    CHECK_THROWS_AS(mixed_sr_ks2({1, 0.3}, {1, 0.9}, singular), DomainError);

    MixedConstants zero_branch;
    zero_branch.branch = 0;
    CHECK_THROWS_AS(mixed_sr_ks2({1, 0}, {0, 1}, zero_branch), UsageError);
    CHECK_THROWS_AS(mixed_sr_ks2({1, 0, 0}, {0, 1}, K), UsageError);
}

TEST_CASE("mixed rule output satisfies the second-order dynamics") {
    const auto ho = SystemKind::harmonic_oscillator();
    const auto ks2 = SystemKind::ks2(0.7);
    const Coefficient drives[3] = {Coefficient::constant(0), Coefficient::constant(1),
                                   Coefficient::cosine(1, 1, 0)};
    Rng rng(2026);
    for (const auto& b1 : drives) {
        const Trajectory h1 = integrate(ho, b1, {1, 0}, 0, 1, grid(1e-3));
        const Trajectory h2 = integrate(ho, b1, {0, 1}, 0, 1, grid(1e-3));
        REQUIRE_FALSE(h1.meta.truncated);
        REQUIRE(h2.size() == h1.size());
        for (int draw = 0; draw < 10; ++draw) {
            MixedConstants K;
            K.c0 = 0.7;
            K.k1 = rng.uniform(0.9, 1.8);
            K.k2 = 0.7 / K.k1 + rng.uniform(0.05, 1.5);
            for (int branch : {1, -1}) {
                K.branch = branch;
                std::vector<StateVec> out;
                for (std::size_t k = 0; k < h1.size(); ++k)
                    out.push_back(mixed_sr_ks2(h1.samples[k], h2.samples[k], K));
                double residual = 0;
                for (std::size_t k = 2; k + 2 < out.size(); k += 25) {
                    const double t = h1.time_at(k);
                    residual = std::max(residual, max_abs_diff(fd4(out, k, h1.dt),
                                                               eval_field(ks2, b1, t, out[k])));
                }
                CHECK(residual < 1e-6);
            }
        }
    }
}

TEST_CASE("mixed rule v-component is the derivative of the x-component") {
    const auto ho = SystemKind::harmonic_oscillator();
    const auto b1 = Coefficient::cosine(1, 1, 0);
    const Trajectory h1 = integrate(ho, b1, {1, 0}, 0, 1, grid(1e-3));
    const Trajectory h2 = integrate(ho, b1, {0, 1}, 0, 1, grid(1e-3));
    REQUIRE(h2.size() == h1.size());
    MixedConstants K;
    K.c0 = 0.7;
    K.k1 = 1.4;
    K.k2 = 1.1;
    for (int branch : {1, -1}) {
        K.branch = branch;
        std::vector<StateVec> out;
        for (std::size_t k = 0; k < h1.size(); ++k)
            out.push_back(mixed_sr_ks2(h1.samples[k], h2.samples[k], K));
        for (std::size_t k = 2; k + 2 < out.size(); k += 20) {
            const double slope = fd4(out, k, h1.dt)[0];
            CHECK(std::abs(slope - out[k][1]) < 1e-5);
        }
    }
}

TEST_CASE("initial data determines the mixed-rule constants") {
    const MixedConstants K = constants_from_initial({1, 0}, {1, 0}, {0, 1}, 1);
    CHECK(K.i1 == 4.0);
    CHECK(K.i2 == 4.0);
    CHECK(K.k1 == 1.0);
    CHECK(K.k2 == 1.0);
    CHECK(K.branch == 1);
    CHECK(K.c0 == 1.0);

    // A nonzero initial velocity forces the negative branch.
    const MixedConstants Kv = constants_from_initial({1, 0.5}, {1, 0}, {0, 1}, 1);
    CHECK(Kv.branch == -1);
    CHECK(Kv.k1 == 1.0);
    CHECK(Kv.k2 == 1.0625);

    CHECK_THROWS_AS(constants_from_initial({0, 1}, {1, 0}, {0, 1}, 1), DomainError);
    CHECK_THROWS_AS(constants_from_initial({1, 0}, {1, 2}, {2, 4}, 1), DegenerateInputError);
    CHECK_THROWS_AS(constants_from_initial({1, 0}, {1, 0}, {0, 1, 0}, 1), UsageError);
}

TEST_CASE("mixed-rule round trip follows the second-order oracle") {
    const auto b1 = Coefficient::cosine(1, 1, 0);
    const Trajectory ks = integrate(SystemKind::ks2(1), b1, {1, 0}, 0, 1, grid(1e-3));
    const Trajectory h1 =
        integrate(SystemKind::harmonic_oscillator(), b1, {1, 0}, 0, 1, grid(1e-3));
    const Trajectory h2 =
        integrate(SystemKind::harmonic_oscillator(), b1, {1, 1}, 0, 1, grid(1e-3));
    REQUIRE_FALSE(ks.meta.truncated);

    const MixedConstants K = constants_from_initial(ks.samples[0], h1.samples[0],
                                                    h2.samples[0], 1);
    CHECK(K.branch == -1);
    CHECK(K.k1 == 2.0);
    CHECK(K.k2 == 1.0);

    double sup = 0;
    for (std::size_t k = 0; k < ks.size(); ++k)
        sup = std::max(sup,
                       max_abs_diff(mixed_sr_ks2(h1.samples[k], h2.samples[k], K), ks.samples[k]));
    CHECK(sup < 1e-5);
}

TEST_CASE("trajectory-level mixed rule pins the branch root at the first sample") {
    // On the discriminant's zero boundary (k1 k2 = c0 / W^2) the per-sample
    // root chatters at integration-noise level; the trajectory overload reads
    // it once, so the combined motion stays smooth enough to differentiate.
    const auto one = Coefficient::constant(1);
    const Trajectory h1 = integrate(SystemKind::harmonic_oscillator(), one, {1, 0}, 0, 1, grid(1e-3));
    const Trajectory h2 = integrate(SystemKind::harmonic_oscillator(), one, {0, 1}, 0, 1, grid(1e-3));
    REQUIRE_FALSE(h1.meta.truncated);
    REQUIRE_FALSE(h2.meta.truncated);

    MixedConstants K;
    K.k1 = 1;
    K.k2 = 1;
    K.c0 = 1;
    const Trajectory mixed = mixed_sr_ks2(h1, h2, K);
    REQUIRE(mixed.size() == h1.size());
    CHECK(mixed.kind.tag == SystemTag::ks2);
    CHECK(mixed.t0 == h1.t0);

    // cos^2 + sin^2 = 1: the combination is the unit equilibrium.
    double flat = 0, residual = 0;
    for (std::size_t k = 0; k < mixed.size(); ++k)
        flat = std::max(flat, std::fabs(mixed.samples[k][0] - 1));
    CHECK(flat < 1e-7);
    for (std::size_t k = 2; k + 2 < mixed.size(); k += 10) {
        const StateVec rhs = eval_field(mixed.kind, one, mixed.time_at(k), mixed.samples[k]);
        const StateVec slope = fd4(mixed.samples, k, mixed.dt);
        residual = std::max(residual, max_abs_diff(slope, rhs));
    }
    CHECK(residual < 1e-6);

    // Away from the boundary the overload agrees with the pointwise rule.
    const auto b1 = Coefficient::cosine(1, 1, 0);
    const Trajectory g1 = integrate(SystemKind::harmonic_oscillator(), b1, {1, 0}, 0, 1, grid(1e-3));
    const Trajectory g2 = integrate(SystemKind::harmonic_oscillator(), b1, {0, 1}, 0, 1, grid(1e-3));
    MixedConstants Kf;
    Kf.k1 = 1.4;
    Kf.k2 = 1.1;
    Kf.c0 = 0.7;
    Kf.branch = -1;
    const Trajectory batch = mixed_sr_ks2(g1, g2, Kf);
    double gap = 0;
    for (std::size_t k = 0; k < batch.size(); ++k)
        gap = std::max(gap, max_abs_diff(batch.samples[k],
                                         mixed_sr_ks2(g1.samples[k], g2.samples[k], Kf)));
    CHECK(gap < 1e-8);

    // Guards: mismatched grids, bad branch, impossible constants.
    Trajectory shifted = h2;
    shifted.dt = 2e-3;
    CHECK_THROWS_AS(mixed_sr_ks2(h1, shifted, K), UsageError);
    Trajectory shorter = h2;
    shorter.samples.pop_back();
    CHECK_THROWS_AS(mixed_sr_ks2(h1, shorter, K), UsageError);
    MixedConstants bad = K;
    bad.branch = 0;
    CHECK_THROWS_AS(mixed_sr_ks2(h1, h2, bad), UsageError);
    MixedConstants neg = K;
    neg.k1 = 0.1;
    neg.k2 = 0.1;
    CHECK_THROWS_AS(mixed_sr_ks2(h1, h2, neg), DomainError);
}
