#include <doctest.h>

#include <cmath>

#include "sl2ode/errors.hpp"
#include "sl2ode/mat2.hpp"
#include "sl2ode/reduced.hpp"

using namespace sl2ode;

namespace {

// max entrywise distance of the sampled path from a closed-form path
double sup_path_error(const ReducedPath& path, const std::function<SL2Element(double)>& exact) {
    double sup = 0;
    for (std::size_t k = 0; k < path.size(); ++k)
        sup = std::max(sup, max_abs_diff(path.g[k], exact(path.time_at(k))));
    return sup;
}

// FD residual of the group equation g' = -(A3 + b1 A1) g on interior samples
double ode_residual(const ReducedPath& path, const Coefficient& b1) {
    const Mat2 a1 = sl2_basis(1), a3 = sl2_basis(3);
    double worst = 0;
    for (std::size_t k = 1; k + 1 < path.size(); k += 37) {
        const Mat2 deriv = (path.g[k + 1].mat() - path.g[k - 1].mat()) * (0.5 / path.dt);
        const Mat2 rhs = (a3 + b1(path.time_at(k)) * a1) * path.g[k].mat() * -1.0;
        worst = std::max(worst, max_abs_diff(deriv, rhs));
    }
    return worst;
}

} // namespace

TEST_CASE("free path is lower triangular and starts at the exact identity") {
    SolverConfig cfg;
    cfg.dt = 1e-3;
    const ReducedPath path = solve_reduced(Coefficient::constant(0), 0, 1, cfg);
    REQUIRE(!path.meta.truncated);
    CHECK(path.g[0].alpha == 1.0);
    CHECK(path.g[0].beta == 0.0);
    CHECK(path.g[0].gamma == 0.0);
    CHECK(path.g[0].delta == 1.0);
    CHECK(sup_path_error(path, [](double t) { return SL2Element{1, 0, t, 1}; }) < 1e-9);
}

TEST_CASE("unit drive integrates to the rotation path") {
    SolverConfig cfg;
    cfg.dt = 1e-3;
    const ReducedPath path = solve_reduced(Coefficient::constant(1), 0, 1, cfg);
    const double sup = sup_path_error(path, [](double t) {
        return SL2Element{std::cos(t), -std::sin(t), std::sin(t), std::cos(t)};
    });
    CHECK(sup < 1e-9);
    CHECK(path.meta.max_det_drift < 1e-12);
}

TEST_CASE("cosine drive satisfies the group equation and stays unimodular") {
    SolverConfig cfg;
    cfg.dt = 1e-3;
    const Coefficient b1 = Coefficient::cosine(1, 1, 0);
    const ReducedPath path = solve_reduced(b1, 0, 1, cfg);
    REQUIRE(!path.meta.truncated);
    CHECK(path.meta.max_det_drift < 1e-12);
    CHECK(ode_residual(path, b1) < 1e-5);
    for (std::size_t k = 0; k < path.size(); k += 101)
        CHECK(std::abs(path.g[k].det() - 1.0) < 1e-12);
    CHECK(path.b1_fingerprint == b1.fingerprint());
    CHECK(path.b1_fingerprint != Coefficient::constant(1).fingerprint());
}

TEST_CASE("adaptive solve matches the rotation path") {
    SolverConfig cfg;
    cfg.method = SolverConfig::Method::rkf45;
    cfg.dt = 1e-2;
    cfg.tol = 1e-10;
    const ReducedPath path = solve_reduced(Coefficient::constant(1), 0, 1, cfg);
    const double sup = sup_path_error(path, [](double t) {
        return SL2Element{std::cos(t), -std::sin(t), std::sin(t), std::cos(t)};
    });
    CHECK(sup < 1e-7);
}

TEST_CASE("right translation composes sample-wise and keeps solving the equation") {
    SolverConfig cfg;
    cfg.dt = 1e-3;
    const Coefficient b1 = Coefficient::constant(0);
    const ReducedPath path = solve_reduced(b1, 0, 1, cfg);
    const SL2Element h = exp_basis(1, 0.7); // (1 0.7; 0 1)
    const ReducedPath moved = right_translate(path, h);

    const double sup = sup_path_error(
        moved, [](double t) { return SL2Element{1, 0.7, t, 0.7 * t + 1}; });
    CHECK(sup < 1e-9);
    CHECK(ode_residual(moved, b1) < 1e-5);
    CHECK(moved.b1_fingerprint == path.b1_fingerprint);

    CHECK_THROWS_AS(right_translate(path, SL2Element{2, 0, 0, 1}), UsageError);
}

TEST_CASE("path round-trips through the flattened trajectory form") {
    SolverConfig cfg;
    cfg.dt = 1e-2;
    const ReducedPath path = solve_reduced(Coefficient::cosine(1, 1, 0), 0, 1, cfg);
    const Trajectory flat = to_trajectory(path);
    CHECK(flat.kind.tag == SystemTag::reduced_sl2);
    const ReducedPath back = reduced_from_trajectory(flat);
    REQUIRE(back.size() == path.size());
    double sup = 0;
    for (std::size_t k = 0; k < path.size(); ++k)
        sup = std::max(sup, max_abs_diff(back.g[k], path.g[k]));
    CHECK(sup == 0.0);
}
