#include "sl2ode/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sl2ode/actions.hpp"
#include "sl2ode/errors.hpp"
#include "sl2ode/reconstruction.hpp"
#include "sl2ode/reduced.hpp"
#include "sl2ode/rng.hpp"
#include "sl2ode/superposition.hpp"
#include "sl2ode/systems.hpp"

namespace sl2ode {
namespace {

void add(std::vector<CheckResult>& out, std::string name, double value, double threshold) {
    out.push_back({std::move(name), value, threshold, value <= threshold});
}

StateVec random_point(SystemTag tag, Rng& rng) {
    switch (tag) {
        case SystemTag::riccati:
            return {rng.uniform(-1.5, 1.5)};
        case SystemTag::milne_pinney:
            return {rng.uniform(0.5, 2), rng.uniform(-1.5, 1.5)};
        case SystemTag::harmonic_oscillator:
            return {rng.uniform(-2, 2), rng.uniform(-2, 2)};
        case SystemTag::ks2:
            return {rng.uniform_signed(0.6, 1.6), rng.uniform(-1, 1)};
        case SystemTag::ks3:
            return {rng.uniform(-1, 1), rng.uniform_signed(0.6, 1.5), rng.uniform(-1, 1)};
        case SystemTag::wei_norman:
            return {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        case SystemTag::reduced_sl2: {
            // det = 1 by construction, so the point is on the group.
            double alpha = rng.uniform(0.5, 1.5);
            double beta = rng.uniform(-0.5, 0.5);
            double gamma = rng.uniform(-0.5, 0.5);
            return {alpha, beta, gamma, (1 + beta * gamma) / alpha};
        }
    }
    return {};
}

SL2Element random_near_identity(Rng& rng, double radius) {
    return compose_second_kind({rng.uniform(-radius, radius), rng.uniform(-radius, radius),
                                rng.uniform(-radius, radius)});
}

// Fourth-order central difference of one state component.
double fd4(const Trajectory& traj, std::size_t k, int comp) {
    return (-traj.samples[k + 2][comp] + 8 * traj.samples[k + 1][comp] -
            8 * traj.samples[k - 1][comp] + traj.samples[k - 2][comp]) /
           (12 * traj.dt);
}

Trajectory scalar_trajectory(double t0, double dt, const std::vector<double>& values) {
    Trajectory traj;
    traj.kind = SystemKind::riccati();
    traj.t0 = t0;
    traj.dt = dt;
    for (double v : values) traj.samples.push_back({v});
    return traj;
}

std::vector<CheckResult> algebra_suite(std::uint64_t seed) {
    std::vector<CheckResult> out;

    // [A1,A2] = A1, [A1,A3] = 2 A2, [A2,A3] = A3, exact in floating point.
    double worst = 0;
    worst = std::max(worst, max_abs_diff(commutator(sl2_basis(1), sl2_basis(2)), sl2_basis(1)));
    worst = std::max(worst, max_abs_diff(commutator(sl2_basis(1), sl2_basis(3)), 2.0 * sl2_basis(2)));
    worst = std::max(worst, max_abs_diff(commutator(sl2_basis(2), sl2_basis(3)), sl2_basis(3)));
    add(out, "algebra/matrix-brackets", worst, 0.0);

    const SystemKind kinds[] = {
        SystemKind::riccati(),
        SystemKind::milne_pinney(1.0),
        SystemKind::harmonic_oscillator(),
        SystemKind::ks2(1.0),
        SystemKind::ks3(1.0),
        SystemKind::ks3_curve(Coefficient::polynomial({0.5, 1.0})),
        SystemKind::wei_norman(),
    };
    Rng rng(seed);
    for (const SystemKind& kind : kinds) {
        const Field v1 = vg_field(kind, 1), v2 = vg_field(kind, 2), v3 = vg_field(kind, 3);
        double residual = 0;
        for (int i = 0; i < 20; ++i) {
            const StateVec p = random_point(kind.tag, rng);
            residual = std::max(residual, max_abs_diff(lie_bracket_fd(v1, v2, p, 1e-4), v1(p)));
            residual = std::max(residual,
                                max_abs_diff(lie_bracket_fd(v1, v3, p, 1e-4), 2.0 * v2(p)));
            residual = std::max(residual, max_abs_diff(lie_bracket_fd(v2, v3, p, 1e-4), v3(p)));
        }
        std::string name = kind.tag == SystemTag::ks3 && !kind.c0.is_constant()
                               ? "ks3_curve"
                               : to_string(kind.tag);
        add(out, "algebra/" + name + "-field-brackets", residual, 1e-5);
    }
    return out;
}

std::vector<CheckResult> actions_suite(std::uint64_t seed) {
    std::vector<CheckResult> out;
    const SystemKind kinds[] = {
        SystemKind::riccati(), SystemKind::milne_pinney(1.0),
        SystemKind::harmonic_oscillator(), SystemKind::ks2(1.0),
        SystemKind::ks3(1.0), SystemKind::wei_norman(),
    };
    Rng rng(seed);
    for (const SystemKind& kind : kinds) {
        // Points with a safety margin from the chart boundary so the
        // near-identity group elements below cannot push them across.
        auto draw = [&]() -> StateVec {
            switch (kind.tag) {
                case SystemTag::riccati: return {rng.uniform(-1, 1)};
                case SystemTag::milne_pinney: return {rng.uniform(0.5, 2), rng.uniform(-1, 1)};
                case SystemTag::ks2: return {rng.uniform_signed(0.7, 1.4), rng.uniform(-0.8, 0.8)};
                case SystemTag::ks3:
                    return {rng.uniform(-1, 1), rng.uniform_signed(0.6, 1.5), rng.uniform(-1, 1)};
                default:
                    return random_point(kind.tag, rng);
            }
        };

        double identity_err = 0, comp_err = 0;
        for (int i = 0; i < 50; ++i) {
            const StateVec p = draw();
            identity_err = std::max(identity_err,
                                    max_abs_diff(act(kind, SL2Element::identity(), p), p));
            const SL2Element g = random_near_identity(rng, 0.05);
            const SL2Element h = random_near_identity(rng, 0.05);
            comp_err = std::max(comp_err, max_abs_diff(act(kind, compose(g, h), p),
                                                       act(kind, g, act(kind, h, p))));
        }
        add(out, "actions/" + to_string(kind.tag) + "-identity", identity_err, 0.0);
        add(out, "actions/" + to_string(kind.tag) + "-composition", comp_err, 1e-8);

        double field_err = 0;
        for (int i = 0; i < 20; ++i) {
            const StateVec p = draw();
            for (int index = 1; index <= 3; ++index) {
                field_err = std::max(field_err, fundamental_field_check(kind, index, p));
            }
        }
        add(out, "actions/" + to_string(kind.tag) + "-fundamental-fields", field_err, 1e-5);
    }
    return out;
}

std::vector<CheckResult> reconstruction_suite() {
    std::vector<CheckResult> out;
    SolverConfig cfg;
    cfg.dt = 1e-3;
    const Coefficient cosine = Coefficient::cosine(1, 1, 0);

    struct Entry {
        SystemKind kind;
        StateVec s0;
    };
    const Entry entries[] = {
        {SystemKind::riccati(), {0}},
        {SystemKind::milne_pinney(1.0), {1, 0}},
        {SystemKind::harmonic_oscillator(), {1, 0}},
        {SystemKind::ks2(1.0), {1, 0}},
        {SystemKind::ks3(1.0), {0, 1, 0}},
        {SystemKind::wei_norman(), {0, 0, 0}},
    };
    for (const Entry& e : entries) {
        ResidualReport rep = cross_validate(e.kind, cosine, e.s0, 0, 1, cfg);
        double value = rep.truncated ? std::numeric_limits<double>::infinity() : rep.sup_error;
        add(out, "reconstruction/" + to_string(e.kind.tag) + "-cross-validation", value, 1e-5);
    }

    // Constant drive: the scalar quadratic equation follows the tangent.
    {
        ReducedPath path = solve_reduced(Coefficient::constant(1), 0, 1, cfg);
        Trajectory recon = reconstruct(SystemKind::riccati(), path, {0});
        double worst = 0;
        for (std::size_t k = 0; k < recon.size(); ++k) {
            worst = std::max(worst, std::fabs(recon.samples[k][0] - std::tan(recon.time_at(k))));
        }
        add(out, "reconstruction/riccati-tangent", worst, 1e-6);
    }

    // Drive-free group path is lower unitriangular with gamma = t.
    ReducedPath free_path = solve_reduced(Coefficient::constant(0), 0, 1, cfg);
    {
        double worst = 0;
        for (std::size_t k = 0; k < free_path.size(); ++k) {
            const SL2Element expected{1, 0, free_path.time_at(k), 1};
            worst = std::max(worst, max_abs_diff(free_path.g[k], expected));
        }
        add(out, "reconstruction/drift-free-group-path", worst, 1e-9);
    }

    // Undriven, uncoupled third-order motion from (0, 1, 0) is the line x = t.
    {
        Trajectory line = reconstruct(SystemKind::ks3(0.0), free_path, {0, 1, 0});
        double worst = line.meta.truncated ? std::numeric_limits<double>::infinity() : 0;
        for (std::size_t k = 0; k < line.size(); ++k) {
            worst = std::max(worst, std::fabs(line.samples[k][0] - line.time_at(k)));
            worst = std::max(worst, std::fabs(line.samples[k][1] - 1));
            worst = std::max(worst, std::fabs(line.samples[k][2]));
        }
        add(out, "reconstruction/ks3-free-line", worst, 1e-8);
    }

    // Inversion round trips: recover the cosine-driven path from solutions.
    auto path_distance = [](const ReducedPath& a, const ReducedPath& b) {
        double worst = 0;
        for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k) {
            worst = std::max(worst, max_abs_diff(a.g[k], b.g[k]));
        }
        if (a.size() != b.size()) worst = std::numeric_limits<double>::infinity();
        return worst;
    };
    ReducedPath cos_path = solve_reduced(cosine, 0, 1, cfg);
    {
        Trajectory x1 = integrate(SystemKind::ks2(1.0), cosine, {1, 0}, 0, 1, cfg);
        Trajectory x2 = integrate(SystemKind::ks2(1.0), cosine, {2, 0}, 0, 1, cfg);
        add(out, "reconstruction/invert-ks2-round-trip",
            path_distance(invert_ks2(x1, x2, 1.0), cos_path), 1e-5);
    }
    {
        Trajectory x1 = integrate(SystemKind::ks3(1.0), cosine, {0, 1, 0}, 0, 1, cfg);
        Trajectory x2 = integrate(SystemKind::ks3(1.0), cosine, {0.5, 2, 0}, 0, 1, cfg);
        add(out, "reconstruction/invert-ks3-round-trip",
            path_distance(invert_ks3(x1, x2, 1.0), cos_path), 1e-5);
    }
    {
        SolverConfig short_cfg = cfg;
        ReducedPath short_path = solve_reduced(cosine, 0, 0.6, short_cfg);
        Trajectory x1 = integrate(SystemKind::riccati(), cosine, {0}, 0, 0.6, short_cfg);
        Trajectory x2 = integrate(SystemKind::riccati(), cosine, {1}, 0, 0.6, short_cfg);
        Trajectory x3 = integrate(SystemKind::riccati(), cosine, {-1}, 0, 0.6, short_cfg);
        add(out, "reconstruction/invert-riccati-round-trip",
            path_distance(invert_riccati(x1, x2, x3), short_path), 1e-5);
    }
    {
        Trajectory s1 = integrate(SystemKind::milne_pinney(1.0), cosine, {1.2, 0}, 0, 1, cfg);
        Trajectory s2 = integrate(SystemKind::milne_pinney(1.0), cosine, {2, 0}, 0, 1, cfg);
        add(out, "reconstruction/invert-mp-round-trip",
            path_distance(invert_mp(s1, s2, 1.0), cos_path), 1e-4);
    }
    return out;
}

std::vector<CheckResult> superposition_suite(std::uint64_t seed) {
    std::vector<CheckResult> out;
    Rng rng(seed);
    SolverConfig cfg;
    cfg.dt = 1e-3;
    const Coefficient cosine = Coefficient::cosine(1, 1, 0);

    // The derivative ratio {x} is blind to projective maps of the samples.
    {
        const double t0 = 0.1, dt = 1e-3;
        const int n = 501;
        std::vector<double> base(n);
        for (int k = 0; k < n; ++k) base[static_cast<std::size_t>(k)] = std::tan(t0 + k * dt);
        Trajectory source = scalar_trajectory(t0, dt, base);
        double worst = 0;
        for (int trial = 0; trial < 10; ++trial) {
            PGL2Element element = normalize_pgl2(rng.uniform(0.95, 1.05), rng.uniform(-0.1, 0.1),
                                                 rng.uniform(-0.1, 0.1), rng.uniform(0.95, 1.05));
            std::vector<double> mapped(base.size());
            for (std::size_t k = 0; k < base.size(); ++k) mapped[k] = mobius(element, base[k]);
            Trajectory image = scalar_trajectory(t0, dt, mapped);
            for (int k = 50; k <= 450; k += 100) {
                worst = std::max(worst,
                                 std::fabs(schwarzian_fd(image, k) - schwarzian_fd(source, k)));
            }
        }
        add(out, "superposition/schwarzian-moebius-invariance", worst, 1e-5);
    }

    // Mapping a third-order solution preserves the recovered drive 2 b1(t).
    {
        Trajectory orbit = integrate(SystemKind::ks3(0.0), cosine, {0, 1, 0}, 0, 1, cfg);
        PGL2Element element = normalize_pgl2(1, 0.3, -0.2, 1.1);
        Trajectory image = orbit;
        for (auto& s : image.samples) s = basic_sr_ks3(element, s);
        double worst = 0;
        for (int k = 100; k <= 600; k += 50) {
            double t = image.time_at(static_cast<std::size_t>(k));
            worst = std::max(worst, std::fabs(schwarzian_fd(image, k) - 2 * std::cos(t)));
        }
        add(out, "superposition/basic-rule-drive-recovery", worst, 1e-4);
    }

    // The germ of the identity line maps onto the matrix's own fraction.
    {
        PGL2Element element = normalize_pgl2(1, 1, 1, 2);
        double worst = 0;
        for (int k = 0; k <= 100; ++k) {
            double t = 0.01 * k;
            StateVec image = basic_sr_ks3(element, {t, 1, 0});
            worst = std::max(worst, std::fabs(image[0] - (t + 1) / (t + 2)));
        }
        add(out, "superposition/basic-rule-projective-line", worst, 1e-10);
    }

    // The three projective generators commute with the frozen drift.
    {
        const Coefficient drives[] = {Coefficient::constant(0), Coefficient::constant(1), cosine};
        double worst = 0;
        for (int i = 0; i < 20; ++i) {
            const StateVec p{rng.uniform(-1, 1), rng.uniform_signed(0.6, 1.5), rng.uniform(-1, 1)};
            const double t = rng.uniform(0, 1);
            for (const Coefficient& b1 : drives) {
                for (int which = 1; which <= 3; ++which) {
                    worst = std::max(worst, symmetry_residual(which, b1, p, t));
                }
            }
        }
        add(out, "superposition/symmetry-commutators", worst, 1e-5);
    }

    // Pairing invariants along a driven joint motion.
    {
        Trajectory ks2_traj = integrate(SystemKind::ks2(1.0), cosine, {1, 0}, 0, 1, cfg);
        Trajectory ho1 = integrate(SystemKind::harmonic_oscillator(), cosine, {1, 0}, 0, 1, cfg);
        Trajectory ho2 = integrate(SystemKind::harmonic_oscillator(), cosine, {1, 1}, 0, 1, cfg);
        const double f1_0 = first_integral(1, {1, 0, 1, 0}, 1.0);
        const double f2_0 = first_integral(1, {1, 0, 1, 1}, 1.0);
        const double w0 = wronskian(1, 0, 1, 1);
        double drift = 0, wdrift = 0;
        for (std::size_t k = 0; k < ks2_traj.size(); ++k) {
            const StateVec joint1{ks2_traj.samples[k][0], ks2_traj.samples[k][1],
                                  ho1.samples[k][0], ho1.samples[k][1]};
            const StateVec joint2{ks2_traj.samples[k][0], ks2_traj.samples[k][1],
                                  ho2.samples[k][0], ho2.samples[k][1]};
            drift = std::max(drift, std::fabs(first_integral(1, joint1, 1.0) - f1_0) / f1_0);
            drift = std::max(drift, std::fabs(first_integral(1, joint2, 1.0) - f2_0) / f2_0);
            wdrift = std::max(wdrift, std::fabs(wronskian(ho1.samples[k][0], ho1.samples[k][1],
                                                          ho2.samples[k][0], ho2.samples[k][1]) -
                                                w0));
        }
        add(out, "superposition/first-integral-drift", drift, 1e-6);
        add(out, "superposition/wronskian-drift", wdrift, 1e-8);
    }

    // The paired rule produces second-order solutions for random constants.
    {
        const Coefficient drives[] = {Coefficient::constant(0), Coefficient::constant(1), cosine};
        const double c0 = 0.7;
        double worst = 0;
        for (const Coefficient& b1 : drives) {
            Trajectory ho1 = integrate(SystemKind::harmonic_oscillator(), b1, {1, 0}, 0, 1, cfg);
            Trajectory ho2 = integrate(SystemKind::harmonic_oscillator(), b1, {0, 1}, 0, 1, cfg);
            for (int draw = 0; draw < 10; ++draw) {
                MixedConstants constants;
                constants.c0 = c0;
                constants.k1 = rng.uniform(0.9, 1.8);
                constants.k2 = c0 / constants.k1 + rng.uniform(0.05, 1.5);
                for (int branch : {1, -1}) {
                    constants.branch = branch;
                    Trajectory mixed = ho1;
                    mixed.kind = SystemKind::ks2(c0);
                    for (std::size_t k = 0; k < mixed.size(); ++k) {
                        mixed.samples[k] = mixed_sr_ks2(ho1.samples[k], ho2.samples[k], constants);
                    }
                    for (std::size_t k = 2; k + 2 < mixed.size(); k += 25) {
                        const double t = mixed.time_at(k);
                        const StateVec rhs = eval_field(mixed.kind, b1, t, mixed.samples[k]);
                        worst = std::max(worst, std::fabs(fd4(mixed, k, 0) - rhs[0]));
                        worst = std::max(worst, std::fabs(fd4(mixed, k, 1) - rhs[1]));
                    }
                }
            }
        }
        add(out, "superposition/mixed-rule-residual", worst, 1e-6);
    }

    // Constants fitted from initial data reproduce the named solution.
    {
        Trajectory target = integrate(SystemKind::ks2(1.0), cosine, {1, 0}, 0, 1, cfg);
        Trajectory ho1 = integrate(SystemKind::harmonic_oscillator(), cosine, {1, 0}, 0, 1, cfg);
        Trajectory ho2 = integrate(SystemKind::harmonic_oscillator(), cosine, {1, 1}, 0, 1, cfg);
        MixedConstants constants =
            constants_from_initial(target.samples[0], ho1.samples[0], ho2.samples[0], 1.0);
        double worst = 0;
        for (std::size_t k = 0; k < target.size(); ++k) {
            const StateVec mixed = mixed_sr_ks2(ho1.samples[k], ho2.samples[k], constants);
            worst = std::max(worst, max_abs_diff(mixed, target.samples[k]));
        }
        add(out, "superposition/mixed-constants-round-trip", worst, 1e-5);
    }
    return out;
}

} // namespace

std::vector<CheckResult> verify_suite(const std::string& suite, std::uint64_t seed) {
    if (suite == "algebra") return algebra_suite(seed);
    if (suite == "actions") return actions_suite(seed);
    if (suite == "reconstruction") return reconstruction_suite();
    if (suite == "superposition") return superposition_suite(seed);
    if (suite == "all") {
        std::vector<CheckResult> out = algebra_suite(seed);
        auto append = [&out](std::vector<CheckResult> more) {
            out.insert(out.end(), std::make_move_iterator(more.begin()),
                       std::make_move_iterator(more.end()));
        };
        append(actions_suite(seed));
        append(reconstruction_suite());
        append(superposition_suite(seed));
        return out;
    }
    throw UsageError("unknown suite '" + suite +
                     "'; expected algebra, actions, reconstruction, superposition, or all");
}

} // namespace sl2ode
