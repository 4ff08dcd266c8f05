// Command line front end: solve, reconstruct, invert, superpose, verify, bench.
//
// Exit codes: 0 success, 2 usage/config defect, 3 truncated run,
// 4 domain precondition violated, 5 residual above tolerance.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sl2ode/actions.hpp"
#include "sl2ode/csv.hpp"
#include "sl2ode/errors.hpp"
#include "sl2ode/reconstruction.hpp"
#include "sl2ode/reduced.hpp"
#include "sl2ode/scenario.hpp"
#include "sl2ode/superposition.hpp"
#include "sl2ode/systems.hpp"
#include "sl2ode/verify.hpp"

namespace {

using nlohmann::ordered_json;
using namespace sl2ode;

constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kTruncated = 3;
constexpr int kDomain = 4;
constexpr int kResidual = 5;

struct Options {
    std::string config;
    std::string out_dir = ".";
    std::uint64_t seed = 42;
    double tol = 1e-5;
    std::string suite = "all";
};

std::string join_out(const Options& opt, const std::string& name) {
    std::filesystem::path dir(opt.out_dir);
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

void require_config(const Options& opt) {
    if (opt.config.empty()) throw UsageError("--config FILE is required for this command");
}

void write_report(const std::string& file, const ordered_json& report) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw UsageError("cannot open '" + file + "' for writing");
    out << report.dump(2) << "\n";
}

ordered_json truncation_diagnostic(const Trajectory::Meta& meta, std::size_t rows,
                                   const std::string& csv) {
    return ordered_json{{"error", "truncated"},
                        {"failure_time", meta.failure_time},
                        {"reason", meta.failure_reason},
                        {"rows_written", rows},
                        {"csv", csv}};
}

int cmd_solve(const Options& opt) {
    require_config(opt);
    Scenario sc = parse_solve_scenario(opt.config);
    Trajectory traj = integrate(sc.kind, sc.b1, sc.initial, sc.t0, sc.t1, sc.solver);
    const std::string file = join_out(opt, sc.output);
    write_trajectory_csv(traj, file);
    if (traj.meta.truncated) {
        std::cerr << truncation_diagnostic(traj.meta, traj.size(), file).dump(2) << "\n";
        return kTruncated;
    }
    std::cout << "wrote " << file << " (" << traj.size() << " rows)\n";
    return kOk;
}

int cmd_reconstruct(const Options& opt) {
    require_config(opt);
    ReconstructScenario sc = parse_reconstruct_scenario(opt.config);
    ReducedPath path = solve_reduced(sc.b1, sc.t0, sc.t1, sc.solver);

    ordered_json report;
    report["tolerance"] = opt.tol;
    report["reduced_rows"] = path.size();
    report["reduced_truncated"] = path.meta.truncated;
    report["systems"] = ordered_json::array();

    bool ok = !path.meta.truncated;
    for (const ReconstructEntry& entry : sc.entries) {
        Trajectory recon = reconstruct(entry.kind, path, entry.initial);
        const std::string file = join_out(opt, entry.output);
        write_trajectory_csv(recon, file);
        Trajectory direct = integrate(entry.kind, sc.b1, entry.initial, sc.t0, sc.t1, sc.solver);
        ResidualReport rep = compare_trajectories(recon, direct);
        const bool truncated = recon.meta.truncated || direct.meta.truncated;
        const bool pass = !truncated && rep.sup_error <= opt.tol;
        ordered_json item{{"system", to_string(entry.kind.tag)},
                          {"residual", rep.sup_error},
                          {"pass", pass},
                          {"truncated", truncated},
                          {"csv", file}};
        if (truncated) {
            item["failure_time"] =
                recon.meta.truncated ? recon.meta.failure_time : direct.meta.failure_time;
            item["reason"] =
                recon.meta.truncated ? recon.meta.failure_reason : direct.meta.failure_reason;
        }
        report["systems"].push_back(item);
        ok = ok && pass;
    }
    report["pass"] = ok;
    write_report(join_out(opt, "reconstruct_report.json"), report);
    std::cout << report.dump(2) << "\n";
    return ok ? kOk : kResidual;
}

int cmd_invert(const Options& opt) {
    require_config(opt);
    InvertScenario sc = parse_invert_scenario(opt.config);

    SystemKind kind = SystemKind::riccati();
    switch (sc.what) {
        case SystemTag::ks2: kind = SystemKind::ks2(sc.c0); break;
        case SystemTag::ks3: kind = SystemKind::ks3(sc.c0); break;
        case SystemTag::milne_pinney: kind = SystemKind::milne_pinney(sc.c); break;
        default: kind = SystemKind::riccati(); break;
    }
    std::vector<Trajectory> inputs;
    for (const std::string& file : sc.inputs) {
        inputs.push_back(table_to_trajectory(read_csv(file), kind));
    }

    ReducedPath path;
    try {
        switch (sc.what) {
            case SystemTag::ks2: path = invert_ks2(inputs[0], inputs[1], sc.c0); break;
            case SystemTag::ks3: path = invert_ks3(inputs[0], inputs[1], sc.c0); break;
            case SystemTag::milne_pinney: path = invert_mp(inputs[0], inputs[1], sc.c); break;
            default: path = invert_riccati(inputs[0], inputs[1], inputs[2]); break;
        }
    } catch (const Error& e) {
        // Precondition on the supplied solution data, not on our config.
        std::cerr << "error: " << e.what() << "\n";
        return kDomain;
    }

    const std::string file = join_out(opt, sc.output);
    write_reduced_csv(path, file);
    if (path.meta.truncated) {
        Trajectory::Meta meta;
        meta.failure_time = path.meta.failure_time;
        meta.failure_reason = path.meta.failure_reason;
        std::cerr << truncation_diagnostic(meta, path.size(), file).dump(2) << "\n";
        return kTruncated;
    }

    double residual = 0;
    for (const Trajectory& input : inputs) {
        Trajectory round = reconstruct(input.kind, path, input.samples.front());
        residual = std::max(residual, compare_trajectories(round, input).sup_error);
    }
    ordered_json report{{"system", to_string(sc.what)},
                        {"rows", path.size()},
                        {"round_trip_residual", residual},
                        {"tolerance", opt.tol},
                        {"pass", residual <= opt.tol},
                        {"csv", file}};
    write_report(join_out(opt, "invert_report.json"), report);
    std::cout << report.dump(2) << "\n";
    return residual <= opt.tol ? kOk : kResidual;
}

// Largest gap between the finite-difference slope of the superposed samples
// and the family's right-hand side, probed on interior grid points.
double ode_residual(const Trajectory& traj, const Coefficient& b1) {
    double worst = 0;
    if (traj.size() < 5) return worst;
    const std::size_t stride = std::max<std::size_t>(1, traj.size() / 64);
    for (std::size_t k = 2; k + 2 < traj.size(); k += stride) {
        const StateVec rhs = eval_field(traj.kind, b1, traj.time_at(k), traj.samples[k]);
        for (int i = 0; i < traj.samples[k].dim; ++i) {
            const double slope = (-traj.samples[k + 2][i] + 8 * traj.samples[k + 1][i] -
                                  8 * traj.samples[k - 1][i] + traj.samples[k - 2][i]) /
                                 (12 * traj.dt);
            worst = std::max(worst, std::fabs(slope - rhs[i]));
        }
    }
    return worst;
}

int cmd_superpose(const Options& opt) {
    require_config(opt);
    SuperposeScenario sc = parse_superpose_scenario(opt.config);

    if (sc.mode == "basic_ks3") {
        Trajectory src = table_to_trajectory(read_csv(sc.input), SystemKind::ks3(0.0));
        PGL2Element element =
            normalize_pgl2(sc.matrix[0], sc.matrix[1], sc.matrix[2], sc.matrix[3]);
        Trajectory mapped = src;
        for (std::size_t k = 0; k < src.size(); ++k) {
            try {
                mapped.samples[k] = basic_sr_ks3(element, src.samples[k]);
            } catch (const DomainError& e) {
                std::cerr << "error at t = " << src.time_at(k) << ": " << e.what() << "\n";
                return kDomain;
            }
        }
        const std::string file = join_out(opt, sc.output);
        write_trajectory_csv(mapped, file);

        // Invariance of the derivative ratio is the rule's signature; report it.
        double residual = 0;
        bool comparable = true;
        if (src.size() >= 7) {
            const std::size_t stride = std::max<std::size_t>(1, src.size() / 32);
            for (std::size_t k = 3; k + 3 < src.size() && comparable; k += stride) {
                try {
                    residual = std::max(residual,
                                        std::fabs(schwarzian_fd(mapped, static_cast<int>(k)) -
                                                  schwarzian_fd(src, static_cast<int>(k))));
                } catch (const DomainError&) {
                    comparable = false;  // locally flat samples; ratio undefined
                }
            }
        } else {
            comparable = false;
        }
        ordered_json report{{"mode", sc.mode},
                            {"matrix", {element.alpha, element.beta, element.gamma, element.delta}},
                            {"det_sign", element.det_sign},
                            {"rows", mapped.size()},
                            {"csv", file}};
        report["schwarzian_residual"] = comparable ? ordered_json(residual) : ordered_json(nullptr);
        write_report(join_out(opt, "superpose_report.json"), report);
        std::cout << report.dump(2) << "\n";
        return kOk;
    }

    // mixed_ks2
    Trajectory ho1 = table_to_trajectory(read_csv(sc.inputs[0]), SystemKind::harmonic_oscillator());
    Trajectory ho2 = table_to_trajectory(read_csv(sc.inputs[1]), SystemKind::harmonic_oscillator());
    if (ho1.size() != ho2.size() || std::fabs(ho1.t0 - ho2.t0) > 1e-9 ||
        std::fabs(ho1.dt - ho2.dt) > 1e-12) {
        throw DomainError("oscillator trajectories must share one grid");
    }

    MixedConstants constants;
    if (sc.has_constants) {
        constants = sc.constants;
    } else {
        constants = constants_from_initial(sc.ks2_initial, ho1.samples.front(),
                                           ho2.samples.front(), sc.c0);
    }

    Trajectory mixed = mixed_sr_ks2(ho1, ho2, constants);
    const std::string file = join_out(opt, sc.output);
    write_trajectory_csv(mixed, file);

    ordered_json report{{"mode", sc.mode},
                        {"k1", constants.k1},
                        {"k2", constants.k2},
                        {"branch", constants.branch},
                        {"c0", sc.c0},
                        {"rows", mixed.size()},
                        {"ode_residual", ode_residual(mixed, sc.b1)},
                        {"csv", file}};
    write_report(join_out(opt, "superpose_report.json"), report);
    std::cout << report.dump(2) << "\n";
    return kOk;
}

int cmd_verify(const Options& opt) {
    std::vector<CheckResult> checks = verify_suite(opt.suite, opt.seed);
    ordered_json report{{"suite", opt.suite}, {"seed", opt.seed}};
    report["checks"] = ordered_json::array();
    int failed = 0;
    for (const CheckResult& c : checks) {
        report["checks"].push_back(ordered_json{{"check", c.check},
                                                {"value", c.value},
                                                {"threshold", c.threshold},
                                                {"pass", c.pass}});
        failed += c.pass ? 0 : 1;
    }
    report["passed"] = static_cast<int>(checks.size()) - failed;
    report["failed"] = failed;
    std::cout << report.dump(2) << "\n";
    return failed == 0 ? kOk : kResidual;
}

int cmd_bench(const Options& opt) {
    require_config(opt);
    Scenario sc = parse_bench_scenario(opt.config);
    using clock = std::chrono::steady_clock;
    auto ms = [](clock::time_point a, clock::time_point b) {
        return std::chrono::duration<double, std::milli>(b - a).count();
    };

    const auto direct_start = clock::now();
    std::vector<Trajectory> direct;
    direct.reserve(sc.initials.size());
    for (const StateVec& s0 : sc.initials) {
        direct.push_back(integrate(sc.kind, sc.b1, s0, sc.t0, sc.t1, sc.solver));
    }
    const auto direct_end = clock::now();

    const auto reduced_start = clock::now();
    ReducedPath path = solve_reduced(sc.b1, sc.t0, sc.t1, sc.solver);
    const auto path_end = clock::now();
    std::vector<Trajectory> reconstructed;
    reconstructed.reserve(sc.initials.size());
    for (const StateVec& s0 : sc.initials) {
        reconstructed.push_back(reconstruct(sc.kind, path, s0));
    }
    const auto reduced_end = clock::now();

    double divergence = 0;
    int truncated = 0;
    for (std::size_t i = 0; i < direct.size(); ++i) {
        if (direct[i].meta.truncated || reconstructed[i].meta.truncated) ++truncated;
        divergence = std::max(divergence,
                              compare_trajectories(reconstructed[i], direct[i]).sup_error);
    }

    ordered_json report{{"system", to_string(sc.kind.tag)},
                        {"count", sc.initials.size()},
                        {"direct_ms", ms(direct_start, direct_end)},
                        {"reduced_path_ms", ms(reduced_start, path_end)},
                        {"apply_ms", ms(path_end, reduced_end)},
                        {"reduced_total_ms", ms(reduced_start, reduced_end)},
                        {"max_divergence", divergence},
                        {"truncated_runs", truncated}};
    std::cout << report.dump(2) << "\n";
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Toolkit for sl(2)-driven systems: one reduced curve, many solutions"};
    app.require_subcommand(1);

    Options opt;
    app.add_option("--config", opt.config, "JSON scenario file");
    app.add_option("--out", opt.out_dir, "directory for CSV/JSON outputs")->capture_default_str();
    app.add_option("--seed", opt.seed, "seed for randomized checks")->capture_default_str();
    app.add_option("--tol", opt.tol, "pass/fail residual tolerance")->capture_default_str();

    CLI::App* solve = app.add_subcommand("solve", "integrate one system, write a CSV trajectory");
    CLI::App* reconstruct =
        app.add_subcommand("reconstruct", "solve the group equation once, map out every system");
    CLI::App* invert =
        app.add_subcommand("invert", "recover the group path from particular solutions");
    CLI::App* superpose = app.add_subcommand("superpose", "combine solutions by a rule");
    CLI::App* verify = app.add_subcommand("verify", "run library invariant suites");
    verify->add_option("suite", opt.suite,
                       "algebra | actions | reconstruction | superposition | all")
        ->capture_default_str();
    CLI::App* bench = app.add_subcommand("bench", "reduction versus direct integration");
    for (CLI::App* sub : {solve, reconstruct, invert, superpose, verify, bench}) {
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (solve->parsed()) return cmd_solve(opt);
        if (reconstruct->parsed()) return cmd_reconstruct(opt);
        if (invert->parsed()) return cmd_invert(opt);
        if (superpose->parsed()) return cmd_superpose(opt);
        if (verify->parsed()) return cmd_verify(opt);
        if (bench->parsed()) return cmd_bench(opt);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDomain;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
