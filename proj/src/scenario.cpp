#include "sl2ode/scenario.hpp"

#include <fstream>

#include <json.hpp>

#include "sl2ode/errors.hpp"

namespace sl2ode {
namespace {

using nlohmann::json;

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw UsageError("config '" + path + "': " + e.what());
    }
}

const json& require(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw UsageError(std::string("config: missing key '") + key + "'");
    return *it;
}

double as_number(const json& j, const char* key) {
    if (!j.is_number()) throw UsageError(std::string("config: '") + key + "' must be a number");
    return j.get<double>();
}

double number_field(const json& j, const char* key) { return as_number(require(j, key), key); }

double number_or(const json& j, const char* key, double fallback) {
    auto it = j.find(key);
    return it == j.end() ? fallback : as_number(*it, key);
}

std::string string_field(const json& j, const char* key) {
    const json& v = require(j, key);
    if (!v.is_string()) throw UsageError(std::string("config: '") + key + "' must be a string");
    return v.get<std::string>();
}

std::vector<double> number_array(const json& j, const char* key) {
    if (!j.is_array()) throw UsageError(std::string("config: '") + key + "' must be an array");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) out.push_back(as_number(v, key));
    return out;
}

StateVec as_state(const json& j, int dim, const char* key) {
    auto values = number_array(j, key);
    if (static_cast<int>(values.size()) != dim) {
        throw UsageError(std::string("config: '") + key + "' must have " + std::to_string(dim) +
                         " entries, got " + std::to_string(values.size()));
    }
    StateVec s = StateVec::zero(dim);
    for (int i = 0; i < dim; ++i) s[i] = values[static_cast<std::size_t>(i)];
    return s;
}

Coefficient parse_coefficient(const json& j, const char* key) {
    if (j.is_number()) return Coefficient::constant(j.get<double>());
    if (!j.is_object()) {
        throw UsageError(std::string("config: '") + key + "' must be a number or an object");
    }
    std::string kind = string_field(j, "kind");
    if (kind == "constant") return Coefficient::constant(number_field(j, "value"));
    if (kind == "cosine") {
        return Coefficient::cosine(number_field(j, "amplitude"), number_field(j, "frequency"),
                                   number_or(j, "phase", 0.0));
    }
    if (kind == "polynomial") return Coefficient::polynomial(number_array(require(j, "coeffs"), "coeffs"));
    if (kind == "table") {
        return Coefficient::table(number_array(require(j, "abscissae"), "abscissae"),
                                  number_array(require(j, "values"), "values"));
    }
    throw UsageError("config: unknown coefficient kind '" + kind + "'");
}

SystemKind parse_kind(const json& j) {
    std::string name = string_field(j, "system");
    SystemTag tag;
    try {
        tag = system_tag_from_string(name);
    } catch (const Error& e) {
        throw UsageError(std::string("config: ") + e.what());
    }
    switch (tag) {
        case SystemTag::riccati: return SystemKind::riccati();
        case SystemTag::milne_pinney: return SystemKind::milne_pinney(number_field(j, "c"));
        case SystemTag::harmonic_oscillator: return SystemKind::harmonic_oscillator();
        case SystemTag::ks2: return SystemKind::ks2(number_field(j, "c0"));
        case SystemTag::ks3: return SystemKind::ks3(number_field(j, "c0"));
        case SystemTag::wei_norman: return SystemKind::wei_norman();
        case SystemTag::reduced_sl2: return SystemKind::reduced_sl2();
    }
    throw UsageError("config: unknown system '" + name + "'");
}

SolverConfig parse_solver(const json& j) {
    SolverConfig cfg;
    cfg.dt = number_field(j, "dt");
    if (!(cfg.dt > 0)) throw UsageError("config: 'dt' must be positive");
    if (auto it = j.find("solver"); it != j.end()) {
        std::string method = it->get<std::string>();
        if (method == "rk4") cfg.method = SolverConfig::Method::rk4;
        else if (method == "rkf45") cfg.method = SolverConfig::Method::rkf45;
        else throw UsageError("config: unknown solver '" + method + "'");
    }
    cfg.tol = number_or(j, "tol", cfg.tol);
    if (auto it = j.find("max_steps"); it != j.end()) cfg.max_steps = it->get<long>();
    return cfg;
}

void parse_window(const json& j, double& t0, double& t1) {
    t0 = number_or(j, "t0", 0.0);
    t1 = number_field(j, "t1");
    if (!(t1 > t0)) throw UsageError("config: need t1 > t0");
}

StateVec parse_initial(const json& j, const SystemKind& kind) {
    if (kind.tag == SystemTag::reduced_sl2 && !j.contains("initial")) {
        return {1, 0, 0, 1};  // identity element
    }
    return as_state(require(j, "initial"), kind.dim(), "initial");
}

Scenario parse_common(const json& j) {
    Scenario sc;
    sc.kind = parse_kind(j);
    sc.b1 = parse_coefficient(require(j, "b1"), "b1");
    parse_window(j, sc.t0, sc.t1);
    sc.solver = parse_solver(j);
    if (auto it = j.find("output"); it != j.end()) sc.output = it->get<std::string>();
    else sc.output = to_string(sc.kind.tag) + ".csv";
    return sc;
}

} // namespace

Scenario parse_solve_scenario(const std::string& config_path) {
    json j = load_json(config_path);
    Scenario sc = parse_common(j);
    sc.initial = parse_initial(j, sc.kind);
    return sc;
}

Scenario parse_bench_scenario(const std::string& config_path) {
    json j = load_json(config_path);
    Scenario sc = parse_common(j);
    const json& list = require(j, "initials");
    if (!list.is_array() || list.empty()) {
        throw UsageError("config: 'initials' must be a non-empty array of states");
    }
    for (const auto& v : list) sc.initials.push_back(as_state(v, sc.kind.dim(), "initials"));
    return sc;
}

ReconstructScenario parse_reconstruct_scenario(const std::string& config_path) {
    json j = load_json(config_path);
    ReconstructScenario sc;
    sc.b1 = parse_coefficient(require(j, "b1"), "b1");
    parse_window(j, sc.t0, sc.t1);
    sc.solver = parse_solver(j);
    const json& list = require(j, "systems");
    if (!list.is_array() || list.empty()) {
        throw UsageError("config: 'systems' must be a non-empty array");
    }
    for (const auto& item : list) {
        ReconstructEntry entry;
        entry.kind = parse_kind(item);
        entry.initial = parse_initial(item, entry.kind);
        if (auto it = item.find("output"); it != item.end()) entry.output = it->get<std::string>();
        else entry.output = to_string(entry.kind.tag) + ".csv";
        sc.entries.push_back(entry);
    }
    return sc;
}

InvertScenario parse_invert_scenario(const std::string& config_path) {
    json j = load_json(config_path);
    InvertScenario sc;
    std::string name = string_field(j, "system");
    try {
        sc.what = system_tag_from_string(name);
    } catch (const Error& e) {
        throw UsageError(std::string("config: ") + e.what());
    }
    std::size_t want = 0;
    switch (sc.what) {
        case SystemTag::ks2:
        case SystemTag::ks3:
            sc.c0 = number_field(j, "c0");
            want = 2;
            break;
        case SystemTag::milne_pinney:
            sc.c = number_field(j, "c");
            want = 2;
            break;
        case SystemTag::riccati:
            want = 3;
            break;
        default:
            throw UsageError("config: inversion is defined for ks2, ks3, riccati, milne_pinney");
    }
    const json& list = require(j, "inputs");
    if (!list.is_array() || list.size() != want) {
        throw UsageError("config: 'inputs' must list " + std::to_string(want) +
                         " trajectory files for " + name);
    }
    for (const auto& v : list) {
        if (!v.is_string()) throw UsageError("config: 'inputs' entries must be file paths");
        sc.inputs.push_back(v.get<std::string>());
    }
    if (auto it = j.find("output"); it != j.end()) sc.output = it->get<std::string>();
    else sc.output = "reduced.csv";
    return sc;
}

SuperposeScenario parse_superpose_scenario(const std::string& config_path) {
    json j = load_json(config_path);
    SuperposeScenario sc;
    sc.mode = string_field(j, "mode");
    if (sc.mode == "basic_ks3") {
        sc.input = string_field(j, "input");
        auto m = number_array(require(j, "matrix"), "matrix");
        if (m.size() != 4) throw UsageError("config: 'matrix' must have 4 entries [a, b, c, d]");
        for (std::size_t i = 0; i < 4; ++i) sc.matrix[i] = m[i];
    } else if (sc.mode == "mixed_ks2") {
        const json& list = require(j, "inputs");
        if (!list.is_array() || list.size() != 2) {
            throw UsageError("config: 'inputs' must list two oscillator trajectory files");
        }
        for (const auto& v : list) {
            if (!v.is_string()) throw UsageError("config: 'inputs' entries must be file paths");
            sc.inputs.push_back(v.get<std::string>());
        }
        sc.c0 = number_field(j, "c0");
        sc.b1 = parse_coefficient(require(j, "b1"), "b1");
        bool has_k = j.contains("k1") || j.contains("k2");
        if (has_k) {
            sc.constants.k1 = number_field(j, "k1");
            sc.constants.k2 = number_field(j, "k2");
            sc.constants.c0 = sc.c0;
            int branch = static_cast<int>(number_or(j, "branch", 1.0));
            if (branch != 1 && branch != -1) throw UsageError("config: 'branch' must be +1 or -1");
            sc.constants.branch = branch;
            sc.has_constants = true;
        }
        if (j.contains("initial")) {
            sc.ks2_initial = as_state(require(j, "initial"), 2, "initial");
            sc.has_initial = true;
        }
        if (sc.has_constants == sc.has_initial) {
            throw UsageError("config: give either (k1, k2[, branch]) or 'initial', not both or neither");
        }
    } else {
        throw UsageError("config: 'mode' must be basic_ks3 or mixed_ks2");
    }
    if (auto it = j.find("output"); it != j.end()) sc.output = it->get<std::string>();
    else sc.output = "superposed.csv";
    return sc;
}

} // namespace sl2ode
