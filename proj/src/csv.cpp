#include "sl2ode/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "sl2ode/errors.hpp"

namespace sl2ode {
namespace {

constexpr std::array<const char*, 5> kHeaders = {
    "t,x", "t,x,v", "t,x,v,a", "t,x,y,z", "t,alpha,beta,gamma,delta"};

// Shortest decimal string that parses back to the same double.
std::string emit_double(double x) {
    std::array<char, 32> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

double parse_double(const std::string& cell, const std::string& path, std::size_t line) {
    double value = 0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last) {
        throw UsageError(path + ":" + std::to_string(line) + ": bad number '" + cell + "'");
    }
    return value;
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            cells.push_back(line.substr(start));
            return cells;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

void write_rows(const std::string& file, const std::string& header,
                const std::vector<double>& times, const std::vector<StateVec>& samples) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw UsageError("cannot open '" + file + "' for writing");
    out << header << "\n";
    for (std::size_t k = 0; k < samples.size(); ++k) {
        out << emit_double(times[k]);
        for (int i = 0; i < samples[k].dim; ++i) out << "," << emit_double(samples[k][i]);
        out << "\n";
    }
    if (!out) throw UsageError("write to '" + file + "' failed");
}

} // namespace

std::string csv_header(const SystemKind& kind) {
    switch (kind.tag) {
        case SystemTag::riccati: return kHeaders[0];
        case SystemTag::milne_pinney:
        case SystemTag::harmonic_oscillator:
        case SystemTag::ks2: return kHeaders[1];
        case SystemTag::ks3: return kHeaders[2];
        case SystemTag::wei_norman: return kHeaders[3];
        case SystemTag::reduced_sl2: return kHeaders[4];
    }
    throw UsageError("csv_header: unknown system tag");
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    std::vector<double> times(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k) times[k] = traj.time_at(k);
    write_rows(path, csv_header(traj.kind), times, traj.samples);
}

void write_reduced_csv(const ReducedPath& path, const std::string& file) {
    write_trajectory_csv(to_trajectory(path), file);
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw UsageError(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    bool known = false;
    for (const char* h : kHeaders) known = known || line == h;
    if (!known) throw UsageError(path + ": unrecognized header '" + line + "'");

    CsvTable table;
    auto names = split_row(line);
    table.columns.assign(names.begin() + 1, names.end());
    const std::size_t width = names.size();

    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_row(line);
        if (cells.size() != width) {
            throw UsageError(path + ":" + std::to_string(lineno) + ": expected " +
                             std::to_string(width) + " columns, got " + std::to_string(cells.size()));
        }
        table.times.push_back(parse_double(cells[0], path, lineno));
        StateVec s = StateVec::zero(static_cast<int>(width) - 1);
        for (std::size_t i = 1; i < width; ++i) s[static_cast<int>(i) - 1] = parse_double(cells[i], path, lineno);
        table.samples.push_back(s);
    }

    if (table.samples.size() < 2) throw UsageError(path + ": need at least two data rows");
    table.t0 = table.times.front();
    table.dt = table.times[1] - table.times[0];
    if (!(table.dt > 0) || !std::isfinite(table.dt)) {
        throw UsageError(path + ": time column must be strictly increasing");
    }
    for (std::size_t k = 0; k < table.times.size(); ++k) {
        double expected = table.t0 + static_cast<double>(k) * table.dt;
        if (std::fabs(table.times[k] - expected) > 1e-9 * std::max(1.0, std::fabs(expected))) {
            throw UsageError(path + ": time column is not a uniform grid (row " +
                             std::to_string(k + 2) + ")");
        }
    }
    return table;
}

Trajectory table_to_trajectory(const CsvTable& table, const SystemKind& kind) {
    std::string expected = csv_header(kind);
    std::string got = "t";
    for (const auto& c : table.columns) got += "," + c;
    if (got != expected) {
        throw UsageError("header '" + got + "' does not match '" + expected + "' expected for " +
                         to_string(kind.tag));
    }
    Trajectory traj;
    traj.kind = kind;
    traj.t0 = table.t0;
    traj.dt = table.dt;
    traj.samples = table.samples;
    traj.meta.solver = "csv";
    return traj;
}

ReducedPath table_to_reduced(const CsvTable& table) {
    return reduced_from_trajectory(table_to_trajectory(table, SystemKind::reduced_sl2()));
}

} // namespace sl2ode
