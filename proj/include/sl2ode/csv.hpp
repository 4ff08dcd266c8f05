#pragma once

#include <string>
#include <vector>

#include "sl2ode/reduced.hpp"
#include "sl2ode/systems.hpp"

namespace sl2ode {

/// A trajectory file parsed back from disk: the raw time column plus the state
/// columns, still unattached to any particular system family.
struct CsvTable {
    std::vector<std::string> columns;  ///< state column names (time excluded)
    std::vector<double> times;
    std::vector<StateVec> samples;
    double t0 = 0;
    double dt = 0;
};

/// Header line for a family: "t,x", "t,x,v", "t,x,v,a", "t,x,y,z", or
/// "t,alpha,beta,gamma,delta" for the group-valued path.
std::string csv_header(const SystemKind& kind);

/// Write one row per grid point, shortest-round-trip decimal cells, LF line
/// endings.  Parsing the file recovers every double bit-exactly.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);
void write_reduced_csv(const ReducedPath& path, const std::string& file);

/// Parse a trajectory CSV.  Requires one of the known headers, at least two
/// rows, and a uniform time grid; throws UsageError otherwise.
CsvTable read_csv(const std::string& path);

/// Attach a parsed table to a family.  The header must match csv_header(kind).
Trajectory table_to_trajectory(const CsvTable& table, const SystemKind& kind);

/// Attach a parsed table to the group; needs the five-column header.
ReducedPath table_to_reduced(const CsvTable& table);

} // namespace sl2ode
