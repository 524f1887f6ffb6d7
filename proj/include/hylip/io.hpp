#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "hylip/hybrid_sim.hpp"
#include "hylip/lateral_mpc.hpp"

namespace hylip {

/// Minimal CSV support: fixed column order, 12 significant digits, and a
/// reader every emitted file round-trips through.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

std::string format_number(double v);
void write_csv(std::ostream& os, const CsvTable& table);
CsvTable read_csv(std::istream& is);

/// Columns t, j, x_p, x_v, tau, u, V, event; one row per sample plus one
/// row flagged `jump` per transition.
CsvTable trajectory_table(const HybridTrajectory& traj);

/// Columns eps_p, eps_v, in_ellipsoid, lyap_decreasing, converging.
CsvTable basin_table(const BasinGrid& grid);

/// Columns t, y_p, y_v, u_y, z_y.
CsvTable lateral_table(const std::vector<LateralTracePoint>& trace);

struct SwingTracePoint {
    double t;
    Eigen::Vector3d p;
    Eigen::Vector3d v;
};

/// Columns t, p_x, p_y, p_z, v_x, v_y, v_z.
CsvTable swing_table(const std::vector<SwingTracePoint>& trace);

struct GaitEvent {
    int step_index;
    double t_start;
    double t_end;
    double duration;
};

/// Columns step_index, t_start, t_end, duration.
CsvTable events_table(const std::vector<GaitEvent>& events);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace hylip
