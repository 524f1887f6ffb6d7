#include "hylip/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hylip/errors.hpp"

namespace hylip {

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_csv(std::ostream& os, const CsvTable& table) {
    for (size_t i = 0; i < table.header.size(); ++i) {
        os << table.header[i] << (i + 1 < table.header.size() ? "," : "\n");
    }
    for (const auto& row : table.rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            os << row[i] << (i + 1 < row.size() ? "," : "\n");
        }
    }
}

CsvTable read_csv(std::istream& is) {
    CsvTable t;
    std::string line;
    bool first = true;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                fields.push_back(cur);
                cur.clear();
            } else if (c != '\r') {
                cur.push_back(c);
            }
        }
        fields.push_back(cur);
        if (first) {
            t.header = fields;
            first = false;
        } else {
            t.rows.push_back(fields);
        }
    }
    return t;
}

CsvTable trajectory_table(const HybridTrajectory& traj) {
    CsvTable t;
    t.header = {"t", "j", "x_p", "x_v", "tau", "u", "V", "event"};
    t.rows.reserve(traj.samples.size());
    for (const Sample& s : traj.samples) {
        t.rows.push_back({format_number(s.t), std::to_string(s.j),
                          format_number(s.x_p), format_number(s.x_v),
                          format_number(s.tau), format_number(s.u),
                          format_number(s.V), s.jump_row ? "jump" : ""});
    }
    return t;
}

CsvTable basin_table(const BasinGrid& grid) {
    CsvTable t;
    t.header = {"eps_p", "eps_v", "in_ellipsoid", "lyap_decreasing", "converging"};
    t.rows.reserve(grid.cells.size());
    const int n_p = static_cast<int>(grid.eps_p_axis.size());
    const int n_v = static_cast<int>(grid.eps_v_axis.size());
    for (int iv = 0; iv < n_v; ++iv) {
        for (int ip = 0; ip < n_p; ++ip) {
            const BasinCell& c = grid.at(ip, iv);
            t.rows.push_back({format_number(grid.eps_p_axis[ip]),
                              format_number(grid.eps_v_axis[iv]),
                              c.in_ellipsoid ? "1" : "0",
                              c.lyap_decreasing ? "1" : "0",
                              c.converging ? "1" : "0"});
        }
    }
    return t;
}

CsvTable lateral_table(const std::vector<LateralTracePoint>& trace) {
    CsvTable t;
    t.header = {"t", "y_p", "y_v", "u_y", "z_y"};
    t.rows.reserve(trace.size());
    for (const auto& s : trace) {
        t.rows.push_back({format_number(s.t), format_number(s.y_p),
                          format_number(s.y_v), format_number(s.u_y),
                          format_number(s.z_y)});
    }
    return t;
}

CsvTable swing_table(const std::vector<SwingTracePoint>& trace) {
    CsvTable t;
    t.header = {"t", "p_x", "p_y", "p_z", "v_x", "v_y", "v_z"};
    t.rows.reserve(trace.size());
    for (const auto& s : trace) {
        t.rows.push_back({format_number(s.t), format_number(s.p.x()),
                          format_number(s.p.y()), format_number(s.p.z()),
                          format_number(s.v.x()), format_number(s.v.y()),
                          format_number(s.v.z())});
    }
    return t;
}

CsvTable events_table(const std::vector<GaitEvent>& events) {
    CsvTable t;
    t.header = {"step_index", "t_start", "t_end", "duration"};
    for (const auto& e : events) {
        t.rows.push_back({std::to_string(e.step_index), format_number(e.t_start),
                          format_number(e.t_end), format_number(e.duration)});
    }
    return t;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw Error("cannot open for writing: " + path);
    }
    os << content;
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw Error("cannot open for reading: " + path);
    }
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

}  // namespace hylip
