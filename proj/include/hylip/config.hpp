#pragma once

#include <optional>
#include <string>

#include "hylip/hybrid_sim.hpp"
#include "hylip/lateral_mpc.hpp"
#include "hylip/model.hpp"

namespace hylip {

struct SimSettings {
    double x0_p;
    double x0_v;
    double tau0 = 0.0;
    double horizon = 15.0;
    double conv_tol = 1e-3;
    double conv_window = 1.0;
    double step = 1e-3;
};

struct WalkSettings {
    double y0_p = -0.08;
    double y0_v = 0.05;
    std::optional<Stance> stance0;  ///< defaults to the side nearer y0_p
    int steps = 4;
    double p_z_max = 0.05;
    double horizon = 15.0;
};

/// Typed view of the INI run configuration. Unknown sections or keys are
/// rejected with an error naming the offender.
struct RunConfig {
    ModelParams params;
    double alpha;
    double strictness_margin = 1e-7;
    SimSettings sim;
    BasinGridSpec basin;
    double basin_tau0;
    MpcConfig mpc;
    WalkSettings walk;
    std::string output_dir = ".";

    static RunConfig load(const std::string& path);
    static RunConfig parse(const std::string& text);
};

}  // namespace hylip
