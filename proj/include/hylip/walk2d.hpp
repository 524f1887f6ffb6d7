#pragma once

#include "hylip/config.hpp"
#include "hylip/io.hpp"
#include "hylip/swing_traj.hpp"

namespace hylip {

/// Output of the combined planar walking pipeline: longitudinal hybrid
/// closed loop at the control rate, lateral MPC sample-and-hold, rescaled
/// swing-foot references and the gait-event ledger.
struct WalkResult {
    HybridTrajectory longitudinal;          ///< hybrid-frame trace
    std::vector<LateralTracePoint> lateral;
    std::vector<SwingTracePoint> swing;     ///< world-frame swing foot
    std::vector<GaitEvent> events;
    int completed_steps = 0;
};

/// Runs the 2-D walking loop: longitudinal control at control_dt
/// sample-and-hold, lateral MPC refreshed every mpc.t_mpc, swing trajectory
/// rescaled from the residual time at every MPC tick. Stops after
/// walk.steps completed steps or at walk.horizon.
WalkResult run_walk2d(const ModelParams& p, const ControllerConfig& cfg,
                      const MpcConfig& mpc, const SimSettings& sim,
                      const WalkSettings& walk, double control_dt = 1e-3);

/// Fixed-timing MPC baseline on the longitudinal axis (steps switch every
/// nominal T regardless of the CoM state); mirrors the lateral weights with
/// the gait-average velocity reference. Qualitative comparison output.
std::vector<LateralTracePoint> baseline_fixed_timing_x(
    const ModelParams& p, const MpcConfig& lateral_mpc, const PlanarState& x0,
    int n_steps, double control_dt = 1e-3);

}  // namespace hylip
