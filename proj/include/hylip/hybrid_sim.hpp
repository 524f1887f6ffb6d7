#pragma once

#include <optional>
#include <vector>

#include "hylip/controller.hpp"
#include "hylip/gain_synthesis.hpp"
#include "hylip/model.hpp"

namespace hylip {

enum class SimStatus { Converged, HorizonReached, Incomplete, TimerRangeExceeded };

const char* to_string(SimStatus s);

/// One recorded point of a run. V is NaN unless a Lyapunov spec was given.
struct Sample {
    double t;
    int j;
    double x_p;
    double x_v;
    double tau;
    double u;
    double V;
    bool jump_row = false;  ///< post-jump sample sharing t with its predecessor
};

struct JumpRecord {
    double t;
    int j_pre;
    PlanarState pre;
    double tau_pre;
    PlanarState post;
    double tau_post;
};

/// Lyapunov data attached to a run: enables the V column and the online
/// monotonicity bookkeeping.
struct LyapunovSpec {
    Eigen::Matrix2d P;
    double alpha;
};

struct SimOptions {
    double step = 1e-3;             ///< integrator step [s]
    bool sample_hold = false;       ///< hold u over each step instead of
                                    ///< recomputing it at every stage
    double conv_tol = 1e-3;         ///< ||eps||_2 threshold
    double conv_window = 1.0;       ///< time the error must stay below conv_tol [s]
    double event_tol = 1e-12;       ///< |x_p - r_bar| at localized events [m]
    int max_jumps_per_second = 10;  ///< Zeno guard
    double mono_slack = 1e-9;       ///< absolute slack on the V comparisons
    /// Sample pairs with ||eps|| below this on both sides are exempt from
    /// the monotonicity checks: at the integrator noise floor (~1e-8 here)
    /// V is pure rounding and its sign chatter means nothing.
    double mono_eps_floor = 1e-6;
    bool record = true;             ///< keep per-step samples
    std::optional<LyapunovSpec> lyapunov;
};

/// Lyapunov monotonicity bookkeeping accumulated during a run.
struct MonotonicityStats {
    int flow_violations_inside = 0;  ///< V increase on a flow pair starting in E
    int flow_violations_global = 0;  ///< V increase on any flow pair
    int jump_violations = 0;         ///< V failed to decrease across a jump
    double worst_flow_increase_inside = 0.0;
    double worst_flow_increase_global = 0.0;
    double worst_jump_increase = 0.0;
    bool entered_ellipsoid = false;
};

struct HybridTrajectory {
    std::vector<Sample> samples;
    std::vector<JumpRecord> jumps;
    SimStatus status = SimStatus::HorizonReached;
    double final_time = 0.0;
    int jump_count = 0;
    ErrorState final_error;
    double max_abs_u = 0.0;
    MonotonicityStats stats;  ///< meaningful when a Lyapunov spec was given
};

/// Event-driven integration of the closed hybrid loop. Fixed-step RK4 flow
/// with bisection localization of the x_p = r_bar crossing, frame-shift
/// jumps and the timer reset tau+ = tau - T.
///
/// Preconditions: x0.x_p in [-r_bar, r_bar], tau0 in [-T, 2T] (throws
/// TimerOutOfRange / Error). Throws ZenoGuardTripped when jumps accumulate
/// faster than opts.max_jumps_per_second in any 1 s window.
HybridTrajectory simulate(const ModelParams& p, const ControllerConfig& cfg,
                          const PlanarState& x0, double tau0, double horizon,
                          const SimOptions& opts = {});

/// V(x, tau) = e^{2 alpha tau} (x - x_r(tau))' P (x - x_r(tau)).
double lyapunov(const Eigen::Matrix2d& P, double alpha, const PlanarState& x,
                double tau, const ModelParams& p);

struct MonotonicityReport {
    int flow_violations_inside = 0;
    int flow_violations_global = 0;
    int jump_violations = 0;
    double worst_flow_increase_inside = 0.0;
    double worst_flow_increase_global = 0.0;
    double worst_jump_increase = 0.0;
    bool entered_ellipsoid = false;
    /// No flow increase on pairs starting inside E and no jump increase.
    bool pass = false;
    /// No flow increase anywhere and no jump increase; the classification
    /// used for the numerically-estimated decrease set of the basin sweep.
    bool pass_global = false;
};

/// Post-hoc scan of a recorded trajectory; equivalent to the online
/// bookkeeping when the trajectory was recorded at stride one.
MonotonicityReport check_monotonicity(const HybridTrajectory& traj,
                                      const Eigen::Matrix2d& P, double alpha,
                                      const ModelParams& p, double slack = 1e-9,
                                      double eps_floor = 1e-6);

struct BasinGridSpec {
    double eps_p_min = -0.15;
    double eps_p_max = 0.15;
    int n_p = 151;
    double eps_v_min = -1.5;
    double eps_v_max = 1.5;
    int n_v = 151;
    double horizon = 15.0;
};

struct BasinCell {
    bool in_ellipsoid = false;
    bool lyap_decreasing = false;
    bool converging = false;
    bool diverging = false;
    bool incomplete = false;
};

struct BasinGrid {
    std::vector<double> eps_p_axis;
    std::vector<double> eps_v_axis;
    std::vector<BasinCell> cells;  ///< eps_v-major: cells[iv * n_p + ip]
    double tau0 = 0.0;

    const BasinCell& at(int ip, int iv) const {
        return cells[static_cast<size_t>(iv) * eps_p_axis.size() + ip];
    }
    /// Violation counts of InEllipsoid <= LyapunovDecreasing <= Converging.
    int nesting_violations_ellipsoid() const;
    int nesting_violations_decrease() const;
};

/// Grid sweep around x0 = x_r(tau0) + eps0 classifying every cell. Cell
/// simulations are distributed over `threads` workers and merged by index,
/// so the result does not depend on the thread count.
BasinGrid estimate_basin(const ModelParams& p, const ControllerConfig& cfg,
                         const GainCertificate& cert, const BasinGridSpec& grid,
                         double tau0, int threads = 8,
                         const SimOptions& base_opts = {});

}  // namespace hylip
