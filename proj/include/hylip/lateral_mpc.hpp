#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hylip/controller.hpp"
#include "hylip/model.hpp"

namespace hylip {

/// Lateral CoM state.
struct LateralState {
    double y_p = 0.0;
    double y_v = 0.0;
};

enum class Stance { Left, Right };

inline Stance other(Stance s) { return s == Stance::Left ? Stance::Right : Stance::Left; }

/// Lateral MPC tuning. The paper's cost weight alpha collides with the
/// synthesis decay rate, so it is named input_weight here; gamma is
/// vel_weight.
struct MpcConfig {
    double t_mpc = 0.03;        ///< sample time [s]
    int N = 80;                 ///< horizon length [samples]
    double w_y = 0.1;           ///< foot width [m]
    double y_bar = 0.096;       ///< half lateral stance width [m]
    double input_weight = 10.0; ///< weight on ||u_y - z_y||^2
    double vel_weight = 0.01;   ///< weight on ||y_v - v_ref||^2
    double v_ref = 0.0;         ///< velocity reference (zero for the lateral axis)

    /// N = ceil(2T / t_mpc), the horizon covering two nominal steps.
    static MpcConfig with_horizon(double t_mpc, double T, double w_y,
                                  double y_bar, double input_weight,
                                  double vel_weight);
    void validate() const;
};

/// Reference CoP sequence over the horizon plus the step-duration ledger.
struct FootstepPlan {
    std::vector<double> z;          ///< per-sample reference CoP [m]
    std::vector<double> durations;  ///< first = elapsed + t_res, rest = T
    Stance first_stance = Stance::Left;
};

struct MpcSolution {
    std::vector<LateralState> states;  ///< y[0..N]
    std::vector<double> inputs;        ///< u_y[0..N-1]
    double objective = 0.0;
};

/// Exact zero-order-hold discretization of the pendulum dynamics:
/// A_d = e^{A t}, B_d = A^{-1} (A_d - I) B (A is invertible, det A = -omega^2).
void discretize(const ModelParams& p, double t_mpc, Eigen::Matrix2d& A_d,
                Eigen::Vector2d& B_d);

/// Simulates the closed longitudinal loop from x = x_r(tau) + eps until the
/// step boundary x_p = r_bar and returns the elapsed time. Throws
/// StepNeverCompletes when 3T elapse without reaching the boundary.
double residual_time(const ModelParams& p, const ControllerConfig& cfg,
                     const ErrorState& eps, double tau);

/// Reference CoP plan over at least horizon_samples: the current step lasts
/// t_res from now, subsequent steps last T, sides alternate from
/// current_stance (left foot at +y_bar, right at -y_bar).
FootstepPlan build_plan(Stance current_stance, double elapsed_in_step,
                        double t_res, const MpcConfig& mpc, double T);

/// Solves the finite-horizon lateral QP
///   min sum vel_weight ||y_v[k]||^2 + input_weight ||u_y[k] - z_y[k]||^2
///   s.t. y[k+1] = A_d y[k] + B_d u_y[k],  z_y[k] - w/2 <= u_y[k] <= z_y[k] + w/2
/// exactly (active-set on the condensed problem).
MpcSolution solve(const ModelParams& p, const MpcConfig& mpc,
                  const LateralState& y_hat, const FootstepPlan& plan);

/// Receding-horizon closed loop under nominal step timing; u_y is held
/// between MPC ticks and the state propagated with the exact discretization.
struct LateralTracePoint {
    double t;
    double y_p;
    double y_v;
    double u_y;
    double z_y;
};

std::vector<LateralTracePoint> lateral_rollout(const ModelParams& p,
                                               const MpcConfig& mpc,
                                               const LateralState& y0,
                                               Stance stance0, int n_steps,
                                               double dt_inner = 1e-3);

}  // namespace hylip
