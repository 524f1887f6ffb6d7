#include "hylip/lateral_mpc.hpp"

#include <cmath>

#include "hylip/box_qp.hpp"
#include "hylip/hybrid_sim.hpp"

namespace hylip {

namespace {

double stance_cop(Stance s, double y_bar) {
    return s == Stance::Left ? y_bar : -y_bar;
}

}  // namespace

MpcConfig MpcConfig::with_horizon(double t_mpc, double T, double w_y,
                                  double y_bar, double input_weight,
                                  double vel_weight) {
    MpcConfig c;
    c.t_mpc = t_mpc;
    c.N = static_cast<int>(std::ceil(2.0 * T / t_mpc));
    c.w_y = w_y;
    c.y_bar = y_bar;
    c.input_weight = input_weight;
    c.vel_weight = vel_weight;
    c.validate();
    return c;
}

void MpcConfig::validate() const {
    if (!(t_mpc > 0.0) || N < 1 || !(w_y > 0.0) || !(input_weight > 0.0) ||
        !(vel_weight > 0.0)) {
        throw ConfigError("invalid MPC configuration");
    }
}

void discretize(const ModelParams& p, double t_mpc, Eigen::Matrix2d& A_d,
                Eigen::Vector2d& B_d) {
    if (!(t_mpc > 0.0)) {
        throw ConfigError("discretization time must be positive");
    }
    A_d = transition_matrix(p, t_mpc);
    // A^{-1} (A_d - I) B in closed form: (1 - cosh(wt), -w sinh(wt)).
    B_d << 1.0 - A_d(0, 0), -p.omega * p.omega * A_d(0, 1);
}

double residual_time(const ModelParams& p, const ControllerConfig& cfg,
                     const ErrorState& eps, double tau) {
    const PlanarState ref = reference(p, tau);
    const PlanarState x0{ref.x_p + eps.eps_p, ref.x_v + eps.eps_v};
    SimOptions opts;
    opts.record = false;
    opts.conv_tol = 0.0;  // run to the jump, never stop on convergence
    HybridTrajectory traj;
    try {
        traj = simulate(p, cfg, x0, tau, 3.0 * p.T, opts);
    } catch (const ZenoGuardTripped&) {
        throw StepNeverCompletes("residual_time: Zeno guard before step end");
    }
    if (traj.jumps.empty()) {
        throw StepNeverCompletes(
            "residual_time: no step boundary within the 3T horizon");
    }
    return traj.jumps.front().t;
}

FootstepPlan build_plan(Stance current_stance, double elapsed_in_step,
                        double t_res, const MpcConfig& mpc, double T) {
    if (elapsed_in_step < 0.0 || t_res < 0.0) {
        throw ConfigError("build_plan: elapsed time and t_res must be >= 0");
    }
    FootstepPlan plan;
    plan.first_stance = current_stance;
    plan.z.resize(mpc.N);
    for (int k = 0; k < mpc.N; ++k) {
        const double s = k * mpc.t_mpc;  // time from now
        Stance side = current_stance;
        if (s >= t_res) {
            const int extra = 1 + static_cast<int>((s - t_res) / T);
            if (extra % 2 == 1) side = other(side);
        }
        plan.z[k] = stance_cop(side, mpc.y_bar);
    }
    plan.durations.push_back(elapsed_in_step + t_res);
    double covered = t_res;
    const double horizon = mpc.N * mpc.t_mpc;
    while (covered < horizon) {
        plan.durations.push_back(T);
        covered += T;
    }
    return plan;
}

MpcSolution solve(const ModelParams& p, const MpcConfig& mpc,
                  const LateralState& y_hat, const FootstepPlan& plan) {
    mpc.validate();
    const int N = mpc.N;
    if (static_cast<int>(plan.z.size()) < N) {
        throw ConfigError("footstep plan does not cover the MPC horizon");
    }

    Eigen::Matrix2d Ad;
    Eigen::Vector2d Bd;
    discretize(p, mpc.t_mpc, Ad, Bd);

    // Condensed velocity model: v[k] = d[k] + sum_i G(k,i) u[i], k = 1..N-1.
    // (v[0] is fixed by the initial state and drops out of the cost.)
    const Eigen::Vector2d y0(y_hat.y_p, y_hat.y_v);
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(N - 1, N);
    Eigen::VectorXd d(std::max(N - 1, 0));
    {
        // powers[k] = A_d^k
        std::vector<Eigen::Matrix2d> powers(N + 1);
        powers[0].setIdentity();
        for (int k = 1; k <= N; ++k) powers[k] = Ad * powers[k - 1];
        for (int k = 1; k <= N - 1; ++k) {
            d(k - 1) = (powers[k] * y0)(1);
            for (int i = 0; i < k; ++i) {
                G(k - 1, i) = (powers[k - 1 - i] * Bd)(1);
            }
        }
    }

    Eigen::VectorXd z(N), lo(N), hi(N);
    for (int k = 0; k < N; ++k) {
        z(k) = plan.z[k];
        lo(k) = z(k) - 0.5 * mpc.w_y;
        hi(k) = z(k) + 0.5 * mpc.w_y;
    }

    const Eigen::MatrixXd H =
        2.0 * (mpc.vel_weight * G.transpose() * G +
               mpc.input_weight * Eigen::MatrixXd::Identity(N, N));
    const Eigen::VectorXd dv =
        d - Eigen::VectorXd::Constant(std::max(N - 1, 0), mpc.v_ref);
    const Eigen::VectorXd g =
        2.0 * (mpc.vel_weight * G.transpose() * dv - mpc.input_weight * z);

    const Eigen::VectorXd u = solve_box_qp(H, g, lo, hi);

    MpcSolution sol;
    sol.inputs.assign(u.data(), u.data() + N);
    sol.states.resize(N + 1);
    Eigen::Vector2d y = y0;
    sol.states[0] = {y(0), y(1)};
    for (int k = 0; k < N; ++k) {
        y = Ad * y + Bd * u(k);
        sol.states[k + 1] = {y(0), y(1)};
    }
    double obj = 0.0;
    for (int k = 1; k <= N - 1; ++k) {
        const double dv_k = sol.states[k].y_v - mpc.v_ref;
        obj += mpc.vel_weight * dv_k * dv_k;
    }
    for (int k = 0; k < N; ++k) {
        obj += mpc.input_weight * (u(k) - z(k)) * (u(k) - z(k));
    }
    sol.objective = obj;
    return sol;
}

std::vector<LateralTracePoint> lateral_rollout(const ModelParams& p,
                                               const MpcConfig& mpc,
                                               const LateralState& y0,
                                               Stance stance0, int n_steps,
                                               double dt_inner) {
    Eigen::Matrix2d Ad_in;
    Eigen::Vector2d Bd_in;
    discretize(p, dt_inner, Ad_in, Bd_in);

    std::vector<LateralTracePoint> trace;
    const double total = n_steps * p.T;
    const int ticks = static_cast<int>(std::llround(total / dt_inner));
    const int mpc_every = std::max(1, static_cast<int>(std::llround(mpc.t_mpc / dt_inner)));

    Eigen::Vector2d y(y0.y_p, y0.y_v);
    double u_hold = 0.0;
    double z_now = stance_cop(stance0, mpc.y_bar);
    for (int k = 0; k < ticks; ++k) {
        const double t = k * dt_inner;
        const int step_idx = std::min(static_cast<int>(t / p.T), n_steps - 1);
        const Stance stance = step_idx % 2 == 0 ? stance0 : other(stance0);
        const double elapsed = t - step_idx * p.T;
        z_now = stance_cop(stance, mpc.y_bar);
        if (k % mpc_every == 0) {
            const double t_res = std::max(p.T - elapsed, 0.0);
            const FootstepPlan plan = build_plan(stance, elapsed, t_res, mpc, p.T);
            const MpcSolution sol = solve(p, mpc, {y(0), y(1)}, plan);
            u_hold = sol.inputs.front();
        }
        trace.push_back({t, y(0), y(1), u_hold, z_now});
        y = Ad_in * y + Bd_in * u_hold;
    }
    return trace;
}

}  // namespace hylip
