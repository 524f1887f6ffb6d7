#include "hylip/walk2d.hpp"

#include <cmath>

namespace hylip {

namespace {

double stance_cop(Stance s, double y_bar) {
    return s == Stance::Left ? y_bar : -y_bar;
}

}  // namespace

WalkResult run_walk2d(const ModelParams& p, const ControllerConfig& cfg,
                      const MpcConfig& mpc, const SimSettings& sim,
                      const WalkSettings& walk, double control_dt) {
    WalkResult out;

    PlanarState x{sim.x0_p, sim.x0_v};
    double tau = sim.tau0;
    double t = 0.0;
    int j_total = 0;

    Stance stance = walk.stance0.value_or(walk.y0_p <= 0.0 ? Stance::Right
                                                           : Stance::Left);
    double stance_world_x = 0.0;
    double step_start = 0.0;
    int step_index = 0;

    const double swing_y = stance_cop(other(stance), mpc.y_bar);
    SwingSpec sw_spec;
    sw_spec.p_init = Eigen::Vector3d(stance_world_x - 2.0 * p.r_bar, swing_y, 0.0);
    sw_spec.p_final = Eigen::Vector3d(stance_world_x + 2.0 * p.r_bar, swing_y, 0.0);
    sw_spec.p_z_max = walk.p_z_max;
    sw_spec.T = p.T;
    SwingPolynomials sw_poly = fit(sw_spec);

    Eigen::Matrix2d Ad;
    Eigen::Vector2d Bd;
    discretize(p, control_dt, Ad, Bd);
    Eigen::Vector2d y(walk.y0_p, walk.y0_v);
    double u_y = 0.0;
    double t_res_tick = p.T;  // refreshed at the first MPC tick
    double t_tick = 0.0;

    SimOptions tick_opts;
    tick_opts.step = control_dt;
    tick_opts.sample_hold = true;
    tick_opts.conv_tol = 0.0;  // the walk stops on step count, not convergence
    tick_opts.record = true;

    const int mpc_every =
        std::max(1, static_cast<int>(std::llround(mpc.t_mpc / control_dt)));
    const int max_ticks =
        static_cast<int>(std::llround(walk.horizon / control_dt));

    out.longitudinal.status = SimStatus::HorizonReached;

    for (int k = 0; k < max_ticks && out.completed_steps < walk.steps; ++k) {
        const PlanarState ref = reference(p, tau);
        const ErrorState eps{x.x_p - ref.x_p, x.x_v - ref.x_v};

        if (k % mpc_every == 0) {
            t_res_tick = residual_time(p, cfg, eps, tau);
            t_tick = t;
            const FootstepPlan plan =
                build_plan(stance, t - step_start, t_res_tick, mpc, p.T);
            const MpcSolution sol = solve(p, mpc, {y(0), y(1)}, plan);
            u_y = sol.inputs.front();
        }

        // Swing reference with the residual time aged since the last tick.
        {
            const double elapsed = t - step_start;
            const double t_res_now = std::max(t_res_tick - (t - t_tick), 0.0);
            SwingSample ss;
            if (elapsed + t_res_now > 1e-12) {
                ss = scaled_eval(sw_poly, elapsed, t_res_now, p.T);
            } else {
                ss = eval(sw_poly, p.T);  // landing pose
            }
            out.swing.push_back({t, ss.p, ss.v});
        }
        out.lateral.push_back({t, y(0), y(1), u_y, stance_cop(stance, mpc.y_bar)});

        // One longitudinal control tick (sample-and-hold within the tick).
        const HybridTrajectory sub = simulate(p, cfg, x, tau, control_dt, tick_opts);
        for (size_t si = (k == 0 ? 0 : 1); si < sub.samples.size(); ++si) {
            Sample s = sub.samples[si];
            s.t += t;
            s.j += j_total;
            out.longitudinal.samples.push_back(s);
        }
        for (const JumpRecord& jr : sub.jumps) {
            JumpRecord g = jr;
            g.t += t;
            g.j_pre += j_total;
            out.longitudinal.jumps.push_back(g);

            const double t_evt = g.t;
            out.events.push_back({step_index, step_start, t_evt,
                                  t_evt - step_start});
            ++out.completed_steps;
            ++step_index;
            stance = other(stance);
            stance_world_x += 2.0 * p.r_bar;
            step_start = t_evt;
            const double sy = stance_cop(other(stance), mpc.y_bar);
            sw_spec.p_init = Eigen::Vector3d(stance_world_x - 2.0 * p.r_bar, sy, 0.0);
            sw_spec.p_final = Eigen::Vector3d(stance_world_x + 2.0 * p.r_bar, sy, 0.0);
            sw_poly = fit(sw_spec);
            // Until the next MPC tick the new step is assumed nominal.
            t_res_tick = p.T;
            t_tick = t_evt;
        }
        j_total += sub.jump_count;
        x = {sub.samples.back().x_p, sub.samples.back().x_v};
        tau = sub.samples.back().tau;
        if (sub.status == SimStatus::Incomplete ||
            sub.status == SimStatus::TimerRangeExceeded) {
            out.longitudinal.status = sub.status;
            t += control_dt;
            break;
        }

        y = Ad * y + Bd * u_y;
        t += control_dt;
    }

    out.longitudinal.jump_count = j_total;
    out.longitudinal.final_time = t;
    if (!out.longitudinal.samples.empty()) {
        const Sample& last = out.longitudinal.samples.back();
        const PlanarState ref = reference(p, last.tau);
        out.longitudinal.final_error = {last.x_p - ref.x_p, last.x_v - ref.x_v};
    }
    return out;
}

std::vector<LateralTracePoint> baseline_fixed_timing_x(
    const ModelParams& p, const MpcConfig& lateral_mpc, const PlanarState& x0,
    int n_steps, double control_dt) {
    MpcConfig mpc = lateral_mpc;
    mpc.v_ref = 2.0 * p.r_bar / p.T;  // gait-average forward speed

    Eigen::Matrix2d Ad_in;
    Eigen::Vector2d Bd_in;
    discretize(p, control_dt, Ad_in, Bd_in);

    std::vector<LateralTracePoint> trace;
    const int ticks = static_cast<int>(std::llround(n_steps * p.T / control_dt));
    const int mpc_every =
        std::max(1, static_cast<int>(std::llround(mpc.t_mpc / control_dt)));

    Eigen::Vector2d xw(x0.x_p, x0.x_v);  // world frame: stance 0 starts at origin
    double u_hold = 0.0;
    for (int k = 0; k < ticks; ++k) {
        const double t = k * control_dt;
        const int step_idx = static_cast<int>(t / p.T);
        const double z_now = 2.0 * p.r_bar * step_idx;
        if (k % mpc_every == 0) {
            // Scheduled-footstep plan: step i holds the CoP box around 2 r_bar i.
            FootstepPlan plan;
            plan.first_stance = Stance::Left;
            plan.z.resize(mpc.N);
            for (int i = 0; i < mpc.N; ++i) {
                const double s = t + i * mpc.t_mpc;
                plan.z[i] = 2.0 * p.r_bar * static_cast<int>(s / p.T);
            }
            plan.durations = {p.T};
            const MpcSolution sol = solve(p, mpc, {xw(0), xw(1)}, plan);
            u_hold = sol.inputs.front();
        }
        trace.push_back({t, xw(0), xw(1), u_hold, z_now});
        xw = Ad_in * xw + Bd_in * u_hold;
    }
    return trace;
}

}  // namespace hylip
