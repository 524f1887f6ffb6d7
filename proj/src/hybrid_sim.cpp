#include "hylip/hybrid_sim.hpp"

#include <atomic>
#include <cmath>
#include <deque>
#include <limits>
#include <thread>

namespace hylip {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct FlowState {
    double x_p;
    double x_v;
};

// One RK4 step of the flow of size h starting at (z, tau). In continuous
// mode the control is re-evaluated at every stage; in sample-hold mode the
// caller passes the held input through u_held.
FlowState rk4_step(const ModelParams& p, const ControllerConfig& cfg,
                   const FlowState& z, double tau, double h, bool sample_hold,
                   double u_held) {
    auto deriv = [&](const FlowState& s, double tau_s) -> FlowState {
        double u = u_held;
        if (!sample_hold) {
            const PlanarState ref = reference_unchecked(p, tau_s);
            u = control(cfg, {s.x_p - ref.x_p, s.x_v - ref.x_v});
        }
        return {s.x_v, p.omega * p.omega * (s.x_p - u)};
    };
    const FlowState k1 = deriv(z, tau);
    const FlowState k2 =
        deriv({z.x_p + 0.5 * h * k1.x_p, z.x_v + 0.5 * h * k1.x_v}, tau + 0.5 * h);
    const FlowState k3 =
        deriv({z.x_p + 0.5 * h * k2.x_p, z.x_v + 0.5 * h * k2.x_v}, tau + 0.5 * h);
    const FlowState k4 = deriv({z.x_p + h * k3.x_p, z.x_v + h * k3.x_v}, tau + h);
    return {z.x_p + h / 6.0 * (k1.x_p + 2.0 * k2.x_p + 2.0 * k3.x_p + k4.x_p),
            z.x_v + h / 6.0 * (k1.x_v + 2.0 * k2.x_v + 2.0 * k3.x_v + k4.x_v)};
}

// Bisection on the sub-step length until the committed point satisfies
// |x_p - target| <= tol. The bracket is [0, h] with a sign change of
// x_p - target across it.
double localize_crossing(const ModelParams& p, const ControllerConfig& cfg,
                         const FlowState& z, double tau, double h,
                         bool sample_hold, double u_held, double target,
                         double tol, FlowState& out) {
    double lo = 0.0, hi = h;
    FlowState best = rk4_step(p, cfg, z, tau, hi, sample_hold, u_held);
    double lambda = hi;
    for (int it = 0; it < 200; ++it) {
        if (std::abs(best.x_p - target) <= tol) break;
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;  // fp resolution reached
        const FlowState zm = rk4_step(p, cfg, z, tau, mid, sample_hold, u_held);
        const bool before = (target > z.x_p) ? (zm.x_p < target) : (zm.x_p > target);
        // The committed point stays on the far side so jump-set membership holds.
        if (before) {
            lo = mid;
        } else {
            hi = mid;
            best = zm;
            lambda = mid;
        }
    }
    out = best;
    return lambda;
}

struct MonoTracker {
    const SimOptions* opts = nullptr;
    bool active = false;
    bool have_prev = false;
    double prev_V = 0.0;
    double prev_quad = 0.0;
    double prev_eps = 0.0;
    MonotonicityStats stats;

    void sample(double V, double quad, double eps_norm, bool jump_row) {
        if (!active) return;
        if (quad <= 1.0) stats.entered_ellipsoid = true;
        if (have_prev) {
            // Below the integrator noise floor V is rounding chatter.
            const bool meaningful = prev_eps >= opts->mono_eps_floor ||
                                    eps_norm >= opts->mono_eps_floor;
            const double slack = opts->mono_slack + 1e-12 * std::abs(prev_V);
            const double inc = V - prev_V;
            if (meaningful && inc > slack) {
                if (jump_row) {
                    ++stats.jump_violations;
                    stats.worst_jump_increase =
                        std::max(stats.worst_jump_increase, inc);
                } else {
                    ++stats.flow_violations_global;
                    stats.worst_flow_increase_global =
                        std::max(stats.worst_flow_increase_global, inc);
                    if (prev_quad <= 1.0) {
                        ++stats.flow_violations_inside;
                        stats.worst_flow_increase_inside =
                            std::max(stats.worst_flow_increase_inside, inc);
                    }
                }
            }
        }
        prev_V = V;
        prev_quad = quad;
        prev_eps = eps_norm;
        have_prev = true;
    }
};

}  // namespace

const char* to_string(SimStatus s) {
    switch (s) {
        case SimStatus::Converged: return "Converged";
        case SimStatus::HorizonReached: return "HorizonReached";
        case SimStatus::Incomplete: return "Incomplete";
        case SimStatus::TimerRangeExceeded: return "TimerRangeExceeded";
    }
    return "?";
}

double lyapunov(const Eigen::Matrix2d& P, double alpha, const PlanarState& x,
                double tau, const ModelParams& p) {
    const PlanarState ref = reference_unchecked(p, tau);
    const Eigen::Vector2d eps(x.x_p - ref.x_p, x.x_v - ref.x_v);
    return std::exp(2.0 * alpha * tau) * eps.dot(P * eps);
}

HybridTrajectory simulate(const ModelParams& p, const ControllerConfig& cfg,
                          const PlanarState& x0, double tau0, double horizon,
                          const SimOptions& opts) {
    const double timer_slack = detail::kTimerRangeSlack * p.T;
    if (tau0 < -p.T - timer_slack || tau0 > 2.0 * p.T + timer_slack) {
        throw TimerOutOfRange("simulate: tau0 outside [-T, 2T]");
    }
    if (x0.x_p < -p.r_bar - detail::kJumpSetTol ||
        x0.x_p > p.r_bar + detail::kJumpSetTol) {
        throw Error("simulate: x0 outside the flow set [-r_bar, r_bar]");
    }

    HybridTrajectory traj;
    FlowState z{x0.x_p, x0.x_v};
    double tau = tau0;
    double t = 0.0;
    int j = 0;
    std::deque<double> recent_jumps;

    MonoTracker mono;
    mono.opts = &opts;
    mono.active = opts.lyapunov.has_value();

    auto eps_at = [&](const FlowState& s, double tau_s) -> ErrorState {
        const PlanarState ref = reference_unchecked(p, tau_s);
        return {s.x_p - ref.x_p, s.x_v - ref.x_v};
    };
    auto V_of = [&](const FlowState& s, double tau_s, const ErrorState& e,
                    double& quad) -> double {
        if (!opts.lyapunov) {
            quad = kNaN;
            return kNaN;
        }
        const Eigen::Vector2d ev = e.vec();
        quad = ev.dot(opts.lyapunov->P * ev);
        return std::exp(2.0 * opts.lyapunov->alpha * tau_s) * quad;
    };

    bool below_tol = false;
    double below_since = 0.0;
    bool done = false;

    auto record_point = [&](double u, bool jump_row) {
        const ErrorState e = eps_at(z, tau);
        double quad;
        const double V = V_of(z, tau, e, quad);
        if (opts.lyapunov) {
            mono.sample(V, quad, e.norm(), jump_row);
        }
        if (opts.record) {
            traj.samples.push_back({t, j, z.x_p, z.x_v, tau, u, V, jump_row});
        }
        traj.final_error = e;
        traj.final_time = t;
        // Convergence window bookkeeping.
        if (e.norm() < opts.conv_tol) {
            if (!below_tol) {
                below_tol = true;
                below_since = t;
            } else if (t - below_since >= opts.conv_window) {
                traj.status = SimStatus::Converged;
                done = true;
            }
        } else {
            below_tol = false;
        }
    };

    auto current_u = [&]() {
        return control(cfg, eps_at(z, tau));
    };

    auto do_jump = [&]() {
        const PlanarState pre{z.x_p, z.x_v};
        const PlanarState post = jump_map(p, pre);
        const double tau_post = tau - p.T;
        traj.jumps.push_back({t, j, pre, tau, post, tau_post});
        z = {post.x_p, post.x_v};
        tau = tau_post;
        ++j;
        traj.jump_count = j;
        recent_jumps.push_back(t);
        while (!recent_jumps.empty() && recent_jumps.front() < t - 1.0) {
            recent_jumps.pop_front();
        }
        if (static_cast<int>(recent_jumps.size()) > opts.max_jumps_per_second) {
            throw ZenoGuardTripped("more than max_jumps_per_second jumps in 1 s");
        }
        if (tau < -p.T - timer_slack) {
            traj.status = SimStatus::TimerRangeExceeded;
            done = true;
        }
        const double u = current_u();
        traj.max_abs_u = std::max(traj.max_abs_u, std::abs(u));
        record_point(u, true);
    };

    // Initial sample (and a possible jump already pending at t = 0).
    {
        const double u = current_u();
        traj.max_abs_u = std::max(traj.max_abs_u, std::abs(u));
        record_point(u, false);
    }

    while (!done) {
        if (z.x_p >= p.r_bar - opts.event_tol && z.x_v > 0.0) {
            do_jump();
            continue;
        }
        if (z.x_p <= -p.r_bar + opts.event_tol && z.x_v < 0.0) {
            traj.status = SimStatus::Incomplete;
            break;
        }
        if (horizon - t <= 1e-15) {
            traj.status = SimStatus::HorizonReached;
            break;
        }
        double h = std::min(opts.step, horizon - t);
        const double tau_room = 2.0 * p.T - tau;
        if (tau_room <= 1e-15) {
            traj.status = SimStatus::TimerRangeExceeded;
            break;
        }
        h = std::min(h, tau_room);

        const double u_held = current_u();
        traj.max_abs_u = std::max(traj.max_abs_u, std::abs(u_held));
        FlowState znext = rk4_step(p, cfg, z, tau, h, opts.sample_hold, u_held);

        if (znext.x_p >= p.r_bar) {
            FlowState zevt;
            const double lambda =
                localize_crossing(p, cfg, z, tau, h, opts.sample_hold, u_held,
                                  p.r_bar, opts.event_tol, zevt);
            z = zevt;
            t += lambda;
            tau += lambda;
            record_point(current_u(), false);
            if (done) break;
            do_jump();
            continue;
        }
        if (znext.x_p <= -p.r_bar) {
            FlowState zexit;
            const double lambda =
                localize_crossing(p, cfg, z, tau, h, opts.sample_hold, u_held,
                                  -p.r_bar, opts.event_tol, zexit);
            z = zexit;
            t += lambda;
            tau += lambda;
            record_point(current_u(), false);
            traj.status = SimStatus::Incomplete;
            break;
        }

        z = znext;
        t += h;
        tau += h;
        record_point(current_u(), false);
    }

    traj.stats = mono.stats;
    return traj;
}

MonotonicityReport check_monotonicity(const HybridTrajectory& traj,
                                      const Eigen::Matrix2d& P, double alpha,
                                      const ModelParams& p, double slack,
                                      double eps_floor) {
    MonotonicityReport rep;
    double prev_V = 0.0, prev_quad = 0.0, prev_eps = 0.0;
    bool have_prev = false;
    for (const Sample& s : traj.samples) {
        const PlanarState ref = reference_unchecked(p, s.tau);
        const Eigen::Vector2d eps(s.x_p - ref.x_p, s.x_v - ref.x_v);
        const double quad = eps.dot(P * eps);
        const double V = std::exp(2.0 * alpha * s.tau) * quad;
        if (quad <= 1.0) rep.entered_ellipsoid = true;
        const bool meaningful =
            prev_eps >= eps_floor || eps.norm() >= eps_floor;
        if (have_prev && meaningful) {
            const double eff = slack + 1e-12 * std::abs(prev_V);
            const double inc = V - prev_V;
            if (inc > eff) {
                if (s.jump_row) {
                    ++rep.jump_violations;
                    rep.worst_jump_increase =
                        std::max(rep.worst_jump_increase, inc);
                } else {
                    ++rep.flow_violations_global;
                    rep.worst_flow_increase_global =
                        std::max(rep.worst_flow_increase_global, inc);
                    if (prev_quad <= 1.0) {
                        ++rep.flow_violations_inside;
                        rep.worst_flow_increase_inside =
                            std::max(rep.worst_flow_increase_inside, inc);
                    }
                }
            }
        }
        prev_V = V;
        prev_quad = quad;
        prev_eps = eps.norm();
        have_prev = true;
    }
    rep.pass = rep.flow_violations_inside == 0 && rep.jump_violations == 0;
    rep.pass_global = rep.flow_violations_global == 0 && rep.jump_violations == 0;
    return rep;
}

int BasinGrid::nesting_violations_ellipsoid() const {
    int n = 0;
    for (const BasinCell& c : cells) {
        if (c.in_ellipsoid && !c.lyap_decreasing) ++n;
    }
    return n;
}

int BasinGrid::nesting_violations_decrease() const {
    int n = 0;
    for (const BasinCell& c : cells) {
        if (c.lyap_decreasing && !c.converging) ++n;
    }
    return n;
}

BasinGrid estimate_basin(const ModelParams& p, const ControllerConfig& cfg,
                         const GainCertificate& cert, const BasinGridSpec& grid,
                         double tau0, int threads, const SimOptions& base_opts) {
    if (grid.n_p < 1 || grid.n_v < 1) {
        throw ConfigError("basin grid axes must be non-empty");
    }
    BasinGrid out;
    out.tau0 = tau0;
    out.eps_p_axis.resize(grid.n_p);
    out.eps_v_axis.resize(grid.n_v);
    for (int i = 0; i < grid.n_p; ++i) {
        out.eps_p_axis[i] =
            grid.n_p == 1 ? grid.eps_p_min
                          : grid.eps_p_min + (grid.eps_p_max - grid.eps_p_min) *
                                                 i / (grid.n_p - 1.0);
    }
    for (int i = 0; i < grid.n_v; ++i) {
        out.eps_v_axis[i] =
            grid.n_v == 1 ? grid.eps_v_min
                          : grid.eps_v_min + (grid.eps_v_max - grid.eps_v_min) *
                                                 i / (grid.n_v - 1.0);
    }
    out.cells.resize(static_cast<size_t>(grid.n_p) * grid.n_v);

    SimOptions opts = base_opts;
    opts.record = false;
    opts.lyapunov = LyapunovSpec{cert.P, cert.alpha};

    const PlanarState xr0 = reference(p, tau0);
    const int total = grid.n_p * grid.n_v;
    std::atomic<int> next{0};

    auto worker = [&]() {
        for (;;) {
            const int idx = next.fetch_add(1);
            if (idx >= total) return;
            const int ip = idx % grid.n_p;
            const int iv = idx / grid.n_p;
            const Eigen::Vector2d eps0(out.eps_p_axis[ip], out.eps_v_axis[iv]);
            BasinCell cell;
            cell.in_ellipsoid = eps0.dot(cert.P * eps0) <= 1.0;
            const PlanarState x0{xr0.x_p + eps0(0), xr0.x_v + eps0(1)};
            try {
                const HybridTrajectory tr =
                    simulate(p, cfg, x0, tau0, grid.horizon, opts);
                cell.converging = tr.status == SimStatus::Converged;
                cell.incomplete = tr.status == SimStatus::Incomplete;
                // The decrease set is assessed on solutions that stay in the
                // state space; runs that die leaving X are not classified.
                cell.lyap_decreasing = !cell.incomplete &&
                                       tr.stats.flow_violations_global == 0 &&
                                       tr.stats.jump_violations == 0;
                cell.diverging = !cell.converging && !cell.incomplete;
            } catch (const ZenoGuardTripped&) {
                cell.diverging = true;
            }
            out.cells[idx] = cell;
        }
    };

    const int nw = std::max(1, threads);
    std::vector<std::thread> pool;
    pool.reserve(nw - 1);
    for (int i = 0; i + 1 < nw; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return out;
}

}  // namespace hylip
