#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "hylip/error_dynamics.hpp"
#include "hylip/hybrid_sim.hpp"

using namespace hylip;

namespace {
ModelParams sec5_params() {
    return complete_params({.r_bar = 0.15, .T = 1.2}, std::sqrt(9.81 / 0.58),
                           0.075);
}

const GainCertificate& sec5_certificate() {
    static const GainCertificate cert = synthesize({sec5_params(), 4.2, 1e-7});
    return cert;
}

ControllerConfig sec5_controller() {
    const GainCertificate& c = sec5_certificate();
    return ControllerConfig::make(c.K, c.L, sec5_params().u_bar);
}
}  // namespace

TEST_CASE("lyapunov evaluation") {
    const ModelParams p = sec5_params();
    Eigen::Matrix2d P;
    P << 3.0, 0.5, 0.5, 2.0;
    const double tau = 0.4;
    const PlanarState ref = reference(p, tau);
    CHECK(lyapunov(P, 4.2, ref, tau, p) == 0.0);

    const PlanarState x1{ref.x_p + 0.01, ref.x_v - 0.02};
    const PlanarState x2{ref.x_p + 0.02, ref.x_v - 0.04};
    const double v1 = lyapunov(P, 4.2, x1, tau, p);
    CHECK(lyapunov(P, 4.2, x2, tau, p) == doctest::Approx(4.0 * v1).epsilon(1e-12));

    // Shifting the timer at fixed error multiplies V by e^{2 alpha d}.
    const double d = 0.3;
    const PlanarState ref2 = reference(p, tau + d);
    const PlanarState x3{ref2.x_p + 0.01, ref2.x_v - 0.02};
    CHECK(lyapunov(P, 4.2, x3, tau + d, p) ==
          doctest::Approx(std::exp(2.0 * 4.2 * d) * v1).epsilon(1e-12));
}

TEST_CASE("open-loop run reproduces the periodic gait") {
    const ModelParams p = sec5_params();
    const ControllerConfig zero = ControllerConfig::zero_gains(p.u_bar);
    SimOptions opts;
    opts.conv_tol = 0.0;
    const HybridTrajectory tr =
        simulate(p, zero, {-p.r_bar, p.v_bar}, 0.0, 12.5, opts);
    CHECK(tr.jump_count >= 10);
    double prev_t = 0.0;
    for (size_t i = 0; i < tr.jumps.size(); ++i) {
        const JumpRecord& j = tr.jumps[i];
        CHECK(std::abs(j.post.x_p + p.r_bar) < 1e-8);
        CHECK(std::abs(j.post.x_v - p.v_bar) < 1e-8);
        CHECK(std::abs(j.pre.x_p - p.r_bar) <= 1e-9);
        CHECK(j.post.x_v == j.pre.x_v);  // velocity is continuous across jumps
        if (i > 0) {
            CHECK(std::abs(j.t - prev_t - p.T) < 1e-6);
        }
        prev_t = j.t;
    }
    CHECK(tr.max_abs_u == 0.0);
}

TEST_CASE("zero-error starts stay on the reference with zero effort") {
    const ModelParams p = sec5_params();
    const ControllerConfig ctl = sec5_controller();
    for (double tau0 : {0.1, 0.5 * p.T, 0.9 * p.T}) {
        const PlanarState x0 = reference(p, tau0);
        SimOptions opts;
        opts.conv_tol = 0.0;
        const HybridTrajectory tr = simulate(p, ctl, x0, tau0, 6.0, opts);
        for (const Sample& s : tr.samples) {
            const PlanarState ref = reference(p, s.tau);
            CHECK(std::hypot(s.x_p - ref.x_p, s.x_v - ref.x_v) < 1e-7);
        }
        CHECK(tr.max_abs_u < 1e-5);
    }
}

TEST_CASE("the converging scenario passes the Lyapunov checks") {
    const ModelParams p = sec5_params();
    const GainCertificate& c = sec5_certificate();
    const ControllerConfig ctl = sec5_controller();
    SimOptions opts;
    opts.lyapunov = LyapunovSpec{c.P, c.alpha};
    const HybridTrajectory tr =
        simulate(p, ctl, {-p.r_bar, 1.2 * p.v_bar}, 0.5 * p.T, 15.0, opts);
    CHECK(tr.status == SimStatus::Converged);
    CHECK(tr.final_error.norm() < 1e-3);
    CHECK(tr.final_time < 15.0);
    CHECK(tr.jump_count >= 1);

    const MonotonicityReport rep = check_monotonicity(tr, c.P, c.alpha, p);
    CHECK(rep.pass);
    CHECK(rep.pass_global);
    CHECK(rep.jump_violations == 0);
    CHECK(rep.entered_ellipsoid);

    // The post-hoc scan agrees with the online bookkeeping.
    CHECK(rep.flow_violations_inside == tr.stats.flow_violations_inside);
    CHECK(rep.flow_violations_global == tr.stats.flow_violations_global);
    CHECK(rep.jump_violations == tr.stats.jump_violations);
}

TEST_CASE("open loop from a nonzero error inside E fails the flow check") {
    const ModelParams p = sec5_params();
    const GainCertificate& c = sec5_certificate();
    const ControllerConfig zero = ControllerConfig::zero_gains(p.u_bar);
    // Error chosen inside the ellipsoid.
    Eigen::Vector2d eps0(1e-3, 1e-3);
    REQUIRE(eps0.dot(c.P * eps0) <= 1.0);
    const PlanarState ref = reference(p, 0.5 * p.T);
    SimOptions opts;
    opts.conv_tol = 0.0;
    opts.lyapunov = LyapunovSpec{c.P, c.alpha};
    const HybridTrajectory tr = simulate(
        p, zero, {ref.x_p + eps0(0), ref.x_v + eps0(1)}, 0.5 * p.T, 6.0, opts);
    const MonotonicityReport rep = check_monotonicity(tr, c.P, c.alpha, p);
    CHECK(rep.flow_violations_inside > 0);
    CHECK_FALSE(rep.pass);
}

TEST_CASE("trajectory bookkeeping is well-formed") {
    const ModelParams p = sec5_params();
    const ControllerConfig ctl = sec5_controller();
    const HybridTrajectory tr =
        simulate(p, ctl, {-p.r_bar, 1.2 * p.v_bar}, 0.5 * p.T, 15.0, {});
    int j = tr.samples.front().j;
    double t = tr.samples.front().t;
    for (size_t i = 1; i < tr.samples.size(); ++i) {
        const Sample& s = tr.samples[i];
        CHECK(s.t >= t);
        if (s.jump_row) {
            CHECK(s.t == t);
            CHECK(s.j == j + 1);
            CHECK(std::abs(tr.samples[i - 1].x_p - p.r_bar) <= 1e-9);
        } else {
            CHECK(s.j == j);
            CHECK(s.t > t);
        }
        t = s.t;
        j = s.j;
    }
}

TEST_CASE("jump displacements match the closed form along closed-loop runs") {
    const ModelParams p = sec5_params();
    const ControllerConfig ctl = sec5_controller();
    std::mt19937 rng(2718);
    std::uniform_real_distribution<double> dp(-0.05, 0.05);
    std::uniform_real_distribution<double> dv(-0.3, 0.3);
    std::uniform_real_distribution<double> dtau(0.0, sec5_params().T);
    int jumps_seen = 0;
    for (int run = 0; run < 10; ++run) {
        const double tau0 = dtau(rng);
        const PlanarState ref = reference(p, tau0);
        const PlanarState x0{std::min(ref.x_p + dp(rng), p.r_bar),
                             ref.x_v + dv(rng)};
        HybridTrajectory tr;
        try {
            tr = simulate(p, ctl, x0, tau0, 10.0, {});
        } catch (const ZenoGuardTripped&) {
            continue;
        }
        for (const JumpRecord& j : tr.jumps) {
            const PlanarState rpre = reference(p, j.tau_pre);
            const PlanarState rpost = reference(p, j.tau_post);
            const Eigen::Vector2d eps_pre(j.pre.x_p - rpre.x_p,
                                          j.pre.x_v - rpre.x_v);
            const Eigen::Vector2d eps_post(j.post.x_p - rpost.x_p,
                                           j.post.x_v - rpost.x_v);
            const JumpDisplacement d = jump_displacement(p, eps_pre(0));
            CHECK(std::abs((eps_post - eps_pre)(0) - d.delta_1) < 1e-8);
            CHECK(std::abs((eps_post - eps_pre)(1) - d.delta_2) < 1e-8);
            ++jumps_seen;
        }
    }
    CHECK(jumps_seen > 10);
}

TEST_CASE("halving the step barely changes the final state") {
    const ModelParams p = sec5_params();
    const ControllerConfig ctl = sec5_controller();
    SimOptions a;
    a.conv_tol = 0.0;
    a.record = false;
    SimOptions b = a;
    b.step = 5e-4;
    const HybridTrajectory ta =
        simulate(p, ctl, {-p.r_bar, 1.2 * p.v_bar}, 0.5 * p.T, 8.0, a);
    const HybridTrajectory tb =
        simulate(p, ctl, {-p.r_bar, 1.2 * p.v_bar}, 0.5 * p.T, 8.0, b);
    CHECK(ta.jump_count == tb.jump_count);
    CHECK(std::abs(ta.final_error.eps_p - tb.final_error.eps_p) < 1e-8);
    CHECK(std::abs(ta.final_error.eps_v - tb.final_error.eps_v) < 1e-8);
}

TEST_CASE("status taxonomy: timer range, backward exit, horizon, Zeno guard") {
    const ModelParams p = sec5_params();
    const ControllerConfig zero = ControllerConfig::zero_gains(p.u_bar);

    // (0, 0) is an equilibrium of the open loop: the timer runs out.
    SimOptions opts;
    opts.conv_tol = 0.0;
    const HybridTrajectory t1 = simulate(p, zero, {0.0, 0.0}, 0.0, 10.0, opts);
    CHECK(t1.status == SimStatus::TimerRangeExceeded);
    CHECK(t1.final_time == doctest::Approx(2.0 * p.T).epsilon(1e-9));

    // Backward exit through -r_bar.
    const HybridTrajectory t2 =
        simulate(p, zero, {-0.01, -0.1}, 0.0, 10.0, opts);
    CHECK(t2.status == SimStatus::Incomplete);
    CHECK(t2.samples.back().x_p == doctest::Approx(-p.r_bar).epsilon(1e-9));
    CHECK(t2.samples.back().x_v < 0.0);

    // Horizon reached on a short run.
    const HybridTrajectory t3 =
        simulate(p, zero, {-p.r_bar, p.v_bar}, 0.0, 0.5, opts);
    CHECK(t3.status == SimStatus::HorizonReached);
    CHECK(t3.final_time == doctest::Approx(0.5).epsilon(1e-12));

    // Zeno guard mechanism (tightened so the first jump trips it).
    SimOptions zeno = opts;
    zeno.max_jumps_per_second = 0;
    CHECK_THROWS_AS(
        simulate(p, zero, {-p.r_bar, p.v_bar}, 0.0, 3.0, zeno),
        ZenoGuardTripped);

    // Precondition guards.
    CHECK_THROWS_AS(simulate(p, zero, {0.0, 0.0}, 3.0 * p.T, 1.0, opts),
                    TimerOutOfRange);
    CHECK_THROWS_AS(simulate(p, zero, {2.0 * p.r_bar, 0.0}, 0.0, 1.0, opts),
                    Error);
}

TEST_CASE("sample-hold mode stays close to the continuous law") {
    const ModelParams p = sec5_params();
    const ControllerConfig ctl = sec5_controller();
    SimOptions cont;
    cont.conv_tol = 0.0;
    cont.record = false;
    SimOptions held = cont;
    held.sample_hold = true;
    const HybridTrajectory a =
        simulate(p, ctl, {-p.r_bar, 1.2 * p.v_bar}, 0.5 * p.T, 6.0, cont);
    const HybridTrajectory b =
        simulate(p, ctl, {-p.r_bar, 1.2 * p.v_bar}, 0.5 * p.T, 6.0, held);
    CHECK(std::abs(a.final_error.eps_p - b.final_error.eps_p) < 1e-3);
    CHECK(std::abs(a.final_error.eps_v - b.final_error.eps_v) < 1e-3);
}

TEST_CASE("basin sweep on a coarse grid: nesting and determinism") {
    const ModelParams p = sec5_params();
    const GainCertificate& c = sec5_certificate();
    const ControllerConfig ctl = sec5_controller();
    BasinGridSpec spec;
    spec.n_p = 21;
    spec.n_v = 21;
    spec.horizon = 12.0;
    const BasinGrid g1 = estimate_basin(p, ctl, c, spec, 0.5 * p.T, 4);
    CHECK(g1.nesting_violations_ellipsoid() == 0);
    CHECK(g1.nesting_violations_decrease() == 0);

    // Origin cell: all three flags.
    const int ip0 = 10, iv0 = 10;
    REQUIRE(g1.eps_p_axis[ip0] == 0.0);
    REQUIRE(g1.eps_v_axis[iv0] == 0.0);
    CHECK(g1.at(ip0, iv0).in_ellipsoid);
    CHECK(g1.at(ip0, iv0).lyap_decreasing);
    CHECK(g1.at(ip0, iv0).converging);

    int n_ell = 0, n_conv = 0;
    for (const BasinCell& cell : g1.cells) {
        n_ell += cell.in_ellipsoid;
        n_conv += cell.converging;
    }
    CHECK(n_ell >= 1);
    CHECK(n_ell < n_conv);

    // The worker count must not change the classification.
    const BasinGrid g2 = estimate_basin(p, ctl, c, spec, 0.5 * p.T, 1);
    for (size_t i = 0; i < g1.cells.size(); ++i) {
        CHECK(g1.cells[i].in_ellipsoid == g2.cells[i].in_ellipsoid);
        CHECK(g1.cells[i].lyap_decreasing == g2.cells[i].lyap_decreasing);
        CHECK(g1.cells[i].converging == g2.cells[i].converging);
    }
}
