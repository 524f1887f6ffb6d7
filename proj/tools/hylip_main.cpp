#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hylip/config.hpp"
#include "hylip/gain_synthesis.hpp"
#include "hylip/io.hpp"
#include "hylip/walk2d.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

void emit_error(const std::string& kind, const std::string& message) {
    json j;
    j["error"] = kind;
    j["message"] = message;
    std::cout << j.dump(2) << std::endl;
}

std::string csv_string(const hylip::CsvTable& t) {
    std::ostringstream os;
    hylip::write_csv(os, t);
    return os.str();
}

hylip::ControllerConfig controller_from(const hylip::GainCertificate& cert,
                                        const hylip::ModelParams& p) {
    return hylip::ControllerConfig::make(cert.K, cert.L, p.u_bar);
}

int cmd_synth(const std::string& config_path, const std::string& out_dir) {
    const hylip::RunConfig cfg = hylip::RunConfig::load(config_path);
    fs::create_directories(out_dir);
    hylip::GainCertificate cert;
    try {
        cert = hylip::synthesize(
            {cfg.params, cfg.alpha, cfg.strictness_margin});
    } catch (const hylip::Infeasible& e) {
        emit_error("infeasible", e.what());
        return kExitDomain;
    }
    const hylip::VerificationReport rep = hylip::verify(cfg.params, cert);
    hylip::write_file(out_dir + "/certificate.json",
                      hylip::certificate_to_json(cfg.params, cert));
    hylip::write_file(out_dir + "/report.json", hylip::report_to_json(rep));
    std::cout << "certificate written to " << out_dir
              << "/certificate.json (pass=" << (rep.pass ? "true" : "false")
              << ")\n";
    return rep.pass ? kExitOk : kExitDomain;
}

int cmd_simulate(const std::string& config_path, const std::string& cert_path,
                 const std::string& out_dir) {
    const hylip::RunConfig cfg = hylip::RunConfig::load(config_path);
    const hylip::GainCertificate cert =
        hylip::certificate_from_json(hylip::read_file(cert_path));
    fs::create_directories(out_dir);

    hylip::SimOptions opts;
    opts.step = cfg.sim.step;
    opts.conv_tol = cfg.sim.conv_tol;
    opts.conv_window = cfg.sim.conv_window;
    opts.lyapunov = hylip::LyapunovSpec{cert.P, cert.alpha};

    const hylip::HybridTrajectory traj = hylip::simulate(
        cfg.params, controller_from(cert, cfg.params),
        {cfg.sim.x0_p, cfg.sim.x0_v}, cfg.sim.tau0, cfg.sim.horizon, opts);
    const hylip::MonotonicityReport mono =
        hylip::check_monotonicity(traj, cert.P, cert.alpha, cfg.params);

    hylip::write_file(out_dir + "/trajectory.csv",
                      csv_string(hylip::trajectory_table(traj)));
    json summary;
    summary["status"] = hylip::to_string(traj.status);
    summary["final_error_norm"] = traj.final_error.norm();
    summary["jump_count"] = traj.jump_count;
    summary["final_time"] = traj.final_time;
    summary["max_abs_u"] = traj.max_abs_u;
    summary["lyapunov"] = {{"pass", mono.pass},
                           {"pass_global", mono.pass_global},
                           {"flow_violations_inside", mono.flow_violations_inside},
                           {"flow_violations_global", mono.flow_violations_global},
                           {"jump_violations", mono.jump_violations}};
    hylip::write_file(out_dir + "/summary.json", summary.dump(2));
    std::cout << "status " << hylip::to_string(traj.status) << ", "
              << traj.jump_count << " jumps, final ||eps|| = "
              << traj.final_error.norm() << "\n";
    return traj.status == hylip::SimStatus::Converged ? kExitOk : kExitDomain;
}

int cmd_basin(const std::string& config_path, const std::string& cert_path,
              const std::string& out_dir, int threads) {
    const hylip::RunConfig cfg = hylip::RunConfig::load(config_path);
    const hylip::GainCertificate cert =
        hylip::certificate_from_json(hylip::read_file(cert_path));
    fs::create_directories(out_dir);

    hylip::SimOptions opts;
    opts.step = cfg.sim.step;
    opts.conv_tol = cfg.sim.conv_tol;
    opts.conv_window = cfg.sim.conv_window;

    const hylip::BasinGrid grid = hylip::estimate_basin(
        cfg.params, controller_from(cert, cfg.params), cert, cfg.basin,
        cfg.basin_tau0, threads, opts);

    hylip::write_file(out_dir + "/basin.csv", csv_string(hylip::basin_table(grid)));
    int n_ell = 0, n_dec = 0, n_conv = 0;
    for (const auto& c : grid.cells) {
        n_ell += c.in_ellipsoid;
        n_dec += c.lyap_decreasing;
        n_conv += c.converging;
    }
    json nest;
    nest["cells"] = grid.cells.size();
    nest["in_ellipsoid"] = n_ell;
    nest["lyap_decreasing"] = n_dec;
    nest["converging"] = n_conv;
    nest["violations_ellipsoid_subset"] = grid.nesting_violations_ellipsoid();
    nest["violations_decrease_subset"] = grid.nesting_violations_decrease();
    hylip::write_file(out_dir + "/nesting.json", nest.dump(2));
    std::cout << "basin: " << n_ell << " in ellipsoid, " << n_dec
              << " Lyapunov-decreasing, " << n_conv << " converging; violations "
              << grid.nesting_violations_ellipsoid() << "/"
              << grid.nesting_violations_decrease() << "\n";
    return kExitOk;
}

int cmd_walk2d(const std::string& config_path, const std::string& cert_path,
               const std::string& out_dir, const std::string& baseline) {
    const hylip::RunConfig cfg = hylip::RunConfig::load(config_path);
    const hylip::GainCertificate cert =
        hylip::certificate_from_json(hylip::read_file(cert_path));
    fs::create_directories(out_dir);

    const hylip::WalkResult res =
        hylip::run_walk2d(cfg.params, controller_from(cert, cfg.params), cfg.mpc,
                          cfg.sim, cfg.walk);
    hylip::write_file(out_dir + "/longitudinal.csv",
                      csv_string(hylip::trajectory_table(res.longitudinal)));
    hylip::write_file(out_dir + "/lateral.csv",
                      csv_string(hylip::lateral_table(res.lateral)));
    hylip::write_file(out_dir + "/swing.csv",
                      csv_string(hylip::swing_table(res.swing)));
    hylip::write_file(out_dir + "/events.csv",
                      csv_string(hylip::events_table(res.events)));

    if (baseline == "fixed-timing") {
        auto trace = hylip::baseline_fixed_timing_x(
            cfg.params, cfg.mpc, {cfg.sim.x0_p, cfg.sim.x0_v}, cfg.walk.steps);
        hylip::CsvTable t = hylip::lateral_table(trace);
        t.header = {"t", "x_p", "x_v", "u_x", "z_x"};
        hylip::write_file(out_dir + "/baseline_x.csv", csv_string(t));
    }

    std::cout << "completed " << res.completed_steps << "/" << cfg.walk.steps
              << " steps";
    if (!res.events.empty()) {
        std::cout << ", first step duration " << res.events.front().duration
                  << " s";
    }
    std::cout << "\n";
    return res.completed_steps >= cfg.walk.steps ? kExitOk : kExitDomain;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hybrid linear-inverted-pendulum walking toolkit"};
    app.require_subcommand(1);

    std::string config_path, cert_path, out_dir = ".", baseline;
    int threads = 8;
    int seed = 0;  // reserved

    auto add_common = [&](CLI::App* sub, bool needs_cert) {
        sub->add_option("--config", config_path, "run configuration (INI)")
            ->required();
        if (needs_cert) {
            sub->add_option("--cert", cert_path, "certificate JSON")->required();
        }
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "reserved, currently unused");
    };

    CLI::App* synth = app.add_subcommand("synth", "synthesize stabilizing gains");
    add_common(synth, false);
    CLI::App* sim = app.add_subcommand("simulate", "closed-loop hybrid run");
    add_common(sim, true);
    CLI::App* basin = app.add_subcommand("basin", "basin-of-attraction sweep");
    add_common(basin, true);
    basin->add_option("--threads", threads, "worker threads");
    CLI::App* walk = app.add_subcommand("walk2d", "combined planar walking loop");
    add_common(walk, true);
    walk->add_option("--baseline", baseline,
                     "also run a baseline (supported: fixed-timing)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (app.got_subcommand(synth)) return cmd_synth(config_path, out_dir);
        if (app.got_subcommand(sim)) {
            return cmd_simulate(config_path, cert_path, out_dir);
        }
        if (app.got_subcommand(basin)) {
            return cmd_basin(config_path, cert_path, out_dir, threads);
        }
        if (app.got_subcommand(walk)) {
            return cmd_walk2d(config_path, cert_path, out_dir, baseline);
        }
    } catch (const hylip::ConfigError& e) {
        emit_error("config", e.what());
        return kExitUsage;
    } catch (const hylip::Error& e) {
        emit_error("domain", e.what());
        return kExitDomain;
    } catch (const std::exception& e) {
        emit_error("internal", e.what());
        return kExitDomain;
    }
    return kExitUsage;
}
