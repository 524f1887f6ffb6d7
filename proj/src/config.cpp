#include "hylip/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace hylip {

namespace {

using boost::property_tree::ptree;

const std::set<std::string> kModelKeys = {"g", "z_c", "r_bar", "v_bar", "T",
                                          "u_bar"};
const std::set<std::string> kSynthesisKeys = {"alpha", "strictness_margin"};
const std::set<std::string> kSimKeys = {"x0_p",     "x0_v",        "tau0",
                                        "horizon",  "conv_tol",    "conv_window",
                                        "step"};
const std::set<std::string> kBasinKeys = {"eps_p_min", "eps_p_max", "n_p",
                                          "eps_v_min", "eps_v_max", "n_v",
                                          "tau0",      "horizon"};
const std::set<std::string> kMpcKeys = {"t_mpc", "input_weight", "vel_weight",
                                        "w_y", "y_bar"};
const std::set<std::string> kWalkKeys = {"y0_p",    "y0_v",  "stance0",
                                         "steps",   "p_z_max", "horizon"};
const std::set<std::string> kOutputKeys = {"dir"};

void check_keys(const ptree& section, const std::string& name,
                const std::set<std::string>& allowed) {
    for (const auto& kv : section) {
        if (allowed.find(kv.first) == allowed.end()) {
            throw ConfigError("unknown key [" + name + "] " + kv.first);
        }
    }
}

double get_num(const ptree& section, const std::string& sec,
               const std::string& key) {
    const auto v = section.get_optional<double>(key);
    if (!v) {
        throw ConfigError("missing config key [" + sec + "] " + key);
    }
    return *v;
}

double get_num_or(const ptree& section, const std::string& key, double dflt) {
    const auto v = section.get_optional<double>(key);
    return v ? *v : dflt;
}

}  // namespace

RunConfig RunConfig::parse(const std::string& text) {
    ptree pt;
    std::istringstream is(text);
    try {
        boost::property_tree::ini_parser::read_ini(is, pt);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }

    const std::set<std::string> known_sections = {
        "model", "synthesis", "sim", "basin", "mpc", "walk", "output"};
    for (const auto& kv : pt) {
        if (known_sections.find(kv.first) == known_sections.end()) {
            throw ConfigError("unknown config section [" + kv.first + "]");
        }
    }

    const ptree empty;
    const ptree& model = pt.get_child("model", empty);
    if (model.empty()) {
        throw ConfigError("missing config section [model]");
    }
    check_keys(model, "model", kModelKeys);

    const double g = get_num_or(model, "g", 9.81);
    const double z_c = get_num(model, "model", "z_c");
    const double u_bar = get_num(model, "model", "u_bar");
    GaitSpec gait;
    if (auto v = model.get_optional<double>("r_bar")) gait.r_bar = *v;
    if (auto v = model.get_optional<double>("v_bar")) gait.v_bar = *v;
    if (auto v = model.get_optional<double>("T")) gait.T = *v;
    const double omega = std::sqrt(g / z_c);

    RunConfig cfg{.params = complete_params(gait, omega, u_bar, g),
                  .alpha = 0.0,
                  .basin_tau0 = 0.0};

    const ptree& synth = pt.get_child("synthesis", empty);
    check_keys(synth, "synthesis", kSynthesisKeys);
    cfg.alpha = get_num_or(synth, "alpha", 1.02 * cfg.params.omega);
    cfg.strictness_margin = get_num_or(synth, "strictness_margin", 1e-7);

    const ptree& sim = pt.get_child("sim", empty);
    check_keys(sim, "sim", kSimKeys);
    cfg.sim.x0_p = get_num_or(sim, "x0_p", -cfg.params.r_bar);
    cfg.sim.x0_v = get_num_or(sim, "x0_v", cfg.params.v_bar);
    cfg.sim.tau0 = get_num_or(sim, "tau0", 0.0);
    cfg.sim.horizon = get_num_or(sim, "horizon", 15.0);
    cfg.sim.conv_tol = get_num_or(sim, "conv_tol", 1e-3);
    cfg.sim.conv_window = get_num_or(sim, "conv_window", 1.0);
    cfg.sim.step = get_num_or(sim, "step", 1e-3);

    const ptree& basin = pt.get_child("basin", empty);
    check_keys(basin, "basin", kBasinKeys);
    cfg.basin.eps_p_min = get_num_or(basin, "eps_p_min", -0.15);
    cfg.basin.eps_p_max = get_num_or(basin, "eps_p_max", 0.15);
    cfg.basin.n_p = static_cast<int>(get_num_or(basin, "n_p", 151));
    cfg.basin.eps_v_min = get_num_or(basin, "eps_v_min", -1.5);
    cfg.basin.eps_v_max = get_num_or(basin, "eps_v_max", 1.5);
    cfg.basin.n_v = static_cast<int>(get_num_or(basin, "n_v", 151));
    cfg.basin.horizon = get_num_or(basin, "horizon", 15.0);
    cfg.basin_tau0 = get_num_or(basin, "tau0", 0.5 * cfg.params.T);

    const ptree& mpc = pt.get_child("mpc", empty);
    check_keys(mpc, "mpc", kMpcKeys);
    cfg.mpc = MpcConfig::with_horizon(
        get_num_or(mpc, "t_mpc", 0.03), cfg.params.T,
        get_num_or(mpc, "w_y", 0.1), get_num_or(mpc, "y_bar", 0.096),
        get_num_or(mpc, "input_weight", 10.0),
        get_num_or(mpc, "vel_weight", 0.01));

    const ptree& walk = pt.get_child("walk", empty);
    check_keys(walk, "walk", kWalkKeys);
    cfg.walk.y0_p = get_num_or(walk, "y0_p", -0.08);
    cfg.walk.y0_v = get_num_or(walk, "y0_v", 0.05);
    cfg.walk.steps = static_cast<int>(get_num_or(walk, "steps", 4));
    cfg.walk.p_z_max = get_num_or(walk, "p_z_max", 0.05);
    cfg.walk.horizon = get_num_or(walk, "horizon", 15.0);
    if (auto s = walk.get_optional<std::string>("stance0")) {
        std::string v = *s;
        std::transform(v.begin(), v.end(), v.begin(), ::tolower);
        if (v == "left") {
            cfg.walk.stance0 = Stance::Left;
        } else if (v == "right") {
            cfg.walk.stance0 = Stance::Right;
        } else {
            throw ConfigError("[walk] stance0 must be left or right");
        }
    }

    const ptree& output = pt.get_child("output", empty);
    check_keys(output, "output", kOutputKeys);
    if (auto d = output.get_optional<std::string>("dir")) cfg.output_dir = *d;

    return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream probe(path);
    if (!probe) {
        throw ConfigError("cannot open config file: " + path);
    }
    std::ostringstream os;
    os << probe.rdbuf();
    return parse(os.str());
}

}  // namespace hylip
