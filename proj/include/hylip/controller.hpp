#pragma once

#include <Eigen/Dense>
#include <algorithm>

#include "hylip/error_dynamics.hpp"
#include "hylip/errors.hpp"

namespace hylip {

/// Symmetric saturation at level u_bar.
inline double sat(double s, double u_bar) {
    return std::min(std::max(s, -u_bar), u_bar);
}

/// Deadzone: the part of s exceeding the saturation level.
inline double dz(double s, double u_bar) { return s - sat(s, u_bar); }

/// Saturated linear state feedback with static anti-windup.
struct ControllerConfig {
    Eigen::RowVector2d K = Eigen::RowVector2d::Zero();
    double L = 0.0;
    double u_bar = 0.075;

    static ControllerConfig make(const Eigen::RowVector2d& K, double L,
                                 double u_bar) {
        if (!(u_bar > 0.0)) {
            throw ConfigError("controller saturation level must be positive");
        }
        if (!(L < 1.0)) {
            throw ConfigError("anti-windup gain must satisfy L < 1");
        }
        return {K, L, u_bar};
    }

    static ControllerConfig zero_gains(double u_bar) {
        return {Eigen::RowVector2d::Zero(), 0.0, u_bar};
    }
};

/// u = sat(K eps + L/(1-L) dz(K eps)); always within [-u_bar, u_bar].
inline double control(const ControllerConfig& cfg, const ErrorState& eps) {
    const double ke = cfg.K(0) * eps.eps_p + cfg.K(1) * eps.eps_v;
    const double aw = cfg.L / (1.0 - cfg.L) * dz(ke, cfg.u_bar);
    return sat(ke + aw, cfg.u_bar);
}

}  // namespace hylip
