#pragma once

#include "hylip/model.hpp"

namespace hylip {

/// Tracking error coordinates eps = x - x_r(tau).
struct ErrorState {
    double eps_p = 0.0;  ///< position error [m]
    double eps_v = 0.0;  ///< velocity error [m/s]

    Eigen::Vector2d vec() const { return {eps_p, eps_v}; }
    static ErrorState from(const Eigen::Vector2d& v) { return {v(0), v(1)}; }
    double norm() const { return std::hypot(eps_p, eps_v); }
};

/// Increment applied to the error at a foot switch.
struct JumpDisplacement {
    double delta_1 = 0.0;  ///< position increment [m]
    double delta_2 = 0.0;  ///< velocity increment [m/s]
};

/// kappa(eps_p) = sqrt(eps_p^2 - 2 r eps_p + (v/omega)^2), evaluated through
/// the shifted radicand (eps_p - r)^2 + ((v/omega)^2 - r^2) which is
/// manifestly positive.
double kappa(const ModelParams& p, double eps_p);

/// The unique positive root of
///   (v/w - r) s^2 - 2 (eps_p - r) s - (r + v/w) = 0
/// in s = e^{w tau_eps}. Strictly increasing, eta(0) = 1, eta -> 0+ as
/// eps_p -> -inf.
double eta(const ModelParams& p, double eps_p);

/// 1/eta through the rationalized expression
/// (-eps_p + r + kappa) / (v/w + r), stable for eps_p <= 0.
double eta_inverse(const ModelParams& p, double eps_p);

/// Timer offset at a jump: ln(eta(eps_p)) / omega. Zero iff eps_p = 0.
double tau_epsilon(const ModelParams& p, double eps_p);

/// xi = r omega / (v/omega - r) > 0.
double xi(const ModelParams& p);

/// Closed-form error jump:
///   delta_1 = r (eta + 1/eta - 2),  delta_2 = r omega (1/eta - eta).
JumpDisplacement jump_displacement(const ModelParams& p, double eps_p);

/// delta_alpha = e^{-2 alpha T} (eps_p + delta_1) - eps_p. Requires
/// alpha > omega (throws AlphaTooSmall otherwise); satisfies
/// |delta_alpha| <= (1 - e^{-(omega + 2 alpha) T}) |eps_p|.
double delta_alpha(const ModelParams& p, double eps_p, double alpha);

}  // namespace hylip
