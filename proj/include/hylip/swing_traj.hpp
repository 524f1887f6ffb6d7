#pragma once

#include <Eigen/Dense>
#include <array>

#include "hylip/errors.hpp"

namespace hylip {

/// Boundary data of one swing: lift-off and touch-down positions (z = 0 at
/// both), apex height and nominal step duration.
struct SwingSpec {
    Eigen::Vector3d p_init = Eigen::Vector3d::Zero();
    Eigen::Vector3d p_final = Eigen::Vector3d::Zero();
    double p_z_max = 0.05;
    double T = 1.2;

    void validate() const;
};

/// Per-axis polynomial coefficients (ascending powers of t): quintics for
/// x and y, a sextic for z which additionally pins the apex at T/2.
struct SwingPolynomials {
    std::array<double, 6> coeffs_x{};
    std::array<double, 6> coeffs_y{};
    std::array<double, 7> coeffs_z{};
    double T = 0.0;
};

struct SwingSample {
    Eigen::Vector3d p;
    Eigen::Vector3d v;
    Eigen::Vector3d a;
};

/// Fits the boundary conditions: position at 0/T, zero velocity and
/// acceleration at both ends, and p_z(T/2) = p_z_max for the vertical axis.
SwingPolynomials fit(const SwingSpec& spec);

/// Plain evaluation at time t (no rescaling).
SwingSample eval(const SwingPolynomials& poly, double t);

/// Time-rescaled evaluation: phi = T / (t + t_res), clamped to [0.2, 5];
/// returns (p(phi t), phi p'(phi t), phi^2 p''(phi t)). The evaluation
/// argument is additionally clamped to [0, T] so a stalled step holds the
/// touch-down pose instead of extrapolating.
SwingSample scaled_eval(const SwingPolynomials& poly, double t, double t_res,
                        double T);

namespace detail {
inline constexpr double kPhiMin = 0.2;
inline constexpr double kPhiMax = 5.0;
}  // namespace detail

}  // namespace hylip
