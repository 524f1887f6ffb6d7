#pragma once

#include <Eigen/Dense>
#include <optional>

#include "hylip/errors.hpp"

namespace hylip {

/// Planar center-of-mass state in the stance-foot frame: longitudinal
/// position [m] and velocity [m/s].
struct PlanarState {
    double x_p = 0.0;
    double x_v = 0.0;

    Eigen::Vector2d vec() const { return {x_p, x_v}; }
    static PlanarState from(const Eigen::Vector2d& v) { return {v(0), v(1)}; }
};

/// Physical and gait constants of the pendulum walker. Immutable after
/// construction; build instances through complete_params or
/// ModelParams::make so the consistency invariants are enforced.
struct ModelParams {
    double g;      ///< gravity [m/s^2]
    double z_c;    ///< CoM height [m]
    double omega;  ///< pendulum frequency sqrt(g/z_c) [rad/s]
    double r_bar;  ///< half step size [m]
    double v_bar;  ///< peak forward speed, reached at step change [m/s]
    double T;      ///< step period [s]
    double u_bar;  ///< CoP saturation, half foot length [m]

    /// v_bar/omega - r_bar, the positive constant underpinning the gait.
    double slack() const { return v_bar / omega - r_bar; }

    /// Validates all invariants, throwing InfeasibleGait/ConfigError on violation.
    static ModelParams make(double g, double z_c, double r_bar, double v_bar,
                            double T, double u_bar);
};

/// Completion input: exactly two of the three gait parameters.
struct GaitSpec {
    std::optional<double> r_bar;
    std::optional<double> v_bar;
    std::optional<double> T;
};

/// Augmented state for the hybrid system: planar state, timer, hybrid time.
struct AugmentedState {
    PlanarState x;
    double tau = 0.0;  ///< timer [s], in [-T, 2T]
    double t = 0.0;    ///< continuous time [s]
    int j = 0;         ///< jump count
};

/// Flow matrices of the linear pendulum dynamics.
struct FlowMatrices {
    Eigen::Matrix2d A;
    Eigen::Vector2d B;
};

/// Solves the periodicity relations for the missing gait parameter and
/// returns a fully validated parameter set. The CoM height is derived from
/// omega and g (z_c = g / omega^2).
///
/// Throws InfeasibleGait when the implied v_bar/omega - r_bar is not
/// strictly positive or the period logarithm has a non-positive argument.
ModelParams complete_params(const GaitSpec& known, double omega,
                            double u_bar = 0.075, double g = 9.81);

/// A and B built from the params: A = [[0,1],[omega^2,0]], B = [0,-omega^2].
FlowMatrices flow_matrices(const ModelParams& p);

/// Closed-form matrix exponential e^{At} (valid for all real t).
Eigen::Matrix2d transition_matrix(const ModelParams& p, double t);

/// Right-hand side of the flow: (x_v, omega^2 (x_p - u)).
PlanarState flow_field(const ModelParams& p, const PlanarState& x, double u);

/// Frame-shift reset applied on the jump set x_p = r_bar:
/// returns (x_p - 2 r_bar, x_v). Throws NotInJumpSet when |x_p - r_bar|
/// exceeds the membership tolerance (1e-9 m).
PlanarState jump_map(const ModelParams& p, const PlanarState& x);

/// Timer-parametrized reference x_r(tau) = e^{A tau} (-r_bar, v_bar).
/// Throws TimerOutOfRange for tau outside [-T, 2T] (small fp slack allowed).
PlanarState reference(const ModelParams& p, double tau);

/// Same evaluation as reference() without the range check; used internally
/// where tau is already guarded.
PlanarState reference_unchecked(const ModelParams& p, double tau);

/// Position component of the reference, psi(tau); strictly increasing.
double reference_position(const ModelParams& p, double tau);

namespace detail {
/// Jump-set membership tolerance on |x_p - r_bar| [m].
inline constexpr double kJumpSetTol = 1e-9;
/// Relative slack accepted on the timer range check.
inline constexpr double kTimerRangeSlack = 1e-9;
}  // namespace detail

}  // namespace hylip
