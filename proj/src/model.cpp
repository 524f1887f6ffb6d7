#include "hylip/model.hpp"

#include <cmath>
#include <sstream>

namespace hylip {

namespace {

// Decomposes a vector onto the e^{+omega t} / e^{-omega t} modes of A.
// e^{At} (p, w) = (a E + b/E, omega (a E - b/E)) with E = e^{omega t},
// a = (p + w/omega)/2, b = (p - w/omega)/2. Avoids cosh-sinh cancellation.
struct ModalCoeffs {
    double a;
    double b;
};

ModalCoeffs modal(const ModelParams& p, double pos, double vel) {
    return {0.5 * (pos + vel / p.omega), 0.5 * (pos - vel / p.omega)};
}

PlanarState propagate_modal(const ModelParams& p, ModalCoeffs m, double t) {
    const double E = std::exp(p.omega * t);
    const double grow = m.a * E;
    const double decay = m.b / E;
    return {grow + decay, p.omega * (grow - decay)};
}

}  // namespace

ModelParams ModelParams::make(double g, double z_c, double r_bar, double v_bar,
                              double T, double u_bar) {
    if (!(g > 0.0) || !(z_c > 0.0)) {
        throw ConfigError("gravity and CoM height must be positive");
    }
    ModelParams p{g, z_c, std::sqrt(g / z_c), r_bar, v_bar, T, u_bar};
    if (!(p.r_bar > 0.0) || !(p.u_bar > 0.0) || !(p.T > 0.0)) {
        throw ConfigError("r_bar, u_bar and T must be positive");
    }
    if (!(p.slack() > 0.0)) {
        throw InfeasibleGait("v_bar/omega - r_bar must be strictly positive");
    }
    // Periodicity relation between the three gait parameters.
    const double T_implied =
        std::log((p.v_bar / p.omega + p.r_bar) / p.slack()) / p.omega;
    if (std::abs(T_implied - p.T) > 1e-9 * std::max(1.0, std::abs(p.T))) {
        std::ostringstream os;
        os << "gait parameters violate the periodicity relation: T=" << p.T
           << " but r_bar, v_bar imply T=" << T_implied;
        throw InfeasibleGait(os.str());
    }
    return p;
}

ModelParams complete_params(const GaitSpec& known, double omega, double u_bar,
                            double g) {
    if (!(omega > 0.0)) {
        throw ConfigError("omega must be positive");
    }
    const int given = int(known.r_bar.has_value()) + int(known.v_bar.has_value()) +
                      int(known.T.has_value());
    if (given != 2) {
        throw ConfigError("exactly two of {r_bar, v_bar, T} must be given");
    }

    double r_bar, v_bar, T;
    if (known.r_bar && known.T) {
        r_bar = *known.r_bar;
        T = *known.T;
        if (!(r_bar > 0.0) || !(T > 0.0)) {
            throw InfeasibleGait("r_bar and T must be positive");
        }
        // v = omega r (cosh(wT)+1)/sinh(wT); always yields v/omega > r.
        const double E = std::exp(omega * T);
        v_bar = omega * r_bar * (E + 2.0 + 1.0 / E) / (E - 1.0 / E);
    } else if (known.r_bar && known.v_bar) {
        r_bar = *known.r_bar;
        v_bar = *known.v_bar;
        const double s = v_bar / omega - r_bar;
        if (!(r_bar > 0.0) || !(s > 0.0)) {
            throw InfeasibleGait(
                "period undefined: v_bar/omega - r_bar must be positive");
        }
        T = std::log((v_bar / omega + r_bar) / s) / omega;
    } else {
        v_bar = *known.v_bar;
        T = *known.T;
        if (!(v_bar > 0.0) || !(T > 0.0)) {
            throw InfeasibleGait("v_bar and T must be positive");
        }
        // r = (v/omega) tanh(wT/2) < v/omega.
        r_bar = v_bar / omega * std::tanh(0.5 * omega * T);
    }
    return ModelParams::make(g, g / (omega * omega), r_bar, v_bar, T, u_bar);
}

FlowMatrices flow_matrices(const ModelParams& p) {
    const double w2 = p.omega * p.omega;
    FlowMatrices fm;
    fm.A << 0.0, 1.0, w2, 0.0;
    fm.B << 0.0, -w2;
    return fm;
}

Eigen::Matrix2d transition_matrix(const ModelParams& p, double t) {
    const double E = std::exp(p.omega * t);
    const double iE = 1.0 / E;
    const double ch = 0.5 * (E + iE);
    const double sh = 0.5 * (E - iE);
    Eigen::Matrix2d M;
    M << ch, sh / p.omega, p.omega * sh, ch;
    return M;
}

PlanarState flow_field(const ModelParams& p, const PlanarState& x, double u) {
    return {x.x_v, p.omega * p.omega * (x.x_p - u)};
}

PlanarState jump_map(const ModelParams& p, const PlanarState& x) {
    if (std::abs(x.x_p - p.r_bar) > detail::kJumpSetTol) {
        std::ostringstream os;
        os << "state x_p=" << x.x_p << " not in jump set x_p=" << p.r_bar;
        throw NotInJumpSet(os.str());
    }
    return {x.x_p - 2.0 * p.r_bar, x.x_v};
}

PlanarState reference_unchecked(const ModelParams& p, double tau) {
    return propagate_modal(p, modal(p, -p.r_bar, p.v_bar), tau);
}

PlanarState reference(const ModelParams& p, double tau) {
    const double slack = detail::kTimerRangeSlack * p.T;
    if (tau < -p.T - slack || tau > 2.0 * p.T + slack) {
        std::ostringstream os;
        os << "timer " << tau << " outside [-T, 2T] = [" << -p.T << ", "
           << 2.0 * p.T << "]";
        throw TimerOutOfRange(os.str());
    }
    return reference_unchecked(p, tau);
}

double reference_position(const ModelParams& p, double tau) {
    return reference_unchecked(p, tau).x_p;
}

}  // namespace hylip
