#include "hylip/error_dynamics.hpp"

#include <cmath>

namespace hylip {

double kappa(const ModelParams& p, double eps_p) {
    const double d = eps_p - p.r_bar;
    const double vw = p.v_bar / p.omega;
    const double gamma = (vw - p.r_bar) * (vw + p.r_bar);  // (v/w)^2 - r^2 > 0
    return std::sqrt(d * d + gamma);
}

double eta_inverse(const ModelParams& p, double eps_p) {
    const double vw = p.v_bar / p.omega;
    return (-eps_p + p.r_bar + kappa(p, eps_p)) / (vw + p.r_bar);
}

double eta(const ModelParams& p, double eps_p) {
    if (eps_p >= 0.0) {
        // Direct form; the numerator has no damaging cancellation here.
        return (eps_p - p.r_bar + kappa(p, eps_p)) / p.slack();
    }
    // eps_p < 0: the direct numerator cancels; the rationalized reciprocal
    // is exact in this regime.
    return 1.0 / eta_inverse(p, eps_p);
}

double tau_epsilon(const ModelParams& p, double eps_p) {
    return std::log(eta(p, eps_p)) / p.omega;
}

double xi(const ModelParams& p) {
    return p.r_bar * p.omega / p.slack();
}

JumpDisplacement jump_displacement(const ModelParams& p, double eps_p) {
    const double e = eta(p, eps_p);
    const double ie = eta_inverse(p, eps_p);
    JumpDisplacement d;
    d.delta_1 = p.r_bar * (e + ie - 2.0);
    d.delta_2 = p.r_bar * p.omega * (ie - e);
    return d;
}

double delta_alpha(const ModelParams& p, double eps_p, double alpha) {
    if (!(alpha > p.omega)) {
        throw AlphaTooSmall("delta_alpha bound requires alpha > omega");
    }
    const double d1 = jump_displacement(p, eps_p).delta_1;
    return std::exp(-2.0 * alpha * p.T) * (eps_p + d1) - eps_p;
}

}  // namespace hylip
