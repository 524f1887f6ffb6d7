#include "hylip/swing_traj.hpp"

#include <algorithm>
#include <cmath>

namespace hylip {

namespace {

// Quintic with p(0)=p0, p(T)=pf and zero velocity/acceleration at both ends:
// p0 + (pf-p0) (10 s^3 - 15 s^4 + 6 s^5), s = t/T.
std::array<double, 6> quintic_rest_to_rest(double p0, double pf, double T) {
    const double D = pf - p0;
    const double T3 = T * T * T;
    return {p0, 0.0, 0.0, 10.0 * D / T3, -15.0 * D / (T3 * T),
            6.0 * D / (T3 * T * T)};
}

// Horner evaluation of the polynomial and its first two derivatives.
template <size_t N>
void eval_poly(const std::array<double, N>& c, double t, double& p, double& v,
               double& a) {
    p = 0.0;
    v = 0.0;
    a = 0.0;
    for (int k = static_cast<int>(N) - 1; k >= 0; --k) {
        a = a * t + 2.0 * v;
        v = v * t + p;
        p = p * t + c[k];
    }
}

}  // namespace

void SwingSpec::validate() const {
    if (!(p_z_max > 0.0) || !(T > 0.0)) {
        throw ConfigError("swing spec needs p_z_max > 0 and T > 0");
    }
    if (p_init.z() != 0.0 || p_final.z() != 0.0) {
        throw ConfigError("swing spec: initial and final z must be 0");
    }
}

SwingPolynomials fit(const SwingSpec& spec) {
    spec.validate();
    SwingPolynomials poly;
    poly.T = spec.T;
    poly.coeffs_x = quintic_rest_to_rest(spec.p_init.x(), spec.p_final.x(), spec.T);
    poly.coeffs_y = quintic_rest_to_rest(spec.p_init.y(), spec.p_final.y(), spec.T);
    // Sextic with triple roots at 0 and T, apex p_z_max at T/2:
    // z(t) = 64 h (t/T)^3 (1 - t/T)^3.
    const double h = spec.p_z_max;
    const double T = spec.T;
    const double T3 = T * T * T;
    poly.coeffs_z = {0.0,
                     0.0,
                     0.0,
                     64.0 * h / T3,
                     -192.0 * h / (T3 * T),
                     192.0 * h / (T3 * T * T),
                     -64.0 * h / (T3 * T * T * T)};
    return poly;
}

SwingSample eval(const SwingPolynomials& poly, double t) {
    SwingSample s;
    for (int axis = 0; axis < 3; ++axis) {
        double p = 0.0, v = 0.0, a = 0.0;
        if (axis == 0) {
            eval_poly(poly.coeffs_x, t, p, v, a);
        } else if (axis == 1) {
            eval_poly(poly.coeffs_y, t, p, v, a);
        } else {
            eval_poly(poly.coeffs_z, t, p, v, a);
        }
        s.p(axis) = p;
        s.v(axis) = v;
        s.a(axis) = a;
    }
    return s;
}

SwingSample scaled_eval(const SwingPolynomials& poly, double t, double t_res,
                        double T) {
    if (!(t >= 0.0) || !(t + t_res > 0.0)) {
        throw ConfigError("scaled_eval needs t >= 0 and t + t_res > 0");
    }
    const double phi =
        std::clamp(T / (t + t_res), detail::kPhiMin, detail::kPhiMax);
    const double arg = std::clamp(phi * t, 0.0, T);
    SwingSample s = eval(poly, arg);
    s.v *= phi;
    s.a *= phi * phi;
    return s;
}

}  // namespace hylip
