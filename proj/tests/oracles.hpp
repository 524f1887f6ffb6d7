#pragma once

// Independent numerical oracles used by the test suites. Everything here is
// deliberately generic (series expm, bisection, brute-force enumeration,
// quadrature, plain RK4) and shares no code with the library paths it checks.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace oracle {

// Scaling-and-squaring Taylor-series matrix exponential.
inline Eigen::MatrixXd expm(const Eigen::MatrixXd& M) {
    const double nrm = M.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    double scale = 1.0;
    while (nrm * scale > 0.5) {
        scale *= 0.5;
        ++squarings;
    }
    const Eigen::MatrixXd A = M * scale;
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(M.rows(), M.cols());
    Eigen::MatrixXd sum = term;
    for (int k = 1; k <= 30; ++k) {
        term = term * A / static_cast<double>(k);
        sum += term;
        if (term.cwiseAbs().maxCoeff() < 1e-300) break;
    }
    for (int s = 0; s < squarings; ++s) sum = sum * sum;
    return sum;
}

inline double bisect(const std::function<double(double)>& f, double lo,
                     double hi, double tol = 1e-15, int iters = 200) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo * fhi > 0.0) {
        throw std::runtime_error("bisect: no sign change in bracket");
    }
    for (int i = 0; i < iters && hi - lo > tol; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if (flo * fm < 0.0) {
            hi = mid;
            fhi = fm;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

// Peak speed from the periodicity condition e^{AT}(-r, v) = (r, v), solved
// on the first component with the series expm; independent of the
// closed-form relations under test.
inline double v_bar_by_bisection(double r_bar, double T, double omega) {
    Eigen::Matrix2d A;
    A << 0.0, 1.0, omega * omega, 0.0;
    const Eigen::MatrixXd E = expm(A * T);
    auto f = [&](double v) {
        const Eigen::Vector2d x0(-r_bar, v);
        return (E * x0)(0) - r_bar;
    };
    double lo = omega * r_bar * 1.0000001;  // below: f < 0 for small v
    double hi = omega * r_bar * 1e6;
    return bisect(f, lo, hi, 1e-16 * hi, 400);
}

// Positive root of (vw - r) s^2 - 2 (eps - r) s - (r + vw) = 0 by bisection.
inline double eta_by_bisection(double r_bar, double vw, double eps_p) {
    auto f = [&](double s) {
        return (vw - r_bar) * s * s - 2.0 * (eps_p - r_bar) * s - (r_bar + vw);
    };
    double lo = 0.0;  // f(0) = -(r + vw) < 0
    double hi = 2.0;
    while (f(hi) < 0.0) hi *= 2.0;
    return bisect(f, lo, hi, 1e-18 * hi, 400);
}

// Plain fixed-step RK4 for small ODE systems.
template <typename Deriv>
Eigen::VectorXd rk4(const Deriv& f, Eigen::VectorXd y, double t0, double t1,
                    int steps) {
    const double h = (t1 - t0) / steps;
    double t = t0;
    for (int i = 0; i < steps; ++i) {
        const Eigen::VectorXd k1 = f(t, y);
        const Eigen::VectorXd k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
        const Eigen::VectorXd k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
        const Eigen::VectorXd k4 = f(t + h, y + h * k3);
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += h;
    }
    return y;
}

// Composite Simpson quadrature of a matrix/vector-valued integrand.
template <typename F>
auto simpson(const F& f, double a, double b, int n_half) -> decltype(f(a)) {
    const double h = (b - a) / (2 * n_half);
    auto acc = f(a);
    acc += f(b);
    for (int i = 1; i < 2 * n_half; ++i) {
        acc += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    return acc * (h / 3.0);
}

// Brute-force solution of min 0.5 u'Hu + g'u, lo <= u <= hi for n = 2 by
// enumerating all 3^2 activity patterns and solving the KKT equalities.
inline Eigen::Vector2d box_qp_enumerate(const Eigen::Matrix2d& H,
                                        const Eigen::Vector2d& g,
                                        const Eigen::Vector2d& lo,
                                        const Eigen::Vector2d& hi) {
    double best_obj = std::numeric_limits<double>::infinity();
    Eigen::Vector2d best = Eigen::Vector2d::Zero();
    const double tol = 1e-10;
    for (int s0 = 0; s0 < 3; ++s0) {
        for (int s1 = 0; s1 < 3; ++s1) {
            const int state[2] = {s0, s1};
            Eigen::Vector2d u;
            std::vector<int> free_idx;
            for (int i = 0; i < 2; ++i) {
                if (state[i] == 0) {
                    free_idx.push_back(i);
                } else {
                    u(i) = state[i] == 1 ? lo(i) : hi(i);
                }
            }
            if (free_idx.size() == 2) {
                u = H.ldlt().solve(-g);
            } else if (free_idx.size() == 1) {
                const int i = free_idx[0];
                const int a = 1 - i;
                u(i) = (-g(i) - H(i, a) * u(a)) / H(i, i);
            }
            bool feasible = true;
            for (int i = 0; i < 2; ++i) {
                if (u(i) < lo(i) - tol || u(i) > hi(i) + tol) feasible = false;
            }
            if (!feasible) continue;
            const double obj = 0.5 * u.dot(H * u) + g.dot(u);
            if (obj < best_obj) {
                best_obj = obj;
                best = u;
            }
        }
    }
    return best;
}

}  // namespace oracle
