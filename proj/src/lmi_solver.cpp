#include "hylip/lmi_solver.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "hylip/errors.hpp"

namespace hylip {

namespace {

// log det of a symmetric PD matrix via Cholesky; NaN if not PD.
double log_det_pd(const Eigen::MatrixXd& M) {
    Eigen::LLT<Eigen::MatrixXd> llt(M);
    if (llt.info() != Eigen::Success) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

struct BarrierEval {
    double value = 0.0;
    bool feasible = false;
};

// f_t(theta) = -t log det Obj - sum_i log det G_i, +inf outside the interior.
BarrierEval eval_barrier(double t, const AffineBlock& obj,
                         const std::vector<AffineBlock>& cons,
                         const Eigen::VectorXd& theta) {
    BarrierEval out;
    const double lo = log_det_pd(obj.eval(theta));
    if (std::isnan(lo)) return out;
    double v = -t * lo;
    for (const auto& g : cons) {
        const double lg = log_det_pd(g.eval(theta));
        if (std::isnan(lg)) return out;
        v -= lg;
    }
    out.value = v;
    out.feasible = true;
    return out;
}

// Adds the gradient/Hessian contribution of -w * log det G(theta).
void accumulate(const AffineBlock& block, const Eigen::VectorXd& theta,
                double weight, Eigen::VectorXd& grad, Eigen::MatrixXd& hess) {
    const int n = static_cast<int>(theta.size());
    const Eigen::MatrixXd G = block.eval(theta);
    Eigen::LLT<Eigen::MatrixXd> llt(G);
    if (llt.info() != Eigen::Success) {
        throw SolverFailure("barrier evaluated at an infeasible point");
    }
    const Eigen::MatrixXd Ginv =
        llt.solve(Eigen::MatrixXd::Identity(G.rows(), G.cols()));
    std::vector<Eigen::MatrixXd> M(n);
    for (int k = 0; k < n; ++k) {
        M[k] = Ginv * block.coeffs[k];
        grad(k) -= weight * M[k].trace();
    }
    for (int k = 0; k < n; ++k) {
        for (int l = k; l < n; ++l) {
            const double h = weight * (M[k] * M[l]).trace();
            hess(k, l) += h;
            if (l != k) hess(l, k) += h;
        }
    }
}

}  // namespace

Eigen::MatrixXd AffineBlock::eval(const Eigen::VectorXd& theta) const {
    Eigen::MatrixXd G = constant;
    for (int k = 0; k < theta.size(); ++k) {
        if (theta(k) != 0.0) G += theta(k) * coeffs[k];
    }
    return G;
}

MaxDetResult solve_maxdet(const AffineBlock& objective,
                          const std::vector<AffineBlock>& constraints,
                          const Eigen::VectorXd& theta0,
                          const MaxDetOptions& opts) {
    const int n = static_cast<int>(theta0.size());
    double cone_dim = objective.dim();
    for (const auto& g : constraints) cone_dim += g.dim();

    // Work in variable units set by the initial point; the decision entries
    // can span many orders of magnitude and an unscaled barrier Hessian is
    // numerically rank deficient.
    const double ref = std::max(theta0.cwiseAbs().maxCoeff(), 1e-300);
    Eigen::VectorXd scale(n);
    for (int k = 0; k < n; ++k) {
        scale(k) = std::max(std::abs(theta0(k)), 1e-6 * ref);
    }
    AffineBlock obj_s = objective;
    std::vector<AffineBlock> cons_s = constraints;
    for (int k = 0; k < n; ++k) {
        obj_s.coeffs[k] *= scale(k);
        for (auto& g : cons_s) g.coeffs[k] *= scale(k);
    }
    const AffineBlock& obj = obj_s;
    const std::vector<AffineBlock>& cons = cons_s;

    Eigen::VectorXd theta = theta0.cwiseQuotient(scale);
    if (!eval_barrier(opts.t_init, obj, cons, theta).feasible) {
        throw SolverFailure("maxdet initial point is not strictly feasible");
    }

    MaxDetResult res;
    double t = opts.t_init;
    bool last_stage = false;
    bool fp_limited = false;
    while (true) {
        // Damped Newton centering (the barrier is self-concordant, so the
        // step 1/(1+lambda) needs no merit-function line search; a
        // feasibility backtrack guards against rounding at the boundary).
        double best_dec2 = std::numeric_limits<double>::infinity();
        double final_dec2 = 0.0;
        int stalled = 0;
        for (int it = 0;; ++it) {
            if (it >= opts.max_newton_per_stage) {
                throw SolverFailure("maxdet centering did not converge");
            }
            Eigen::VectorXd grad = Eigen::VectorXd::Zero(n);
            Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(n, n);
            accumulate(obj, theta, t, grad, hess);
            for (const auto& g : cons) accumulate(g, theta, 1.0, grad, hess);

            Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
            Eigen::VectorXd step = ldlt.solve(-grad);
            if (ldlt.info() != Eigen::Success || !step.allFinite()) {
                // Ridge fallback for a numerically semidefinite Hessian.
                const double ridge = 1e-12 * hess.trace() / n + 1e-300;
                ldlt.compute(hess +
                             ridge * Eigen::MatrixXd::Identity(n, n));
                step = ldlt.solve(-grad);
                if (!step.allFinite()) {
                    throw SolverFailure("maxdet Hessian factorization failed");
                }
            }
            const double dec2 = -grad.dot(step);
            ++res.newton_iterations;
            if (opts.verbose) {
                std::fprintf(stderr, "[maxdet] t=%8.1e it=%3d dec2=%10.3e\n", t,
                             it, dec2);
            }
            final_dec2 = dec2;
            if (!(dec2 > 0.0)) break;  // at (or numerically past) the center
            if (0.5 * dec2 < opts.newton_tol) break;
            // Rounding floor: inside the quadratic phase the decrement should
            // fall fast; once it merely bounces around, fp noise dominates.
            if (dec2 < 1e-4) {
                if (dec2 >= 0.5 * best_dec2) {
                    if (++stalled >= 4) break;
                } else {
                    stalled = 0;
                }
            }
            best_dec2 = std::min(best_dec2, dec2);

            const double lambda = std::sqrt(dec2);
            double s = lambda > 0.25 ? 1.0 / (1.0 + lambda) : 1.0;
            while (s > 1e-18 &&
                   !eval_barrier(t, obj, cons, theta + s * step).feasible) {
                s *= 0.5;
            }
            const double move = s * step.cwiseAbs().maxCoeff();
            if (s <= 1e-18 ||
                move <= 1e-16 * std::max(1.0, theta.cwiseAbs().maxCoeff())) {
                fp_limited = true;  // theta no longer representable any closer
                break;
            }
            theta += s * step;
        }
        // A stage that cannot be centered to lambda < 1/2 means double
        // precision has run out for larger t; keep the current iterate.
        if (fp_limited || final_dec2 > 0.25) break;
        if (last_stage) break;
        t *= opts.t_mult;
        if (cone_dim / t < opts.gap_tol) last_stage = true;
    }

    res.theta = theta.cwiseProduct(scale);
    res.log_det_objective = log_det_pd(objective.eval(res.theta));
    res.status = "optimal";
    return res;
}

}  // namespace hylip
