#include "hylip/box_qp.hpp"

#include <vector>

#include "hylip/errors.hpp"

namespace hylip {

namespace {
enum class Bound { Free, AtLo, AtHi };
}

Eigen::VectorXd solve_box_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& g,
                             const Eigen::VectorXd& lo,
                             const Eigen::VectorXd& hi) {
    const int n = static_cast<int>(g.size());
    for (int i = 0; i < n; ++i) {
        if (lo(i) > hi(i)) {
            throw QpInfeasible("box QP: empty box");
        }
    }

    std::vector<Bound> state(n, Bound::Free);
    Eigen::VectorXd u = 0.5 * (lo + hi);
    for (int i = 0; i < n; ++i) {
        if (lo(i) == hi(i)) state[i] = Bound::AtLo;  // pinned variable
    }

    const double lambda_tol = 1e-11 * (1.0 + g.cwiseAbs().maxCoeff());
    const int max_iter = 50 * (n + 2);

    for (int iter = 0; iter < max_iter; ++iter) {
        std::vector<int> free_idx;
        free_idx.reserve(n);
        for (int i = 0; i < n; ++i) {
            if (state[i] == Bound::Free) free_idx.push_back(i);
        }

        // Newton step on the free block, active variables pinned.
        Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
        if (!free_idx.empty()) {
            const int m = static_cast<int>(free_idx.size());
            Eigen::MatrixXd Hff(m, m);
            Eigen::VectorXd rhs(m);
            const Eigen::VectorXd grad = H * u + g;
            for (int a = 0; a < m; ++a) {
                rhs(a) = -grad(free_idx[a]);
                for (int b = 0; b < m; ++b) {
                    Hff(a, b) = H(free_idx[a], free_idx[b]);
                }
            }
            Eigen::LLT<Eigen::MatrixXd> llt(Hff);
            if (llt.info() != Eigen::Success) {
                throw SolverFailure("box QP: Hessian block not positive definite");
            }
            const Eigen::VectorXd df = llt.solve(rhs);
            for (int a = 0; a < m; ++a) d(free_idx[a]) = df(a);
        }

        if (d.lpNorm<Eigen::Infinity>() > 0.0) {
            // Step to the nearest blocking bound.
            double alpha = 1.0;
            int blocking = -1;
            Bound blocking_side = Bound::Free;
            for (int i : free_idx) {
                if (d(i) > 0.0) {
                    const double a = (hi(i) - u(i)) / d(i);
                    if (a < alpha) {
                        alpha = a;
                        blocking = i;
                        blocking_side = Bound::AtHi;
                    }
                } else if (d(i) < 0.0) {
                    const double a = (lo(i) - u(i)) / d(i);
                    if (a < alpha) {
                        alpha = a;
                        blocking = i;
                        blocking_side = Bound::AtLo;
                    }
                }
            }
            u += alpha * d;
            if (blocking >= 0) {
                state[blocking] = blocking_side;
                u(blocking) = blocking_side == Bound::AtHi ? hi(blocking) : lo(blocking);
                continue;
            }
            // Full step taken; fall through to the multiplier check.
        }

        // KKT multiplier check on the active bounds; release the worst one.
        const Eigen::VectorXd grad = H * u + g;
        int worst = -1;
        double worst_val = -lambda_tol;
        for (int i = 0; i < n; ++i) {
            if (lo(i) == hi(i)) continue;
            if (state[i] == Bound::AtLo && grad(i) < worst_val) {
                worst_val = grad(i);
                worst = i;
            } else if (state[i] == Bound::AtHi && -grad(i) < worst_val) {
                worst_val = -grad(i);
                worst = i;
            }
        }
        if (worst < 0) {
            return u;  // KKT satisfied
        }
        state[worst] = Bound::Free;
    }
    throw SolverFailure("box QP: active-set iteration cap exceeded");
}

}  // namespace hylip
