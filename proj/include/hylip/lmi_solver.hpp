#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace hylip {

/// Symmetric-matrix valued affine function of the decision vector:
/// G(theta) = constant + sum_k theta_k * coeffs[k].
struct AffineBlock {
    Eigen::MatrixXd constant;
    std::vector<Eigen::MatrixXd> coeffs;

    Eigen::MatrixXd eval(const Eigen::VectorXd& theta) const;
    int dim() const { return static_cast<int>(constant.rows()); }
};

struct MaxDetOptions {
    double t_init = 1.0;
    double t_mult = 10.0;
    double gap_tol = 1e-8;        ///< stop once (total cone dim)/t < gap_tol
    double newton_tol = 1e-12;    ///< centering stops at decrement^2/2 below this
    int max_newton_per_stage = 400;
    bool verbose = false;
};

struct MaxDetResult {
    Eigen::VectorXd theta;
    double log_det_objective = 0.0;
    int newton_iterations = 0;
    std::string status;  ///< "optimal" on success
};

/// Path-following barrier method for the maxdet problem
///
///   maximize log det( objective(theta) )
///   subject to constraints[i](theta) positive semidefinite for all i,
///
/// with every block affine in theta. theta0 must be strictly feasible
/// (all constraint blocks and the objective block positive definite).
/// Deterministic: identical inputs give identical iterates.
///
/// Throws SolverFailure when theta0 is infeasible or Newton stalls.
MaxDetResult solve_maxdet(const AffineBlock& objective,
                          const std::vector<AffineBlock>& constraints,
                          const Eigen::VectorXd& theta0,
                          const MaxDetOptions& opts = {});

}  // namespace hylip
