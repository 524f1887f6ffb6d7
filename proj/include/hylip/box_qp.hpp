#pragma once

#include <Eigen/Dense>

namespace hylip {

/// Exact primal active-set solver for the strictly convex box QP
///
///   minimize   0.5 u' H u + g' u
///   subject to lo <= u <= hi  (componentwise)
///
/// H must be symmetric positive definite and the box non-empty
/// (throws QpInfeasible otherwise). Deterministic: ties are broken by
/// lowest index, so identical inputs give bit-identical solutions.
Eigen::VectorXd solve_box_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& g,
                             const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);

}  // namespace hylip
