#pragma once

#include <Eigen/Dense>
#include <string>

#include "hylip/model.hpp"

namespace hylip {

/// Input of the gain-selection program.
struct SynthesisProblem {
    ModelParams params;
    double alpha;                      ///< decay rate [1/s], must exceed omega
    double strictness_margin = 1e-7;   ///< strict LMIs are shifted by margin*trace(Q)
    /// Trust radius on the auxiliary variables in trace(Q) units. The
    /// optimal Q is unique, but the face of optimal (W, X, U, Y) is
    /// unbounded (the gains can be made arbitrarily aggressive without
    /// changing Q), so the solver caps them at this multiple of trace(Q);
    /// the default selects gains of the same order as an unstructured
    /// discrete-LQR design for this plant.
    double aux_trust_radius = 100.0;
};

/// Solution of the gain-selection program together with the Lyapunov data.
struct GainCertificate {
    Eigen::Matrix2d Q;       ///< ellipsoid shape matrix, positive definite
    Eigen::RowVector2d W;    ///< W = K Q
    double U = 0.0;
    double X = 0.0;
    Eigen::RowVector2d Y;
    Eigen::RowVector2d K;    ///< feedback gain, K = W Q^{-1}
    double L = 0.0;          ///< anti-windup gain, L = X/U < 1
    Eigen::Matrix2d P;       ///< Q^{-1}
    double alpha = 0.0;
};

/// Numerical re-check of every synthesis inequality.
struct VerificationReport {
    double margin_Q = 0.0;           ///< smallest eigenvalue of Q
    double margin_U = 0.0;           ///< value of U
    double margin_delta = 0.0;       ///< smallest eigenvalue of -Delta(Q)
    double margin_he = 0.0;          ///< smallest eigenvalue of the negated He block
    double margin_saturation = 0.0;  ///< smallest eigenvalue of [[u_bar^2, Y],[Y', Q]]
    double cond_Q = 0.0;
    double cond_he = 0.0;
    bool pass = false;               ///< all margins non-negative
};

/// Analytic witness output for alpha > omega.
struct FeasibilityWitness {
    Eigen::Matrix2d Q;
    Eigen::RowVector2d K;
    double k1_bar = 0.0;  ///< the positive intermediate gains of the construction
    double k2_bar = 0.0;
    Eigen::Matrix2d R;    ///< He((alpha I + A + B K) Q), diagonal by construction
};

/// The jump-decrease shaping matrix Delta(Q); homogeneous of degree 1 in Q.
Eigen::Matrix2d build_delta(const ModelParams& p, double alpha,
                            const Eigen::Matrix2d& Q);

/// The 3x3 symmetric He block of the synthesis program,
/// He([[alpha Q + A Q + B W, B(X-U)], [W + Y, X - U]]).
Eigen::Matrix3d build_he_block(const ModelParams& p, double alpha,
                               const Eigen::Matrix2d& Q,
                               const Eigen::RowVector2d& W, double X, double U,
                               const Eigen::RowVector2d& Y);

/// The saturation-region block [[u_bar^2, Y], [Y', Q]].
Eigen::Matrix3d build_saturation_block(const ModelParams& p,
                                       const Eigen::RowVector2d& Y,
                                       const Eigen::Matrix2d& Q);

/// Constructive feasible point for alpha > omega: q12 = -2 alpha q11, q22
/// grown until Delta(Q) < 0 and q22 > 4 alpha^2 q11, and the closed-form
/// gains making He((alpha I + A + B K) Q) exactly diagonal.
/// Throws AlphaTooSmall when alpha <= omega.
FeasibilityWitness feasibility_witness(const ModelParams& p, double alpha,
                                       double q11 = 1.0);

/// Completes a witness into a full certificate (X=0, Y=-KQ, small U, scaled
/// so the saturation block holds with headroom). Strictly feasible for the
/// synthesis program; also serves as the interior-point starting point.
GainCertificate certificate_from_witness(const ModelParams& p, double alpha,
                                         const FeasibilityWitness& w,
                                         double strictness_margin = 1e-7);

/// Solves  max log det Q  over the synthesis constraints (strict inequalities
/// shifted by strictness_margin * trace(Q)) and returns a verified
/// certificate. Throws Infeasible when alpha <= omega (the program is
/// provably infeasible there) and SolverFailure on numerical failure.
GainCertificate synthesize(const SynthesisProblem& prob);

/// Recomputes the definiteness margin of every block from the raw data.
VerificationReport verify(const ModelParams& p, const GainCertificate& cert);

/// Certificate JSON interchange (fields Q, P, K, L, alpha, margins,
/// solver_status); the format consumed by the simulator front end.
std::string certificate_to_json(const ModelParams& p, const GainCertificate& cert,
                                const std::string& solver_status = "optimal");
GainCertificate certificate_from_json(const std::string& text);

std::string report_to_json(const VerificationReport& rep);

}  // namespace hylip
