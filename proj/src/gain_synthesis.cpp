#include "hylip/gain_synthesis.hpp"

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hylip/error_dynamics.hpp"
#include "hylip/lmi_solver.hpp"

namespace hylip {

namespace {

using json = nlohmann::json;

// Decision vector layout: [q11, q12, q22, w1, w2, X, U, y1, y2].
constexpr int kNumVars = 9;

struct Unpacked {
    Eigen::Matrix2d Q;
    Eigen::RowVector2d W;
    double X;
    double U;
    Eigen::RowVector2d Y;
};

Unpacked unpack(const Eigen::VectorXd& th) {
    Unpacked u;
    u.Q << th(0), th(1), th(1), th(2);
    u.W << th(3), th(4);
    u.X = th(5);
    u.U = th(6);
    u.Y << th(7), th(8);
    return u;
}

Eigen::VectorXd pack(const GainCertificate& c) {
    Eigen::VectorXd th(kNumVars);
    th << c.Q(0, 0), c.Q(0, 1), c.Q(1, 1), c.W(0), c.W(1), c.X, c.U, c.Y(0),
        c.Y(1);
    return th;
}

// The five synthesis blocks, strict ones shifted by margin*trace(Q)*I so the
// shifted program stays homogeneous in the decision variables (the
// saturation block is the only inhomogeneous one, as in the source program),
// followed by the auxiliary trust blocks |v| <= radius * trace(Q).
std::vector<Eigen::MatrixXd> margin_blocks(const ModelParams& p, double alpha,
                                           double margin, double trust_radius,
                                           const Eigen::VectorXd& th) {
    const Unpacked v = unpack(th);
    const double shift = margin * v.Q.trace();
    std::vector<Eigen::MatrixXd> out;
    out.reserve(11);
    out.resize(5);
    out[0] = v.Q - shift * Eigen::Matrix2d::Identity();
    out[1] = Eigen::MatrixXd::Constant(1, 1, v.U - shift);
    out[2] = -build_delta(p, alpha, v.Q) - shift * Eigen::Matrix2d::Identity();
    out[3] = -build_he_block(p, alpha, v.Q, v.W, v.X, v.U, v.Y) -
             shift * Eigen::Matrix3d::Identity();
    out[4] = build_saturation_block(p, v.Y, v.Q);
    const double rho = trust_radius * v.Q.trace();
    for (int k = 3; k < kNumVars; ++k) {
        Eigen::Matrix2d trust;
        trust << rho, th(k), th(k), rho;
        out.push_back(trust);
    }
    return out;
}

// Extracts the affine structure of the blocks by basis evaluation; exact
// because every block is affine in the decision vector.
std::vector<AffineBlock> affine_constraints(const ModelParams& p, double alpha,
                                            double margin, double trust_radius) {
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(kNumVars);
    const auto base = margin_blocks(p, alpha, margin, trust_radius, zero);
    std::vector<AffineBlock> blocks(base.size());
    for (size_t i = 0; i < base.size(); ++i) {
        blocks[i].constant = base[i];
        blocks[i].coeffs.resize(kNumVars);
    }
    for (int k = 0; k < kNumVars; ++k) {
        Eigen::VectorXd ek = zero;
        ek(k) = 1.0;
        const auto at_ek = margin_blocks(p, alpha, margin, trust_radius, ek);
        for (size_t i = 0; i < base.size(); ++i) {
            blocks[i].coeffs[k] = at_ek[i] - base[i];
        }
    }
    return blocks;
}

AffineBlock affine_objective() {
    AffineBlock obj;
    obj.constant = Eigen::Matrix2d::Zero();
    obj.coeffs.assign(kNumVars, Eigen::MatrixXd::Zero(2, 2));
    obj.coeffs[0](0, 0) = 1.0;
    obj.coeffs[1](0, 1) = obj.coeffs[1](1, 0) = 1.0;
    obj.coeffs[2](1, 1) = 1.0;
    return obj;
}

double min_eig(const Eigen::MatrixXd& M) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    return es.eigenvalues().minCoeff();
}

GainCertificate finish_certificate(const Unpacked& v, double alpha) {
    GainCertificate c;
    c.Q = v.Q;
    c.W = v.W;
    c.X = v.X;
    c.U = v.U;
    c.Y = v.Y;
    c.alpha = alpha;
    c.P = v.Q.inverse();
    c.K = v.W * c.P;
    c.L = v.X / v.U;
    return c;
}

}  // namespace

Eigen::Matrix2d build_delta(const ModelParams& p, double alpha,
                            const Eigen::Matrix2d& Q) {
    const double w = p.omega;
    const double T = p.T;
    const double x = xi(p);
    const double q11 = Q(0, 0), q12 = Q(0, 1), q22 = Q(1, 1);
    const double d11 = (std::exp(2.0 * (w - alpha) * T) - 1.0) * q22 +
                       4.0 * std::exp(-2.0 * alpha * T) * x *
                           (x * q11 - std::exp(w * T) * q12);
    const double d12 = 2.0 * std::exp(-2.0 * alpha * T) * x * q11 +
                       (std::exp(-(w + 2.0 * alpha) * T) - 1.0) * q12;
    const double d22 = (std::exp(-2.0 * alpha * T) - 1.0) * q11;
    Eigen::Matrix2d D;
    D << d11, d12, d12, d22;
    return D;
}

Eigen::Matrix3d build_he_block(const ModelParams& p, double alpha,
                               const Eigen::Matrix2d& Q,
                               const Eigen::RowVector2d& W, double X, double U,
                               const Eigen::RowVector2d& Y) {
    const FlowMatrices fm = flow_matrices(p);
    Eigen::Matrix3d M;
    M.topLeftCorner<2, 2>() = alpha * Q + fm.A * Q + fm.B * W;
    M.topRightCorner<2, 1>() = fm.B * (X - U);
    M.bottomLeftCorner<1, 2>() = W + Y;
    M(2, 2) = X - U;
    return M + M.transpose();
}

Eigen::Matrix3d build_saturation_block(const ModelParams& p,
                                       const Eigen::RowVector2d& Y,
                                       const Eigen::Matrix2d& Q) {
    Eigen::Matrix3d S;
    S(0, 0) = p.u_bar * p.u_bar;
    S.block<1, 2>(0, 1) = Y;
    S.block<2, 1>(1, 0) = Y.transpose();
    S.bottomRightCorner<2, 2>() = Q;
    return S;
}

FeasibilityWitness feasibility_witness(const ModelParams& p, double alpha,
                                       double q11) {
    if (!(alpha > p.omega)) {
        throw AlphaTooSmall("witness construction requires alpha > omega");
    }
    if (!(q11 > 0.0)) {
        throw SolverFailure("witness requires q11 > 0");
    }
    const double q12 = -2.0 * alpha * q11;
    double q22 = 8.0 * alpha * alpha * q11;
    for (int i = 0;; ++i) {
        Eigen::Matrix2d Q;
        Q << q11, q12, q12, q22;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(
            build_delta(p, alpha, Q));
        if (es.eigenvalues().maxCoeff() < 0.0) break;
        if (i > 1000) {
            throw SolverFailure("witness doubling search failed to close Delta(Q)");
        }
        q22 *= 2.0;
    }

    FeasibilityWitness w;
    w.Q << q11, q12, q12, q22;
    const double denom = q22 - 4.0 * alpha * alpha * q11;
    w.k1_bar = q22 / q11 + 4.0 * alpha * alpha * q22 / denom;
    w.k2_bar = 2.0 * alpha + 2.0 * alpha * q22 / denom;
    const double w2 = p.omega * p.omega;
    w.K << (w.k1_bar + w2) / w2, w.k2_bar / w2;

    const FlowMatrices fm = flow_matrices(p);
    const Eigen::Matrix2d M =
        (alpha * Eigen::Matrix2d::Identity() + fm.A + fm.B * w.K) * w.Q;
    w.R = M + M.transpose();
    return w;
}

GainCertificate certificate_from_witness(const ModelParams& p, double alpha,
                                         const FeasibilityWitness& w,
                                         double strictness_margin) {
    Unpacked v;
    v.Q = w.Q;
    // Extra headroom over the bare witness so the interior-point start is
    // comfortably inside every shifted inequality.
    v.Q(1, 1) *= 4.0;
    const double denom = v.Q(1, 1) - 4.0 * alpha * alpha * v.Q(0, 0);
    const double k1b = v.Q(1, 1) / v.Q(0, 0) +
                       4.0 * alpha * alpha * v.Q(1, 1) / denom;
    const double k2b = 2.0 * alpha + 2.0 * alpha * v.Q(1, 1) / denom;
    const double w2 = p.omega * p.omega;
    Eigen::RowVector2d K;
    K << (k1b + w2) / w2, k2b / w2;

    v.W = K * v.Q;
    v.X = 0.0;
    v.U = alpha * v.Q(1, 1) / (w2 * w2);  // half the Schur bound 4a q22 / w^4
    v.Y = -v.W;

    const double kqk = (K * v.Q * K.transpose())(0);
    const double s = 0.5 * p.u_bar * p.u_bar / kqk;
    v.Q *= s;
    v.W *= s;
    v.U *= s;
    v.Y *= s;

    GainCertificate cert = finish_certificate(v, alpha);
    const auto blocks =
        margin_blocks(p, alpha, strictness_margin, 1e4, pack(cert));
    for (const auto& b : blocks) {
        if (!(min_eig(b) > 0.0)) {
            throw SolverFailure(
                "witness-based start violates a shifted inequality; "
                "reduce strictness_margin");
        }
    }
    return cert;
}

GainCertificate synthesize(const SynthesisProblem& prob) {
    const ModelParams& p = prob.params;
    if (!(prob.alpha > 0.0) || !(prob.strictness_margin > 0.0)) {
        throw SolverFailure("alpha and strictness_margin must be positive");
    }
    if (!(prob.alpha > p.omega)) {
        std::ostringstream os;
        os << "synthesis is infeasible for alpha = " << prob.alpha
           << " <= omega = " << p.omega;
        throw Infeasible(os.str());
    }

    const FeasibilityWitness w = feasibility_witness(p, prob.alpha);
    const GainCertificate start =
        certificate_from_witness(p, prob.alpha, w, prob.strictness_margin);

    const MaxDetResult res = solve_maxdet(
        affine_objective(),
        affine_constraints(p, prob.alpha, prob.strictness_margin,
                           prob.aux_trust_radius),
        pack(start));

    // Interior backoff: the maximization drives the saturation block exactly
    // to the boundary; shrinking the whole solution by 1e-6 restores a
    // robustly positive margin there (the Schur slack becomes >= 1e-6 u_bar^2)
    // at a negligible objective cost, and the homogeneous blocks keep theirs.
    const Eigen::VectorXd theta = (1.0 - 1e-6) * res.theta;

    GainCertificate cert = finish_certificate(unpack(theta), prob.alpha);
    const VerificationReport rep = verify(p, cert);
    if (!rep.pass) {
        std::ostringstream os;
        os << "synthesized certificate failed verification; margins: Q="
           << rep.margin_Q << " U=" << rep.margin_U << " delta=" << rep.margin_delta
           << " he=" << rep.margin_he << " sat=" << rep.margin_saturation;
        throw SolverFailure(os.str());
    }
    return cert;
}

VerificationReport verify(const ModelParams& p, const GainCertificate& cert) {
    VerificationReport rep;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> esQ(cert.Q);
    rep.margin_Q = esQ.eigenvalues().minCoeff();
    rep.cond_Q = esQ.eigenvalues().maxCoeff() / esQ.eigenvalues().minCoeff();
    rep.margin_U = cert.U;
    rep.margin_delta = min_eig(-build_delta(p, cert.alpha, cert.Q));
    const Eigen::Matrix3d he =
        build_he_block(p, cert.alpha, cert.Q, cert.W, cert.X, cert.U, cert.Y);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> esH(-he);
    rep.margin_he = esH.eigenvalues().minCoeff();
    rep.cond_he =
        esH.eigenvalues().cwiseAbs().maxCoeff() /
        std::max(esH.eigenvalues().cwiseAbs().minCoeff(), 1e-300);
    rep.margin_saturation = min_eig(build_saturation_block(p, cert.Y, cert.Q));
    rep.pass = rep.margin_Q >= 0.0 && rep.margin_U >= 0.0 &&
               rep.margin_delta >= 0.0 && rep.margin_he >= 0.0 &&
               rep.margin_saturation >= 0.0;
    return rep;
}

std::string certificate_to_json(const ModelParams& p, const GainCertificate& cert,
                                const std::string& solver_status) {
    const VerificationReport rep = verify(p, cert);
    json j;
    j["Q"] = {{cert.Q(0, 0), cert.Q(0, 1)}, {cert.Q(1, 0), cert.Q(1, 1)}};
    j["P"] = {{cert.P(0, 0), cert.P(0, 1)}, {cert.P(1, 0), cert.P(1, 1)}};
    j["K"] = {cert.K(0), cert.K(1)};
    j["L"] = cert.L;
    j["alpha"] = cert.alpha;
    j["margins"] = {{"Q", rep.margin_Q},
                    {"U", rep.margin_U},
                    {"delta", rep.margin_delta},
                    {"he_block", rep.margin_he},
                    {"saturation", rep.margin_saturation},
                    {"cond_Q", rep.cond_Q},
                    {"cond_he", rep.cond_he},
                    {"pass", rep.pass}};
    j["solver_status"] = solver_status;
    return j.dump(2);
}

GainCertificate certificate_from_json(const std::string& text) {
    const json j = json::parse(text);
    GainCertificate c;
    c.Q << j.at("Q")[0][0].get<double>(), j.at("Q")[0][1].get<double>(),
        j.at("Q")[1][0].get<double>(), j.at("Q")[1][1].get<double>();
    c.P << j.at("P")[0][0].get<double>(), j.at("P")[0][1].get<double>(),
        j.at("P")[1][0].get<double>(), j.at("P")[1][1].get<double>();
    c.K << j.at("K")[0].get<double>(), j.at("K")[1].get<double>();
    c.L = j.at("L").get<double>();
    c.alpha = j.at("alpha").get<double>();
    // The interchange format carries only the gains and Lyapunov data; the
    // auxiliary program variables are reconstructed to satisfy the
    // certificate identities (K = W Q^{-1}, L = X/U).
    c.W = c.K * c.Q;
    c.U = 1.0;
    c.X = c.L;
    c.Y = -c.W;
    return c;
}

std::string report_to_json(const VerificationReport& rep) {
    json j;
    j["margin_Q"] = rep.margin_Q;
    j["margin_U"] = rep.margin_U;
    j["margin_delta"] = rep.margin_delta;
    j["margin_he"] = rep.margin_he;
    j["margin_saturation"] = rep.margin_saturation;
    j["cond_Q"] = rep.cond_Q;
    j["cond_he"] = rep.cond_he;
    j["pass"] = rep.pass;
    return j.dump(2);
}

}  // namespace hylip
