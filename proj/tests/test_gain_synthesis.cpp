#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "hylip/error_dynamics.hpp"
#include "hylip/gain_synthesis.hpp"
#include "hylip/lmi_solver.hpp"
#include "oracles.hpp"

using namespace hylip;

namespace {
ModelParams sec5_params() {
    return complete_params({.r_bar = 0.15, .T = 1.2}, std::sqrt(9.81 / 0.58),
                           0.075);
}

const GainCertificate& sec5_certificate() {
    static const GainCertificate cert = synthesize({sec5_params(), 4.2, 1e-7});
    return cert;
}

GainCertificate scaled(const GainCertificate& c, double s) {
    GainCertificate out = c;
    out.Q *= s;
    out.W *= s;
    out.X *= s;
    out.U *= s;
    out.Y *= s;
    out.P = out.Q.inverse();
    out.K = out.W * out.P;
    out.L = out.X / out.U;
    return out;
}
}  // namespace

TEST_CASE("maxdet solver sanity on a separable problem") {
    // maximize log det diag(x, y) s.t. x <= 2, y <= 3 -> (2, 3).
    AffineBlock obj;
    obj.constant = Eigen::MatrixXd::Zero(2, 2);
    obj.coeffs.assign(2, Eigen::MatrixXd::Zero(2, 2));
    obj.coeffs[0](0, 0) = 1.0;
    obj.coeffs[1](1, 1) = 1.0;
    std::vector<AffineBlock> cons(2);
    cons[0].constant = Eigen::MatrixXd::Constant(1, 1, 2.0);
    cons[0].coeffs = {Eigen::MatrixXd::Constant(1, 1, -1.0),
                      Eigen::MatrixXd::Zero(1, 1)};
    cons[1].constant = Eigen::MatrixXd::Constant(1, 1, 3.0);
    cons[1].coeffs = {Eigen::MatrixXd::Zero(1, 1),
                      Eigen::MatrixXd::Constant(1, 1, -1.0)};
    Eigen::VectorXd th0(2);
    th0 << 1.0, 1.0;
    const MaxDetResult res = solve_maxdet(obj, cons, th0);
    CHECK(res.theta(0) == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(res.theta(1) == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("build_delta: zero at zero, homogeneous, sign structure") {
    const ModelParams p = sec5_params();
    CHECK(build_delta(p, 4.2, Eigen::Matrix2d::Zero()).norm() == 0.0);

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        Eigen::Matrix2d Q;
        const double a = dist(rng), b = dist(rng), c = dist(rng);
        Q << a, b, b, c;
        const Eigen::Matrix2d lhs = build_delta(p, 4.2, 2.0 * Q);
        const Eigen::Matrix2d rhs = 2.0 * build_delta(p, 4.2, Q);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() <=
              1e-12 * (1.0 + rhs.cwiseAbs().maxCoeff()));
    }

    // For alpha <= omega, any positive definite Q with q12 < 0 gives
    // Delta_11 >= 0 (all three addends are non-negative).
    std::uniform_real_distribution<double> pos(0.1, 5.0);
    for (double alpha : {0.5 * p.omega, p.omega}) {
        for (int i = 0; i < 50; ++i) {
            const double q11 = pos(rng), q22 = pos(rng);
            const double q12 = -0.9 * std::sqrt(q11 * q22);
            Eigen::Matrix2d Q;
            Q << q11, q12, q12, q22;
            CHECK(build_delta(p, alpha, Q)(0, 0) >= 0.0);
        }
    }
}

TEST_CASE("feasibility witness: diagonal R, positive intermediate gains") {
    const ModelParams p = sec5_params();
    const FeasibilityWitness w = feasibility_witness(p, 4.2);
    CHECK(w.R(0, 0) < 0.0);
    CHECK(w.R(1, 1) < 0.0);
    Eigen::Matrix2d expect = Eigen::Matrix2d::Zero();
    expect(0, 0) = -2.0 * 4.2 * w.Q(0, 0);
    expect(1, 1) = -2.0 * 4.2 * w.Q(1, 1);
    CHECK((w.R - expect).cwiseAbs().maxCoeff() < 1e-8);

    const FeasibilityWitness w1 = feasibility_witness(p, 4.2, 1.0);
    CHECK(w1.k1_bar > 0.0);
    CHECK(w1.k2_bar > 0.0);

    CHECK_THROWS_AS(feasibility_witness(p, p.omega), AlphaTooSmall);
}

TEST_CASE("feasibility witness holds for 100 random alpha > omega") {
    const ModelParams p = sec5_params();
    std::mt19937 rng(20240915);
    std::uniform_real_distribution<double> dist(1.0001, 3.0);
    for (int i = 0; i < 100; ++i) {
        const double alpha = dist(rng) * p.omega;
        const FeasibilityWitness w = feasibility_witness(p, alpha);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(
            build_delta(p, alpha, w.Q));
        CHECK(es.eigenvalues().maxCoeff() < 0.0);
        Eigen::Matrix2d expect = Eigen::Matrix2d::Zero();
        expect(0, 0) = -2.0 * alpha * w.Q(0, 0);
        expect(1, 1) = -2.0 * alpha * w.Q(1, 1);
        CHECK((w.R - expect).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("synthesize on the reference configuration") {
    const ModelParams p = sec5_params();
    const GainCertificate& c = sec5_certificate();

    CHECK(c.K(0) > 0.0);
    CHECK(c.K(1) > 0.0);
    CHECK(c.L > 0.0);
    CHECK(c.L < 1.0);

    // Certificate identities.
    CHECK(((c.W * c.Q.inverse()) - c.K).cwiseAbs().maxCoeff() <
          1e-9 * c.K.cwiseAbs().maxCoeff());
    CHECK((c.P * c.Q - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() <
          1e-9);

    const VerificationReport rep = verify(p, c);
    CHECK(rep.pass);
    CHECK(rep.margin_Q > 0.0);
    CHECK(rep.margin_U > 0.0);
    CHECK(rep.margin_delta > 0.0);
    CHECK(rep.margin_he > 0.0);
    CHECK(rep.margin_saturation > 0.0);
    CHECK(rep.cond_Q > 1.0);

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(
        build_delta(p, c.alpha, c.Q));
    CHECK(es.eigenvalues().maxCoeff() < 0.0);

    // Determinism across repeated solves.
    const GainCertificate c2 = synthesize({p, 4.2, 1e-7});
    CHECK((c2.Q - c.Q).cwiseAbs().maxCoeff() <=
          1e-6 * c.Q.cwiseAbs().maxCoeff());
}

TEST_CASE("Proposition 2 boundary: feasibility iff alpha > omega") {
    const ModelParams p = sec5_params();
    for (double f : {0.5, 0.9, 1.0}) {
        CHECK_THROWS_AS(synthesize({p, f * p.omega, 1e-7}), Infeasible);
    }
    for (double f : {1.02, 1.1, 2.0}) {
        const GainCertificate c = synthesize({p, f * p.omega, 1e-7});
        CHECK(verify(p, c).pass);
        CHECK(c.L < 1.0);
    }
}

TEST_CASE("verify: scaling all variables flips only the saturation block") {
    const ModelParams p = sec5_params();
    const GainCertificate& c = sec5_certificate();
    const VerificationReport base = verify(p, c);

    for (double s : {0.5, 2.0, 10.0}) {
        const VerificationReport rep = verify(p, scaled(c, s));
        CHECK((rep.margin_Q > 0.0) == (base.margin_Q > 0.0));
        CHECK((rep.margin_U > 0.0) == (base.margin_U > 0.0));
        CHECK((rep.margin_delta > 0.0) == (base.margin_delta > 0.0));
        CHECK((rep.margin_he > 0.0) == (base.margin_he > 0.0));
    }
    // The saturation block is not homogeneous: inflating by 10 breaks it
    // (the maximization leaves it essentially binding) and nothing else.
    const VerificationReport up = verify(p, scaled(c, 10.0));
    CHECK(up.margin_saturation < 0.0);
    CHECK(up.margin_Q > 0.0);
    CHECK(up.margin_delta > 0.0);
    CHECK(up.margin_he > 0.0);
    CHECK_FALSE(up.pass);
}

TEST_CASE("witness completed with X=0, Y=-KQ, small U verifies") {
    const ModelParams p = sec5_params();
    const FeasibilityWitness w = feasibility_witness(p, 4.2);
    const GainCertificate c = certificate_from_witness(p, 4.2, w);
    CHECK(c.X == 0.0);
    CHECK((c.Y + c.W).cwiseAbs().maxCoeff() == 0.0);
    CHECK(verify(p, c).pass);
}

TEST_CASE("weighted jump decrease is bounded by the Delta(Q) quadratic form") {
    const ModelParams p = sec5_params();
    const GainCertificate& c = sec5_certificate();
    const double q11 = c.Q(0, 0), q12 = c.Q(0, 1), q22 = c.Q(1, 1);
    CHECK(q11 > 0.0);
    CHECK(q22 > 0.0);
    CHECK(q12 < 0.0);

    Eigen::Matrix2d adjQ;
    adjQ << q22, -q12, -q12, q11;
    const Eigen::Matrix2d D = build_delta(p, c.alpha, c.Q);
    const double decay = std::exp(-2.0 * c.alpha * p.T);

    std::mt19937 rng(31415);
    std::uniform_real_distribution<double> dp(-2.0 * p.r_bar, 2.0 * p.r_bar);
    std::uniform_real_distribution<double> dv(-2.0, 2.0);
    for (int i = 0; i < 20000; ++i) {
        const Eigen::Vector2d eps(dp(rng), dv(rng));
        const JumpDisplacement d = jump_displacement(p, eps(0));
        const Eigen::Vector2d post = eps + Eigen::Vector2d(d.delta_1, d.delta_2);
        const double dVt = decay * post.dot(adjQ * post) - eps.dot(adjQ * eps);
        const Eigen::Vector2d a = eps.cwiseAbs();
        const double bound = a.dot(D * a);
        CHECK(dVt <= bound + 1e-9 * (1.0 + std::abs(bound)));
        if (eps.norm() > 1e-6) {
            CHECK(bound < 0.0);
        }
    }
}

TEST_CASE("certificate JSON round-trip preserves the interchange fields") {
    const ModelParams p = sec5_params();
    const GainCertificate& c = sec5_certificate();
    const std::string text = certificate_to_json(p, c);
    const GainCertificate back = certificate_from_json(text);
    CHECK((back.Q - c.Q).cwiseAbs().maxCoeff() <=
          1e-12 * c.Q.cwiseAbs().maxCoeff());
    CHECK((back.P - c.P).cwiseAbs().maxCoeff() <=
          1e-12 * c.P.cwiseAbs().maxCoeff());
    CHECK((back.K - c.K).cwiseAbs().maxCoeff() <=
          1e-12 * c.K.cwiseAbs().maxCoeff());
    CHECK(back.L == doctest::Approx(c.L).epsilon(1e-12));
    CHECK(back.alpha == c.alpha);
    // Reconstructed auxiliaries keep the certificate identities.
    CHECK(((back.W * back.Q.inverse()) - back.K).cwiseAbs().maxCoeff() <
          1e-9 * back.K.cwiseAbs().maxCoeff());
    CHECK(back.X / back.U == doctest::Approx(back.L).epsilon(1e-12));
}
