#include <doctest.h>

#include <cmath>

#include "jmb/cone_solver.hpp"
#include "jmb/model.hpp"
#include "jmb/verify.hpp"

using namespace jmb;

namespace {

SampleSet demo_samples(std::uint64_t seed, int m) {
    Scenario sc;
    sc.n_tx = 2;
    sc.n_users = 2;
    sc.power = 10.0;
    sc.noise_var = 1.0;
    sc.error_model = FixedError{0.2};
    sc.sample_size = m;
    RngStream r1(seed, 0), r2(seed, 1);
    const Channel est = draw_true_channel(r1, sc);
    return draw_sample_set(r2, est, 0.2, m);
}

Precoder demo_precoder(std::uint64_t seed, double power) {
    RngStream rng(seed, 2);
    Precoder pre;
    pre.common = CVec(2);
    for (int i = 0; i < 2; ++i) pre.common(i) = rng.cgauss(1.0);
    for (int k = 0; k < 2; ++k) {
        CVec p(2);
        for (int i = 0; i < 2; ++i) p(i) = rng.cgauss(1.0);
        pre.private_cols.push_back(p);
    }
    const double s = std::sqrt(power / pre.total_power());
    pre.common *= s;
    for (auto& p : pre.private_cols) p *= s;
    return pre;
}

AwmseComponents demo_components(std::uint64_t seed, int m) {
    const SampleSet ss = demo_samples(seed, m);
    const Precoder pre = demo_precoder(seed, 10.0);
    return build_components(ss, update_equalizers_weights(ss, pre, 1.0), 1.0);
}

ConvexQcqp ball_instance(double cap) {
    ConvexQcqp q;
    q.dim = 2;
    q.power_cap = cap;
    QuadConstraint c;
    c.Q = RMat::Identity(2, 2);
    c.b = RVec::Zero(2);
    c.b(0) = -2.0;
    c.d = 0.0;
    c.coef_xi = -1.0;
    q.constraints.push_back(c);
    return q;
}

}  // namespace

TEST_CASE("real embedding reproduces complex quadratic values") {
    RngStream rng(61, 0);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 3;
        CMat a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a(i, j) = rng.cgauss(1.0);
        const CMat herm = a * a.adjoint();
        CVec p(n);
        for (int i = 0; i < n; ++i) p(i) = rng.cgauss(1.0);

        const double direct = std::real(p.dot(herm * p));
        const RVec pr = real_embed(p);
        const double embedded = pr.dot(real_embed(herm) * pr);
        CHECK(std::abs(direct - embedded) <= 1e-12 * std::max(1.0, std::abs(direct)));
    }
}

TEST_CASE("assemble produces the expected constraint structure") {
    const AwmseComponents comp = demo_components(62, 16);
    const RVec coeffs = RVec::Constant(2, 0.5);
    const ConvexQcqp q = assemble(comp, coeffs, 1.0, 10.0);

    CHECK(q.dim == 2 * 2 * 3);
    CHECK(static_cast<int>(q.constraints.size()) == 2 * 2 + 1 - 1);  // 2K, ball separate
    CHECK(q.power_cap == 10.0);
    CHECK(q.has_common_epigraph);

    // Private constraints: no common-column quadratic block, own linear term.
    const QuadConstraint& pc = q.constraints[0];
    CHECK(pc.coef_xi == -1.0);
    CHECK(pc.coef_xi_c == 0.5);
    CHECK(pc.Q.topLeftCorner(4, 4).cwiseAbs().maxCoeff() == 0.0);
    CHECK(pc.Q.block(4, 4, 4, 4).cwiseAbs().maxCoeff() > 0.0);
    CHECK(pc.b.head(4).cwiseAbs().maxCoeff() == 0.0);

    // Common constraints: every block carries the quadratic form.
    const QuadConstraint& cc = q.constraints[2];
    CHECK(cc.coef_xi == 0.0);
    CHECK(cc.coef_xi_c == -1.0);
    CHECK(cc.Q.topLeftCorner(4, 4).cwiseAbs().maxCoeff() > 0.0);
    CHECK(cc.b.tail(8).cwiseAbs().maxCoeff() == 0.0);

    SUBCASE("coefficient count is validated") {
        CHECK_THROWS_AS(assemble(comp, RVec::Ones(3), 1.0, 10.0), std::invalid_argument);
    }
}

TEST_CASE("assembled constraints evaluate to the averaged WMSEs") {
    const AwmseComponents comp = demo_components(63, 32);
    RVec coeffs(2);
    coeffs << 0.3, 0.7;
    const ConvexQcqp q = assemble(comp, coeffs, 1.0, 10.0);
    const Precoder probe = demo_precoder(64, 10.0);
    const auto [xi_c, xi_p] = awmse_eval(comp, probe, 1.0);

    RVec x(q.dim);
    x.segment(0, 2) = probe.common.real();
    x.segment(2, 2) = probe.common.imag();
    for (int k = 0; k < 2; ++k) {
        x.segment(4 * (k + 1), 2) = probe.private_cols[k].real();
        x.segment(4 * (k + 1) + 2, 2) = probe.private_cols[k].imag();
    }
    for (int k = 0; k < 2; ++k) {
        const QuadConstraint& pc = q.constraints[k];
        const double lhs = x.dot(pc.Q * x) + pc.b.dot(x) + pc.d + coeffs(k);
        CHECK(lhs == doctest::Approx(xi_p(k)).epsilon(1e-11));
        const QuadConstraint& cc = q.constraints[2 + k];
        const double lhsc = x.dot(cc.Q * x) + cc.b.dot(x) + cc.d;
        CHECK(lhsc == doctest::Approx(xi_c(k)).epsilon(1e-11));
    }
}

TEST_CASE("zero components leave the power ball and free epigraphs") {
    AwmseComponents comp;
    comp.users.resize(2);
    for (auto& u : comp.users) {
        u.psi_common = CMat::Zero(2, 2);
        u.psi_private = CMat::Zero(2, 2);
        u.f_common = CVec::Zero(2);
        u.f_private = CVec::Zero(2);
    }
    const ConvexQcqp q = assemble(comp, RVec::Constant(2, 0.5), 1.0, 4.0);
    CHECK(static_cast<int>(q.constraints.size()) == 4);
    for (const auto& c : q.constraints) CHECK(c.Q.cwiseAbs().maxCoeff() == 0.0);
    const SolverReport rep = solve(q);
    CHECK(rep.status == SolveStatus::Optimal);
    CHECK(rep.precoder.total_power() <= 4.0 + 1e-8);
}

TEST_CASE("ball-constrained closed forms") {
    SolverOptions tight;
    tight.tol = 1e-10;
    SUBCASE("interior optimum") {
        const SolverReport rep = solve(ball_instance(4.0), tight);
        CHECK(rep.status == SolveStatus::Optimal);
        CHECK(std::abs(rep.xi - (-1.0)) <= 1e-9);
        CHECK(rep.x(0) == doctest::Approx(1.0).epsilon(1e-5));
        CHECK(std::abs(rep.x(1)) <= 1e-5);
    }
    SUBCASE("active power cap") {
        const SolverReport rep = solve(ball_instance(0.25), tight);
        CHECK(rep.status == SolveStatus::Optimal);
        CHECK(std::abs(rep.xi - (-0.75)) <= 1e-9);
        CHECK(rep.x(0) == doctest::Approx(0.5).epsilon(1e-5));
    }
}

TEST_CASE("solver is deterministic") {
    const AwmseComponents comp = demo_components(65, 32);
    const ConvexQcqp q = assemble(comp, RVec::Constant(2, 0.5), 1.0, 10.0);
    const SolverReport a = solve(q);
    const SolverReport b = solve(q);
    CHECK(a.status == b.status);
    CHECK(a.xi == b.xi);  // bitwise
    CHECK(a.iterations == b.iterations);
    CHECK((a.x - b.x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("solve validates its inputs") {
    ConvexQcqp q = ball_instance(1.0);
    q.constraints[0].coef_xi = 0.0;  // no relaxing coupling left
    CHECK_THROWS_AS(solve(q), std::invalid_argument);

    ConvexQcqp q2 = ball_instance(1.0);
    q2.constraints[0].b = RVec::Zero(3);  // wrong size
    CHECK_THROWS_AS(solve(q2), std::invalid_argument);

    ConvexQcqp q3 = ball_instance(1.0);
    q3.power_cap = 0.0;
    CHECK_THROWS_AS(solve(q3), std::invalid_argument);
}

TEST_CASE("solution of the averaged problem satisfies its constraints") {
    const AwmseComponents comp = demo_components(66, 64);
    RVec coeffs(2);
    coeffs << 0.4, 0.6;
    const ConvexQcqp q = assemble(comp, coeffs, 1.0, 10.0);
    const SolverReport rep = solve(q);
    CHECK(rep.status == SolveStatus::Optimal);
    CHECK(rep.kkt_residual <= 1e-8);
    CHECK(rep.precoder.total_power() <= 10.0 + 1e-7);

    const auto [xi_c, xi_p] = awmse_eval(comp, rep.precoder, 1.0);
    for (int k = 0; k < 2; ++k) {
        CHECK(xi_c(k) <= rep.xi_common + 1e-7);
        CHECK(xi_p(k) + coeffs(k) * (rep.xi_common - 1.0) <= rep.xi + 1e-7);
    }
    // The epigraph variables are tight at the optimum.
    CHECK(xi_c.maxCoeff() == doctest::Approx(rep.xi_common).epsilon(1e-6));
}

TEST_CASE("random instances match the projected-gradient reference") {
    RngStream rng(67, 0);
    for (int trial = 0; trial < 6; ++trial) {
        auto sub = rng.substream(static_cast<std::uint64_t>(trial));
        ConvexQcqp q;
        q.dim = 2 + 2 * (trial % 3);
        q.power_cap = 1.0 + 2.0 * sub.uniform();
        const bool with_common = trial % 2 == 0;
        q.has_common_epigraph = with_common;
        for (int j = 0; j < 3; ++j) {
            QuadConstraint c;
            RMat a(q.dim, q.dim);
            for (int r = 0; r < q.dim; ++r)
                for (int s = 0; s < q.dim; ++s) a(r, s) = 2.0 * sub.uniform() - 1.0;
            c.Q = a.transpose() * a / q.dim;
            c.b = RVec(q.dim);
            for (int r = 0; r < q.dim; ++r) c.b(r) = sub.uniform() - 0.5;
            c.d = sub.uniform() - 0.5;
            if (with_common && j == 2) {
                c.coef_xi = 0.0;
                c.coef_xi_c = -1.0;
                c.b.setZero();
            } else {
                c.coef_xi = -1.0;
                c.coef_xi_c = with_common ? sub.uniform() : 0.0;
            }
            q.constraints.push_back(std::move(c));
        }
        const SolverReport rep = solve(q);
        REQUIRE(rep.status == SolveStatus::Optimal);
        const double ref = reference_objective(q);
        CHECK(std::abs(rep.xi - ref) <= 1e-6 * std::max(1.0, std::abs(ref)));
    }
}

TEST_CASE("dump round-trip") {
    const AwmseComponents comp = demo_components(68, 8);
    const ConvexQcqp q = assemble(comp, RVec::Constant(2, 0.5), 1.0, 10.0);
    const ConvexQcqp back = parse_dump(dump(q));
    CHECK(back.dim == q.dim);
    CHECK(back.power_cap == q.power_cap);
    CHECK(back.constraints.size() == q.constraints.size());
    for (std::size_t j = 0; j < q.constraints.size(); ++j) {
        CHECK((back.constraints[j].Q - q.constraints[j].Q).cwiseAbs().maxCoeff() == 0.0);
        CHECK((back.constraints[j].b - q.constraints[j].b).cwiseAbs().maxCoeff() == 0.0);
        CHECK(back.constraints[j].d == q.constraints[j].d);
    }
    const SolverReport a = solve(q);
    const SolverReport b = solve(back);
    CHECK(a.xi == b.xi);
}
