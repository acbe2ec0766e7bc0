#include <doctest.h>

#include <cmath>
#include <numbers>

#include "jmb/awmse.hpp"
#include "jmb/kahan.hpp"

using namespace jmb;

namespace {

Scenario small_scenario(int m) {
    Scenario sc;
    sc.n_tx = 2;
    sc.n_users = 2;
    sc.power = 10.0;
    sc.noise_var = 1.0;
    sc.error_model = FixedError{0.1};
    sc.sample_size = m;
    return sc;
}

Precoder random_precoder(RngStream& rng, int nt, int K, double power) {
    Precoder pre;
    pre.common = CVec(nt);
    for (int i = 0; i < nt; ++i) pre.common(i) = rng.cgauss(1.0);
    for (int k = 0; k < K; ++k) {
        CVec p(nt);
        for (int i = 0; i < nt; ++i) p(i) = rng.cgauss(1.0);
        pre.private_cols.push_back(p);
    }
    const double s = std::sqrt(power / pre.total_power());
    pre.common *= s;
    for (auto& p : pre.private_cols) p *= s;
    return pre;
}

SampleSet make_samples(std::uint64_t seed, const Scenario& sc, double sigma_e2) {
    RngStream r1(seed, 0), r2(seed, 1);
    const Channel est = draw_true_channel(r1, sc);
    return draw_sample_set(r2, est, sigma_e2, sc.sample_size);
}

}  // namespace

TEST_CASE("sample average rates") {
    SUBCASE("M = 1 equals the single realization") {
        const Scenario sc = small_scenario(1);
        const SampleSet ss = make_samples(31, sc, 0.2);
        RngStream rp(31, 2);
        const Precoder pre = random_precoder(rp, 2, 2, sc.power);
        const AverageRates ar = sample_average_rates(ss, pre, sc.noise_var);
        for (int k = 0; k < 2; ++k) {
            const RatePair r = rates(link_stats(ss.realizations[0].col(k), pre, 1.0, k));
            CHECK(ar.common(k) == doctest::Approx(r.common).epsilon(1e-14));
            CHECK(ar.private_rate(k) == doctest::Approx(r.private_rate).epsilon(1e-14));
        }
        CHECK(ar.common_min == doctest::Approx(ar.common.minCoeff()));
    }

    SUBCASE("zero error variance collapses to the deterministic rate") {
        const Scenario sc = small_scenario(16);
        const SampleSet ss = make_samples(32, sc, 0.0);
        RngStream rp(32, 2);
        const Precoder pre = random_precoder(rp, 2, 2, sc.power);
        const AverageRates ar = sample_average_rates(ss, pre, sc.noise_var);
        const RatePair r0 = rates(link_stats(ss.estimate.col(0), pre, 1.0, 0));
        CHECK(ar.private_rate(0) == doctest::Approx(r0.private_rate).epsilon(1e-13));
    }

    SUBCASE("doubling M stays within three standard errors") {
        const Scenario sc = small_scenario(1000);
        const SampleSet ss = make_samples(33, sc, 0.1);
        RngStream r2(33, 1);  // same sample stream as make_samples
        RngStream r1(33, 0);
        const Channel est = draw_true_channel(r1, sc);
        const SampleSet ss10 = draw_sample_set(r2, est, 0.1, 10000);
        RngStream rp(33, 2);
        const Precoder pre = random_precoder(rp, 2, 2, sc.power);

        const AverageRates a = sample_average_rates(ss, pre, 1.0);
        const AverageRates b = sample_average_rates(ss10, pre, 1.0);
        for (int k = 0; k < 2; ++k) {
            double s2 = 0.0;
            for (int m = 0; m < ss.size(); ++m) {
                const RatePair r = rates(link_stats(ss.realizations[m].col(k), pre, 1.0, k));
                s2 += (r.private_rate - a.private_rate(k)) * (r.private_rate - a.private_rate(k));
            }
            const double se = std::sqrt(s2 / (ss.size() - 1) / ss.size());
            CHECK(std::abs(a.private_rate(k) - b.private_rate(k)) <= 3.0 * se);
        }
    }
}

TEST_CASE("equalizer/weight update") {
    SUBCASE("zero error variance gives identical slices") {
        const Scenario sc = small_scenario(8);
        const SampleSet ss = make_samples(34, sc, 0.0);
        RngStream rp(34, 2);
        const Precoder pre = random_precoder(rp, 2, 2, sc.power);
        const EqualizerWeightSet gw = update_equalizers_weights(ss, pre, 1.0);
        for (int m = 1; m < 8; ++m) {
            CHECK(gw.g_private(0, m) == gw.g_private(0, 0));
            CHECK(gw.u_common(1, m) == gw.u_common(1, 0));
        }
    }

    SUBCASE("spot check against the single-point operations") {
        const Scenario sc = small_scenario(16);
        const SampleSet ss = make_samples(35, sc, 0.3);
        RngStream rp(35, 2);
        const Precoder pre = random_precoder(rp, 2, 2, sc.power);
        const EqualizerWeightSet gw = update_equalizers_weights(ss, pre, 1.0);
        for (int k = 0; k < 2; ++k)
            for (int m : {0, 7, 15}) {
                const CVec h = ss.realizations[m].col(k);
                const auto [gc, gp] = mmse_equalizers(h, pre, 1.0, k);
                const auto [ec, ep] = mmse_values(link_stats(h, pre, 1.0, k));
                CHECK(gw.g_common(k, m) == gc);
                CHECK(gw.g_private(k, m) == gp);
                CHECK(gw.u_common(k, m) == 1.0 / ec);
                CHECK(gw.u_private(k, m) == 1.0 / ep);
            }
    }

    SUBCASE("duality: averaged WMSE at the update equals 1 - average rate") {
        const Scenario sc = small_scenario(64);
        const SampleSet ss = make_samples(36, sc, 0.2);
        RngStream rp(36, 2);
        const Precoder pre = random_precoder(rp, 2, 2, sc.power);
        const EqualizerWeightSet gw = update_equalizers_weights(ss, pre, 1.0);
        const AwmseComponents comp = build_components(ss, gw, 1.0);
        const auto [xi_c, xi_p] = awmse_eval(comp, pre, 1.0);
        const AverageRates ar = sample_average_rates(ss, pre, 1.0);
        for (int k = 0; k < 2; ++k) {
            CHECK(std::abs(xi_c(k) - (1.0 - ar.common(k))) <= 1e-10);
            CHECK(std::abs(xi_p(k) - (1.0 - ar.private_rate(k))) <= 1e-10);
        }
    }
}

TEST_CASE("component construction") {
    SUBCASE("single-realization canonical values") {
        // M = 1, u = 1, g = 1, h = e_1: psi = e1 e1^H, f = e1, t = 1, v = 0.
        SampleSet ss;
        CMat h = CMat::Zero(2, 1);
        h(0, 0) = 1.0;
        ss.estimate = Channel{h};
        ss.realizations = {Channel{h}};
        ss.error_var = 0.0;
        EqualizerWeightSet gw;
        gw.g_common = CMat::Ones(1, 1);
        gw.g_private = CMat::Ones(1, 1);
        gw.u_common = RMat::Ones(1, 1);
        gw.u_private = RMat::Ones(1, 1);

        const AwmseComponents comp = build_components(ss, gw, 1.0);
        const UserComponents& u = comp.users[0];
        CHECK(std::abs(u.psi_private(0, 0) - cplx(1.0)) <= 1e-15);
        CHECK(std::abs(u.psi_private(1, 1)) <= 1e-15);
        CHECK(std::abs(u.f_private(0) - cplx(1.0)) <= 1e-15);
        CHECK(u.t_private == doctest::Approx(1.0));
        CHECK(u.u_private == doctest::Approx(1.0));
        CHECK(u.v_private == doctest::Approx(0.0));

        // Evaluate at p_1 = e_1, p_c = 0: quadratic 1, noise 1, linear -2, u 1.
        Precoder pre = Precoder::zero(2, 1);
        pre.private_cols[0](0) = 1.0;
        const auto [xc, xp] = awmse_eval(comp, pre, 1.0);
        CHECK(xp(0) == doctest::Approx(1.0).epsilon(1e-14));
        (void)xc;
    }

    SUBCASE("psi rank is bounded by the realization count") {
        const Scenario sc = small_scenario(1);
        const SampleSet ss = make_samples(37, sc, 0.4);
        RngStream rp(37, 2);
        const Precoder pre = random_precoder(rp, 2, 2, sc.power);
        const EqualizerWeightSet gw = update_equalizers_weights(ss, pre, 1.0);
        const AwmseComponents comp = build_components(ss, gw, 1.0);
        Eigen::SelfAdjointEigenSolver<CMat> es(comp.users[0].psi_private);
        int rank = 0;
        for (int i = 0; i < 2; ++i)
            if (es.eigenvalues()(i) > 1e-12 * es.eigenvalues().maxCoeff()) ++rank;
        CHECK(rank <= 1);
    }

    SUBCASE("zero precoder leaves only the constant terms") {
        const Scenario sc = small_scenario(32);
        const SampleSet ss = make_samples(38, sc, 0.2);
        RngStream rp(38, 2);
        const Precoder probe = random_precoder(rp, 2, 2, sc.power);
        const EqualizerWeightSet gw = update_equalizers_weights(ss, probe, 1.0);
        const AwmseComponents comp = build_components(ss, gw, 1.0);
        const auto [xc, xp] = awmse_eval(comp, Precoder::zero(2, 2), 1.0);
        for (int k = 0; k < 2; ++k) {
            const UserComponents& u = comp.users[k];
            CHECK(xp(k) ==
                  doctest::Approx(u.t_private + u.u_private - u.v_private).epsilon(1e-13));
            CHECK(xc(k) ==
                  doctest::Approx(u.t_common + u.u_common - u.v_common).epsilon(1e-13));
        }
    }
}

TEST_CASE("two evaluation paths agree to accumulation accuracy") {
    for (std::uint64_t seed : {41, 42, 43}) {
        const Scenario sc = small_scenario(512);
        const SampleSet ss = make_samples(seed, sc, 0.15);
        RngStream rp(seed, 2);
        const Precoder design = random_precoder(rp, 2, 2, sc.power);
        const Precoder probe = random_precoder(rp, 2, 2, sc.power);
        const EqualizerWeightSet gw = update_equalizers_weights(ss, design, 1.0);
        const AwmseComponents comp = build_components(ss, gw, 1.0);
        const auto [xi_c, xi_p] = awmse_eval(comp, probe, 1.0);
        for (int k = 0; k < 2; ++k) {
            KahanSum dc, dp;
            for (int m = 0; m < ss.size(); ++m) {
                const UserPoint up{gw.g_common(k, m), gw.g_private(k, m), gw.u_common(k, m),
                                   gw.u_private(k, m)};
                const auto [xc, xp] =
                    augmented_wmse(ss.realizations[m].col(k), probe, 1.0, up, k);
                dc.add(xc);
                dp.add(xp);
            }
            CHECK(std::abs(xi_c(k) - dc.value() / ss.size()) <= 1e-10);
            CHECK(std::abs(xi_p(k) - dp.value() / ss.size()) <= 1e-10);
        }
    }
}

TEST_CASE("perturbing any single equalizer never helps at fixed weights") {
    const Scenario sc = small_scenario(16);
    const SampleSet ss = make_samples(44, sc, 0.2);
    RngStream rp(44, 2);
    const Precoder pre = random_precoder(rp, 2, 2, sc.power);
    const EqualizerWeightSet gw = update_equalizers_weights(ss, pre, 1.0);
    RngStream rng(44, 3);
    for (int k = 0; k < 2; ++k)
        for (int m = 0; m < ss.size(); ++m) {
            const CVec h = ss.realizations[m].col(k);
            const UserPoint opt{gw.g_common(k, m), gw.g_private(k, m), gw.u_common(k, m),
                                gw.u_private(k, m)};
            const auto [xc0, xp0] = augmented_wmse(h, pre, 1.0, opt, k);

            // The update equals 1 - rate pointwise.
            const RatePair r = rates(link_stats(h, pre, 1.0, k));
            CHECK(std::abs(xc0 - (1.0 - r.common)) <= 1e-12);
            CHECK(std::abs(xp0 - (1.0 - r.private_rate)) <= 1e-12);

            UserPoint noisy = opt;
            noisy.eq_common += 0.1 * rng.cgauss(1.0);
            noisy.eq_private += 0.1 * rng.cgauss(1.0);
            const auto [xc1, xp1] = augmented_wmse(h, pre, 1.0, noisy, k);
            CHECK(xc1 >= xc0 - 1e-12);
            CHECK(xp1 >= xp0 - 1e-12);

            // A weight step toward the natural-log stationary point lowers
            // the base-2 penalty form; the update trades that slack for the
            // exact 1 - rate identity asserted above.
            UserPoint shifted = opt;
            shifted.w_private = opt.w_private / std::numbers::ln2;
            const auto [xc2, xp2] = augmented_wmse(h, pre, 1.0, shifted, k);
            (void)xc2;
            CHECK(xp2 <= xp0 + 1e-12);
        }
}
