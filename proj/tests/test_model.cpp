#include <doctest.h>

#include <cmath>

#include "jmb/model.hpp"

using namespace jmb;

namespace {
Scenario desk_scenario() {
    Scenario sc;
    sc.n_tx = 2;
    sc.n_users = 2;
    sc.power = 100.0;
    sc.noise_var = 1.0;
    sc.error_model = Decaying{0.6};
    sc.sample_size = 1000;
    return sc;
}
}  // namespace

TEST_CASE("scenario validation") {
    Scenario sc = desk_scenario();
    CHECK_NOTHROW(sc.validate());
    sc.n_users = 3;  // K > N_t
    CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
    sc = desk_scenario();
    sc.noise_var = 0.0;
    CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
    sc = desk_scenario();
    sc.sample_size = 0;
    CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
}

TEST_CASE("effective error variance") {
    Scenario sc = desk_scenario();
    sc.error_model = Decaying{0.0};
    CHECK(effective_error_variance(sc) == doctest::Approx(1.0));
    sc.error_model = Decaying{0.6};
    sc.power = 100.0;
    CHECK(effective_error_variance(sc) == doctest::Approx(0.0631).epsilon(0.01));
    sc.error_model = FixedError{0.25};
    CHECK(effective_error_variance(sc) == 0.25);
}

TEST_CASE("equivalent alpha for the fixed model") {
    Scenario sc = desk_scenario();
    sc.power = 100.0;
    sc.error_model = FixedError{0.063};
    CHECK(equivalent_alpha(sc) == doctest::Approx(0.6).epsilon(1e-3));
    sc.error_model = FixedError{0.0};
    CHECK(equivalent_alpha(sc) == 1.0);
    sc.error_model = FixedError{2.0};  // worse than unit-variance error
    CHECK(equivalent_alpha(sc) == 0.0);
    sc.error_model = Decaying{0.3};
    CHECK(equivalent_alpha(sc) == 0.3);
}

TEST_CASE("true channel statistics") {
    Scenario sc = desk_scenario();
    sc.n_tx = 10;
    sc.n_users = 10;
    RngStream rng(7, 0);
    double sum_re = 0.0, sum_im = 0.0, sum_p = 0.0;
    int n = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        const Channel h = draw_true_channel(rng, sc);
        sum_re += h.matrix.real().sum();
        sum_im += h.matrix.imag().sum();
        sum_p += h.matrix.cwiseAbs2().sum();
        n += 100;
    }
    CHECK(std::abs(sum_re / n) <= 0.02);
    CHECK(std::abs(sum_im / n) <= 0.02);
    CHECK(sum_p / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("channel draws are reproducible") {
    const Scenario sc = desk_scenario();
    RngStream a(42, 0), b(42, 0);
    const Channel ha = draw_true_channel(a, sc);
    const Channel hb = draw_true_channel(b, sc);
    CHECK(ha.matrix == hb.matrix);  // bitwise

    // Interleaving other streams does not disturb a stream's output.
    RngStream c(42, 0), other(42, 9);
    (void)other.uniform();
    const Channel hc = draw_true_channel(c, sc);
    (void)other.uniform();
    CHECK(hc.matrix == ha.matrix);
}

TEST_CASE("substreams differ from parent and siblings") {
    RngStream root(3, 0);
    auto s1 = root.substream(1);
    auto s2 = root.substream(2);
    CHECK(s1.stream_id() != s2.stream_id());
    CHECK(s1.uniform() != s2.uniform());
}

TEST_CASE("estimate draw") {
    const Scenario sc = desk_scenario();
    RngStream rng(5, 1);
    const Channel h = draw_true_channel(rng, sc);

    SUBCASE("zero error variance is exact") {
        RngStream r2(5, 2);
        const EstimateDraw ed = draw_estimate(r2, h, 0.0);
        CHECK((ed.estimate.matrix - h.matrix).cwiseAbs().maxCoeff() == 0.0);
        CHECK(ed.error.matrix.cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("error variance matches the requested value") {
        Scenario big = sc;
        big.n_tx = 10;
        big.n_users = 10;
        RngStream r2(5, 3);
        const Channel hb = draw_true_channel(r2, big);
        double sum_p = 0.0;
        int n = 0;
        RngStream r3(5, 4);
        for (int rep = 0; rep < 1000; ++rep) {
            const EstimateDraw ed = draw_estimate(r3, hb, 0.063);
            sum_p += ed.error.matrix.cwiseAbs2().sum();
            n += 100;
        }
        CHECK(sum_p / n == doctest::Approx(0.063).epsilon(0.02));
    }

    SUBCASE("estimate + error reconstructs the truth") {
        RngStream r2(5, 5);
        const EstimateDraw ed = draw_estimate(r2, h, 0.5);
        CHECK((ed.estimate.matrix + ed.error.matrix - h.matrix).cwiseAbs().maxCoeff() <=
              1e-15);
    }
}

TEST_CASE("sample set draw") {
    const Scenario sc = desk_scenario();
    RngStream rng(11, 0);
    const Channel est = draw_true_channel(rng, sc);

    SUBCASE("zero variance copies the estimate") {
        RngStream r(11, 1);
        const SampleSet ss = draw_sample_set(r, est, 0.0, 5);
        CHECK(ss.size() == 5);
        for (const auto& h : ss.realizations)
            CHECK((h.matrix - est.matrix).cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("per-entry variance across realizations") {
        RngStream r(11, 2);
        const SampleSet ss = draw_sample_set(r, est, 0.063, 1000);
        for (int i = 0; i < sc.n_tx; ++i)
            for (int k = 0; k < sc.n_users; ++k) {
                double acc = 0.0;
                for (const auto& h : ss.realizations)
                    acc += std::norm(h.matrix(i, k) - est.matrix(i, k));
                CHECK(acc / ss.size() == doctest::Approx(0.063).epsilon(0.05));
            }
    }

    SUBCASE("determinism") {
        RngStream r1(11, 3), r2(11, 3);
        const SampleSet a = draw_sample_set(r1, est, 0.1, 32);
        const SampleSet b = draw_sample_set(r2, est, 0.1, 32);
        for (int m = 0; m < 32; ++m)
            CHECK(a.realizations[m].matrix == b.realizations[m].matrix);
    }
}
