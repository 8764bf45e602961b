#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "longidesign/covariance.hpp"

using namespace longidesign;

TEST_CASE("compound symmetry builder structure") {
    const Eigen::MatrixXd m = build_cs(0.3214, 0.857, 6);
    REQUIRE(m.rows() == 7);
    CHECK(m(0, 0) == doctest::Approx(0.3214));
    CHECK(m(0, 6) == doctest::Approx(0.3214 * 0.857));
    CHECK((m - m.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("damped exponential reduces to CS at theta=0 and AR(1) at theta=1") {
    const Eigen::MatrixXd dex0 = build_dex(0.5, 0.7, 0.0, 2.0, 5);
    const Eigen::MatrixXd cs = build_cs(0.5, 0.7, 5);
    CHECK((dex0 - cs).cwiseAbs().maxCoeff() < 1e-14);

    const Eigen::MatrixXd ar1 = build_dex(1.0, 0.8, 1.0, 1.5, 4);
    for (int j = 0; j <= 4; ++j)
        for (int k = 0; k <= 4; ++k)
            CHECK(ar1(j, k) ==
                  doctest::Approx(std::pow(0.8, std::abs(j - k) * 1.5)));
}

TEST_CASE("random-slopes builder matches Z D Z' + sigma_w2 I") {
    const RsRawParams raw{0.0418, 0.2982, 0.000095, -0.0017};
    const double t0 = 2.5, s = 3.0;
    const Eigen::MatrixXd m = build_rs(raw, t0, s, 3);
    for (int j = 0; j <= 3; ++j) {
        for (int k = 0; k <= 3; ++k) {
            const double tj = t0 + s * j, tk = t0 + s * k;
            double expect = raw.sigma_b0_2 + raw.sigma_b0b1 * (tj + tk) +
                            raw.sigma_b1_2 * tj * tk;
            if (j == k) expect += raw.sigma_w2;
            CHECK(m(j, k) == doctest::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("closed CS inverse sums agree with the generic matrix path") {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> u01(0.05, 0.95);
    std::uniform_real_distribution<double> usig(0.05, 5.0);
    std::uniform_int_distribution<int> ur(0, 30);
    for (int trial = 0; trial < 500; ++trial) {
        const double sigma2 = usig(rng), rho = u01(rng);
        const int r = ur(rng);
        const SumTriple closed = cs_inverse_sums_closed(sigma2, rho, r);
        const SumTriple generic = inverse_sums(build_cs(sigma2, rho, r));
        CHECK(closed.s0 == doctest::Approx(generic.s0).epsilon(1e-10));
        CHECK(closed.s1 == doctest::Approx(generic.s1).epsilon(1e-10));
        CHECK(closed.s2 == doctest::Approx(generic.s2).epsilon(1e-10));
        CHECK(closed.det_a ==
              doctest::Approx(generic.det_a).epsilon(1e-8).scale(1e-12));
    }
}

TEST_CASE("closed AR(1) inverse sums agree with the generic matrix path") {
    std::mt19937_64 rng(6789);
    std::uniform_real_distribution<double> u01(0.05, 0.95);
    std::uniform_real_distribution<double> us(0.2, 4.0);
    std::uniform_int_distribution<int> ur(0, 25);
    for (int trial = 0; trial < 500; ++trial) {
        const double sigma2 = us(rng), rho = u01(rng), s = us(rng);
        const int r = ur(rng);
        const SumTriple closed = ar1_inverse_sums_closed(sigma2, rho, s, r);
        const SumTriple generic =
            inverse_sums(build_dex(sigma2, rho, 1.0, s, r));
        CHECK(closed.s0 == doctest::Approx(generic.s0).epsilon(1e-10));
        CHECK(closed.s1 ==
              doctest::Approx(generic.s1).epsilon(1e-10).scale(1e-12));
        CHECK(closed.s2 ==
              doctest::Approx(generic.s2).epsilon(1e-10).scale(1e-12));
    }
}

TEST_CASE("AR(1) closed sums spot value") {
    // r = 2, lag correlation 0.8, unit variance: s0 = 11/9.
    const SumTriple sums = ar1_inverse_sums_closed(1.0, 0.8, 1.0, 2);
    CHECK(sums.s0 == doctest::Approx(11.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("reliability parameterization round-trips through the raw form") {
    for (RelMode mode : {RelMode::FixedS, RelMode::FixedTau}) {
        RsIntuitiveParams p;
        p.sigma_t0_2 = 0.34;
        p.rho_t0 = 0.877;
        p.rho_b0b1 = -0.32;
        p.slope_rel = 0.36;
        p.r_tilde = 6;
        p.rel_mode = mode;
        p.horizon = mode == RelMode::FixedS ? 3.0 : 18.0;
        const RsRawParams raw = rs_intuitive_to_raw(p);
        CHECK(raw.sigma_b0_2 == doctest::Approx(0.877 * 0.34).epsilon(1e-12));
        CHECK(raw.sigma_w2 == doctest::Approx(0.123 * 0.34).epsilon(1e-12));
        CHECK(slope_reliability(raw, mode, p.horizon, 6) ==
              doctest::Approx(0.36).epsilon(1e-12));
        CHECK(raw.sigma_b0b1 ==
              doctest::Approx(-0.32 * std::sqrt(raw.sigma_b0_2 * raw.sigma_b1_2))
                  .epsilon(1e-12));
    }
}

TEST_CASE("slope reliability grows with additional measures") {
    RsIntuitiveParams p{0.34, 0.877, -0.32, 0.364, 6, RelMode::FixedTau, 18.0};
    const RsRawParams raw = rs_intuitive_to_raw(p);
    // Under a fixed horizon the r = 1 and r = 2 designs carry the same slope
    // information, so reliability ties there and rises strictly afterwards.
    double prev = 0.0;
    for (int r = 1; r <= 20; ++r) {
        const double rel = slope_reliability(raw, RelMode::FixedTau, 18.0, r);
        if (r == 2)
            CHECK(rel == doctest::Approx(prev).epsilon(1e-12));
        else
            CHECK(rel > prev);
        prev = rel;
    }
    CHECK(slope_reliability(raw, RelMode::FixedTau, 18.0, 12) ==
          doctest::Approx(0.4818737).epsilon(1e-6));
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(build_cs(-1.0, 0.5, 3), DomainError);
    CHECK_THROWS_AS(build_cs(1.0, 1.0, 3), DomainError);
    CHECK_THROWS_AS(build_dex(1.0, 0.5, 1.5, 1.0, 3), DomainError);
    CHECK_THROWS_AS(build_rs(RsRawParams{1.0, 1.0, 1.0, 2.0}, 0.0, 1.0, 3),
                    DomainError);
    RsIntuitiveParams bad{0.34, 0.877, -0.32, 1.0, 6, RelMode::FixedS, 3.0};
    CHECK_THROWS_AS(rs_intuitive_to_raw(bad), DomainError);
    PopulationSpec pop{0.5, 0.0, 0.5};
    CHECK_THROWS_AS(pop.validate(), DomainError);
    CHECK_THROWS_AS(inverse_sums(Eigen::MatrixXd::Zero(3, 3)),
                    ComputationError);
}

TEST_CASE("effect coefficients") {
    EffectSpec pct{PercentEffect{3.5086, 0.1, -0.182, 0.1}};
    CHECK(pct.coefficient(Hypothesis::CMD, 18.0) ==
          doctest::Approx(0.35086).epsilon(1e-12));
    CHECK(pct.coefficient(Hypothesis::LDD, 18.0) ==
          doctest::Approx(-0.182 * 0.1 * 3.5086 / 18.0).epsilon(1e-12));
    // With no secular trend the divergence is anchored to the baseline level.
    EffectSpec flat{PercentEffect{3.5086, 0.1, 0.0, 0.1}};
    CHECK(flat.coefficient(Hypothesis::LDD, 18.0) ==
          doctest::Approx(1.1 * 0.1 * 3.5086 / 18.0).epsilon(1e-12));
    EffectSpec abs{AbsoluteEffect{0.25}};
    CHECK(abs.coefficient(Hypothesis::CMD, 18.0) == 0.25);
}
