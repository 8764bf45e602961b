#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "longidesign/solvers.hpp"
#include "longidesign/variance.hpp"

using namespace longidesign;

namespace {

DesignQuery cs_query(Hypothesis hyp, double v_t0 = 0.0) {
    DesignQuery q;
    q.grid = TimeGrid{6, RelMode::FixedTau, 18.0};
    q.pop = PopulationSpec{0.79, v_t0, 0.0};
    q.cov = CovarianceSpec{CsParams{0.3214, 0.857}};
    q.hyp = hyp;
    q.effect.v = PercentEffect{3.5086, 0.1, -0.182, 0.1};
    return q;
}

}  // namespace

TEST_CASE("required sample size reproduces the reference study") {
    const DesignQuery q = cs_query(Hypothesis::LDD);
    const RequiredN res = required_n(0.9, q);
    CHECK(res.n == 918);
    // Exact inversion: power at the fractional solution hits the target.
    CHECK(power(res.fractional, q) == doctest::Approx(0.9).epsilon(1e-10));
    CHECK(power(static_cast<double>(res.n), q) >= 0.9);
    CHECK(res.n - res.fractional < 1.0);
}

TEST_CASE("power is alpha/2 at a zero effect and increases with n") {
    DesignQuery q = cs_query(Hypothesis::LDD);
    q.effect.v = AbsoluteEffect{0.0};
    CHECK(power(500, q) == doctest::Approx(0.025).epsilon(1e-10));
    q.effect.v = AbsoluteEffect{-0.003};
    double prev = 0.0;
    for (double n : {50.0, 100.0, 400.0, 1600.0}) {
        const double p = power(n, q);
        CHECK(p > prev);
        prev = p;
    }
}

TEST_CASE("detectable effect inverts the sample-size formula") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> upow(0.55, 0.95);
    std::uniform_int_distribution<int> un(50, 2000);
    for (int trial = 0; trial < 50; ++trial) {
        DesignQuery q = cs_query(trial % 2 ? Hypothesis::LDD : Hypothesis::CMD,
                                 trial % 3 ? 100.0 : 0.0);
        const double target = upow(rng);
        const double n = un(rng);
        const DetectableEffect mde = min_detectable_effect(target, n, q);
        DesignQuery q2 = q;
        q2.effect.v = AbsoluteEffect{mde.coefficient};
        CHECK(required_n(target, q2).fractional ==
              doctest::Approx(n).epsilon(1e-9));
        CHECK(power(n, q2) == doctest::Approx(target).epsilon(1e-9));
    }
}

TEST_CASE("percent-scale conversion of the detectable effect") {
    const DesignQuery qc = cs_query(Hypothesis::CMD, 100.0);
    const DetectableEffect c = min_detectable_effect(0.8, 133, qc);
    CHECK(c.percent == doctest::Approx(c.coefficient / 3.5086).epsilon(1e-12));
    const DesignQuery ql = cs_query(Hypothesis::LDD, 100.0);
    const DetectableEffect l = min_detectable_effect(0.8, 133, ql);
    CHECK(l.percent ==
          doctest::Approx(l.coefficient * 18.0 / (0.182 * 3.5086))
              .epsilon(1e-12));
}

TEST_CASE("required measures match the constant-difference closed form") {
    // For CS without entry-time spread the smallest r solves a linear
    // equation in r; the scan must return its ceiling.
    const double sigma2 = 0.3214, rho = 0.857, pe = 0.79;
    const double beta2 = 0.1 * 3.5086;
    DesignQuery q = cs_query(Hypothesis::CMD);
    q.grid = TimeGrid{1, RelMode::FixedS, 3.0};
    for (double n : {140.0, 150.0, 170.0, 200.0}) {
        const RequiredR res = required_r(0.9, n, q);
        // Invert the power equation analytically: attainable iff the
        // information a = beta2^2 n pe(1-pe) exceeds its r -> infinity
        // requirement q sigma2 rho, with r* = ceil((q sigma2 - a)/(a - q
        // sigma2 rho)) clamped at zero.
        const double zsum = 1.2815515655446004 + 1.959963984540054;
        const double quot = zsum * zsum;
        const double a = beta2 * beta2 * n * pe * (1 - pe);
        if (a > quot * sigma2 * rho) {
            REQUIRE(res.r.has_value());
            const double frac =
                (quot * sigma2 - a) / (a - quot * sigma2 * rho);
            CHECK(*res.r ==
                  std::max(0, static_cast<int>(std::ceil(frac - 1e-9))));
        } else {
            CHECK_FALSE(res.r.has_value());
        }
    }
}

TEST_CASE("unattainable targets report the limiting power") {
    // CMD under CS: variance cannot drop below sigma2 rho / (pe(1-pe)),
    // so small samples cannot reach high power no matter how many measures.
    DesignQuery q = cs_query(Hypothesis::CMD);
    q.grid = TimeGrid{1, RelMode::FixedS, 3.0};
    const RequiredR res = required_r(0.9, 60.0, q);
    CHECK_FALSE(res.r.has_value());
    CHECK(res.limit_known);
    const VarianceLimit lim = var_limit_r_inf(q.cov, q.hyp, q.grid.mode,
                                              q.pop, q.grid.value);
    REQUIRE(lim.kind == VarianceLimit::Kind::Value);
    CHECK(res.max_power < 0.9);
    CHECK(res.max_power > power(60.0, q.with_r(1000)) - 1e-9);
}

TEST_CASE("fewest measures are needed at balanced exposure") {
    for (Hypothesis hyp : {Hypothesis::CMD, Hypothesis::LDD}) {
        DesignQuery q = cs_query(hyp);
        q.grid = TimeGrid{1, RelMode::FixedS, 3.0};
        q.pop.pe = 0.5;
        const RequiredR balanced = required_r(0.8, 160.0, q);
        REQUIRE(balanced.r.has_value());
        for (double pe : {0.1, 0.25, 0.4, 0.6, 0.75, 0.9}) {
            DesignQuery qq = q;
            qq.pop.pe = pe;
            const RequiredR res = required_r(0.8, 160.0, qq);
            if (res.r.has_value()) CHECK(*res.r >= *balanced.r);
        }
    }
}

TEST_CASE("dropout inflation") {
    CHECK(inflate_for_dropout(100, 0.0) == 100);
    CHECK(inflate_for_dropout(100, 0.2) == 125);
    CHECK(inflate_for_dropout(918, 0.1) == 1020);
    CHECK_THROWS_AS(inflate_for_dropout(100, 1.0), DomainError);
    CHECK_THROWS_AS(inflate_for_dropout(100, -0.1), DomainError);
}

TEST_CASE("input validation") {
    const DesignQuery q = cs_query(Hypothesis::LDD);
    CHECK_THROWS_AS(power(-5.0, q), DomainError);
    CHECK_THROWS_AS(required_n(1.0, q), DomainError);
    CHECK_THROWS_AS(required_n(0.02, q), DomainError);  // below alpha
    CHECK_THROWS_AS(min_detectable_effect(0.8, 0.0, q), DomainError);
    DesignQuery bad = q;
    bad.alpha = 0.0;
    CHECK_THROWS_AS(power(100.0, bad), DomainError);
}
