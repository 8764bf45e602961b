#include "longidesign/solvers.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>

#include "longidesign/variance.hpp"

namespace longidesign {

namespace {

const boost::math::normal_distribution<double> kStdNormal{};

double z_quantile(double p) { return boost::math::quantile(kStdNormal, p); }
double phi(double x) { return boost::math::cdf(kStdNormal, x); }

void check_alpha(double alpha) {
    if (alpha <= 0.0 || alpha >= 1.0) throw DomainError("alpha must lie in (0, 1)");
}

void check_target(double pi, double alpha) {
    check_alpha(alpha);
    if (pi <= alpha || pi >= 1.0)
        throw DomainError("target power must lie in (alpha, 1)");
}

double effect_of(const DesignQuery& q, bool allow_zero = false) {
    const double effect = q.effect.coefficient(q.hyp, q.grid.tau());
    if (effect == 0.0 && !allow_zero)
        throw DomainError("effect size must be nonzero");
    return effect;
}

double power_from_var(double var, double effect, double n, double alpha) {
    return phi(std::sqrt(n) * std::abs(effect) / std::sqrt(var) -
               z_quantile(1.0 - alpha / 2.0));
}

}  // namespace

double power(double n, const DesignQuery& query) {
    check_alpha(query.alpha);
    if (n <= 0.0) throw DomainError("sample size must be positive");
    const double var = unit_variance(query).value;
    // A zero effect is allowed here: the rejection rate is then alpha/2.
    return power_from_var(var, effect_of(query, true), n, query.alpha);
}

RequiredN required_n(double target_power, const DesignQuery& query) {
    check_target(target_power, query.alpha);
    const double var = unit_variance(query).value;
    const double effect = effect_of(query);
    const double zsum = z_quantile(target_power) + z_quantile(1.0 - query.alpha / 2.0);
    RequiredN out;
    out.fractional = var * zsum * zsum / (effect * effect);
    out.n = static_cast<long long>(std::ceil(out.fractional - 1e-12));
    if (out.n < 1) out.n = 1;
    return out;
}

RequiredR required_r(double target_power, double n, const DesignQuery& query,
                     int r_hi) {
    check_target(target_power, query.alpha);
    if (n <= 0.0) throw DomainError("sample size must be positive");
    if (r_hi < 1) throw DomainError("r_hi must be at least 1");
    const int r_lo = query.hyp == Hypothesis::CMD ? 0 : 1;

    RequiredR out;
    for (int r = r_lo; r <= r_hi; ++r) {
        if (query.grid.mode == RelMode::FixedTau && r < 1) continue;
        const double p = power(n, query.with_r(r));
        if (p > out.max_power) out.max_power = p;
        if (p >= target_power) {
            out.r = r;
            return out;
        }
    }

    // No r in range reaches the target; see whether the r -> infinity limit
    // settles attainability (only available when t0 does not vary).
    if (query.pop.v_t0 == 0.0) {
        const VarianceLimit lim = var_limit_r_inf(
            query.cov, query.hyp, query.grid.mode, query.pop, query.grid.value);
        if (lim.kind == VarianceLimit::Kind::Zero) {
            out.max_power = 1.0;
            out.limit_known = true;
        } else if (lim.kind == VarianceLimit::Kind::Value) {
            // Use the effect at the largest scanned grid.  The effect is
            // r-independent in fixed-horizon mode and always for the level
            // hypothesis; under fixed spacing the slope effect keeps growing
            // with the horizon, so only the scanned supremum is reported.
            if (query.grid.mode == RelMode::FixedTau ||
                query.hyp == Hypothesis::CMD) {
                const double effect = effect_of(query.with_r(r_hi));
                const double p = power_from_var(lim.value, effect, n, query.alpha);
                out.max_power = std::max(out.max_power, p);
                out.limit_known = true;
            }
        }
    }
    return out;
}

DetectableEffect min_detectable_effect(double target_power, double n,
                                       const DesignQuery& query) {
    check_target(target_power, query.alpha);
    if (n <= 0.0) throw DomainError("sample size must be positive");
    const double var = unit_variance(query).value;
    const double zsum = z_quantile(target_power) + z_quantile(1.0 - query.alpha / 2.0);
    DetectableEffect out;
    out.coefficient = std::sqrt(var * zsum * zsum / n);

    const auto* pct = std::get_if<PercentEffect>(&query.effect.v);
    if (!pct) {
        out.percent = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    if (pct->mu00 == 0.0) throw DomainError("mu00 must be nonzero");
    if (query.hyp == Hypothesis::CMD) {
        out.percent = out.coefficient / std::abs(pct->mu00);
    } else {
        const double tau = query.grid.tau();
        const double scale = std::abs(pct->p2) < 1e-12
                                 ? std::abs((1.0 + pct->p1) * pct->mu00)
                                 : std::abs(pct->p2 * pct->mu00);
        if (scale == 0.0) throw DomainError("percent-scale conversion is degenerate");
        out.percent = out.coefficient * tau / scale;
    }
    return out;
}

long long inflate_for_dropout(long long n, double f) {
    if (f < 0.0 || f >= 1.0) throw DomainError("dropout fraction must lie in [0, 1)");
    if (n < 0) throw DomainError("sample size must be non-negative");
    return static_cast<long long>(std::ceil(static_cast<double>(n) / (1.0 - f) - 1e-12));
}

}  // namespace longidesign
