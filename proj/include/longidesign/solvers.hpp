#pragma once
// Single-unknown design solvers: power, required N, required r, minimum
// detectable effect, and the dropout inflation helper.

#include <optional>

#include "longidesign/types.hpp"

namespace longidesign {

// Power of the two-sided Wald test at sample size n:
//   Phi( sqrt(n) |effect| / sqrt(c' Sigma_B c) - z_{1-alpha/2} )
double power(double n, const DesignQuery& query);

struct RequiredN {
    double fractional = 0.0;  // exact solution of Eq. (c'SBc)(z_pi+z)^2/effect^2
    long long n = 0;          // ceiling, the reported sample size
};
RequiredN required_n(double target_power, const DesignQuery& query);

// Smallest integer r in [r_lo, r_hi] achieving the target power at fixed n.
// When the r -> infinity variance limit proves the target unattainable the
// result carries the maximum achievable power instead.
struct RequiredR {
    std::optional<int> r;      // empty if unattainable within bounds
    double max_power = 0.0;    // supremum of power over r (limit or scan max)
    bool limit_known = false;  // true if max_power comes from the r->inf limit
};
RequiredR required_r(double target_power, double n, const DesignQuery& query,
                     int r_hi = 1000);

// Minimum detectable effect at fixed (n, r):
// |effect| = sqrt((c'SBc)(z_pi + z_{1-alpha/2})^2 / n), converted back to the
// percent scale: p1 = effect/mu00 (CMD), p3 = effect*tau/(|p2| mu00) (LDD),
// or effect*tau/((1+p1) mu00) when p2 = 0.
struct DetectableEffect {
    double coefficient = 0.0;  // |beta2| or |gamma3|
    double percent = 0.0;      // |p1| or |p3| as a fraction (0.22 for 22%)
};
DetectableEffect min_detectable_effect(double target_power, double n,
                                       const DesignQuery& query);

// ceiling(n / (1 - f)) for anticipated dropout fraction f in [0, 1).
long long inflate_for_dropout(long long n, double f);

}  // namespace longidesign
