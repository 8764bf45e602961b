#pragma once
// Unit asymptotic variance c' Sigma_B c of the exposure-effect estimator
// for every hypothesis x covariance x V(t0) combination.

#include "longidesign/types.hpp"

namespace longidesign {

// Constant mean difference (beta2).  Full formula:
//   [s^2 detA + s0^2 V(t0)] /
//   { pe(1-pe) s0 [s^2 detA + s0^2 (1 - rho_e_t0^2) V(t0)] }
// which reduces to 1/(pe(1-pe) s0) when V(t0) = 0 or rho_e_t0 = 0 (the
// reduction is applied directly in those cases; it is exact and avoids the
// 0/0 form at r = 0).
UnitVariance var_cmd(const SumTriple& sums, double s, const PopulationSpec& pop);

// Linearly divergent difference (gamma3):
//   s0 / { pe(1-pe) [s^2 detA + (1 - rho_e_t0^2) V(t0) s0^2] }
UnitVariance var_ldd(const SumTriple& sums, double s, const PopulationSpec& pop);

// Between/within formulation (eta5): the LDD formula with V(t0) forced to 0.
UnitVariance var_bw(const SumTriple& sums, double s, const PopulationSpec& pop);

// Random slopes with V(t0) > 0: Sigma_i varies across subjects, so
// E[X' Sigma_i^-1 X] is integrated over the per-group normal distribution of
// t0 with Gauss-Hermite quadrature (nodes doubling from `nodes_start` until
// successive estimates agree to `rel_tol`, capped at `nodes_max`).
struct QuadratureOptions {
    int nodes_start = 40;
    int nodes_max = 320;
    double rel_tol = 1e-8;
};
UnitVariance var_rs_numeric(const RsRawParams& raw, const TimeGrid& grid,
                            const PopulationSpec& pop, Hypothesis hyp,
                            const QuadratureOptions& opt = {});

// Limit of the unit variance as r -> infinity (V(t0) = 0 contexts only).
struct VarianceLimit {
    enum class Kind { Value, Zero, Unsupported } kind = Kind::Unsupported;
    double value = 0.0;  // meaningful only when kind == Value
    std::string note;    // explanation when Unsupported
};
VarianceLimit var_limit_r_inf(const CovarianceSpec& cov, Hypothesis hyp,
                              RelMode mode, const PopulationSpec& pop,
                              double horizon);

// Dispatcher: picks closed-form sums where available (CS; DEX with theta=1),
// the generic matrix path otherwise, and quadrature for RS with V(t0) > 0.
UnitVariance unit_variance(const DesignQuery& query);

// Closed-form LDD unit variance for random slopes with V(t0) = 0, expressed
// through the slope reliability (test oracle for the generic path):
//   fixed s:   (12 st0^2 (1-rho_t0)/(s^2 pe(1-pe)))
//              * [1/(r(r+1)(r+2)) + q / (rt(rt+1)(rt+2))]
//   fixed tau: (12 st0^2 (1-rho_t0)/(tau^2 pe(1-pe)))
//              * [r/((r+1)(r+2)) + q rt/((rt+1)(rt+2))]
// with q = rel/(1-rel) for the slope reliability quoted at rt measures.
double ldd_rs_closed(double sigma_t0_2, double rho_t0, double slope_rel,
                     int r_tilde, RelMode mode, double horizon, int r,
                     const PopulationSpec& pop);

}  // namespace longidesign
