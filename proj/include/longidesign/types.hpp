#pragma once
// Core value types shared by the design engine: covariance specifications,
// time grids, population description, hypotheses and effect sizes.

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

namespace longidesign {

// Thrown for invalid user-supplied parameters (prevalence out of range,
// non-positive-definite covariance, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Thrown when a computation cannot proceed (singular matrix, quadrature
// failure, infeasible budget, ...).
class ComputationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Covariance structures
// ---------------------------------------------------------------------------

// Compound symmetry: Var = sigma2, Corr(j, j') = rho for all j != j'.
struct CsParams {
    double sigma2 = 1.0;
    double rho = 0.0;
};

// Damped exponential: Corr(j, j') = rho^((|j-j'| * s)^theta).
// theta = 0 reduces to CS, theta = 1 is AR(1).
struct DexParams {
    double sigma2 = 1.0;
    double rho = 0.5;
    double theta = 1.0;
};

// Random intercept + slope, raw parameterization:
// Sigma_i = Z_i D Z_i' + sigma_w2 I with D = [[sigma_b0_2, sigma_b0b1],
// [sigma_b0b1, sigma_b1_2]].
struct RsRawParams {
    double sigma_w2 = 1.0;    // within-subject residual variance
    double sigma_b0_2 = 0.0;  // random-intercept variance
    double sigma_b1_2 = 0.0;  // random-slope variance (per time-unit^2)
    double sigma_b0b1 = 0.0;  // intercept-slope covariance
};

// Whether the slope reliability (and the time grid) is anchored to a fixed
// spacing s between measurements or a fixed total follow-up tau.
enum class RelMode { FixedS, FixedTau };

// Random slopes, intuitive ("reliability") parameterization.
struct RsIntuitiveParams {
    double sigma_t0_2 = 1.0;  // total residual variance at baseline
    double rho_t0 = 0.0;      // baseline reliability, sigma_b0_2 / sigma_t0_2
    double rho_b0b1 = 0.0;    // intercept-slope correlation
    double slope_rel = 0.0;   // slope reliability quoted at r_tilde measures
    int r_tilde = 1;          // trial repeated-measure count for slope_rel
    RelMode rel_mode = RelMode::FixedS;
    double horizon = 1.0;     // s (FixedS) or tau (FixedTau) for slope_rel
};

// Random-slopes spec: always carries raw parameters; remembers the intuitive
// source (if any) so reliabilities can be re-reported in the user's terms.
struct RsParams {
    RsRawParams raw;
    std::optional<RsIntuitiveParams> intuitive;
};

struct CovarianceSpec {
    std::variant<CsParams, DexParams, RsParams> v;

    bool is_cs() const { return std::holds_alternative<CsParams>(v); }
    bool is_dex() const { return std::holds_alternative<DexParams>(v); }
    bool is_rs() const { return std::holds_alternative<RsParams>(v); }
};

// ---------------------------------------------------------------------------
// Design context
// ---------------------------------------------------------------------------

// Measurement times are indexed j = 0..r with physical spacing s; the total
// follow-up is tau = s * r.  In FixedTau mode s = tau / r (requires r >= 1).
struct TimeGrid {
    int r = 1;
    RelMode mode = RelMode::FixedS;
    double value = 1.0;  // s in FixedS mode, tau in FixedTau mode

    double spacing() const {
        if (mode == RelMode::FixedS) return value;
        if (r < 1) throw DomainError("fixed-tau grid requires r >= 1");
        return value / r;
    }
    double tau() const { return mode == RelMode::FixedS ? value * r : value; }
    TimeGrid with_r(int new_r) const { return TimeGrid{new_r, mode, value}; }
};

// Exposure prevalence and the distribution of entry time t0.
struct PopulationSpec {
    double pe = 0.5;        // exposure prevalence, in (0,1)
    double v_t0 = 0.0;      // variance of baseline time across participants
    double rho_e_t0 = 0.0;  // correlation of exposure with baseline time

    void validate() const;
};

enum class Hypothesis { CMD, LDD, BW };

// Effect size, either on the percent scale relative to the baseline mean
// mu00 or directly as the model coefficient.
struct PercentEffect {
    double mu00 = 1.0;  // mean response at baseline among unexposed
    double p1 = 0.0;    // percent group difference at baseline (CMD; LDD if p2=0)
    double p2 = 0.0;    // percent change over follow-up among unexposed
    double p3 = 0.0;    // percent difference in change between groups
};

struct AbsoluteEffect {
    double beta = 0.0;  // beta2 (CMD, response units) or gamma3 (LDD, per time-unit)
};

struct EffectSpec {
    std::variant<PercentEffect, AbsoluteEffect> v;

    // The model coefficient tested by the Wald statistic:
    // CMD: beta2 = p1 * mu00.
    // LDD: gamma3 = p2 * p3 * mu00 / tau, or (1 + p1) * p3 * mu00 / tau when
    //      p2 = 0 (|p2| < 1e-12 is treated as zero).
    double coefficient(Hypothesis hyp, double tau) const;
};

// A complete design question minus the quantity being solved for.
struct DesignQuery {
    TimeGrid grid;
    PopulationSpec pop;
    CovarianceSpec cov;
    Hypothesis hyp = Hypothesis::CMD;
    EffectSpec effect;
    double alpha = 0.05;  // two-sided significance level

    DesignQuery with_r(int r) const {
        DesignQuery q = *this;
        q.grid = grid.with_r(r);
        return q;
    }
};

// The three inverse-covariance sums driving every variance formula:
// s0 = sum_jj' v_jj', s1 = sum_jj' j v_jj', s2 = sum_jj' j j' v_jj',
// det_a = s0 * s2 - s1^2 (the determinant of the 2x2 matrix A).
struct SumTriple {
    double s0 = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
    double det_a = 0.0;
};

enum class VarMethod { ClosedForm, GenericMatrix, Quadrature };

// c' Sigma_B c: asymptotic variance of sqrt(N) times the effect estimator.
struct UnitVariance {
    double value = 0.0;
    VarMethod method = VarMethod::GenericMatrix;
};

}  // namespace longidesign
