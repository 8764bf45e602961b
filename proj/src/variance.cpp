#include "longidesign/variance.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <gsl/gsl_integration.h>
#include <vector>

#include "longidesign/covariance.hpp"

namespace longidesign {

namespace {

double common_denominator(const SumTriple& sums, double s, const PopulationSpec& pop) {
    return s * s * sums.det_a +
           (1.0 - pop.rho_e_t0 * pop.rho_e_t0) * pop.v_t0 * sums.s0 * sums.s0;
}

}  // namespace

UnitVariance var_cmd(const SumTriple& sums, double s, const PopulationSpec& pop) {
    pop.validate();
    const double g = pop.pe * (1.0 - pop.pe);
    if (pop.v_t0 == 0.0 || pop.rho_e_t0 == 0.0) {
        // Exact reduction; also sidesteps the 0/0 form at r = 0 (det_a = 0).
        return {1.0 / (g * sums.s0), VarMethod::ClosedForm};
    }
    const double num = s * s * sums.det_a + sums.s0 * sums.s0 * pop.v_t0;
    const double den = g * sums.s0 * common_denominator(sums, s, pop);
    return {num / den, VarMethod::ClosedForm};
}

UnitVariance var_ldd(const SumTriple& sums, double s, const PopulationSpec& pop) {
    pop.validate();
    const double den = pop.pe * (1.0 - pop.pe) * common_denominator(sums, s, pop);
    if (den <= 0.0) throw ComputationError("slope variance undefined: need r >= 1");
    return {sums.s0 / den, VarMethod::ClosedForm};
}

UnitVariance var_bw(const SumTriple& sums, double s, const PopulationSpec& pop) {
    pop.validate();
    const double den = pop.pe * (1.0 - pop.pe) * s * s * sums.det_a;
    if (den <= 0.0) throw ComputationError("slope variance undefined: need r >= 1");
    return {sums.s0 / den, VarMethod::ClosedForm};
}

namespace {

struct GaussHermite {
    std::vector<double> x;
    std::vector<double> w;  // normalized to sum to 1 (weights of N(0, 1/2))
};

GaussHermite gh_rule(int n) {
    gsl_integration_fixed_workspace* ws = gsl_integration_fixed_alloc(
        gsl_integration_fixed_hermite, static_cast<size_t>(n), 0.0, 1.0, 0.0, 0.0);
    if (!ws) throw ComputationError("failed to allocate quadrature rule");
    GaussHermite gh;
    gh.x.assign(gsl_integration_fixed_nodes(ws),
                gsl_integration_fixed_nodes(ws) + n);
    gh.w.assign(gsl_integration_fixed_weights(ws),
                gsl_integration_fixed_weights(ws) + n);
    gsl_integration_fixed_free(ws);
    const double inv_sqrt_pi = 1.0 / std::sqrt(M_PI);
    for (double& wi : gh.w) wi *= inv_sqrt_pi;
    return gh;
}

// Per-subject 2x2 slope information M(t0)^-1 with
// M(t0) = (Z'Z)^-1 sigma_w2 + D, Z = [1, t0 + s j].
struct Acd {
    double a, c, d;
};

Acd acd_at(const RsRawParams& raw, double t0, double s, int r) {
    Eigen::Matrix2d ztz;
    double st = 0.0, st2 = 0.0;
    for (int j = 0; j <= r; ++j) {
        const double t = t0 + s * j;
        st += t;
        st2 += t * t;
    }
    ztz << r + 1.0, st, st, st2;
    Eigen::Matrix2d d_mat;
    d_mat << raw.sigma_b0_2, raw.sigma_b0b1, raw.sigma_b0b1, raw.sigma_b1_2;
    const Eigen::Matrix2d m = ztz.inverse() * raw.sigma_w2 + d_mat;
    const Eigen::Matrix2d a = m.inverse();
    return {a(0, 0), a(0, 1), a(1, 1)};
}

struct GroupMoments {
    double a = 0.0, c = 0.0, d = 0.0;
};

GroupMoments group_mean(const RsRawParams& raw, double s, int r, double m,
                        double v, const GaussHermite& gh) {
    GroupMoments out;
    const double scale = std::sqrt(2.0 * v);
    for (size_t i = 0; i < gh.x.size(); ++i) {
        const Acd e = acd_at(raw, m + scale * gh.x[i], s, r);
        out.a += gh.w[i] * e.a;
        out.c += gh.w[i] * e.c;
        out.d += gh.w[i] * e.d;
    }
    return out;
}

double rs_quadrature_once(const RsRawParams& raw, const TimeGrid& grid,
                          const PopulationSpec& pop, Hypothesis hyp,
                          const GaussHermite& gh) {
    const int r = grid.r;
    const double s = grid.spacing();
    const double pe = pop.pe;
    const double sd = std::sqrt(pop.v_t0);
    const double m1 = pop.rho_e_t0 * sd * std::sqrt((1.0 - pe) / pe);
    const double m0 = -pop.rho_e_t0 * sd * std::sqrt(pe / (1.0 - pe));
    const double v = pop.v_t0 * (1.0 - pop.rho_e_t0 * pop.rho_e_t0);

    const GroupMoments g1 = group_mean(raw, s, r, m1, v, gh);
    const GroupMoments g0 = group_mean(raw, s, r, m0, v, gh);
    const double ea = (1.0 - pe) * g0.a + pe * g1.a;
    const double ec = (1.0 - pe) * g0.c + pe * g1.c;
    const double ed = (1.0 - pe) * g0.d + pe * g1.d;
    const double eka = pe * g1.a, ekc = pe * g1.c, ekd = pe * g1.d;

    if (hyp == Hypothesis::LDD) {
        Eigen::Matrix4d info;
        info << ea, ec, eka, ekc,
                ec, ed, ekc, ekd,
                eka, ekc, eka, ekc,
                ekc, ekd, ekc, ekd;
        return info.inverse()(3, 3);
    }
    Eigen::Matrix3d info;
    info << ea, ec, eka,
            ec, ed, ekc,
            eka, ekc, eka;
    return info.inverse()(2, 2);
}

}  // namespace

UnitVariance var_rs_numeric(const RsRawParams& raw, const TimeGrid& grid,
                            const PopulationSpec& pop, Hypothesis hyp,
                            const QuadratureOptions& opt) {
    pop.validate();
    if (hyp == Hypothesis::BW)
        throw DomainError("between/within variance ignores baseline time; use var_bw");
    if (hyp == Hypothesis::LDD && grid.r < 1)
        throw DomainError("slope hypothesis requires r >= 1");
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (int n = opt.nodes_start; n <= opt.nodes_max; n *= 2) {
        const double cur = rs_quadrature_once(raw, grid, pop, hyp, gh_rule(n));
        if (!std::isfinite(cur))
            throw ComputationError("quadrature produced a non-finite variance");
        if (std::isfinite(prev) &&
            std::abs(cur - prev) <= opt.rel_tol * std::abs(cur))
            return {cur, VarMethod::Quadrature};
        prev = cur;
    }
    return {prev, VarMethod::Quadrature};
}

VarianceLimit var_limit_r_inf(const CovarianceSpec& cov, Hypothesis hyp,
                              RelMode mode, const PopulationSpec& pop,
                              double horizon) {
    pop.validate();
    const double g = pop.pe * (1.0 - pop.pe);
    const bool slope = hyp != Hypothesis::CMD;  // BW shares the LDD limit

    auto cs_limit = [&](double sigma2, double rho) -> VarianceLimit {
        if (slope) return {VarianceLimit::Kind::Zero, 0.0, ""};
        if (rho <= 0.0) return {VarianceLimit::Kind::Zero, 0.0, ""};
        return {VarianceLimit::Kind::Value, sigma2 * rho / g, ""};
    };

    if (const auto* cs = std::get_if<CsParams>(&cov.v)) {
        return cs_limit(cs->sigma2, cs->rho);
    }
    if (const auto* dex = std::get_if<DexParams>(&cov.v)) {
        if (dex->theta == 0.0) return cs_limit(dex->sigma2, dex->rho);
        if (dex->theta != 1.0) {
            return {VarianceLimit::Kind::Unsupported, 0.0,
                    "no closed r -> infinity limit for damped-exponential "
                    "correlation with 0 < theta < 1"};
        }
        if (mode == RelMode::FixedS) return {VarianceLimit::Kind::Zero, 0.0, ""};
        // Fixed follow-up tau: spacing shrinks, serial correlation approaches 1.
        const double lr = std::log(dex->rho);
        const double tau = horizon;
        if (!slope) {
            return {VarianceLimit::Kind::Value,
                    2.0 * dex->sigma2 / (g * (2.0 - tau * lr)), ""};
        }
        const double den = -12.0 * tau + 6.0 * tau * tau * lr -
                           tau * tau * tau * lr * lr;
        return {VarianceLimit::Kind::Value, 24.0 * dex->sigma2 * lr / (g * den), ""};
    }
    const auto& rs = std::get<RsParams>(cov.v).raw;
    if (slope) return {VarianceLimit::Kind::Value, rs.sigma_b1_2 / g, ""};
    double value = rs.sigma_b0_2;
    if (rs.sigma_b1_2 > 0.0) value -= rs.sigma_b0b1 * rs.sigma_b0b1 / rs.sigma_b1_2;
    return {VarianceLimit::Kind::Value, value / g, ""};
}

UnitVariance unit_variance(const DesignQuery& query) {
    query.pop.validate();
    const int r = query.grid.r;
    if (query.hyp != Hypothesis::CMD && r < 1)
        throw DomainError("slope hypotheses require r >= 1");
    const double s = query.grid.spacing();

    SumTriple sums;
    VarMethod method = VarMethod::GenericMatrix;
    if (const auto* cs = std::get_if<CsParams>(&query.cov.v)) {
        sums = cs_inverse_sums_closed(cs->sigma2, cs->rho, r);
        method = VarMethod::ClosedForm;
    } else if (const auto* dex = std::get_if<DexParams>(&query.cov.v)) {
        if (dex->theta == 0.0) {
            sums = cs_inverse_sums_closed(dex->sigma2, dex->rho, r);
            method = VarMethod::ClosedForm;
        } else if (dex->theta == 1.0 && dex->rho > 0.0 && dex->rho < 1.0) {
            sums = ar1_inverse_sums_closed(dex->sigma2, dex->rho, s, r);
            method = VarMethod::ClosedForm;
        } else {
            sums = inverse_sums(build_dex(dex->sigma2, dex->rho, dex->theta, s, r));
        }
    } else {
        const auto& rs = std::get<RsParams>(query.cov.v);
        if (query.pop.v_t0 > 0.0 && query.hyp != Hypothesis::BW) {
            return var_rs_numeric(rs.raw, query.grid, query.pop, query.hyp);
        }
        sums = inverse_sums(build_rs(rs.raw, 0.0, s, r));
    }

    UnitVariance out;
    switch (query.hyp) {
        case Hypothesis::CMD: out = var_cmd(sums, s, query.pop); break;
        case Hypothesis::LDD: out = var_ldd(sums, s, query.pop); break;
        case Hypothesis::BW: out = var_bw(sums, s, query.pop); break;
    }
    out.method = method;
    return out;
}

double ldd_rs_closed(double sigma_t0_2, double rho_t0, double slope_rel,
                     int r_tilde, RelMode mode, double horizon, int r,
                     const PopulationSpec& pop) {
    pop.validate();
    if (r < 1) throw DomainError("slope hypothesis requires r >= 1");
    if (slope_rel < 0.0 || slope_rel >= 1.0)
        throw DomainError("slope_rel must lie in [0, 1)");
    const double q = slope_rel / (1.0 - slope_rel);
    const double g = pop.pe * (1.0 - pop.pe);
    const double rr = r, rt = r_tilde;
    const double lead = 12.0 * sigma_t0_2 * (1.0 - rho_t0) /
                        (horizon * horizon * g);
    if (mode == RelMode::FixedS) {
        return lead * (1.0 / (rr * (rr + 1.0) * (rr + 2.0)) +
                       q / (rt * (rt + 1.0) * (rt + 2.0)));
    }
    return lead * (rr / ((rr + 1.0) * (rr + 2.0)) +
                   q * rt / ((rt + 1.0) * (rt + 2.0)));
}

}  // namespace longidesign
