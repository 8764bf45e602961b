#include "longidesign/oracle.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>
#include <thread>

#include "longidesign/covariance.hpp"
#include "longidesign/variance.hpp"

namespace longidesign {

namespace {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("LONGIDESIGN_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

std::mt19937_64 replicate_rng(unsigned long long base_seed, long long rep) {
    std::seed_seq seq{static_cast<unsigned long long>(base_seed),
                      static_cast<unsigned long long>(rep)};
    return std::mt19937_64(seq);
}

// Fixed-effect design matrix for one subject: CMD columns (1, t, k),
// LDD columns (1, t, k, k t); the tested coefficient is last.
Eigen::MatrixXd design_matrix(Hypothesis hyp, int r, double t0, double s, int k) {
    const int d = hyp == Hypothesis::LDD ? 4 : 3;
    Eigen::MatrixXd x(r + 1, d);
    for (int j = 0; j <= r; ++j) {
        const double t = t0 + s * j;
        x(j, 0) = 1.0;
        x(j, 1) = t;
        x(j, 2) = k;
        if (d == 4) x(j, 3) = k * t;
    }
    return x;
}

Eigen::MatrixXd sigma_for(const CovarianceSpec& cov, double t0, double s, int r) {
    if (const auto* cs = std::get_if<CsParams>(&cov.v))
        return build_cs(cs->sigma2, cs->rho, r);
    if (const auto* dex = std::get_if<DexParams>(&cov.v))
        return build_dex(dex->sigma2, dex->rho, dex->theta, s, r);
    return build_rs(std::get<RsParams>(cov.v).raw, t0, s, r);
}

struct T0Mixture {
    double m1 = 0.0;  // exposed-group mean of t0
    double m0 = 0.0;  // unexposed-group mean
    double sd = 0.0;  // common within-group standard deviation
};

T0Mixture t0_mixture(const PopulationSpec& pop) {
    T0Mixture mix;
    const double sd0 = std::sqrt(pop.v_t0);
    mix.m1 = pop.rho_e_t0 * sd0 * std::sqrt((1.0 - pop.pe) / pop.pe);
    mix.m0 = -pop.rho_e_t0 * sd0 * std::sqrt(pop.pe / (1.0 - pop.pe));
    mix.sd = std::sqrt(pop.v_t0 * (1.0 - pop.rho_e_t0 * pop.rho_e_t0));
    return mix;
}

}  // namespace

McInformation mc_information(const DesignQuery& query, const SimConfig& cfg) {
    query.pop.validate();
    if (cfg.replicates < 2) throw DomainError("need at least 2 replicates");
    const int r = query.grid.r;
    const double s = query.grid.spacing();
    const int d = query.hyp == Hypothesis::LDD ? 4 : 3;
    const T0Mixture mix = t0_mixture(query.pop);
    const bool sigma_varies = query.cov.is_rs() && query.pop.v_t0 > 0.0;
    const Eigen::MatrixXd sigma_fixed =
        sigma_varies ? Eigen::MatrixXd() : sigma_for(query.cov, 0.0, s, r);
    Eigen::LLT<Eigen::MatrixXd> llt_fixed;
    if (!sigma_varies) {
        llt_fixed.compute(sigma_fixed);
        if (llt_fixed.info() != Eigen::Success)
            throw ComputationError("covariance matrix is not positive definite");
    }

    const int threads = resolve_threads(cfg.threads);
    std::vector<Eigen::MatrixXd> sum(threads, Eigen::MatrixXd::Zero(d, d));
    std::vector<Eigen::MatrixXd> sumsq(threads, Eigen::MatrixXd::Zero(d, d));

    auto worker = [&](int tid) {
        for (long long rep = tid; rep < cfg.replicates; rep += threads) {
            auto rng = replicate_rng(cfg.seed, rep);
            std::bernoulli_distribution expose(query.pop.pe);
            std::normal_distribution<double> gauss(0.0, 1.0);
            const int k = expose(rng) ? 1 : 0;
            const double t0 = (k ? mix.m1 : mix.m0) + mix.sd * gauss(rng);
            const Eigen::MatrixXd x = design_matrix(query.hyp, r, t0, s, k);
            Eigen::MatrixXd info(d, d);
            if (sigma_varies) {
                Eigen::LLT<Eigen::MatrixXd> llt(sigma_for(query.cov, t0, s, r));
                info = x.transpose() * llt.solve(x);
            } else {
                info = x.transpose() * llt_fixed.solve(x);
            }
            sum[tid] += info;
            sumsq[tid] += info.cwiseProduct(info);
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker, t);
    worker(0);
    for (auto& th : pool) th.join();

    Eigen::MatrixXd total = Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXd total_sq = Eigen::MatrixXd::Zero(d, d);
    for (int t = 0; t < threads; ++t) {
        total += sum[t];
        total_sq += sumsq[t];
    }
    const double nrep = static_cast<double>(cfg.replicates);
    McInformation out;
    out.mean = total / nrep;
    const Eigen::MatrixXd var =
        (total_sq / nrep - out.mean.cwiseProduct(out.mean)) * (nrep / (nrep - 1.0));
    out.se = (var / nrep).cwiseMax(0.0).cwiseSqrt();
    return out;
}

PowerEstimate simulate_power(const DesignQuery& query, long long n,
                             const SimConfig& cfg) {
    query.pop.validate();
    if (n < 2) throw DomainError("need at least 2 participants");
    if (cfg.replicates < 1) throw DomainError("need at least 1 replicate");
    const int r = query.grid.r;
    const double s = query.grid.spacing();
    const int d = query.hyp == Hypothesis::LDD ? 4 : 3;
    const double effect = query.effect.coefficient(query.hyp, query.grid.tau());
    const T0Mixture mix = t0_mixture(query.pop);
    const boost::math::normal_distribution<double> std_normal{};
    const double z_crit = boost::math::quantile(std_normal, 1.0 - query.alpha / 2.0);

    const bool sigma_varies = query.cov.is_rs() && query.pop.v_t0 > 0.0;
    Eigen::MatrixXd chol_fixed, siginv_fixed;
    if (!sigma_varies) {
        const Eigen::MatrixXd sigma = sigma_for(query.cov, 0.0, s, r);
        Eigen::LLT<Eigen::MatrixXd> llt(sigma);
        if (llt.info() != Eigen::Success)
            throw ComputationError("covariance matrix is not positive definite");
        chol_fixed = llt.matrixL();
        siginv_fixed = llt.solve(Eigen::MatrixXd::Identity(r + 1, r + 1));
    }

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(d);
    beta(d - 1) = effect;

    const int threads = resolve_threads(cfg.threads);
    std::vector<long long> rejections(threads, 0), redraw_count(threads, 0);

    auto worker = [&](int tid) {
        for (long long rep = tid; rep < cfg.replicates; rep += threads) {
            auto rng = replicate_rng(cfg.seed, rep);
            std::bernoulli_distribution expose(query.pop.pe);
            std::normal_distribution<double> gauss(0.0, 1.0);

            Eigen::MatrixXd info;
            Eigen::VectorXd score;
            bool degenerate = true;
            while (degenerate) {
                info = Eigen::MatrixXd::Zero(d, d);
                score = Eigen::VectorXd::Zero(d);
                long long exposed = 0;
                for (long long i = 0; i < n; ++i) {
                    const int k = expose(rng) ? 1 : 0;
                    exposed += k;
                    const double t0 = (k ? mix.m1 : mix.m0) + mix.sd * gauss(rng);
                    const Eigen::MatrixXd x = design_matrix(query.hyp, r, t0, s, k);
                    Eigen::VectorXd z(r + 1);
                    for (int j = 0; j <= r; ++j) z(j) = gauss(rng);
                    if (sigma_varies) {
                        Eigen::LLT<Eigen::MatrixXd> llt(
                            sigma_for(query.cov, t0, s, r));
                        const Eigen::MatrixXd lmat = llt.matrixL();
                        const Eigen::VectorXd y = x * beta + lmat * z;
                        const Eigen::MatrixXd sx = llt.solve(x);
                        info += x.transpose() * sx;
                        score += sx.transpose() * y;
                    } else {
                        const Eigen::VectorXd y = x * beta + chol_fixed * z;
                        const Eigen::MatrixXd sx = siginv_fixed * x;
                        info += x.transpose() * sx;
                        score += sx.transpose() * y;
                    }
                }
                degenerate = exposed == 0 || exposed == n;
                if (degenerate) ++redraw_count[tid];
            }
            const Eigen::MatrixXd cov_hat = info.inverse();
            const Eigen::VectorXd est = cov_hat * score;
            const double wald =
                est(d - 1) / std::sqrt(cov_hat(d - 1, d - 1));
            if (std::abs(wald) > z_crit) ++rejections[tid];
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker, t);
    worker(0);
    for (auto& th : pool) th.join();

    long long rej = 0, redraws = 0;
    for (int t = 0; t < threads; ++t) {
        rej += rejections[t];
        redraws += redraw_count[t];
    }
    PowerEstimate out;
    const double m = static_cast<double>(cfg.replicates);
    out.rate = rej / m;
    out.se = std::sqrt(out.rate * (1.0 - out.rate) / m);
    out.redraws = redraws;
    return out;
}

double ancova_ncp_ratio(int r, double rho) {
    if (r < 1) throw DomainError("r must be at least 1");
    if (rho <= 0.0 || rho >= 1.0) throw DomainError("rho must lie in (0, 1)");
    return (r + 1.0) / (r * (1.0 - rho));
}

double summary_bias_h0(SummaryStat stat, int r, double rho, double p1, double mu00) {
    if (r < 1) throw DomainError("r must be at least 1");
    const double rr = r;
    switch (stat) {
        case SummaryStat::ANCOVA:
            return p1 * mu00 * (1.0 - rho);
        case SummaryStat::SLANC:
            return 6.0 * p1 * mu00 * (rr - rho) / (rr * (rr + 1.0) * (rr + 2.0));
        case SummaryStat::SLAIN:
            return 6.0 * p1 * mu00 * (1.0 - rho) /
                   (rho * rr * (rr - 1.0) + 2.0 * (2.0 * rr + 1.0));
    }
    throw DomainError("unknown summary statistic");
}

Eigen::VectorXd summary_contrast(SummaryStat stat, int r, double rho) {
    if (r < 1) throw DomainError("r must be at least 1");
    Eigen::VectorXd c(r + 1);
    const double rr = r;
    switch (stat) {
        case SummaryStat::ANCOVA:
            c(0) = -rho;
            for (int j = 1; j <= r; ++j) c(j) = 1.0 / rr;
            return c;
        case SummaryStat::SLANC: {
            const double lead = 6.0 / (rr * (rr + 1.0) * (rr + 2.0));
            c(0) = -rho * lead;
            for (int j = 1; j <= r; ++j) c(j) = (2.0 * j - rr) * lead;
            return c;
        }
        case SummaryStat::SLAIN: {
            const double den =
                rr * (rr + 1.0) * (rho * rr * (rr - 1.0) + 2.0 * (2.0 * rr + 1.0));
            for (int j = 0; j <= r; ++j)
                c(j) = (12.0 * j + 6.0 * rho * rr * (2.0 * j - rr - 1.0)) / den;
            return c;
        }
    }
    throw DomainError("unknown summary statistic");
}

CheckReport check_two_stage_equivalence(const CovarianceSpec& cov, int r, double s) {
    if (r < 1) throw DomainError("r must be at least 1");
    CheckReport rep;
    rep.name = "two-stage/GLS equivalence (projection commutes with Sigma)";
    const Eigen::MatrixXd sigma = sigma_for(cov, 0.0, s, r);
    Eigen::MatrixXd z(r + 1, 2);
    for (int j = 0; j <= r; ++j) {
        z(j, 0) = 1.0;
        z(j, 1) = j;
    }
    const Eigen::MatrixXd p = z * (z.transpose() * z).inverse() * z.transpose();
    const double gap = (p * sigma - sigma * p).cwiseAbs().maxCoeff();
    bool should_commute = true;
    if (const auto* dex = std::get_if<DexParams>(&cov.v))
        should_commute = dex->theta == 0.0;
    const bool commutes = gap < 1e-10 * sigma.cwiseAbs().maxCoeff();
    rep.observed = {gap};
    rep.expected = {should_commute ? 0.0 : 1.0};
    rep.tolerance = 1e-10;
    rep.passed = commutes == should_commute;
    rep.detail = commutes
                     ? "slope projection commutes with the covariance; the "
                       "subject-slope summary equals the GLS estimate"
                     : "projection does not commute; two-stage summary slopes "
                       "lose efficiency relative to GLS";
    return rep;
}

CheckReport check_r1_r2_equal_variance(const CovarianceSpec& cov, double tau,
                                       const PopulationSpec& pop) {
    pop.validate();
    if (pop.v_t0 != 0.0)
        throw DomainError("r=1/r=2 equivalence is stated for v_t0 = 0");
    CheckReport rep;
    rep.name = "fixed-horizon slope variance equal at r=1 and r=2";
    const Eigen::MatrixXd sig2 = sigma_for(cov, 0.0, tau / 2.0, 2);
    const double lhs = sig2(0, 0) - sig2(2, 2);
    const double rhs = 2.0 * (sig2(0, 1) - sig2(1, 2));
    const bool condition = std::abs(lhs - rhs) <=
                           1e-10 * std::max(1.0, sig2.cwiseAbs().maxCoeff());

    const double v1 =
        var_ldd(inverse_sums(sigma_for(cov, 0.0, tau, 1)), tau, pop).value;
    const double v2 =
        var_ldd(inverse_sums(sig2), tau / 2.0, pop).value;
    const bool equal = std::abs(v1 - v2) <= 1e-10 * std::abs(v1);

    rep.observed = {lhs - rhs, v1, v2};
    rep.expected = {0.0, v1, v1};
    rep.tolerance = 1e-10;
    rep.passed = condition == equal;  // the criterion characterizes equality
    std::ostringstream os;
    os << "entry condition " << (condition ? "holds" : "fails")
       << ", variances " << (equal ? "equal" : "differ")
       << " (r=1: " << v1 << ", r=2: " << v2 << ")";
    rep.detail = os.str();
    return rep;
}

CheckReport check_bw_diff_equivalence(const Eigen::MatrixXd& sigma, double s,
                                      const PopulationSpec& pop) {
    pop.validate();
    const int r = static_cast<int>(sigma.rows()) - 1;
    if (r < 1) throw DomainError("need at least one follow-up measure");
    CheckReport rep;
    rep.name = "between/within variance equals the first-difference model GLS";

    Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(r, r + 1);
    for (int i = 0; i < r; ++i) {
        delta(i, i) = -1.0;
        delta(i, i + 1) = 1.0;
    }
    const Eigen::MatrixXd dsd_inv = (delta * sigma * delta.transpose()).inverse();
    const Eigen::MatrixXd lhs = delta.transpose() * dsd_inv * delta;

    const Eigen::MatrixXd siginv = sigma.inverse();
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(r + 1);
    const Eigen::VectorXd u = siginv * ones;
    const Eigen::MatrixXd rhs = siginv - u * u.transpose() / (ones.dot(u));
    const double identity_gap = (lhs - rhs).cwiseAbs().maxCoeff();

    const SumTriple sums = inverse_sums(sigma);
    const double diff_var =
        Eigen::VectorXd::Ones(r).dot(dsd_inv * Eigen::VectorXd::Ones(r));
    // 1' (Delta Sigma Delta')^-1 1 = det(A)/s0, so the per-step difference
    // slope has unit variance s0/(pe(1-pe) det(A)); divided by s^2 it is
    // the per-time-unit slope variance from the full model.
    const double lambda_var = 1.0 / (pop.pe * (1.0 - pop.pe) * diff_var);
    const double bw = var_bw(sums, s, pop).value;
    const double var_gap = std::abs(lambda_var / (s * s) - bw) / bw;

    rep.observed = {identity_gap, lambda_var / (s * s)};
    rep.expected = {0.0, bw};
    rep.tolerance = 1e-9;
    rep.passed = identity_gap < 1e-9 * siginv.cwiseAbs().maxCoeff() &&
                 var_gap < 1e-9;
    rep.detail = "difference matrix projects out subject levels exactly as the "
                 "centered inverse covariance";
    return rep;
}

std::vector<CheckReport> run_check_battery(const SimConfig& cfg) {
    std::vector<CheckReport> out;
    const PopulationSpec pop{0.5, 0.0, 0.0};

    const CovarianceSpec cs{CsParams{1.0, 0.6}};
    const CovarianceSpec dex_damped{DexParams{1.0, 0.8, 0.18}};
    const CovarianceSpec dex_ar1{DexParams{1.0, 0.8, 1.0}};
    RsParams rs;
    rs.raw = RsRawParams{0.7, 0.3, 0.01, -0.02};
    const CovarianceSpec rs_spec{rs};

    out.push_back(check_two_stage_equivalence(cs, 4, 1.0));
    out.push_back(check_two_stage_equivalence(rs_spec, 4, 1.0));
    out.push_back(check_two_stage_equivalence(dex_ar1, 4, 1.0));
    out.push_back(check_two_stage_equivalence(dex_damped, 4, 1.0));

    out.push_back(check_r1_r2_equal_variance(cs, 6.0, pop));
    out.push_back(check_r1_r2_equal_variance(dex_ar1, 6.0, pop));
    out.push_back(check_r1_r2_equal_variance(rs_spec, 6.0, pop));

    out.push_back(
        check_bw_diff_equivalence(build_cs(1.0, 0.6, 4), 1.5, pop));
    out.push_back(
        check_bw_diff_equivalence(build_dex(1.0, 0.8, 0.18, 1.5, 4), 1.5, pop));

    {
        CheckReport rep;
        rep.name = "summary-statistic null bias matches the contrast identities";
        rep.tolerance = 1e-12;
        rep.passed = true;
        const double p1 = 0.1, mu00 = 3.5;
        for (int r : {1, 3, 6}) {
            for (double rho : {0.3, 0.857}) {
                for (SummaryStat st :
                     {SummaryStat::ANCOVA, SummaryStat::SLANC, SummaryStat::SLAIN}) {
                    const double direct =
                        summary_contrast(st, r, rho).sum() * p1 * mu00;
                    const double closed = summary_bias_h0(st, r, rho, p1, mu00);
                    rep.observed.push_back(direct);
                    rep.expected.push_back(closed);
                    if (std::abs(direct - closed) > 1e-12 * std::abs(closed))
                        rep.passed = false;
                }
            }
        }
        rep.detail = "ANCOVA, slope-with-baseline-covariate and "
                     "slope-with-baseline-included statistics are all biased "
                     "when groups differ at baseline";
        out.push_back(rep);
    }

    {
        CheckReport rep;
        rep.name = "GLS/ANCOVA noncentrality ratio exceeds 1";
        rep.tolerance = 0.0;
        rep.passed = true;
        for (int r : {1, 2, 6, 12}) {
            for (double rho : {0.2, 0.6, 0.9}) {
                const double ratio = ancova_ncp_ratio(r, rho);
                rep.observed.push_back(ratio);
                rep.expected.push_back(1.0);
                if (!(ratio > 1.0)) rep.passed = false;
            }
        }
        rep.detail = "the full-likelihood test dominates the "
                     "baseline-adjusted summary test at every (r, rho)";
        out.push_back(rep);
    }

    {
        // Monte Carlo information agrees with the analytic unit variance.
        CheckReport rep;
        rep.name = "simulated information matches the analytic variance";
        DesignQuery q;
        q.grid = TimeGrid{4, RelMode::FixedS, 1.0};
        q.pop = PopulationSpec{0.6, 2.0, 0.3};
        q.cov = cs;
        q.hyp = Hypothesis::CMD;
        q.effect.v = AbsoluteEffect{0.2};
        const McInformation mc = mc_information(q, cfg);
        const int d = 3;
        const double sim_var = mc.mean.inverse()(d - 1, d - 1);
        const double exact = unit_variance(q).value;
        // Rough delta-method band: scale the entry SE through the inverse.
        const double band = 4.0 * mc.se.maxCoeff() *
                            mc.mean.inverse().cwiseAbs().maxCoeff() * sim_var;
        rep.observed = {sim_var};
        rep.expected = {exact};
        rep.tolerance = band;
        rep.passed = std::abs(sim_var - exact) < std::max(band, 0.05 * exact);
        rep.detail = "inverse of the simulated mean information, last diagonal "
                     "entry, against the closed-form unit variance";
        out.push_back(rep);
    }

    return out;
}

}  // namespace longidesign
