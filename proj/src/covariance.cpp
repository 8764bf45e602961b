#include "longidesign/covariance.hpp"

#include <Eigen/Cholesky>
#include <cmath>

namespace longidesign {

namespace {

void check_cs_args(double sigma2, double rho, int r) {
    if (sigma2 <= 0.0) throw DomainError("sigma2 must be positive");
    if (rho <= -1.0 || rho >= 1.0) throw DomainError("rho must lie in (-1, 1)");
    if (r < 0) throw DomainError("r must be non-negative");
}

}  // namespace

Eigen::MatrixXd build_cs(double sigma2, double rho, int r) {
    check_cs_args(sigma2, rho, r);
    const int n = r + 1;
    Eigen::MatrixXd m = Eigen::MatrixXd::Constant(n, n, sigma2 * rho);
    m.diagonal().setConstant(sigma2);
    return m;
}

Eigen::MatrixXd build_dex(double sigma2, double rho, double theta, double s, int r) {
    check_cs_args(sigma2, rho, r);
    if (theta < 0.0 || theta > 1.0) throw DomainError("theta must lie in [0, 1]");
    if (s <= 0.0) throw DomainError("spacing s must be positive");
    const int n = r + 1;
    Eigen::MatrixXd m(n, n);
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k <= j; ++k) {
            const double dt = (j - k) * s;
            const double v = (j == k) ? sigma2 : sigma2 * std::pow(rho, std::pow(dt, theta));
            m(j, k) = v;
            m(k, j) = v;
        }
    }
    return m;
}

Eigen::MatrixXd build_rs(const RsRawParams& raw, double t0, double s, int r) {
    if (raw.sigma_w2 <= 0.0) throw DomainError("sigma_w2 must be positive");
    if (raw.sigma_b0_2 < 0.0 || raw.sigma_b1_2 < 0.0)
        throw DomainError("random-effect variances must be non-negative");
    if (raw.sigma_b0b1 * raw.sigma_b0b1 > raw.sigma_b0_2 * raw.sigma_b1_2 * (1 + 1e-12))
        throw DomainError("sigma_b0b1^2 must not exceed sigma_b0_2 * sigma_b1_2");
    if (r < 0) throw DomainError("r must be non-negative");
    const int n = r + 1;
    Eigen::MatrixXd z(n, 2);
    for (int j = 0; j < n; ++j) {
        z(j, 0) = 1.0;
        z(j, 1) = t0 + s * j;
    }
    Eigen::Matrix2d d;
    d << raw.sigma_b0_2, raw.sigma_b0b1, raw.sigma_b0b1, raw.sigma_b1_2;
    Eigen::MatrixXd m = z * d * z.transpose();
    m.diagonal().array() += raw.sigma_w2;
    return m;
}

RsRawParams rs_intuitive_to_raw(const RsIntuitiveParams& p) {
    if (p.sigma_t0_2 <= 0.0) throw DomainError("sigma_t0_2 must be positive");
    if (p.rho_t0 < 0.0 || p.rho_t0 >= 1.0) throw DomainError("rho_t0 must lie in [0, 1)");
    if (p.slope_rel < 0.0 || p.slope_rel >= 1.0)
        throw DomainError("slope_rel must lie in [0, 1); 1 implies infinite slope variance");
    if (p.rho_b0b1 < -1.0 || p.rho_b0b1 > 1.0)
        throw DomainError("rho_b0b1 must lie in [-1, 1]");
    if (p.r_tilde < 1) throw DomainError("r_tilde must be at least 1");
    if (p.horizon <= 0.0) throw DomainError("slope-reliability horizon must be positive");

    RsRawParams raw;
    raw.sigma_b0_2 = p.rho_t0 * p.sigma_t0_2;
    raw.sigma_w2 = (1.0 - p.rho_t0) * p.sigma_t0_2;
    const double rt = p.r_tilde;
    if (p.rel_mode == RelMode::FixedS) {
        // rel = sb1 s^2 P / (12 sw2 + sb1 s^2 P), P = rt(rt+1)(rt+2)
        const double pfac = rt * (rt + 1.0) * (rt + 2.0);
        raw.sigma_b1_2 = 12.0 * raw.sigma_w2 * p.slope_rel /
                         ((1.0 - p.slope_rel) * p.horizon * p.horizon * pfac);
    } else {
        // rel = sb1 tau^2 (rt+1)(rt+2) / (12 rt sw2 + sb1 tau^2 (rt+1)(rt+2))
        const double qfac = p.horizon * p.horizon * (rt + 1.0) * (rt + 2.0);
        raw.sigma_b1_2 = 12.0 * rt * raw.sigma_w2 * p.slope_rel /
                         ((1.0 - p.slope_rel) * qfac);
    }
    raw.sigma_b0b1 = p.rho_b0b1 * std::sqrt(raw.sigma_b0_2 * raw.sigma_b1_2);
    return raw;
}

double slope_reliability(const RsRawParams& raw, RelMode mode, double horizon, int r) {
    if (r < 1) throw DomainError("slope reliability requires r >= 1");
    if (horizon <= 0.0) throw DomainError("horizon must be positive");
    const double rr = r;
    if (mode == RelMode::FixedS) {
        const double x = raw.sigma_b1_2 * horizon * horizon * rr * (rr + 1.0) * (rr + 2.0);
        return x / (12.0 * raw.sigma_w2 + x);
    }
    const double x = raw.sigma_b1_2 * horizon * horizon * (rr + 1.0) * (rr + 2.0);
    return x / (12.0 * rr * raw.sigma_w2 + x);
}

SumTriple inverse_sums(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw DomainError("covariance matrix must be square");
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success)
        throw ComputationError("covariance matrix is not positive definite");
    const Eigen::MatrixXd inv =
        llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
    const int n = static_cast<int>(m.rows());
    Eigen::VectorXd j(n);
    for (int i = 0; i < n; ++i) j(i) = i;
    const Eigen::VectorXd rowsum = inv.rowwise().sum();
    SumTriple out;
    out.s0 = rowsum.sum();
    out.s1 = j.dot(rowsum);
    out.s2 = j.dot(inv * j);
    out.det_a = out.s0 * out.s2 - out.s1 * out.s1;
    return out;
}

SumTriple cs_inverse_sums_closed(double sigma2, double rho, int r) {
    check_cs_args(sigma2, rho, r);
    const double rr = r;
    const double denom = sigma2 * (1.0 + rr * rho);
    SumTriple out;
    out.s0 = (rr + 1.0) / denom;
    out.s1 = rr * (rr + 1.0) / (2.0 * denom);
    out.s2 = rr * (rr + 1.0) * (2.0 + rr * (4.0 + (rr - 1.0) * rho)) /
             (12.0 * (1.0 - rho) * denom);
    out.det_a = rr * (rr + 1.0) * (rr + 1.0) * (rr + 2.0) /
                (12.0 * sigma2 * sigma2 * (1.0 - rho) * (1.0 + rr * rho));
    return out;
}

SumTriple ar1_inverse_sums_closed(double sigma2, double rho, double s, int r) {
    if (rho <= 0.0 || rho >= 1.0) throw DomainError("AR(1) closed form requires 0 < rho < 1");
    check_cs_args(sigma2, rho, r);
    const double q = std::pow(rho, s);
    const double rr = r;
    SumTriple out;
    out.s0 = (1.0 + rr + q - rr * q) / (sigma2 * (1.0 + q));
    out.s1 = rr * (1.0 - q) * (1.0 + rr * (1.0 - q) + q) /
             (2.0 * sigma2 * (1.0 - q * q));
    out.s2 = rr *
             (1.0 + 4.0 * q + q * q + 3.0 * rr * (1.0 - q * q) +
              2.0 * rr * rr * (1.0 - q) * (1.0 - q)) /
             (6.0 * sigma2 * (1.0 - q * q));
    out.det_a = out.s0 * out.s2 - out.s1 * out.s1;
    return out;
}

void PopulationSpec::validate() const {
    if (pe <= 0.0 || pe >= 1.0) throw DomainError("pe must lie in (0, 1)");
    if (v_t0 < 0.0) throw DomainError("v_t0 must be non-negative");
    if (rho_e_t0 < -1.0 || rho_e_t0 > 1.0)
        throw DomainError("rho_e_t0 must lie in [-1, 1]");
    if (v_t0 == 0.0 && rho_e_t0 != 0.0)
        throw DomainError("v_t0 = 0 forces rho_e_t0 = 0");
}

double EffectSpec::coefficient(Hypothesis hyp, double tau) const {
    if (const auto* a = std::get_if<AbsoluteEffect>(&v)) return a->beta;
    const auto& p = std::get<PercentEffect>(v);
    if (p.mu00 == 0.0) throw DomainError("mu00 must be nonzero for percent-scale effects");
    if (hyp == Hypothesis::CMD) return p.p1 * p.mu00;
    if (tau <= 0.0) throw DomainError("tau must be positive for LDD effects");
    if (std::abs(p.p2) < 1e-12) return (1.0 + p.p1) * p.p3 * p.mu00 / tau;
    return p.p2 * p.p3 * p.mu00 / tau;
}

}  // namespace longidesign
