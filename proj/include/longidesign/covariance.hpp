#pragma once
// Residual covariance matrix builders (CS / DEX / RS), parameter
// conversions, and the inverse-sum quantities consumed by the variance
// engine.

#include <Eigen/Dense>

#include "longidesign/types.hpp"

namespace longidesign {

// sigma2 * (rho * J + (1 - rho) * I), dimension (r+1) x (r+1).
Eigen::MatrixXd build_cs(double sigma2, double rho, int r);

// Entry (j, j') = sigma2 * rho^((|j - j'| * s)^theta).
Eigen::MatrixXd build_dex(double sigma2, double rho, double theta, double s, int r);

// Z D Z' + sigma_w2 I with Z = [1, t0 + s*j], j = 0..r.
Eigen::MatrixXd build_rs(const RsRawParams& raw, double t0, double s, int r);

// Convert the reliability parameterization to raw random-effect variances:
// sigma_b0_2 = rho_t0 * sigma_t0_2, sigma_w2 = (1 - rho_t0) * sigma_t0_2,
// sigma_b1_2 solves the slope-reliability identity at r_tilde.
RsRawParams rs_intuitive_to_raw(const RsIntuitiveParams& p);

// Slope reliability at r repeated measures:
// fixed s:   sb1 s^2 r(r+1)(r+2) / (12 sw2 + sb1 s^2 r(r+1)(r+2))
// fixed tau: sb1 tau^2 (r+1)(r+2) / (12 r sw2 + sb1 tau^2 (r+1)(r+2))
double slope_reliability(const RsRawParams& raw, RelMode mode, double horizon, int r);

// Numeric inverse sums from an explicit symmetric positive-definite matrix.
SumTriple inverse_sums(const Eigen::MatrixXd& m);

// Closed forms for the CS inverse sums:
// s0 = (r+1)/(sigma2 (1+r rho)), s1 = r(r+1)/(2 sigma2 (1+r rho)),
// s2 = r(r+1)(2 + r(4 + (r-1) rho))/(12 sigma2 (1-rho)(1+r rho)),
// det_a = r (r+1)^2 (r+2)/(12 sigma2^2 (1-rho)(1+r rho)).
SumTriple cs_inverse_sums_closed(double sigma2, double rho, int r);

// Closed forms for the AR(1) (DEX theta = 1) inverse sums, from the
// tridiagonal inverse; q = rho^s:
// s0 = (1 + r + q - r q)/(sigma2 (1+q))
// s1 = r (1-q)(1 + r(1-q) + q)/(2 sigma2 (1-q^2))
// s2 = r (1 + 4q + q^2 + 3r(1-q^2) + 2 r^2 (1-q)^2)/(6 sigma2 (1-q^2)).
SumTriple ar1_inverse_sums_closed(double sigma2, double rho, double s, int r);

}  // namespace longidesign
