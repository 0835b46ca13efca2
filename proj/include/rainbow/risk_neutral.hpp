// Exponential-affine stochastic discount factor M = exp(alpha X + beta),
// the induced risk-neutral Gaussian mixture and one-period relative option
// prices.
#pragma once

#include <vector>

#include "rainbow/mixture.hpp"

namespace rainbow {

struct SdfParams {
  double alpha = 0.0;
  double beta = 0.0;
  double rate = 0.0;  // per period
};

/// Risk-neutral mixture obtained by exponential tilting of a physical one.
/// Component i keeps its sd, moves its mean to mu_i + alpha sd_i^2 and takes
/// weight v_i proportional to p_i exp(mu_i alpha + alpha^2 sd_i^2 / 2).
struct RiskNeutralMixture {
  double alpha = 0.0;
  double rate = 0.0;
  GaussianMixture tilted;      // (v_i, mu_i + alpha sd_i^2, sd_i)
  std::vector<double> gammas;  // exp(mu_i + alpha sd_i^2 - r + sd_i^2 / 2)
};

/// Solves E[M] = exp(-r) and E[M exp(X)] = 1 for (alpha, beta). Alpha is the
/// root of ln mgf(alpha + 1) - ln mgf(alpha) = r, found by Newton safeguarded
/// by a bracket grown geometrically from 0 up to |alpha| <= 1e4.
SdfParams calibrate_sdf(const GaussianMixture& m, double rate);

/// Tilts `m` by `alpha`. `rate` only feeds the gamma factors.
RiskNeutralMixture risk_neutralize(const GaussianMixture& m, double alpha, double rate = 0.0);

struct SdfResiduals {
  double bond;        // E[M] - exp(-r)
  double underlying;  // E[M exp(X)] - 1
  double martingale;  // E*[exp(X)] - exp(r)
};
SdfResiduals sdf_residuals(const GaussianMixture& m, const SdfParams& sdf);

struct BlackScholesQuote {
  double sigma2;  // variance per period
  double kappa;   // K / S
  double rate;
  double tau = 1.0;
};

struct BlackScholesTerms {
  double d1;
  double d2;
};
BlackScholesTerms bs_terms(const BlackScholesQuote& q);

/// Relative call price C/S = N(d1) - kappa exp(-r tau) N(d2).
double bs_call_relative(const BlackScholesQuote& q);

/// Relative one-period call under the risk-neutral mixture:
/// sum_i v_i gamma_i c_bs(sd_i^2, kappa / gamma_i).
double mixture_call_relative(const RiskNeutralMixture& q, double kappa);
double mixture_call_relative(const GaussianMixture& m, const SdfParams& sdf, double kappa);

/// Relative put from put-call parity, p = c + kappa exp(-r tau) - 1. Throws
/// when the result is negative beyond 1e-12.
double put_from_parity(double call, double kappa, double rate, double tau = 1.0);
/// Inverse relation, c = p - kappa exp(-r tau) + 1.
double call_from_parity(double put, double kappa, double rate, double tau = 1.0);

/// Risk-neutral distribution function of the log-return.
double rn_cdf(const RiskNeutralMixture& q, double x);
double rn_survival(const RiskNeutralMixture& q, double x);
double rn_pdf(const RiskNeutralMixture& q, double x);
double rn_quantile(const RiskNeutralMixture& q, double p);

}  // namespace rainbow
