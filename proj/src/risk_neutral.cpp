#include "rainbow/risk_neutral.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "rainbow/numerics.hpp"

namespace rainbow {

namespace {

constexpr const char* kModule = "risk_neutral";
constexpr double kMaxAlpha = 1e4;

// d/ds ln mgf(s): mean of X under the measure tilted by exp(sX).
double tilted_mean(const GaussianMixture& m, double s) {
  double peak = -std::numeric_limits<double>::infinity();
  for (const auto& c : m.components())
    peak = std::max(peak, std::log(c.weight) + c.mean * s + 0.5 * s * s * c.sd * c.sd);
  double num = 0.0, den = 0.0;
  for (const auto& c : m.components()) {
    const double w = std::exp(std::log(c.weight) + c.mean * s + 0.5 * s * s * c.sd * c.sd - peak);
    num += w * (c.mean + s * c.sd * c.sd);
    den += w;
  }
  return num / den;
}

}  // namespace

SdfParams calibrate_sdf(const GaussianMixture& m, double rate) {
  auto excess = [&](double a) { return log_mgf(m, a + 1.0) - log_mgf(m, a) - rate; };
  // ln mgf is convex, so `excess` is nondecreasing in alpha.
  double lo = -1.0, hi = 1.0;
  while (excess(lo) > 0.0) {
    hi = lo;
    lo *= 2.0;
    if (lo < -kMaxAlpha) throw Error(kModule, "calibrate_sdf: no solution with |alpha| <= 1e4");
  }
  while (excess(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > kMaxAlpha) throw Error(kModule, "calibrate_sdf: no solution with |alpha| <= 1e4");
  }
  const double alpha = safeguarded_newton(
      [&](double a) {
        return std::make_pair(excess(a), tilted_mean(m, a + 1.0) - tilted_mean(m, a));
      },
      lo, hi, 1e-15, 1e-16);
  return {alpha, -rate - log_mgf(m, alpha), rate};
}

RiskNeutralMixture risk_neutralize(const GaussianMixture& m, double alpha, double rate) {
  std::vector<double> logw;
  double peak = -std::numeric_limits<double>::infinity();
  for (const auto& c : m.components()) {
    logw.push_back(std::log(c.weight) + c.mean * alpha + 0.5 * alpha * alpha * c.sd * c.sd);
    peak = std::max(peak, logw.back());
  }
  if (!std::isfinite(peak)) {
    std::ostringstream os;
    os << "risk_neutralize: exponent overflow at alpha = " << alpha;
    throw Error(kModule, os.str());
  }
  double total = 0.0;
  for (const double l : logw) total += std::exp(l - peak);

  RiskNeutralMixture q;
  q.alpha = alpha;
  q.rate = rate;
  std::vector<MixtureComponent> comps;
  double acc = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double v = std::exp(logw[i] - peak) / total;
    if (v <= 0.0) continue;  // underflowed regime carries no mass
    const auto& c = m[i];
    const double shifted = c.mean + alpha * c.sd * c.sd;
    comps.push_back({v, shifted, c.sd});
    q.gammas.push_back(std::exp(shifted - rate + 0.5 * c.sd * c.sd));
    acc += v;
  }
  // Push the rounding residue onto the heaviest component.
  std::size_t heaviest = 0;
  for (std::size_t i = 1; i < comps.size(); ++i)
    if (comps[i].weight > comps[heaviest].weight) heaviest = i;
  comps[heaviest].weight += 1.0 - acc;
  q.tilted = GaussianMixture(std::move(comps));
  return q;
}

SdfResiduals sdf_residuals(const GaussianMixture& m, const SdfParams& sdf) {
  const double em = std::exp(sdf.beta + log_mgf(m, sdf.alpha));
  const double emx = std::exp(sdf.beta + log_mgf(m, sdf.alpha + 1.0));
  const auto q = risk_neutralize(m, sdf.alpha, sdf.rate);
  return {em - std::exp(-sdf.rate), emx - 1.0, mgf(q.tilted, 1.0) - std::exp(sdf.rate)};
}

BlackScholesTerms bs_terms(const BlackScholesQuote& q) {
  const double vol = std::sqrt(q.sigma2 * q.tau);
  const double d1 = ((q.rate + 0.5 * q.sigma2) * q.tau - std::log(q.kappa)) / vol;
  return {d1, d1 - vol};
}

double bs_call_relative(const BlackScholesQuote& q) {
  const double disc = std::exp(-q.rate * q.tau);
  if (q.kappa <= 0.0) return 1.0;
  if (!(q.sigma2 * q.tau > 0.0)) return std::max(0.0, 1.0 - q.kappa * disc);
  const auto [d1, d2] = bs_terms(q);
  return norm_cdf(d1) - q.kappa * disc * norm_cdf(d2);
}

double mixture_call_relative(const RiskNeutralMixture& q, double kappa) {
  double c = 0.0;
  for (std::size_t i = 0; i < q.tilted.size(); ++i) {
    const auto& comp = q.tilted[i];
    const double g = q.gammas[i];
    c += comp.weight * g * bs_call_relative({comp.sd * comp.sd, kappa / g, q.rate, 1.0});
  }
  return c;
}

double mixture_call_relative(const GaussianMixture& m, const SdfParams& sdf, double kappa) {
  return mixture_call_relative(risk_neutralize(m, sdf.alpha, sdf.rate), kappa);
}

double put_from_parity(double call, double kappa, double rate, double tau) {
  if (!std::isfinite(call) || !std::isfinite(kappa) || !std::isfinite(rate) || !std::isfinite(tau))
    throw Error(kModule, "put_from_parity: non-finite input");
  const double put = call + kappa * std::exp(-rate * tau) - 1.0;
  if (put < -1e-12) {
    std::ostringstream os;
    os.precision(17);
    os << "put-call parity violated: call " << call << " at kappa " << kappa
       << " implies negative put " << put;
    throw Error(kModule, os.str());
  }
  return put;
}

double call_from_parity(double put, double kappa, double rate, double tau) {
  return put - kappa * std::exp(-rate * tau) + 1.0;
}

double rn_cdf(const RiskNeutralMixture& q, double x) { return cdf(q.tilted, x); }
double rn_survival(const RiskNeutralMixture& q, double x) { return survival(q.tilted, x); }
double rn_pdf(const RiskNeutralMixture& q, double x) { return pdf(q.tilted, x); }
double rn_quantile(const RiskNeutralMixture& q, double p) { return quantile(q.tilted, p); }

}  // namespace rainbow
