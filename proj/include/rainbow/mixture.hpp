// Finite Gaussian mixtures: distribution functions, moments, simulation and
// two-component EM estimation.
#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "rainbow/market_data.hpp"

namespace rainbow {

struct MixtureComponent {
  double weight;  // p_i
  double mean;    // mu_i
  double sd;      // sigma_i
};

/// Weighted Gaussian components. Weights lie in (0, 1] and sum to 1 within
/// 1e-12; every sd is positive.
class GaussianMixture {
 public:
  GaussianMixture() = default;
  explicit GaussianMixture(std::vector<MixtureComponent> components);

  static GaussianMixture normal(double mean, double sd) {
    return GaussianMixture({{1.0, mean, sd}});
  }

  const std::vector<MixtureComponent>& components() const { return components_; }
  std::size_t size() const { return components_.size(); }
  const MixtureComponent& operator[](std::size_t i) const { return components_[i]; }

  double mean() const;
  double max_sd() const;

 private:
  std::vector<MixtureComponent> components_;
};

double pdf(const GaussianMixture& m, double x);
double cdf(const GaussianMixture& m, double x);
/// 1 - cdf, evaluated without cancellation in the upper tail.
double survival(const GaussianMixture& m, double x);

/// x with cdf(m, x) = p to 1e-12 on the probability scale.
double quantile(const GaussianMixture& m, double p);

/// n i.i.d. draws; identical output for identical (m, n, seed).
Eigen::VectorXd sample(const GaussianMixture& m, std::size_t n, std::uint64_t seed);

struct MixtureMoments {
  double mean;
  double sd;
  double skewness;
  double kurtosis;  // raw, normal = 3
};

MixtureMoments moments(const GaussianMixture& m);

/// ln E[exp(sX)] in log-sum-exp form.
double log_mgf(const GaussianMixture& m, double s);
/// E[exp(sX)]; throws on overflow.
double mgf(const GaussianMixture& m, double s);

enum class EmInit { QuantileSplit, RandomResponsibility };

struct EmConfig {
  int max_iter = 2000;
  double tol = 1e-9;  // stop when the log-likelihood gains less than this
  int n_restarts = 5;
  std::uint64_t seed = 20200630;
  EmInit init = EmInit::QuantileSplit;
};

struct FitDiagnostics {
  double loglik = 0.0;
  int iterations = 0;
  bool converged = false;
  int restarts_used = 0;    // restarts that ran to completion
  int restarts_failed = 0;  // restarts aborted by a collapsing component
  int best_restart = 0;
  std::vector<double> loglik_trace;  // of the returned restart, one per iteration
};

struct EmFit {
  GaussianMixture mixture;  // components sorted by ascending sd
  FitDiagnostics diagnostics;
};

/// Two-component maximum-likelihood fit by expectation-maximization with
/// restarts. Restart k draws its randomness from seed + k; the best restart
/// by log-likelihood (lowest index on ties) is returned.
EmFit fit_em(const Eigen::Ref<const Eigen::VectorXd>& data, const EmConfig& cfg = {});
inline EmFit fit_em(const ReturnSeries& r, const EmConfig& cfg = {}) {
  return fit_em(r.values, cfg);
}

double log_likelihood(const GaussianMixture& m, const Eigen::Ref<const Eigen::VectorXd>& data);

}  // namespace rainbow
