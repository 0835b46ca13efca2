#include "rainbow/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "rainbow/numerics.hpp"

namespace rainbow {

namespace {

constexpr const char* kModule = "mixture";
constexpr double kVarianceFloor = 1e-10;
constexpr double kLogSqrt2Pi = 0.918938533204672741780329736406;

double log_normal_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd) - kLogSqrt2Pi;
}

}  // namespace

GaussianMixture::GaussianMixture(std::vector<MixtureComponent> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw Error(kModule, "mixture needs at least one component");
  double total = 0.0;
  for (const auto& c : components_) {
    if (!(c.weight > 0.0 && c.weight <= 1.0))
      throw Error(kModule, "component weight must lie in (0, 1]");
    if (!(c.sd > 0.0) || !std::isfinite(c.sd))
      throw Error(kModule, "component sd must be positive and finite");
    if (!std::isfinite(c.mean)) throw Error(kModule, "component mean must be finite");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream os;
    os.precision(17);
    os << "component weights sum to " << total << ", expected 1";
    throw Error(kModule, os.str());
  }
}

double GaussianMixture::mean() const {
  double s = 0.0;
  for (const auto& c : components_) s += c.weight * c.mean;
  return s;
}

double GaussianMixture::max_sd() const {
  double s = 0.0;
  for (const auto& c : components_) s = std::max(s, c.sd);
  return s;
}

double pdf(const GaussianMixture& m, double x) {
  double s = 0.0;
  for (const auto& c : m.components()) s += c.weight * norm_pdf((x - c.mean) / c.sd) / c.sd;
  return s;
}

double cdf(const GaussianMixture& m, double x) {
  if (x == -std::numeric_limits<double>::infinity()) return 0.0;
  if (x == std::numeric_limits<double>::infinity()) return 1.0;
  double s = 0.0;
  for (const auto& c : m.components()) s += c.weight * norm_cdf((x - c.mean) / c.sd);
  return std::min(s, 1.0);
}

double survival(const GaussianMixture& m, double x) {
  if (x == -std::numeric_limits<double>::infinity()) return 1.0;
  if (x == std::numeric_limits<double>::infinity()) return 0.0;
  double s = 0.0;
  for (const auto& c : m.components()) s += c.weight * norm_cdf(-(x - c.mean) / c.sd);
  return std::min(s, 1.0);
}

double quantile(const GaussianMixture& m, double p) {
  if (!(p > 0.0 && p < 1.0)) {
    std::ostringstream os;
    os << "quantile: probability " << p << " outside (0, 1)";
    throw Error(kModule, os.str());
  }
  const double center = m.mean();
  const double scale = m.max_sd();
  double step = scale;
  double lo = center - step, hi = center + step;
  // Work on whichever tail keeps the residual well conditioned.
  const bool upper = p > 0.5;
  auto residual = [&](double x) { return upper ? (1.0 - p) - survival(m, x) : cdf(m, x) - p; };
  for (int k = 0; residual(lo) > 0.0; ++k) {
    if (k > 200) throw Error(kModule, "quantile: lower bracket expansion failed");
    step *= 2.0;
    lo = center - step;
  }
  step = scale;
  for (int k = 0; residual(hi) < 0.0; ++k) {
    if (k > 200) throw Error(kModule, "quantile: upper bracket expansion failed");
    step *= 2.0;
    hi = center + step;
  }
  const double tol = 1e-14 * std::min(p, 1.0 - p);
  return safeguarded_newton([&](double x) { return std::make_pair(residual(x), pdf(m, x)); },
                            lo, hi, tol, 1e-15);
}

Eigen::VectorXd sample(const GaussianMixture& m, std::size_t n, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::vector<double> weights;
  for (const auto& c : m.components()) weights.push_back(c.weight);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::normal_distribution<double> z;
  Eigen::VectorXd out(static_cast<Eigen::Index>(n));
  for (auto& x : out) {
    const auto& c = m[pick(rng)];
    x = c.mean + c.sd * z(rng);
  }
  return out;
}

MixtureMoments moments(const GaussianMixture& m) {
  const double mean = m.mean();
  double c2 = 0, c3 = 0, c4 = 0;
  for (const auto& c : m.components()) {
    const double d = c.mean - mean, v = c.sd * c.sd;
    c2 += c.weight * (d * d + v);
    c3 += c.weight * (d * d * d + 3 * d * v);
    c4 += c.weight * (d * d * d * d + 6 * d * d * v + 3 * (v * v));
  }
  // excess part kept separate so a single component gives exactly 3
  const double excess = (c4 - 3 * (c2 * c2)) / (c2 * c2);
  return {mean, std::sqrt(c2), c3 / std::pow(c2, 1.5), 3 + excess};
}

double log_mgf(const GaussianMixture& m, double s) {
  double peak = -std::numeric_limits<double>::infinity();
  for (const auto& c : m.components())
    peak = std::max(peak, std::log(c.weight) + c.mean * s + 0.5 * s * s * c.sd * c.sd);
  double acc = 0.0;
  for (const auto& c : m.components())
    acc += std::exp(std::log(c.weight) + c.mean * s + 0.5 * s * s * c.sd * c.sd - peak);
  return peak + std::log(acc);
}

double mgf(const GaussianMixture& m, double s) {
  const double l = log_mgf(m, s);
  if (l > std::log(std::numeric_limits<double>::max())) {
    std::ostringstream os;
    os << "mgf overflow at s = " << s;
    throw Error(kModule, os.str());
  }
  return std::exp(l);
}

double log_likelihood(const GaussianMixture& m, const Eigen::Ref<const Eigen::VectorXd>& data) {
  double ll = 0.0;
  std::vector<double> terms(m.size());
  for (const double x : data) {
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m.size(); ++j) {
      terms[j] = std::log(m[j].weight) + log_normal_pdf(x, m[j].mean, m[j].sd);
      peak = std::max(peak, terms[j]);
    }
    double acc = 0.0;
    for (const double t : terms) acc += std::exp(t - peak);
    ll += peak + std::log(acc);
  }
  return ll;
}

namespace {

struct Restart {
  bool ok = false;
  GaussianMixture mixture;
  FitDiagnostics diag;
};

// Responsibilities of the second (wide) component, initial guess.
Eigen::VectorXd initial_responsibilities(const Eigen::VectorXd& x, EmInit init, Rng& rng) {
  const Eigen::Index n = x.size();
  Eigen::VectorXd r(n);
  if (init == EmInit::RandomResponsibility) {
    for (auto& v : r) v = open_uniform(rng);
    return r;
  }
  std::vector<double> sorted(x.begin(), x.end());
  std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
  const double median = sorted[n / 2];
  std::vector<double> dist(x.size());
  for (Eigen::Index i = 0; i < n; ++i) dist[i] = std::abs(x[i] - median);
  std::vector<double> tmp = dist;
  const auto cut_index = static_cast<std::size_t>(std::floor(0.9 * static_cast<double>(n)));
  std::nth_element(tmp.begin(), tmp.begin() + cut_index, tmp.end());
  const double cut = tmp[cut_index];
  for (Eigen::Index i = 0; i < n; ++i) r[i] = dist[i] >= cut ? 1.0 : 0.0;
  return r;
}

Restart run_em(const Eigen::VectorXd& x, const EmConfig& cfg, int restart) {
  Restart out;
  Rng rng = make_rng(cfg.seed + static_cast<std::uint64_t>(restart));
  const EmInit init = restart == 0 ? cfg.init : EmInit::RandomResponsibility;
  const Eigen::Index n = x.size();
  const double nd = static_cast<double>(n);

  Eigen::MatrixXd resp(n, 2);
  resp.col(1) = initial_responsibilities(x, init, rng);
  resp.col(0) = 1.0 - resp.col(1).array();

  double w[2], mu[2], var[2];
  double prev = -std::numeric_limits<double>::infinity();
  for (int it = 1; it <= cfg.max_iter; ++it) {
    // M-step
    for (int j = 0; j < 2; ++j) {
      const double nj = resp.col(j).sum();
      if (!(nj > 1e-8 * nd)) return out;
      w[j] = nj / nd;
      mu[j] = resp.col(j).dot(x) / nj;
      var[j] = (resp.col(j).array() * (x.array() - mu[j]).square()).sum() / nj;
      if (!(var[j] > kVarianceFloor)) return out;  // collapsing component
    }
    // E-step with the log-likelihood of the current parameters.
    double ll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double a = std::log(w[0]) + log_normal_pdf(x[i], mu[0], std::sqrt(var[0]));
      const double b = std::log(w[1]) + log_normal_pdf(x[i], mu[1], std::sqrt(var[1]));
      const double peak = std::max(a, b);
      const double lse = peak + std::log(std::exp(a - peak) + std::exp(b - peak));
      resp(i, 0) = std::exp(a - lse);
      resp(i, 1) = std::exp(b - lse);
      ll += lse;
    }
    out.diag.loglik_trace.push_back(ll);
    out.diag.iterations = it;
    if (it > 1 && ll - prev < cfg.tol) {
      out.diag.converged = true;
      prev = ll;
      break;
    }
    prev = ll;
  }
  std::vector<MixtureComponent> comps = {{w[0], mu[0], std::sqrt(var[0])},
                                         {w[1], mu[1], std::sqrt(var[1])}};
  std::sort(comps.begin(), comps.end(),
            [](const MixtureComponent& a, const MixtureComponent& b) { return a.sd < b.sd; });
  // Renormalize so the weights satisfy the mixture invariant to rounding.
  const double total = comps[0].weight + comps[1].weight;
  comps[0].weight /= total;
  comps[1].weight = 1.0 - comps[0].weight;
  out.mixture = GaussianMixture(std::move(comps));
  out.diag.loglik = prev;
  out.ok = std::isfinite(prev);
  return out;
}

}  // namespace

EmFit fit_em(const Eigen::Ref<const Eigen::VectorXd>& data, const EmConfig& cfg) {
  if (data.size() < 10) throw Error(kModule, "fit_em: need at least 10 observations");
  if (cfg.max_iter < 1 || !(cfg.tol > 0.0) || cfg.n_restarts < 1)
    throw Error(kModule, "fit_em: invalid configuration");
  const Eigen::VectorXd x = data;

  std::vector<Restart> runs(static_cast<std::size_t>(cfg.n_restarts));
  parallel_for(runs.size(), [&](std::size_t k) { runs[k] = run_em(x, cfg, static_cast<int>(k)); });

  int best = -1, used = 0, failed = 0;
  for (int k = 0; k < cfg.n_restarts; ++k) {
    if (!runs[k].ok) {
      ++failed;
      continue;
    }
    ++used;
    if (best < 0 || runs[k].diag.loglik > runs[best].diag.loglik) best = k;
  }
  if (best < 0) throw Error(kModule, "fit_em: every restart collapsed to a degenerate component");
  EmFit fit{runs[best].mixture, std::move(runs[best].diag)};
  fit.diagnostics.restarts_used = used;
  fit.diagnostics.restarts_failed = failed;
  fit.diagnostics.best_restart = best;
  return fit;
}

}  // namespace rainbow
