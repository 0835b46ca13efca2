#include "rainbow/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rainbow/numerics.hpp"

namespace rainbow {

namespace {

constexpr const char* kModule = "pricing";
constexpr double kUpperTail = 1e-10;

std::uint64_t shard_seed(std::uint64_t seed, std::size_t shard) {
  return seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(shard);
}

double upper_limit(const MarketModel& m) {
  double x = 0.0;
  for (const auto& a : m.assets)
    x = std::max(x, a.spot * std::exp(rn_quantile(a.rn, 1.0 - kUpperTail)));
  return x;
}

}  // namespace

void MarketModel::validate() const {
  if (assets.empty()) throw Error(kModule, "market model has no assets");
  for (const auto& a : assets)
    if (!(a.spot > 0.0) || !std::isfinite(a.spot))
      throw Error(kModule, "spot of asset '" + a.id + "' must be positive");
  if (copula.dim() != static_cast<int>(assets.size())) {
    std::ostringstream os;
    os << "copula dimension " << copula.dim() << " does not match " << assets.size()
       << " asset(s)";
    throw Error(kModule, os.str());
  }
  if (tau != 1.0) throw Error(kModule, "only one-period maturities (tau = 1) are supported");
  if (!std::isfinite(rate)) throw Error(kModule, "rate must be finite");
}

std::string_view option_kind_name(OptionKind k) {
  switch (k) {
    case OptionKind::Spread: return "spread";
    case OptionKind::CallMax: return "call_max";
    case OptionKind::CallMin: return "call_min";
    case OptionKind::Digital: return "digital";
  }
  return "unknown";
}

OptionKind parse_option_kind(std::string_view name) {
  std::string s(name);
  std::replace(s.begin(), s.end(), '-', '_');
  if (s == "spread") return OptionKind::Spread;
  if (s == "call_max" || s == "callmax" || s == "max") return OptionKind::CallMax;
  if (s == "call_min" || s == "callmin" || s == "min") return OptionKind::CallMin;
  if (s == "digital") return OptionKind::Digital;
  throw Error(kModule, "unknown option kind '" + std::string(name) + "'");
}

std::string_view method_name(PricingMethod m) {
  switch (m) {
    case PricingMethod::MonteCarlo: return "mc";
    case PricingMethod::Quadrature: return "quadrature";
    case PricingMethod::ClosedForm: return "closed_form";
  }
  return "unknown";
}

void OptionSpec::validate(std::size_t dim) const {
  const std::size_t expected = kind == OptionKind::Digital ? dim : 1;
  if (strikes.size() != expected) {
    std::ostringstream os;
    os << option_kind_name(kind) << " option needs " << expected << " strike(s), got "
       << strikes.size();
    throw Error(kModule, os.str());
  }
  for (double k : strikes)
    if (!(k > 0.0) || !std::isfinite(k)) throw Error(kModule, "strikes must be positive");
  if (kind == OptionKind::Spread && dim != 2)
    throw Error(kModule, "spread option needs exactly two assets");
}

Eigen::MatrixXd simulate_terminal(const MarketModel& m, std::size_t n, std::uint64_t seed,
                                  std::size_t shard_size) {
  m.validate();
  if (shard_size == 0) throw Error(kModule, "shard size must be positive");
  const auto d = static_cast<Eigen::Index>(m.dim());
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), d);
  const std::size_t shards = (n + shard_size - 1) / shard_size;
  parallel_for(shards, [&](std::size_t s) {
    const std::size_t begin = s * shard_size;
    const std::size_t count = std::min(shard_size, n - begin);
    const Eigen::MatrixXd u = sample(m.copula, count, shard_seed(seed, s));
    for (std::size_t i = 0; i < count; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        const auto& a = m.assets[static_cast<std::size_t>(j)];
        const double uij = u(static_cast<Eigen::Index>(i), j);
        double x;
        try {
          x = rn_quantile(a.rn, uij);
        } catch (const Error& e) {
          std::ostringstream os;
          os.precision(17);
          os << "quantile failure for asset '" << a.id << "' at u = " << uij << ": " << e.what();
          throw Error(kModule, os.str());
        }
        out(static_cast<Eigen::Index>(begin + i), j) = a.spot * std::exp(x);
      }
    }
  });
  return out;
}

double payoff(const OptionSpec& o, const Eigen::Ref<const Eigen::RowVectorXd>& s) {
  switch (o.kind) {
    case OptionKind::Spread: return std::max(s[1] - s[0] - o.strikes[0], 0.0);
    case OptionKind::CallMax: return std::max(s.maxCoeff() - o.strikes[0], 0.0);
    case OptionKind::CallMin: return std::max(s.minCoeff() - o.strikes[0], 0.0);
    case OptionKind::Digital:
      for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s[i] < o.strikes[static_cast<std::size_t>(i)]) return 0.0;
      return 1.0;
  }
  return 0.0;
}

PricingResult price_paths(const MarketModel& m, const OptionSpec& o,
                          const Eigen::Ref<const Eigen::MatrixXd>& terminal, std::uint64_t seed,
                          std::size_t shard_size) {
  o.validate(m.dim());
  const Eigen::Index n = terminal.rows();
  if (n < 2) throw Error(kModule, "need at least two simulated paths");
  // Welford accumulation keeps the variance stable for small prices.
  double mean = 0.0, m2 = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double p = payoff(o, terminal.row(i));
    const double delta = p - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (p - mean);
  }
  const double disc = std::exp(-m.rate * m.tau);
  const double sd = std::sqrt(m2 / static_cast<double>(n - 1));
  PricingResult r;
  r.price = disc * mean;
  r.std_error = disc * sd / std::sqrt(static_cast<double>(n));
  r.n_samples = static_cast<std::size_t>(n);
  r.seed = seed;
  r.method = PricingMethod::MonteCarlo;
  r.shard_size = shard_size;
  r.n_shards = (static_cast<std::size_t>(n) + shard_size - 1) / shard_size;
  return r;
}

PricingResult price_mc(const MarketModel& m, const OptionSpec& o, std::size_t n,
                       std::uint64_t seed, std::size_t shard_size) {
  if (n < 100) throw Error(kModule, "price_mc: need at least 100 samples");
  o.validate(m.dim());
  const Eigen::MatrixXd terminal = simulate_terminal(m, n, seed, shard_size);
  return price_paths(m, o, terminal, seed, shard_size);
}

PricingResult price_quadrature(const MarketModel& m, const OptionSpec& o) {
  m.validate();
  o.validate(m.dim());
  if (o.kind == OptionKind::Digital)
    throw Error(kModule, "price_quadrature: the digital option is priced in closed form");
  const std::size_t d = m.dim();
  if (d > 2) throw Error(kModule, "price_quadrature: at most two assets");

  const double k = o.strikes[0];
  const double disc = std::exp(-m.rate * m.tau);
  PricingResult r;
  r.method = PricingMethod::Quadrature;
  const double x_max = upper_limit(m);
  if (k >= x_max) return r;

  const auto& a1 = m.assets[0];
  auto log_moneyness = [](double x, double spot) {
    return x <= 0.0 ? -std::numeric_limits<double>::infinity() : std::log(x / spot);
  };

  ScalarFn integrand;
  switch (o.kind) {
    case OptionKind::Spread: {
      const auto& a2 = m.assets[1];
      integrand = [&, k](double x) {
        const double f1 = rn_cdf(a1.rn, log_moneyness(x - k, a1.spot));
        const double f2 = rn_cdf(a2.rn, log_moneyness(x, a2.spot));
        return f1 - cdf(m.copula, f1, f2);
      };
      break;
    }
    case OptionKind::CallMax:
      integrand = [&](double x) {
        if (d == 1) return rn_survival(a1.rn, log_moneyness(x, a1.spot));
        const double f1 = rn_cdf(a1.rn, log_moneyness(x, a1.spot));
        const double f2 = rn_cdf(m.assets[1].rn, log_moneyness(x, m.assets[1].spot));
        return 1.0 - cdf(m.copula, f1, f2);
      };
      break;
    case OptionKind::CallMin:
      integrand = [&](double x) {
        const double s1 = rn_survival(a1.rn, log_moneyness(x, a1.spot));
        if (d == 1) return s1;
        const double s2 = rn_survival(m.assets[1].rn, log_moneyness(x, m.assets[1].spot));
        return survival_cdf(m.copula, s1, s2);
      };
      break;
    case OptionKind::Digital: break;
  }
  QuadratureOptions opts;
  opts.abs_tol = 1e-6;
  opts.rel_tol = 1e-12;
  opts.max_intervals = 5000;
  r.price = disc * integrate_or_throw(integrand, k, x_max, opts, kModule);
  return r;
}

PricingResult price_digital_closed(const MarketModel& m, const OptionSpec& o) {
  m.validate();
  o.validate(m.dim());
  if (o.kind != OptionKind::Digital)
    throw Error(kModule, "price_digital_closed: option is not a digital");
  const std::size_t d = m.dim();
  Eigen::VectorXd exceed(static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i) {
    const auto& a = m.assets[i];
    exceed[static_cast<Eigen::Index>(i)] = rn_survival(a.rn, std::log(o.strikes[i] / a.spot));
  }
  const double joint = d == 1 ? exceed[0] : survival_cdf(m.copula, exceed);
  PricingResult r;
  r.method = PricingMethod::ClosedForm;
  r.price = std::exp(-m.rate * m.tau) * joint;
  return r;
}

PricingResult price_reference(const MarketModel& m, const OptionSpec& o) {
  return o.kind == OptionKind::Digital ? price_digital_closed(m, o) : price_quadrature(m, o);
}

}  // namespace rainbow
