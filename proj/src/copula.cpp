#include "rainbow/copula.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "rainbow/numerics.hpp"

namespace rainbow {

namespace {

constexpr const char* kModule = "copula";
constexpr double kPi = std::numbers::pi;

[[noreturn]] void invalid(const std::string& what) { throw Error(kModule, what); }

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

double log_sum_exp(double a, double b) {
  const double m = std::max(a, b);
  if (m == -std::numeric_limits<double>::infinity()) return m;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// ----------------------------------------------------------------------------
// Pickands functions of the extreme-value families

PickandsValue gumbel_pickands(double theta, double t) {
  if (theta == 1.0) return {1.0, 0.0, 0.0};
  const double lt = std::log(t), l1t = std::log1p(-t);
  const double lg = log_sum_exp(theta * lt, theta * l1t);  // ln(t^th + (1-t)^th)
  const double a = std::exp(lg / theta);
  const double da = std::exp((1.0 / theta - 1.0) * lg) *
                    (std::exp((theta - 1.0) * lt) - std::exp((theta - 1.0) * l1t));
  const double d2a = (theta - 1.0) * std::exp((1.0 / theta - 2.0) * lg + (theta - 2.0) * (lt + l1t));
  return {a, da, d2a};
}

PickandsValue galambos_pickands(double theta, double t) {
  const double lt = std::log(t), l1t = std::log1p(-t);
  const double lg = log_sum_exp(-theta * lt, -theta * l1t);  // ln(t^-th + (1-t)^-th)
  const double b = std::exp(-lg / theta);
  const double db = std::exp((-1.0 / theta - 1.0) * lg - (theta + 1.0) * lt) -
                    std::exp((-1.0 / theta - 1.0) * lg - (theta + 1.0) * l1t);
  const double d2a =
      (theta + 1.0) * std::exp((-1.0 / theta - 2.0) * lg - (theta + 2.0) * (lt + l1t));
  return {1.0 - b, -db, d2a};
}

PickandsValue husler_reiss_pickands(double lambda, double t) {
  const double logit = std::log(t) - std::log1p(-t);
  const double a = 1.0 / lambda + 0.5 * lambda * logit;
  const double b = 1.0 / lambda - 0.5 * lambda * logit;
  // t phi(a) = (1 - t) phi(b), so the density terms cancel in A'.
  const double value = t * norm_cdf(a) + (1.0 - t) * norm_cdf(b);
  const double da = norm_cdf(a) - norm_cdf(b);
  const double d2a = 0.5 * lambda / (t * (1.0 - t)) * (norm_pdf(a) + norm_pdf(b));
  return {value, da, d2a};
}

PickandsValue tawn_pickands(double theta, double t) {
  return {1.0 - theta * t * (1.0 - t), theta * (2.0 * t - 1.0), 2.0 * theta};
}

// Stable-tail-dependence quantities at x = -ln u, y = -ln v.
struct EvPoint {
  double c;     // C(u, v)
  double lx;    // dl/dx
  double ly;    // dl/dy
  double lxy;   // d2l/dxdy
};

EvPoint ev_point(const CopulaModel& c, double u, double v) {
  const double x = -std::log(u), y = -std::log(v);
  const double s = x + y;
  // y / s rounds to 1 when x is below half an ulp of y
  const double t = std::min(y / s, std::nextafter(1.0, 0.0));
  const PickandsValue p = pickands_derivatives(c, t);
  return {std::exp(-s * p.a), p.a - t * p.da, p.a + (1.0 - t) * p.da,
          -t * (1.0 - t) * p.d2a / s};
}

// ----------------------------------------------------------------------------
// Elliptical helpers

// P(X <= x, Y <= y) for a standard bivariate normal with correlation rho.
double bivariate_normal_cdf(double x, double y, double rho) {
  if (x == -std::numeric_limits<double>::infinity() ||
      y == -std::numeric_limits<double>::infinity())
    return 0.0;
  if (x == std::numeric_limits<double>::infinity()) return norm_cdf(y);
  if (y == std::numeric_limits<double>::infinity()) return norm_cdf(x);
  const double base = norm_cdf(x) * norm_cdf(y);
  if (rho == 0.0) return base;
  const double upper = std::asin(rho);
  auto f = [x, y](double th) {
    const double c = std::cos(th);
    return std::exp(-(x * x + y * y - 2.0 * x * y * std::sin(th)) / (2.0 * c * c));
  };
  QuadratureOptions opts;
  opts.abs_tol = 1e-15;
  opts.rel_tol = 1e-14;
  const auto r = integrate(f, 0.0, upper, opts);
  return std::clamp(base + r.value / (2.0 * kPi), 0.0, 1.0);
}

double student_conditional_scale(double x, double rho, double nu) {
  return std::sqrt((nu + x * x) * (1.0 - rho * rho) / (nu + 1.0));
}

double student_log_density(double x, double y, double rho, double nu) {
  const double one_m = 1.0 - rho * rho;
  const double q = (x * x - 2.0 * rho * x * y + y * y) / (nu * one_m);
  const double log_joint = std::lgamma(0.5 * (nu + 2.0)) - std::lgamma(0.5 * nu) -
                           std::log(nu * kPi) - 0.5 * std::log(one_m) -
                           0.5 * (nu + 2.0) * std::log1p(q);
  auto log_marginal = [nu](double z) {
    return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) - 0.5 * std::log(nu * kPi) -
           0.5 * (nu + 1.0) * std::log1p(z * z / nu);
  };
  return log_joint - log_marginal(x) - log_marginal(y);
}

void require_open(double u, double v, const char* what) {
  if (!(u > 0.0 && u < 1.0 && v > 0.0 && v < 1.0)) {
    std::ostringstream os;
    os << what << ": point (" << u << ", " << v << ") is not in the open unit square";
    invalid(os.str());
  }
}

// Positive stable variable with Laplace transform exp(-s^alpha), 0 < alpha < 1
// (Kanter's representation).
double positive_stable(double alpha, Rng& rng) {
  const double u = kPi * open_uniform(rng);
  const double w = -std::log(open_uniform(rng));
  const double zolotarev = std::pow(std::sin(alpha * u), alpha / (1.0 - alpha)) *
                           std::sin((1.0 - alpha) * u) /
                           std::pow(std::sin(u), 1.0 / (1.0 - alpha));
  return std::pow(zolotarev / w, (1.0 - alpha) / alpha);
}

double debye1(double x) {
  if (x == 0.0) return 1.0;
  auto f = [](double t) { return t == 0.0 ? 1.0 : t / std::expm1(t); };
  return integrate(f, 0.0, x, {1e-14, 1e-13, 2000}).value / x;
}

}  // namespace

// ----------------------------------------------------------------------------
// Family metadata

std::string_view family_name(CopulaFamily f) {
  switch (f) {
    case CopulaFamily::Gaussian: return "gaussian";
    case CopulaFamily::StudentT: return "student_t";
    case CopulaFamily::Clayton: return "clayton";
    case CopulaFamily::Frank: return "frank";
    case CopulaFamily::Gumbel: return "gumbel";
    case CopulaFamily::Galambos: return "galambos";
    case CopulaFamily::HuslerReiss: return "husler_reiss";
    case CopulaFamily::Tawn: return "tawn";
    case CopulaFamily::Independence: return "independence";
    case CopulaFamily::Comonotone: return "comonotone";
    case CopulaFamily::Countermonotone: return "countermonotone";
  }
  return "unknown";
}

CopulaFamily parse_family(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
  std::replace(s.begin(), s.end(), '-', '_');
  if (s == "gaussian" || s == "normal" || s == "normale") return CopulaFamily::Gaussian;
  if (s == "student_t" || s == "student" || s == "t") return CopulaFamily::StudentT;
  if (s == "clayton") return CopulaFamily::Clayton;
  if (s == "frank") return CopulaFamily::Frank;
  if (s == "gumbel") return CopulaFamily::Gumbel;
  if (s == "galambos") return CopulaFamily::Galambos;
  if (s == "husler_reiss" || s == "hr" || s == "huesler_reiss") return CopulaFamily::HuslerReiss;
  if (s == "tawn") return CopulaFamily::Tawn;
  if (s == "independence" || s == "indep" || s == "product") return CopulaFamily::Independence;
  if (s == "comonotone" || s == "upper") return CopulaFamily::Comonotone;
  if (s == "countermonotone" || s == "lower") return CopulaFamily::Countermonotone;
  invalid("unknown copula family '" + std::string(name) + "'");
}

bool is_extreme_value(CopulaFamily f) {
  return f == CopulaFamily::Gumbel || f == CopulaFamily::Galambos ||
         f == CopulaFamily::HuslerReiss || f == CopulaFamily::Tawn;
}

bool has_density(CopulaFamily f) {
  return f != CopulaFamily::Comonotone && f != CopulaFamily::Countermonotone;
}

int parameter_count(CopulaFamily f) {
  switch (f) {
    case CopulaFamily::StudentT: return 2;
    case CopulaFamily::Independence:
    case CopulaFamily::Comonotone:
    case CopulaFamily::Countermonotone: return 0;
    default: return 1;
  }
}

CopulaModel::CopulaModel(CopulaFamily family, std::vector<double> params, int dim)
    : family_(family), params_(std::move(params)), dim_(dim) {
  const auto expected = static_cast<std::size_t>(parameter_count(family_));
  if (params_.size() != expected) {
    std::ostringstream os;
    os << family_name(family_) << " copula takes " << expected << " parameter(s), got "
       << params_.size();
    invalid(os.str());
  }
  for (double p : params_)
    if (!std::isfinite(p)) invalid(std::string(family_name(family_)) + ": non-finite parameter");
  if (dim_ < 1) invalid("copula dimension must be positive");
  if (dim_ != 2 && family_ != CopulaFamily::Independence && family_ != CopulaFamily::Comonotone)
    invalid(std::string(family_name(family_)) + " copula is bivariate only");

  auto bad = [this](const char* rule) {
    std::ostringstream os;
    os << family_name(family_) << " parameter out of domain (" << rule << "): "
       << params_[0];
    if (params_.size() > 1) os << ", " << params_[1];
    invalid(os.str());
  };
  switch (family_) {
    case CopulaFamily::Gaussian:
      if (!(std::abs(params_[0]) < 1.0)) bad("rho in (-1, 1)");
      break;
    case CopulaFamily::StudentT:
      if (!(std::abs(params_[0]) < 1.0) || !(params_[1] > 0.0)) bad("rho in (-1, 1), nu > 0");
      break;
    case CopulaFamily::Clayton:
    case CopulaFamily::Frank:
    case CopulaFamily::Galambos:
      if (!(params_[0] > 0.0)) bad("theta > 0");
      break;
    case CopulaFamily::Gumbel:
      if (!(params_[0] >= 1.0)) bad("theta >= 1");
      break;
    case CopulaFamily::HuslerReiss:
      if (!(params_[0] > 0.0)) bad("lambda > 0");
      break;
    case CopulaFamily::Tawn:
      if (!(params_[0] >= 0.0 && params_[0] <= 1.0)) bad("theta in [0, 1]");
      break;
    default: break;
  }
}

// ----------------------------------------------------------------------------
// Pickands

PickandsValue pickands_derivatives(const CopulaModel& c, double t) {
  if (!is_extreme_value(c.family()))
    invalid(c.name() + " is not an extreme-value copula; no Pickands function");
  if (!(t >= 0.0 && t <= 1.0)) invalid("pickands: t outside [0, 1]");
  const double th = c.param();
  if (c.family() == CopulaFamily::Tawn) return tawn_pickands(th, t);
  if (t == 0.0 || t == 1.0) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {1.0, nan, nan};
  }
  switch (c.family()) {
    case CopulaFamily::Gumbel: return gumbel_pickands(th, t);
    case CopulaFamily::Galambos: return galambos_pickands(th, t);
    case CopulaFamily::HuslerReiss: return husler_reiss_pickands(th, t);
    default: break;
  }
  invalid("pickands: unsupported family");
}

double pickands(const CopulaModel& c, double t) { return pickands_derivatives(c, t).a; }

// ----------------------------------------------------------------------------
// Distribution function

double cdf(const CopulaModel& c, double u, double v) {
  if (c.dim() != 2) invalid("cdf(u, v) on a copula of dimension " + std::to_string(c.dim()));
  if (std::isnan(u) || std::isnan(v)) invalid("cdf: NaN argument");
  u = clamp01(u);
  v = clamp01(v);
  if (u == 0.0 || v == 0.0) return 0.0;
  if (u == 1.0) return v;
  if (v == 1.0) return u;
  const auto& p = c.params();
  switch (c.family()) {
    case CopulaFamily::Independence: return u * v;
    case CopulaFamily::Comonotone: return std::min(u, v);
    case CopulaFamily::Countermonotone: return std::max(u + v - 1.0, 0.0);
    case CopulaFamily::Gaussian:
      return bivariate_normal_cdf(norm_quantile(u), norm_quantile(v), p[0]);
    case CopulaFamily::StudentT: {
      // C(u, v) = int_{-inf}^{x} t(s) T_{nu+1}((y - rho s) / scale(s)) ds with s = sqrt(nu) tan(a)
      const double rho = p[0], nu = p[1];
      const double x = student_t_quantile(u, nu), y = student_t_quantile(v, nu);
      const double rn = std::sqrt(nu);
      const double k = std::exp(std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu)) / std::sqrt(kPi);
      auto integrand = [=](double a) {
        const double cs = std::cos(a);
        if (cs <= 0.0) return 0.0;
        const double s = rn * std::tan(a);
        return k * std::pow(cs, nu - 1.0) *
               student_t_cdf((y - rho * s) / student_conditional_scale(s, rho, nu), nu + 1.0);
      };
      QuadratureOptions opts{1e-13, 1e-11, 4000};
      const double value = integrate(integrand, -0.5 * kPi, std::atan(x / rn), opts).value;
      return std::clamp(value, std::max(u + v - 1.0, 0.0), std::min(u, v));
    }
    case CopulaFamily::Clayton: {
      const double th = p[0];
      const double s = std::pow(u, -th) + std::pow(v, -th) - 1.0;
      return std::pow(s, -1.0 / th);
    }
    case CopulaFamily::Frank: {
      const double th = p[0];
      const double num = std::expm1(-th * u) * std::expm1(-th * v);
      return -std::log1p(num / std::expm1(-th)) / th;
    }
    case CopulaFamily::Gumbel:
    case CopulaFamily::Galambos:
    case CopulaFamily::HuslerReiss:
    case CopulaFamily::Tawn: {
      const double x = -std::log(u), y = -std::log(v);
      return std::exp(-(x + y) * pickands(c, y / (x + y)));
    }
  }
  invalid("cdf: unsupported family");
}

double cdf(const CopulaModel& c, const Eigen::Ref<const Eigen::VectorXd>& u) {
  if (u.size() != c.dim()) invalid("cdf: point dimension does not match copula dimension");
  if (c.dim() == 2) return cdf(c, u[0], u[1]);
  const Eigen::ArrayXd w = u.array().max(0.0).min(1.0);
  switch (c.family()) {
    case CopulaFamily::Independence: return w.prod();
    case CopulaFamily::Comonotone: return w.minCoeff();
    default: break;
  }
  invalid("cdf: family is bivariate only");
}

double survival_cdf(const CopulaModel& c, double u, double v) {
  u = clamp01(u);
  v = clamp01(v);
  return std::clamp(u + v - 1.0 + cdf(c, 1.0 - u, 1.0 - v), 0.0, std::min(u, v));
}

double survival_cdf(const CopulaModel& c, const Eigen::Ref<const Eigen::VectorXd>& u) {
  const int d = c.dim();
  if (u.size() != d) invalid("survival_cdf: point dimension does not match copula dimension");
  if (d == 2) return survival_cdf(c, u[0], u[1]);
  if (d > 20) invalid("survival_cdf: dimension too large for inclusion-exclusion");
  // sum over subsets M of (-1)^|M| C(w), w_i = 1 - u_i for i in M, else 1
  double total = 0.0;
  Eigen::VectorXd w(d);
  for (unsigned mask = 0; mask < (1u << d); ++mask) {
    int bits = 0;
    for (int i = 0; i < d; ++i) {
      const bool in = (mask >> i) & 1u;
      w[i] = in ? 1.0 - u[i] : 1.0;
      bits += in;
    }
    total += (bits % 2 ? -1.0 : 1.0) * cdf(c, w);
  }
  return std::max(total, 0.0);
}

// ----------------------------------------------------------------------------
// Density

double log_density(const CopulaModel& c, double u, double v) {
  if (!has_density(c.family())) invalid(c.name() + " copula has no density");
  require_open(u, v, "density");
  const auto& p = c.params();
  switch (c.family()) {
    case CopulaFamily::Independence: return 0.0;
    case CopulaFamily::Gaussian: {
      const double rho = p[0];
      const double x = norm_quantile(u), y = norm_quantile(v);
      const double one_m = 1.0 - rho * rho;
      return -0.5 * std::log(one_m) - (rho * rho * (x * x + y * y) - 2.0 * rho * x * y) /
                                          (2.0 * one_m);
    }
    case CopulaFamily::StudentT: {
      const double x = student_t_quantile(u, p[1]), y = student_t_quantile(v, p[1]);
      return student_log_density(x, y, p[0], p[1]);
    }
    case CopulaFamily::Clayton: {
      const double th = p[0];
      const double lu = std::log(u), lv = std::log(v);
      const double s = std::exp(-th * lu) + std::exp(-th * lv) - 1.0;
      return std::log1p(th) - (th + 1.0) * (lu + lv) - (2.0 + 1.0 / th) * std::log(s);
    }
    case CopulaFamily::Frank: {
      const double th = p[0];
      const double a = -std::expm1(-th);
      const double den = a - std::expm1(-th * u) * std::expm1(-th * v);
      return std::log(th) + std::log(a) - th * (u + v) - 2.0 * std::log(std::abs(den));
    }
    case CopulaFamily::Gumbel:
    case CopulaFamily::Galambos:
    case CopulaFamily::HuslerReiss:
    case CopulaFamily::Tawn: {
      const EvPoint e = ev_point(c, u, v);
      // cancellation in the far corners can push the bracket just below zero
      const double bracket = std::max(e.lx * e.ly - e.lxy, 0.0);
      return std::log(e.c) - std::log(u) - std::log(v) + std::log(bracket);
    }
    default: break;
  }
  invalid("density: unsupported family");
}

double density(const CopulaModel& c, double u, double v) { return std::exp(log_density(c, u, v)); }

// ----------------------------------------------------------------------------
// Conditional distribution

double h_function(const CopulaModel& c, double u, double v) {
  if (c.dim() != 2) invalid("h_function: bivariate copulas only");
  if (!(u > 0.0 && u < 1.0)) {
    std::ostringstream os;
    os << "h_function: conditioning value u = " << u << " outside (0, 1)";
    invalid(os.str());
  }
  if (std::isnan(v)) invalid("h_function: NaN argument");
  if (v <= 0.0) return 0.0;
  if (v >= 1.0) return 1.0;
  const auto& p = c.params();
  switch (c.family()) {
    case CopulaFamily::Independence: return v;
    case CopulaFamily::Comonotone: return v >= u ? 1.0 : 0.0;
    case CopulaFamily::Countermonotone: return u + v >= 1.0 ? 1.0 : 0.0;
    case CopulaFamily::Gaussian: {
      const double rho = p[0];
      return norm_cdf((norm_quantile(v) - rho * norm_quantile(u)) / std::sqrt(1.0 - rho * rho));
    }
    case CopulaFamily::StudentT: {
      const double rho = p[0], nu = p[1];
      const double x = student_t_quantile(u, nu), y = student_t_quantile(v, nu);
      return student_t_cdf((y - rho * x) / student_conditional_scale(x, rho, nu), nu + 1.0);
    }
    case CopulaFamily::Clayton: {
      const double th = p[0];
      const double lu = std::log(u), lv = std::log(v);
      const double s = std::exp(-th * lu) + std::exp(-th * lv) - 1.0;
      return clamp01(std::exp(-(th + 1.0) * lu - (1.0 + 1.0 / th) * std::log(s)));
    }
    case CopulaFamily::Frank: {
      const double th = p[0];
      const double bu = std::expm1(-th * u), bv = std::expm1(-th * v);
      return clamp01(std::exp(-th * u) * bv / (std::expm1(-th) + bu * bv));
    }
    case CopulaFamily::Gumbel:
    case CopulaFamily::Galambos:
    case CopulaFamily::HuslerReiss:
    case CopulaFamily::Tawn: {
      const EvPoint e = ev_point(c, u, v);
      return clamp01(e.c * e.lx / u);
    }
  }
  invalid("h_function: unsupported family");
}

double h_inverse(const CopulaModel& c, double u, double w) {
  if (!(u > 0.0 && u < 1.0)) invalid("h_inverse: u outside (0, 1)");
  if (w <= 0.0) return 0.0;
  if (w >= 1.0) return 1.0;
  const auto& p = c.params();
  switch (c.family()) {
    case CopulaFamily::Independence: return w;
    case CopulaFamily::Comonotone: return u;
    case CopulaFamily::Countermonotone: return 1.0 - u;
    case CopulaFamily::Gaussian: {
      const double rho = p[0];
      return norm_cdf(rho * norm_quantile(u) + std::sqrt(1.0 - rho * rho) * norm_quantile(w));
    }
    case CopulaFamily::StudentT: {
      const double rho = p[0], nu = p[1];
      const double x = student_t_quantile(u, nu);
      const double y =
          rho * x + student_conditional_scale(x, rho, nu) * student_t_quantile(w, nu + 1.0);
      return student_t_cdf(y, nu);
    }
    case CopulaFamily::Clayton: {
      const double th = p[0];
      const double z = std::pow(w * std::pow(u, th + 1.0), -th / (1.0 + th)) + 1.0 -
                       std::pow(u, -th);
      return clamp01(std::pow(z, -1.0 / th));
    }
    case CopulaFamily::Frank: {
      const double th = p[0];
      const double y = w * std::expm1(-th) / (std::exp(-th * u) - w * std::expm1(-th * u));
      return clamp01(-std::log1p(y) / th);
    }
    default: break;
  }
  // Extreme-value families: monotone bisection on v.
  const double v = bisect_increasing([&](double x) { return h_function(c, u, x) - w; }, 0.0, 1.0,
                                     1e-10);
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "h_inverse: conditional inversion failed at u = " << u << ", w = " << w;
    invalid(os.str());
  }
  return v;
}

// ----------------------------------------------------------------------------
// Sampling

Eigen::MatrixXd sample(const CopulaModel& c, std::size_t n, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  const int d = c.dim();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), d);
  const auto rows = static_cast<Eigen::Index>(n);
  const auto& p = c.params();
  std::normal_distribution<double> z;
  auto expo = [&rng] { return -std::log(open_uniform(rng)); };

  switch (c.family()) {
    case CopulaFamily::Independence:
      for (Eigen::Index i = 0; i < rows; ++i)
        for (int j = 0; j < d; ++j) out(i, j) = open_uniform(rng);
      return out;
    case CopulaFamily::Comonotone:
      for (Eigen::Index i = 0; i < rows; ++i) out.row(i).setConstant(open_uniform(rng));
      return out;
    case CopulaFamily::Countermonotone:
      for (Eigen::Index i = 0; i < rows; ++i) {
        const double u = open_uniform(rng);
        out(i, 0) = u;
        out(i, 1) = 1.0 - u;
      }
      return out;
    case CopulaFamily::Gaussian: {
      const double rho = p[0], s = std::sqrt(1.0 - rho * rho);
      for (Eigen::Index i = 0; i < rows; ++i) {
        const double z1 = z(rng), z2 = rho * z1 + s * z(rng);
        out(i, 0) = norm_cdf(z1);
        out(i, 1) = norm_cdf(z2);
      }
      return out;
    }
    case CopulaFamily::StudentT: {
      const double rho = p[0], nu = p[1], s = std::sqrt(1.0 - rho * rho);
      std::chi_squared_distribution<double> chi2(nu);
      for (Eigen::Index i = 0; i < rows; ++i) {
        const double z1 = z(rng), z2 = rho * z1 + s * z(rng);
        const double scale = std::sqrt(nu / chi2(rng));
        out(i, 0) = student_t_cdf(z1 * scale, nu);
        out(i, 1) = student_t_cdf(z2 * scale, nu);
      }
      return out;
    }
    case CopulaFamily::Clayton: {
      // Gamma frailty: U_j = (1 + E_j / V)^(-1/theta), V ~ Gamma(1/theta, 1).
      const double th = p[0];
      std::gamma_distribution<double> frailty(1.0 / th, 1.0);
      for (Eigen::Index i = 0; i < rows; ++i) {
        const double v = frailty(rng);
        for (int j = 0; j < d; ++j) out(i, j) = std::pow(1.0 + expo() / v, -1.0 / th);
      }
      return out;
    }
    case CopulaFamily::Gumbel: {
      // Positive-stable frailty: U_j = exp(-(E_j / S)^(1/theta)).
      const double th = p[0];
      const double alpha = 1.0 / th;
      for (Eigen::Index i = 0; i < rows; ++i) {
        const double s = th == 1.0 ? 1.0 : positive_stable(alpha, rng);
        for (int j = 0; j < d; ++j) out(i, j) = std::exp(-std::pow(expo() / s, alpha));
      }
      return out;
    }
    default: break;
  }
  // Conditional inversion: U uniform, V = h^{-1}(U, W) with W uniform.
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double u = open_uniform(rng);
    const double w = open_uniform(rng);
    out(i, 0) = u;
    out(i, 1) = h_inverse(c, u, w);
  }
  return out;
}

// ----------------------------------------------------------------------------
// Kendall's tau

double kendall_tau(const CopulaModel& c) {
  const auto& p = c.params();
  switch (c.family()) {
    case CopulaFamily::Independence: return 0.0;
    case CopulaFamily::Comonotone: return 1.0;
    case CopulaFamily::Countermonotone: return -1.0;
    case CopulaFamily::Gaussian:
    case CopulaFamily::StudentT: return 2.0 / kPi * std::asin(p[0]);
    case CopulaFamily::Clayton: return p[0] / (p[0] + 2.0);
    case CopulaFamily::Gumbel: return 1.0 - 1.0 / p[0];
    case CopulaFamily::Frank: return 1.0 - 4.0 / p[0] * (1.0 - debye1(p[0]));
    case CopulaFamily::Galambos:
    case CopulaFamily::HuslerReiss:
    case CopulaFamily::Tawn: {
      // tau = int_0^1 t (1 - t) A''(t) / A(t) dt
      auto f = [&c](double t) {
        if (t <= 0.0 || t >= 1.0) return 0.0;
        const auto pv = pickands_derivatives(c, t);
        return t * (1.0 - t) * pv.d2a / pv.a;
      };
      return integrate(f, 0.0, 1.0, {1e-13, 1e-12, 4000}).value;
    }
  }
  invalid("kendall_tau: unsupported family");
}

}  // namespace rainbow
