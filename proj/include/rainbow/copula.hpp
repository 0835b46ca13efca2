// Bivariate copula families: elliptical (Gaussian, Student-t), Archimedean
// (Clayton, Frank, Gumbel), extreme-value (Gumbel, Galambos, Husler-Reiss,
// Tawn) and the independence / Frechet bound copulas.
//
// Extreme-value members are evaluated through their Pickands dependence
// function A:  C(u, v) = exp{ ln(uv) A(ln v / ln(uv)) }.
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace rainbow {

enum class CopulaFamily {
  Gaussian,
  StudentT,
  Clayton,
  Frank,
  Gumbel,
  Galambos,
  HuslerReiss,
  Tawn,
  Independence,
  Comonotone,
  Countermonotone,
};

std::string_view family_name(CopulaFamily f);
/// Accepts canonical names plus the aliases `normal`, `t`, `student`,
/// `husler-reiss`, `hr`.
CopulaFamily parse_family(std::string_view name);
bool is_extreme_value(CopulaFamily f);
bool has_density(CopulaFamily f);
int parameter_count(CopulaFamily f);

/// Family tag plus parameters. Immutable; validated on construction.
///   gaussian: rho in (-1, 1)
///   student_t: rho in (-1, 1), nu > 0
///   clayton, frank, galambos: theta > 0
///   gumbel: theta >= 1
///   husler_reiss: lambda > 0
///   tawn: theta in [0, 1]      A(t) = 1 - theta t (1 - t)
/// Only independence and the comonotone copula accept dim != 2.
class CopulaModel {
 public:
  CopulaModel(CopulaFamily family, std::vector<double> params, int dim = 2);

  static CopulaModel independence(int dim = 2) { return {CopulaFamily::Independence, {}, dim}; }

  CopulaFamily family() const { return family_; }
  const std::vector<double>& params() const { return params_; }
  double param(std::size_t i = 0) const { return params_.at(i); }
  int dim() const { return dim_; }
  std::string name() const { return std::string(family_name(family_)); }

 private:
  CopulaFamily family_;
  std::vector<double> params_;
  int dim_;
};

double cdf(const CopulaModel& c, double u, double v);
double cdf(const CopulaModel& c, const Eigen::Ref<const Eigen::VectorXd>& u);

/// Mixed partial d2C/dudv on the open square.
double density(const CopulaModel& c, double u, double v);
double log_density(const CopulaModel& c, double u, double v);

/// Conditional distribution of V given U = u, i.e. dC(u, v)/du.
double h_function(const CopulaModel& c, double u, double v);
/// v with h_function(c, u, v) = w.
double h_inverse(const CopulaModel& c, double u, double w);

struct PickandsValue {
  double a;    // A(t)
  double da;   // A'(t)
  double d2a;  // A''(t)
};

double pickands(const CopulaModel& c, double t);
PickandsValue pickands_derivatives(const CopulaModel& c, double t);

/// Joint survival copula: u + v - 1 + C(1 - u, 1 - v) in two dimensions,
/// inclusion-exclusion over subsets in general.
double survival_cdf(const CopulaModel& c, double u, double v);
double survival_cdf(const CopulaModel& c, const Eigen::Ref<const Eigen::VectorXd>& u);

/// n x dim matrix of i.i.d. draws with joint law C.
Eigen::MatrixXd sample(const CopulaModel& c, std::size_t n, std::uint64_t seed);

/// Population Kendall's tau.
double kendall_tau(const CopulaModel& c);

}  // namespace rainbow
