// Copula inference: rank pseudo-observations, two-step IFM estimation,
// Cramer-von Mises goodness of fit with a parametric bootstrap, and
// information-criterion model selection.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rainbow/copula.hpp"
#include "rainbow/mixture.hpp"

namespace rainbow {

/// n x d matrix in (0, 1); column j holds rank(X_ij) / (n + 1), ties averaged.
struct PseudoObservations {
  Eigen::MatrixXd u;
  Eigen::Index n() const { return u.rows(); }
};

PseudoObservations pseudo_observations(const Eigen::Ref<const Eigen::MatrixXd>& x);

struct CopulaFit {
  CopulaModel copula;
  double loglik = 0.0;
  bool boundary = false;  // optimum sits on the edge of the search domain
};

/// Maximum likelihood over the family's parameter domain for points already
/// on the unit square (pseudo-observations or fitted-margin transforms).
CopulaFit fit_copula(const Eigen::Ref<const Eigen::MatrixXd>& u, CopulaFamily family);

double copula_loglik(const CopulaModel& c, const Eigen::Ref<const Eigen::MatrixXd>& u);

struct IfmResult {
  std::vector<EmFit> margins;  // step 1, one per column
  CopulaModel copula;          // step 2
  double loglik = 0.0;         // copula log-likelihood at the estimate
  bool boundary = false;
  Eigen::MatrixXd u;  // F_j(x_ij; fitted margin j)
};

/// Inference functions for margins: EM fit per column, then copula ML on
/// the fitted marginal distribution functions.
IfmResult fit_ifm(const Eigen::Ref<const Eigen::MatrixXd>& x, CopulaFamily family,
                  const EmConfig& em = {});

/// Copula step of IFM for margins already fitted.
IfmResult fit_ifm(const Eigen::Ref<const Eigen::MatrixXd>& x, CopulaFamily family,
                  std::vector<EmFit> margins);

/// Empirical copula (1/n) #{k : U_k <= point componentwise}.
double empirical_copula(const PseudoObservations& pobs, const Eigen::Ref<const Eigen::VectorXd>& point);

/// S_n = sum_i (C_n(U_i) - C(U_i))^2 over the pseudo-observations.
double cvm_statistic(const PseudoObservations& pobs, const CopulaModel& c);

struct GofReport {
  double statistic = 0.0;
  double p_value = 0.0;
  int bootstrap_reps = 0;
  int failed_reps = 0;
  std::uint64_t seed = 0;
  std::optional<CopulaModel> fitted;
};

/// Parametric bootstrap of the CvM statistic. Replicate b samples from the
/// fitted copula with seed + b, re-ranks, refits and recomputes the
/// statistic. p = (#{S_b >= S_obs} + 0.5) / (B + 1).
GofReport bootstrap_pvalue(const PseudoObservations& pobs, CopulaFamily family, int reps,
                           std::uint64_t seed);

struct InformationCriteria {
  double aic;
  double bic;
};

/// AIC = 2m - 2 lnL, BIC = m ln(n) - 2 lnL.
InformationCriteria information_criteria(double loglik, int params, double n);

struct SelectionEntry {
  CopulaFamily family;
  std::optional<CopulaModel> copula;  // empty when the fit failed
  double loglik = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  double cvm = 0.0;
  std::optional<double> p_value;
  bool boundary = false;
  std::string error;
};

struct SelectionReport {
  std::size_t n = 0;
  std::vector<SelectionEntry> entries;
  // Indices into `entries`, best first; failed fits go last.
  std::vector<std::size_t> rank_aic;
  std::vector<std::size_t> rank_bic;
  std::vector<std::size_t> rank_cvm;
  std::vector<EmFit> margins;
};

struct SelectionConfig {
  EmConfig em;
  int bootstrap = 0;  // 0 skips p-values
  std::uint64_t seed = 20200630;
};

/// Fits every family on the same IFM margins and ranks them by AIC, BIC and
/// CvM statistic. No single winner is chosen.
SelectionReport select_copula(const Eigen::Ref<const Eigen::MatrixXd>& x,
                              const std::vector<CopulaFamily>& families,
                              const SelectionConfig& cfg = {});

/// Kendall's tau-b of two samples in O(n log n).
double empirical_kendall_tau(const Eigen::Ref<const Eigen::VectorXd>& x,
                             const Eigen::Ref<const Eigen::VectorXd>& y);

}  // namespace rainbow
