#include "rainbow/fitgof.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rainbow/numerics.hpp"

namespace rainbow {

namespace {

constexpr const char* kModule = "fitgof";
constexpr double kFitTol = 1e-8;
constexpr double kMaxNu = 100.0;
constexpr double kMinNu = 0.5;

// Unconstrained search coordinate s and its map to the family parameter.
struct SearchDomain {
  double lo;
  double hi;
  double (*to_param)(double);
};

double identity(double s) { return s; }
double exp_map(double s) { return std::exp(s); }
double one_plus_exp(double s) { return 1.0 + std::exp(s); }
double tanh_map(double s) { return std::tanh(s); }

SearchDomain search_domain(CopulaFamily f) {
  switch (f) {
    case CopulaFamily::Gaussian:
    case CopulaFamily::StudentT: return {-7.5, 7.5, tanh_map};
    case CopulaFamily::Clayton: return {-12.0, 4.0, exp_map};
    case CopulaFamily::Frank: return {-12.0, 4.5, exp_map};
    case CopulaFamily::Gumbel: return {-14.0, 3.9, one_plus_exp};
    case CopulaFamily::Galambos: return {-8.0, 3.5, exp_map};
    case CopulaFamily::HuslerReiss: return {-5.0, 3.5, exp_map};
    case CopulaFamily::Tawn: return {0.0, 1.0, identity};
    default: break;
  }
  throw Error(kModule, "no parameter search domain for " + std::string(family_name(f)));
}

bool on_edge(double s, const SearchDomain& d) {
  const double eps = 1e-5 * (d.hi - d.lo);
  return s - d.lo < eps || d.hi - s < eps;
}

void require_unit(const Eigen::Ref<const Eigen::MatrixXd>& u) {
  if (u.cols() != 2) throw Error(kModule, "copula fitting expects n x 2 data");
  if (u.rows() < 2) throw Error(kModule, "copula fitting needs at least 2 observations");
  if (!((u.array() > 0.0).all() && (u.array() < 1.0).all()))
    throw Error(kModule, "copula fitting expects points in the open unit square");
}

}  // namespace

PseudoObservations pseudo_observations(const Eigen::Ref<const Eigen::MatrixXd>& x) {
  const Eigen::Index n = x.rows();
  if (n < 2) throw Error(kModule, "pseudo_observations: need at least 2 rows");
  PseudoObservations out{Eigen::MatrixXd(n, x.cols())};
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const auto col = x.col(j);
    if ((col.array() == col[0]).all()) {
      std::ostringstream os;
      os << "pseudo_observations: column " << j << " is constant";
      throw Error(kModule, os.str());
    }
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&col](Eigen::Index a, Eigen::Index b) { return col[a] < col[b]; });
    for (std::size_t i = 0; i < order.size();) {
      std::size_t k = i;
      while (k + 1 < order.size() && col[order[k + 1]] == col[order[i]]) ++k;
      // 1-based average rank of the tie block [i, k]
      const double rank = 0.5 * static_cast<double>(i + k) + 1.0;
      for (std::size_t m = i; m <= k; ++m)
        out.u(order[m], j) = rank / static_cast<double>(n + 1);
      i = k + 1;
    }
  }
  return out;
}

double copula_loglik(const CopulaModel& c, const Eigen::Ref<const Eigen::MatrixXd>& u) {
  double ll = 0.0;
  for (Eigen::Index i = 0; i < u.rows(); ++i) ll += log_density(c, u(i, 0), u(i, 1));
  return ll;
}

CopulaFit fit_copula(const Eigen::Ref<const Eigen::MatrixXd>& u, CopulaFamily family) {
  require_unit(u);
  if (parameter_count(family) == 0) {
    CopulaModel c(family, {});
    return {c, has_density(family) ? copula_loglik(c, u) : 0.0, false};
  }
  const SearchDomain dom = search_domain(family);
  auto neg_ll = [&](std::vector<double> params) {
    try {
      return -copula_loglik(CopulaModel(family, std::move(params)), u);
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  if (family == CopulaFamily::StudentT) {
    // Coordinate descent over (rho, nu); nu searched on a log scale.
    const double nu_lo = std::log(kMinNu), nu_hi = std::log(kMaxNu);
    double s_rho = 0.0, s_nu = std::log(8.0);
    double best = std::numeric_limits<double>::infinity();
    for (int round = 0; round < 50; ++round) {
      const double nu = std::exp(s_nu);
      s_rho = minimize_scalar([&](double s) { return neg_ll({std::tanh(s), nu}); }, dom.lo,
                              dom.hi, kFitTol, 16)
                  .x;
      const double rho = std::tanh(s_rho);
      const auto m =
          minimize_scalar([&](double s) { return neg_ll({rho, std::exp(s)}); }, nu_lo, nu_hi,
                          kFitTol, 16);
      s_nu = m.x;
      if (best - m.value < 1e-9) {
        best = std::min(best, m.value);
        break;
      }
      best = m.value;
    }
    CopulaModel c(family, {std::tanh(s_rho), std::exp(s_nu)});
    return {c, copula_loglik(c, u), on_edge(s_rho, dom)};
  }

  const auto m = minimize_scalar([&](double s) { return neg_ll({dom.to_param(s)}); }, dom.lo,
                                 dom.hi, kFitTol, 24);
  CopulaModel c(family, {dom.to_param(m.x)});
  return {c, -m.value, on_edge(m.x, dom)};
}

IfmResult fit_ifm(const Eigen::Ref<const Eigen::MatrixXd>& x, CopulaFamily family,
                  std::vector<EmFit> margins) {
  if (x.cols() != 2) throw Error(kModule, "fit_ifm: expects an n x 2 return matrix");
  if (margins.size() != 2) throw Error(kModule, "fit_ifm: expects two fitted margins");
  Eigen::MatrixXd u(x.rows(), 2);
  constexpr double eps = 1e-12;
  for (Eigen::Index j = 0; j < 2; ++j)
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      u(i, j) = std::clamp(cdf(margins[j].mixture, x(i, j)), eps, 1.0 - eps);
  CopulaFit fit = fit_copula(u, family);
  return {std::move(margins), fit.copula, fit.loglik, fit.boundary, std::move(u)};
}

IfmResult fit_ifm(const Eigen::Ref<const Eigen::MatrixXd>& x, CopulaFamily family,
                  const EmConfig& em) {
  if (x.rows() < 50) throw Error(kModule, "fit_ifm: need at least 50 observations");
  if (x.cols() != 2) throw Error(kModule, "fit_ifm: expects an n x 2 return matrix");
  std::vector<EmFit> margins;
  for (Eigen::Index j = 0; j < 2; ++j) margins.push_back(fit_em(x.col(j), em));
  return fit_ifm(x, family, std::move(margins));
}

double empirical_copula(const PseudoObservations& pobs,
                        const Eigen::Ref<const Eigen::VectorXd>& point) {
  const Eigen::Index n = pobs.n();
  Eigen::Index count = 0;
  for (Eigen::Index k = 0; k < n; ++k)
    if ((pobs.u.row(k).transpose().array() <= point.array()).all()) ++count;
  return static_cast<double>(count) / static_cast<double>(n);
}

double cvm_statistic(const PseudoObservations& pobs, const CopulaModel& c) {
  const Eigen::Index n = pobs.n();
  const auto& u = pobs.u;
  double s = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index count = 0;
    for (Eigen::Index k = 0; k < n; ++k) count += (u(k, 0) <= u(i, 0)) && (u(k, 1) <= u(i, 1));
    const double emp = static_cast<double>(count) / static_cast<double>(n);
    const double diff = emp - cdf(c, u(i, 0), u(i, 1));
    s += diff * diff;
  }
  return s;
}

GofReport bootstrap_pvalue(const PseudoObservations& pobs, CopulaFamily family, int reps,
                           std::uint64_t seed) {
  if (reps < 99) throw Error(kModule, "bootstrap_pvalue: need at least 99 replicates");
  const CopulaFit fit = fit_copula(pobs.u, family);
  GofReport report;
  report.seed = seed;
  report.fitted = fit.copula;
  report.statistic = cvm_statistic(pobs, fit.copula);

  const auto n = static_cast<std::size_t>(pobs.n());
  std::vector<double> stats(static_cast<std::size_t>(reps), -1.0);
  std::vector<char> ok(static_cast<std::size_t>(reps), 0);
  parallel_for(stats.size(), [&](std::size_t b) {
    try {
      const Eigen::MatrixXd draws = sample(fit.copula, n, seed + b);
      const PseudoObservations boot = pseudo_observations(draws);
      const CopulaFit refit = fit_copula(boot.u, family);
      stats[b] = cvm_statistic(boot, refit.copula);
      ok[b] = 1;
    } catch (const Error&) {
      ok[b] = 0;
    }
  });

  int exceed = 0, good = 0;
  for (std::size_t b = 0; b < stats.size(); ++b) {
    if (!ok[b]) continue;
    ++good;
    if (stats[b] >= report.statistic) ++exceed;
  }
  report.failed_reps = reps - good;
  report.bootstrap_reps = good;
  if (report.failed_reps * 10 > reps) {
    std::ostringstream os;
    os << "bootstrap_pvalue: " << report.failed_reps << " of " << reps
       << " replicate fits failed";
    throw Error(kModule, os.str());
  }
  report.p_value = (exceed + 0.5) / (good + 1.0);
  return report;
}

InformationCriteria information_criteria(double loglik, int params, double n) {
  if (params < 1 || !(n >= 1.0)) throw Error(kModule, "information_criteria: need m >= 1, n >= 1");
  return {2.0 * params - 2.0 * loglik, params * std::log(n) - 2.0 * loglik};
}

SelectionReport select_copula(const Eigen::Ref<const Eigen::MatrixXd>& x,
                              const std::vector<CopulaFamily>& families,
                              const SelectionConfig& cfg) {
  if (families.size() < 2) throw Error(kModule, "select_copula: need at least two families");
  if (x.rows() < 50) throw Error(kModule, "select_copula: need at least 50 observations");
  SelectionReport report;
  report.n = static_cast<std::size_t>(x.rows());
  for (Eigen::Index j = 0; j < 2; ++j) report.margins.push_back(fit_em(x.col(j), cfg.em));
  const PseudoObservations ranks = pseudo_observations(x);

  for (std::size_t k = 0; k < families.size(); ++k) {
    SelectionEntry e;
    e.family = families[k];
    try {
      const IfmResult ifm = fit_ifm(x, e.family, report.margins);
      e.copula = ifm.copula;
      e.loglik = ifm.loglik;
      e.boundary = ifm.boundary;
      const auto ic = information_criteria(ifm.loglik, std::max(1, parameter_count(e.family)),
                                           static_cast<double>(report.n));
      e.aic = ic.aic;
      e.bic = ic.bic;
      e.cvm = cvm_statistic(ranks, ifm.copula);
      if (cfg.bootstrap > 0)
        e.p_value = bootstrap_pvalue(ranks, e.family, cfg.bootstrap, cfg.seed + 1000003ull * k)
                        .p_value;
    } catch (const Error& err) {
      e.copula.reset();
      e.error = std::string(err.module()) + ": " + err.what();
    }
    report.entries.push_back(std::move(e));
  }

  auto rank_by = [&report](auto key) {
    std::vector<std::size_t> idx(report.entries.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      const auto& ea = report.entries[a];
      const auto& eb = report.entries[b];
      if (ea.copula.has_value() != eb.copula.has_value()) return ea.copula.has_value();
      if (!ea.copula) return false;
      return key(ea) < key(eb);
    });
    return idx;
  };
  report.rank_aic = rank_by([](const SelectionEntry& e) { return e.aic; });
  report.rank_bic = rank_by([](const SelectionEntry& e) { return e.bic; });
  report.rank_cvm = rank_by([](const SelectionEntry& e) { return e.cvm; });
  return report;
}

namespace {

// Merge sort on `v`, returning the number of inversions (strictly greater
// earlier elements).
std::int64_t sort_count_swaps(std::vector<double>& v, std::vector<double>& buf, std::size_t lo,
                              std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = (lo + hi) / 2;
  std::int64_t swaps = sort_count_swaps(v, buf, lo, mid) + sort_count_swaps(v, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += static_cast<std::int64_t>(mid - i);
      buf[k++] = v[j++];
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo),
            buf.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

template <class Seq>
std::int64_t tied_pairs(const Seq& sorted) {
  std::int64_t ties = 0, run = 1;
  for (std::size_t i = 1; i <= sorted.size(); ++i) {
    if (i < sorted.size() && sorted[i] == sorted[i - 1]) {
      ++run;
    } else {
      ties += run * (run - 1) / 2;
      run = 1;
    }
  }
  return ties;
}

}  // namespace

double empirical_kendall_tau(const Eigen::Ref<const Eigen::VectorXd>& x,
                             const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw Error(kModule, "empirical_kendall_tau: need two samples of equal length >= 2");
  const auto n = static_cast<std::size_t>(x.size());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
  });
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = x[order[i]];
    ys[i] = y[order[i]];
  }
  std::int64_t joint = 0, run = 1;
  for (std::size_t i = 1; i <= n; ++i) {
    if (i < n && xs[i] == xs[i - 1] && ys[i] == ys[i - 1]) {
      ++run;
    } else {
      joint += run * (run - 1) / 2;
      run = 1;
    }
  }
  const std::int64_t x_ties = tied_pairs(xs);
  std::vector<double> buf(n);
  const std::int64_t swaps = sort_count_swaps(ys, buf, 0, n);
  const std::int64_t y_ties = tied_pairs(ys);
  const auto total = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
  const double num = static_cast<double>(total - x_ties - y_ties + joint - 2 * swaps);
  const double den = std::sqrt(static_cast<double>(total - x_ties) *
                               static_cast<double>(total - y_ties));
  return num / den;
}

}  // namespace rainbow
