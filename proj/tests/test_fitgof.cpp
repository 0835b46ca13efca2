#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rainbow/fitgof.hpp"
#include "rainbow/numerics.hpp"

using namespace rainbow;
using F = CopulaFamily;

namespace {

const GaussianMixture kAtos({{0.07845771 / 1.00000002, -0.0072328, 0.0603574},
                             {0.921542310 / 1.00000002, 0.000764489, 0.013530408}});
const GaussianMixture kDassault({{0.83729906, 0.00110506, 0.01014017},
                                 {0.16270094, -0.00101651, 0.03315738}});

/// Returns with mixture margins and the given copula.
Eigen::MatrixXd simulate_returns(const CopulaModel& c, std::size_t n, std::uint64_t seed) {
  const Eigen::MatrixXd u = sample(c, n, seed);
  Eigen::MatrixXd x(u.rows(), 2);
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    x(i, 0) = quantile(kAtos, u(i, 0));
    x(i, 1) = quantile(kDassault, u(i, 1));
  }
  return x;
}

double brute_cvm(const Eigen::MatrixXd& u, const CopulaModel& c) {
  const auto n = u.rows();
  double s = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double count = 0;
    for (Eigen::Index k = 0; k < n; ++k) count += (u(k, 0) <= u(i, 0) && u(k, 1) <= u(i, 1)) ? 1 : 0;
    const double d = count / static_cast<double>(n) - cdf(c, u(i, 0), u(i, 1));
    s += d * d;
  }
  return s;
}

/// Root in (-1, 1) of the Gaussian-copula score equation in normal scores.
double gaussian_ml_root(const Eigen::MatrixXd& z) {
  const double n = static_cast<double>(z.rows());
  const double sxy = (z.col(0).array() * z.col(1).array()).sum();
  const double sxx = z.col(0).squaredNorm() + z.col(1).squaredNorm();
  auto score = [&](double r) { return n * r * (1 - r * r) + (1 + r * r) * sxy - r * sxx; };
  double lo = -0.999999, hi = 0.999999;
  // score is positive left of the root and negative right of it
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (lo + hi);
    (score(m) > 0 ? lo : hi) = m;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(PseudoObservations, RankArithmetic) {
  Eigen::MatrixXd x(3, 1);
  x << 3, 1, 2;
  const auto p = pseudo_observations(x);
  EXPECT_DOUBLE_EQ(p.u(0, 0), 0.75);
  EXPECT_DOUBLE_EQ(p.u(1, 0), 0.25);
  EXPECT_DOUBLE_EQ(p.u(2, 0), 0.5);
  Eigen::MatrixXd inc(5, 1);
  inc << -10, 0.1, 0.2, 7, 1e9;
  const auto q = pseudo_observations(inc);
  for (int i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(q.u(i, 0), (i + 1) / 6.0);
  Eigen::MatrixXd ties(4, 1);
  ties << 1, 2, 2, 3;
  const auto t = pseudo_observations(ties);
  EXPECT_DOUBLE_EQ(t.u(1, 0), 2.5 / 5.0);
  EXPECT_DOUBLE_EQ(t.u(2, 0), 2.5 / 5.0);
  EXPECT_THROW(pseudo_observations(Eigen::MatrixXd::Ones(5, 2)), Error);
}

TEST(PseudoObservations, InvariantUnderIncreasingTransforms) {
  const Eigen::MatrixXd x = simulate_returns({F::Clayton, {1.0}}, 500, 1);
  Eigen::MatrixXd y(x.rows(), 2);
  y.col(0) = x.col(0).array().exp() * 3.0 + 2.0;
  y.col(1) = x.col(1).array().cube();
  EXPECT_TRUE((pseudo_observations(x).u.array() == pseudo_observations(y).u.array()).all());
}

TEST(FitIfm, RecoversClayton) {
  const Eigen::MatrixXd x = simulate_returns({F::Clayton, {2.0}}, 5000, 2);
  const auto fit = fit_ifm(x, F::Clayton);
  EXPECT_NEAR(fit.copula.param(), 2.0, 0.2);
  EXPECT_FALSE(fit.boundary);
  EXPECT_EQ(fit.u.rows(), 5000);
}

TEST(FitIfm, IndependenceGivesGumbelNearOne) {
  const Eigen::MatrixXd x = simulate_returns(CopulaModel::independence(), 5000, 3);
  const auto fit = fit_ifm(x, F::Gumbel);
  EXPECT_NEAR(fit.copula.param(), 1.0, 0.05);
}

TEST(FitIfm, ComonotoneDataHitsBoundary) {
  const Eigen::MatrixXd u = sample(CopulaModel(F::Comonotone, {}), 1000, 4);
  Eigen::MatrixXd x(u.rows(), 2);
  for (Eigen::Index i = 0; i < u.rows(); ++i) x(i, 0) = x(i, 1) = quantile(kAtos, u(i, 0));
  const auto fit = fit_ifm(x, F::Gaussian);
  EXPECT_TRUE(fit.boundary);
  EXPECT_GT(fit.copula.param(), 0.9999);
}

TEST(FitIfm, GaussianMatchesNormalScoresMaximumLikelihood) {
  const Eigen::MatrixXd x = simulate_returns({F::Gaussian, {0.45}}, 10000, 5);
  const auto fit = fit_ifm(x, F::Gaussian);
  Eigen::MatrixXd z(fit.u.rows(), 2);
  for (Eigen::Index i = 0; i < z.rows(); ++i)
    for (Eigen::Index j = 0; j < 2; ++j) z(i, j) = norm_quantile(fit.u(i, j));
  EXPECT_NEAR(fit.copula.param(), gaussian_ml_root(z), 1e-6);
}

TEST(FitIfm, RejectsShortOrWideData) {
  EXPECT_THROW(fit_ifm(Eigen::MatrixXd::Random(20, 2), F::Gaussian), Error);
  EXPECT_THROW(fit_ifm(Eigen::MatrixXd::Random(100, 3), F::Gaussian), Error);
}

TEST(FitCopula, StudentTRecoversParameters) {
  const Eigen::MatrixXd u = sample(CopulaModel(F::StudentT, {0.5, 4.0}), 4000, 6);
  const auto fit = fit_copula(pseudo_observations(u).u, F::StudentT);
  EXPECT_NEAR(fit.copula.param(0), 0.5, 0.05);
  EXPECT_NEAR(fit.copula.param(1), 4.0, 1.5);
}

TEST(FitCopula, EveryFamilyRecoversItsParameter) {
  const std::vector<CopulaModel> truth{{F::Gaussian, {0.3}}, {F::Clayton, {1.2}},
                                       {F::Frank, {4.0}},    {F::Gumbel, {1.6}},
                                       {F::Galambos, {0.9}}, {F::HuslerReiss, {1.4}},
                                       {F::Tawn, {0.7}}};
  for (const auto& c : truth) {
    const auto fit = fit_copula(pseudo_observations(sample(c, 3000, 7)).u, c.family());
    EXPECT_NEAR(fit.copula.param() / c.param(), 1.0, 0.12) << c.name();
    EXPECT_NEAR(fit.loglik, copula_loglik(fit.copula, pseudo_observations(sample(c, 3000, 7)).u), 1e-9);
  }
}

TEST(CvmStatistic, HandCaseAndBruteForce) {
  Eigen::MatrixXd u(3, 2);
  u << 0.25, 0.25, 0.5, 0.5, 0.75, 0.75;
  const PseudoObservations p{u};
  const double hand = std::pow(1.0 / 3 - 1.0 / 16, 2) + std::pow(2.0 / 3 - 0.25, 2) +
                      std::pow(1.0 - 9.0 / 16, 2);
  EXPECT_NEAR(cvm_statistic(p, CopulaModel::independence()), hand, 1e-15);
  EXPECT_NEAR(hand, 0.439, 1e-3);
  const CopulaModel c(F::Gumbel, {1.7});
  const auto q = pseudo_observations(sample(c, 300, 8));
  EXPECT_NEAR(cvm_statistic(q, c), brute_cvm(q.u, c), 1e-12);
  double self = 0.0;
  for (Eigen::Index i = 0; i < q.n(); ++i) {
    const double d = empirical_copula(q, q.u.row(i).transpose()) -
                     empirical_copula(q, q.u.row(i).transpose());
    self += d * d;
  }
  EXPECT_EQ(self, 0.0);
}

TEST(CvmStatistic, SmallUnderTheNull) {
  for (const auto& c : {CopulaModel(F::Clayton, {2.0}), CopulaModel(F::Gumbel, {1.344})}) {
    const auto p = pseudo_observations(sample(c, 1000, 9));
    const double s = cvm_statistic(p, c);
    EXPECT_GE(s, 0.0);
    EXPECT_LT(s, 0.5);
  }
}

TEST(Bootstrap, CountingFloorAndDeterminism) {
  // strongly negative dependence is far outside any clayton fit
  const auto p = pseudo_observations(sample(CopulaModel(F::Gaussian, {-0.9}), 300, 10));
  const auto g = bootstrap_pvalue(p, F::Clayton, 99, 11);
  EXPECT_EQ(g.bootstrap_reps, 99);
  EXPECT_EQ(g.failed_reps, 0);
  EXPECT_DOUBLE_EQ(g.p_value, 0.5 / 100.0);
  const auto again = bootstrap_pvalue(p, F::Clayton, 99, 11);
  EXPECT_EQ(again.p_value, g.p_value);
  EXPECT_EQ(again.statistic, g.statistic);
  EXPECT_THROW(bootstrap_pvalue(p, F::Clayton, 50, 11), Error);
}

TEST(Bootstrap, NullPValuesRoughlyUniform) {
  const CopulaModel c(F::Clayton, {2.0});
  std::vector<double> ps;
  for (int r = 0; r < 50; ++r) {
    const auto p = pseudo_observations(sample(c, 200, 1000 + r));
    ps.push_back(bootstrap_pvalue(p, F::Clayton, 99, 5000 + 100 * r).p_value);
  }
  std::sort(ps.begin(), ps.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const double n = static_cast<double>(ps.size());
    ks = std::max({ks, std::abs((i + 1) / n - ps[i]), std::abs(ps[i] - i / n)});
  }
  EXPECT_LT(ks, 0.25);
}

TEST(InformationCriteria, TableValuesAndIdentity) {
  const auto normal = information_criteria(365.9, 1, 1533);
  EXPECT_NEAR(normal.aic, -729.8, 1e-9);
  EXPECT_NEAR(normal.bic, -724.47, 0.01);
  const auto gumbel = information_criteria(345.4, 1, 1533);
  EXPECT_NEAR(gumbel.aic, -688.8, 1e-9);
  EXPECT_NEAR(gumbel.bic, -683.46, 0.01);
  const auto e = information_criteria(0.0, 1, std::exp(1.0));
  EXPECT_NEAR(e.aic, 2.0, 1e-15);
  EXPECT_NEAR(e.bic, 1.0, 1e-15);
  for (int m : {1, 2, 5}) {
    const auto ic = information_criteria(-12.3, m, 800);
    EXPECT_NEAR(ic.aic - ic.bic, 2 * m - m * std::log(800.0), 1e-12);
  }
}

TEST(KendallTau, KnightMatchesBruteForce) {
  std::mt19937_64 g(12);
  std::uniform_int_distribution<int> small(0, 6);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 50 + 37 * trial;
    std::vector<double> x(n), y(n);
    Eigen::VectorXd ex(n), ey(n);
    for (int i = 0; i < n; ++i) {
      x[i] = ex[i] = trial % 2 ? small(g) : std::generate_canonical<double, 53>(g);
      y[i] = ey[i] = small(g) + (trial % 3 == 0 ? 0.0 : 0.1 * x[i]);
    }
    EXPECT_NEAR(empirical_kendall_tau(ex, ey), oracle::kendall_tau_brute(x, y), 1e-12);
  }
}

TEST(SelectCopula, GumbelDataRanksGumbelFirst) {
  // Galambos, Husler-Reiss and Tawn fit Gumbel data about as well as Gumbel
  // itself at n = 1000, so the ranking is checked against the other shapes
  const std::vector<F> families{F::Gaussian, F::Clayton, F::Gumbel, F::Frank};
  int first = 0;
  const int reps = 50;
  for (int r = 0; r < reps; ++r) {
    const Eigen::MatrixXd x = simulate_returns({F::Gumbel, {1.5}}, 1000, 300 + r);
    SelectionConfig cfg;
    cfg.seed = 400 + r;
    const auto report = select_copula(x, families, cfg);
    if (report.entries[report.rank_cvm.front()].family == F::Gumbel) ++first;
  }
  RecordProperty("gumbel_first", first);
  EXPECT_GE(first, 40) << first << " of " << reps;
}

TEST(SelectCopula, TrueFamilyBeatsNearIndependence) {
  const Eigen::MatrixXd x = simulate_returns({F::Clayton, {1.5}}, 1000, 13);
  const auto report = select_copula(x, {F::Frank, F::Clayton});
  EXPECT_EQ(report.entries[report.rank_aic.front()].family, F::Clayton);
  EXPECT_THROW(select_copula(x, {F::Clayton}), Error);
}

TEST(SelectCopula, ReportStructure) {
  const Eigen::MatrixXd x = simulate_returns({F::Gumbel, {1.344}}, 600, 14);
  SelectionConfig cfg;
  cfg.bootstrap = 99;
  const auto report = select_copula(x, {F::Gaussian, F::Gumbel, F::Clayton}, cfg);
  ASSERT_EQ(report.entries.size(), 3u);
  EXPECT_EQ(report.n, 600u);
  EXPECT_EQ(report.margins.size(), 2u);
  for (const auto& e : report.entries) {
    ASSERT_TRUE(e.copula.has_value());
    ASSERT_TRUE(e.p_value.has_value());
    EXPECT_GT(*e.p_value, 0.0);
    EXPECT_LT(*e.p_value, 1.0);
    const auto ic = information_criteria(e.loglik, 1, 600);
    EXPECT_DOUBLE_EQ(e.aic, ic.aic);
    EXPECT_DOUBLE_EQ(e.bic, ic.bic);
  }
  for (std::size_t i = 1; i < 3; ++i)
    EXPECT_LE(report.entries[report.rank_aic[i - 1]].aic, report.entries[report.rank_aic[i]].aic);
}
