#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "rainbow/market_data.hpp"
#include "rainbow/numerics.hpp"

using namespace rainbow;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& text) {
  const fs::path dir = fs::temp_directory_path() / "rainbow_market_data_test";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

PriceSeries series(std::vector<double> closes) {
  PriceSeries p;
  p.asset_id = "x";
  p.closes = Eigen::Map<Eigen::VectorXd>(closes.data(), static_cast<Eigen::Index>(closes.size()));
  std::chrono::sys_days d{std::chrono::year{2020} / 1 / 1};
  for (std::size_t i = 0; i < closes.size(); ++i) p.dates.emplace_back(d + std::chrono::days{i});
  return p;
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(LoadPriceCsv, ThreeValidRows) {
  const auto p = write_temp("three.csv", "date,close\n2020-01-02,10\n2020-01-03,11.5\n2020-01-06,12\n");
  const auto s = load_price_csv(p, "abc");
  EXPECT_EQ(s.asset_id, "abc");
  ASSERT_EQ(s.dates.size(), 3u);
  ASSERT_EQ(s.closes.size(), 3);
  EXPECT_DOUBLE_EQ(s.closes[1], 11.5);
  EXPECT_EQ(format_iso_date(s.dates[2]), "2020-01-06");
}

TEST(LoadPriceCsv, ZeroCloseNamesLine) {
  const auto p = write_temp("zero.csv", "date,close\n2020-01-02,10\n2020-01-03,0\n");
  const std::string msg = error_of([&] { load_price_csv(p, "a"); });
  EXPECT_NE(msg.find(":3"), std::string::npos) << msg;
}

TEST(LoadPriceCsv, RejectsMalformedInput) {
  EXPECT_THROW(load_price_csv(write_temp("hdr.csv", "day,price\n2020-01-02,1\n"), "a"), Error);
  EXPECT_THROW(load_price_csv(write_temp("neg.csv", "date,close\n2020-01-02,-1\n"), "a"), Error);
  EXPECT_THROW(load_price_csv(write_temp("bad.csv", "date,close\n2020-13-02,1\n"), "a"), Error);
  EXPECT_THROW(load_price_csv(write_temp("txt.csv", "date,close\n2020-01-02,abc\n"), "a"), Error);
  EXPECT_THROW(load_price_csv("/nonexistent/file.csv", "a"), Error);
  const auto dup = write_temp("dup.csv", "date,close\n2020-01-02,1\n2020-01-03,2\n2020-01-02,3\n");
  EXPECT_NE(error_of([&] { load_price_csv(dup, "a"); }).find("duplicate"), std::string::npos);
}

TEST(LoadPriceCsv, SortsAndAcceptsBom) {
  const auto p = write_temp("bom.csv", "\xEF\xBB\xBF" "date,close\r\n2020-01-03,2\r\n2020-01-02,1\r\n");
  const auto s = load_price_csv(p, "a");
  EXPECT_EQ(format_iso_date(s.dates[0]), "2020-01-02");
  EXPECT_DOUBLE_EQ(s.closes[0], 1.0);
  EXPECT_DOUBLE_EQ(s.closes[1], 2.0);
}

TEST(LoadPriceCsv, FullSampleLength) {
  std::string text = "date,close\n";
  std::chrono::sys_days d{std::chrono::year{2014} / 7 / 1};
  for (int i = 0; i < 1534; ++i)
    text += format_iso_date(std::chrono::year_month_day{d + std::chrono::days{i}}) + "," +
            std::to_string(100.0 + i * 0.01) + "\n";
  const auto s = load_price_csv(write_temp("long.csv", text), "a");
  EXPECT_EQ(s.closes.size(), 1534);
  EXPECT_EQ(log_returns(s).values.size(), 1533);
}

TEST(LogReturns, ConstantAndDoubling) {
  const auto flat = log_returns(series({100, 100, 100}));
  ASSERT_EQ(flat.values.size(), 2);
  EXPECT_EQ(flat.values[0], 0.0);
  EXPECT_EQ(flat.values[1], 0.0);
  EXPECT_NEAR(log_returns(series({100, 200})).values[0], 0.693147180559945, 1e-15);
  EXPECT_THROW(log_returns(series({100})), Error);
}

TEST(LogReturns, ScaleInvariant) {
  const auto a = log_returns(series({100, 101.5, 99.2, 120.7, 118.0}));
  const auto b = log_returns(series({250, 253.75, 248, 301.75, 295}));
  for (Eigen::Index i = 0; i < a.values.size(); ++i) EXPECT_NEAR(a.values[i], b.values[i], 1e-15);
}

TEST(SummaryStats, SymmetricSample) {
  Eigen::VectorXd x(7);
  x << -1, 0, 1, -1, -1, 1, 1;
  const auto s = summary_stats(x);
  EXPECT_EQ(s.n, 7u);
  EXPECT_NEAR(s.skewness, 0.0, 1e-15);
  EXPECT_NEAR(s.mean, 0.0, 1e-15);
}

TEST(SummaryStats, MatchesDirectFormulas) {
  Eigen::VectorXd x(6);
  x << 0.3, -1.2, 2.5, 0.1, 0.7, -0.4;
  const double n = 6, mean = x.mean();
  double m2 = 0, m3 = 0, m4 = 0;
  for (double v : x) {
    m2 += std::pow(v - mean, 2) / n;
    m3 += std::pow(v - mean, 3) / n;
    m4 += std::pow(v - mean, 4) / n;
  }
  const auto s = summary_stats(x);
  EXPECT_NEAR(s.sd, std::sqrt(m2 * n / (n - 1)), 1e-15);
  EXPECT_NEAR(s.skewness, m3 / std::pow(m2, 1.5), 1e-14);
  EXPECT_NEAR(s.kurtosis, m4 / (m2 * m2), 1e-14);
}

TEST(SummaryStats, DegenerateAndShort) {
  const auto s = summary_stats(Eigen::VectorXd::Constant(5, 0.01));
  EXPECT_TRUE(s.degenerate);
  EXPECT_EQ(s.sd, 0.0);
  EXPECT_TRUE(std::isnan(s.skewness));
  EXPECT_TRUE(std::isnan(s.kurtosis));
  EXPECT_THROW(summary_stats(Eigen::VectorXd::Zero(3)), Error);
}

TEST(SummaryStats, NormalKurtosis) {
  std::mt19937_64 g(7);
  std::normal_distribution<double> z;
  Eigen::VectorXd x(1000000);
  for (auto& v : x) v = z(g);
  EXPECT_NEAR(summary_stats(x).kurtosis, 3.0, 0.05);
}

TEST(SummaryStats, NegationAndAffineProperties) {
  std::mt19937_64 g(11);
  std::gamma_distribution<double> gam(2.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd x(50);
    for (auto& v : x) v = gam(g);
    const auto s = summary_stats(x);
    const auto neg = summary_stats(Eigen::VectorXd(-x));
    EXPECT_NEAR(neg.skewness, -s.skewness, 1e-12);
    const double a = trial % 2 ? -3.7 : 0.25, b = 11.0 * trial;
    const Eigen::VectorXd y = (a * x.array() + b).matrix();
    EXPECT_NEAR(summary_stats(y).kurtosis, s.kurtosis, 1e-9);
  }
}

TEST(AlignOnDates, InnerJoin) {
  auto a = series({1, 2, 3, 4, 5});
  auto b = series({10, 20, 30});
  b.dates = {a.dates[0], a.dates[2], a.dates[4]};
  const auto pair = align_on_dates(a, b);
  EXPECT_EQ(pair.first.dates.size(), 3u);
  EXPECT_EQ(pair.dropped_first, 2u);
  EXPECT_EQ(pair.dropped_second, 0u);
  EXPECT_DOUBLE_EQ(pair.first.closes[1], 3.0);
  EXPECT_DOUBLE_EQ(pair.second.closes[1], 20.0);
  const Eigen::MatrixXd x = paired_returns(pair);
  ASSERT_EQ(x.rows(), 2);
  EXPECT_NEAR(x(0, 0), std::log(3.0), 1e-15);
  EXPECT_NEAR(x(1, 1), std::log(1.5), 1e-15);
}

TEST(IsoDate, RoundTrip) {
  EXPECT_EQ(format_iso_date(parse_iso_date("2020-02-29")), "2020-02-29");
  EXPECT_THROW(parse_iso_date("2019-02-29"), Error);
  EXPECT_THROW(parse_iso_date("2019/02/01"), Error);
}
