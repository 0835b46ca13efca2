// Closing-price ingestion, log-returns and sample summary statistics.
#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace rainbow {

using Date = std::chrono::year_month_day;

struct PriceSeries {
  std::string asset_id;
  std::vector<Date> dates;  // strictly increasing
  Eigen::VectorXd closes;   // > 0, same length as dates
};

struct ReturnSeries {
  std::string asset_id;
  Eigen::VectorXd values;
};

struct SummaryStats {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;        // sample standard deviation (n - 1 denominator)
  double skewness = 0.0;  // m3 / m2^{3/2}
  double kurtosis = 0.0;  // m4 / m2^2, raw (normal = 3)
  bool degenerate = false;  // zero spread: skewness/kurtosis are NaN
};

/// Parses a `date,close` CSV with ISO-8601 dates. Rows are sorted by date;
/// duplicate dates, non-positive closes and malformed rows are rejected with
/// the offending line number.
PriceSeries load_price_csv(const std::filesystem::path& path, const std::string& asset_id);

Date parse_iso_date(const std::string& text);
std::string format_iso_date(const Date& d);

ReturnSeries log_returns(const PriceSeries& prices);

SummaryStats summary_stats(const Eigen::Ref<const Eigen::VectorXd>& values);
inline SummaryStats summary_stats(const ReturnSeries& r) { return summary_stats(r.values); }

struct AlignedPair {
  PriceSeries first;
  PriceSeries second;
  std::size_t dropped_first = 0;   // dates of `first` missing from `second`
  std::size_t dropped_second = 0;  // dates of `second` missing from `first`
};

/// Inner join of two price series on date.
AlignedPair align_on_dates(const PriceSeries& a, const PriceSeries& b);

/// n x 2 matrix of log-returns of an aligned pair.
Eigen::MatrixXd paired_returns(const AlignedPair& pair);

}  // namespace rainbow
