#include "rainbow/market_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "rainbow/numerics.hpp"

namespace rainbow {

namespace {

constexpr const char* kModule = "market_data";

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail_line(const std::filesystem::path& path, std::size_t line,
                            const std::string& why) {
  std::ostringstream os;
  os << path.string() << ":" << line << ": " << why;
  throw Error(kModule, os.str());
}

}  // namespace

Date parse_iso_date(const std::string& text) {
  int y = 0;
  unsigned m = 0, d = 0;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-')
    throw Error(kModule, "invalid ISO-8601 date '" + text + "'");
  auto parse = [&text](std::size_t pos, std::size_t len, auto& out) {
    const char* first = text.data() + pos;
    auto [ptr, ec] = std::from_chars(first, first + len, out);
    return ec == std::errc() && ptr == first + len;
  };
  if (!parse(0, 4, y) || !parse(5, 2, m) || !parse(8, 2, d))
    throw Error(kModule, "invalid ISO-8601 date '" + text + "'");
  const Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!date.ok()) throw Error(kModule, "invalid calendar date '" + text + "'");
  return date;
}

std::string format_iso_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

PriceSeries load_price_csv(const std::filesystem::path& path, const std::string& asset_id) {
  std::ifstream in(path);
  if (!in) throw Error(kModule, "cannot open price file '" + path.string() + "'");

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) fail_line(path, 1, "empty file, expected header 'date,close'");
  ++line_no;
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  {
    std::string header = trim(line);
    header.erase(std::remove(header.begin(), header.end(), ' '), header.end());
    if (header != "date,close") fail_line(path, line_no, "expected header 'date,close'");
  }

  struct Row {
    Date date;
    double close;
    std::size_t line;
  };
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto comma = t.find(',');
    if (comma == std::string::npos || t.find(',', comma + 1) != std::string::npos)
      fail_line(path, line_no, "malformed row, expected 'date,close'");
    Date date;
    try {
      date = parse_iso_date(trim(t.substr(0, comma)));
    } catch (const Error& e) {
      fail_line(path, line_no, e.what());
    }
    const std::string num = trim(t.substr(comma + 1));
    double close = 0.0;
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), close);
    if (ec != std::errc() || ptr != num.data() + num.size() || !std::isfinite(close))
      fail_line(path, line_no, "malformed close '" + num + "'");
    if (close <= 0.0) fail_line(path, line_no, "non-positive close " + num);
    rows.push_back({date, close, line_no});
  }

  std::stable_sort(rows.begin(), rows.end(),
                   [](const Row& a, const Row& b) { return a.date < b.date; });
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].date == rows[i - 1].date)
      fail_line(path, rows[i].line, "duplicate date " + format_iso_date(rows[i].date));

  PriceSeries out;
  out.asset_id = asset_id;
  out.dates.reserve(rows.size());
  out.closes.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.dates.push_back(rows[i].date);
    out.closes[static_cast<Eigen::Index>(i)] = rows[i].close;
  }
  return out;
}

ReturnSeries log_returns(const PriceSeries& prices) {
  const Eigen::Index n = prices.closes.size();
  if (n < 2) throw Error(kModule, "log_returns: series '" + prices.asset_id + "' too short");
  ReturnSeries r{prices.asset_id, Eigen::VectorXd(n - 1)};
  for (Eigen::Index i = 0; i + 1 < n; ++i)
    r.values[i] = std::log(prices.closes[i + 1] / prices.closes[i]);
  return r;
}

SummaryStats summary_stats(const Eigen::Ref<const Eigen::VectorXd>& values) {
  const auto n = static_cast<std::size_t>(values.size());
  if (n < 4) throw Error(kModule, "summary_stats: need at least 4 observations");
  SummaryStats s;
  s.n = n;
  s.mean = values.mean();
  const Eigen::ArrayXd c = values.array() - s.mean;
  const double m2 = c.square().mean();
  const double m3 = c.cube().mean();
  const double m4 = c.square().square().mean();
  s.sd = std::sqrt(c.square().sum() / static_cast<double>(n - 1));
  if (m2 <= 0.0) {
    s.degenerate = true;
    s.skewness = std::numeric_limits<double>::quiet_NaN();
    s.kurtosis = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  s.skewness = m3 / std::pow(m2, 1.5);
  s.kurtosis = m4 / (m2 * m2);
  return s;
}

AlignedPair align_on_dates(const PriceSeries& a, const PriceSeries& b) {
  AlignedPair out;
  out.first.asset_id = a.asset_id;
  out.second.asset_id = b.asset_id;
  std::vector<double> ca, cb;
  std::size_t i = 0, j = 0;
  while (i < a.dates.size() && j < b.dates.size()) {
    if (a.dates[i] < b.dates[j]) {
      ++out.dropped_first;
      ++i;
    } else if (b.dates[j] < a.dates[i]) {
      ++out.dropped_second;
      ++j;
    } else {
      out.first.dates.push_back(a.dates[i]);
      out.second.dates.push_back(b.dates[j]);
      ca.push_back(a.closes[static_cast<Eigen::Index>(i)]);
      cb.push_back(b.closes[static_cast<Eigen::Index>(j)]);
      ++i;
      ++j;
    }
  }
  out.dropped_first += a.dates.size() - i;
  out.dropped_second += b.dates.size() - j;
  out.first.closes = Eigen::Map<Eigen::VectorXd>(ca.data(), static_cast<Eigen::Index>(ca.size()));
  out.second.closes = Eigen::Map<Eigen::VectorXd>(cb.data(), static_cast<Eigen::Index>(cb.size()));
  if (out.dropped_first + out.dropped_second > 0)
    std::clog << "[market_data] inner join dropped " << out.dropped_first << " dates of '"
              << a.asset_id << "' and " << out.dropped_second << " dates of '" << b.asset_id
              << "'\n";
  return out;
}

Eigen::MatrixXd paired_returns(const AlignedPair& pair) {
  const auto r1 = log_returns(pair.first);
  const auto r2 = log_returns(pair.second);
  Eigen::MatrixXd x(r1.values.size(), 2);
  x.col(0) = r1.values;
  x.col(1) = r2.values;
  return x;
}

}  // namespace rainbow
