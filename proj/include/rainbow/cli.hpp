// Command-line front end: ingest, fit-margins, calibrate, fit-copula, gof,
// select, price, reproduce-tables, simulate.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rainbow/serialize.hpp"

namespace rainbow::cli {

inline constexpr std::uint64_t kDefaultSeed = 20200630;

/// Fully resolved invocation; echoed into every report.
struct RunConfig {
  std::string command;
  std::vector<std::string> inputs;
  std::vector<std::string> assets;
  std::optional<double> rate;
  std::vector<std::string> families;
  std::string kind;
  std::vector<double> strikes;
  std::vector<double> spots;
  std::size_t n = 0;
  int bootstrap = 0;
  std::uint64_t seed = kDefaultSeed;
  std::string out;
  std::string format = "json";
  std::string params;  // parameter or model JSON
  std::string copula;
  std::vector<double> theta;
  std::string method = "all";
};

void to_json(Json& j, const RunConfig& c);

/// `args` excludes the program name. Reports go to `out` (or --out), a JSON
/// error record {"error": {"module", "message"}} goes to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rainbow::cli
