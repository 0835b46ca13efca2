// Reproduction of the rainbow price tables from a bundled parameter file:
// mixture margins, given SDF tilts, fitted copula parameters and the
// moneyness x copula layouts.
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rainbow/pricing.hpp"
#include "rainbow/serialize.hpp"

namespace rainbow {

struct ParamAsset {
  std::string id;
  GaussianMixture mixture;
  std::optional<MixtureMoments> printed_moments;
  std::optional<SummaryStats> printed_empirical;
  std::optional<double> alpha;  // tilt taken as given; solved when absent
  std::optional<double> beta;
};

struct ParamCopula {
  CopulaModel copula;
  std::optional<double> cvm, p_value, loglik, aic, bic;
};

struct PriceRow {
  std::string label;  // OTM / ATM / ITM
  std::vector<double> strikes;
  std::map<std::string, double> printed;  // family name -> printed price
};

struct PriceTableSpec {
  int table = 0;
  OptionKind kind = OptionKind::CallMax;
  std::vector<double> spots;
  std::vector<PriceRow> rows;
};

struct PaperParams {
  double rate = 0.0;
  std::size_t n_returns = 0;
  std::vector<ParamAsset> assets;
  std::vector<ParamCopula> copulas;
  std::vector<PriceTableSpec> tables;
  Json raw;  // file content, echoed into reports
};

PaperParams load_paper_params(const std::filesystem::path& path);
PaperParams paper_params_from_json(const Json& j);

/// Market model with the given spots, each asset tilted by its listed alpha
/// (or the calibrated one when the file carries none).
MarketModel build_market(const PaperParams& p, const std::vector<double>& spots,
                         const CopulaModel& copula);

struct CellResult {
  std::string row;
  std::vector<double> strikes;
  std::string family;
  PricingResult mc;
  PricingResult reference;  // quadrature or closed form
  std::optional<double> printed;

  double z_score() const;  // (mc - reference) / se
  std::optional<double> relative_deviation() const;  // (mc - printed) / printed
};

struct TableResult {
  int table = 0;
  OptionKind kind = OptionKind::CallMax;
  std::vector<double> spots;
  std::vector<std::string> families;  // column order
  std::vector<CellResult> cells;      // row-major
};

struct CalibrationComparison {
  std::string id;
  SdfParams solved;
  std::optional<double> printed_alpha;
  std::optional<double> printed_beta;
  SdfResiduals residuals;
};

struct ReproductionReport {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::vector<CalibrationComparison> calibration;
  std::vector<TableResult> tables;
};

ReproductionReport reproduce_tables(const PaperParams& p, std::size_t n, std::uint64_t seed);

/// Moneyness rows x copula columns with 6 significant digits. `header` lines
/// are written first as `# ...` comments.
std::string table_csv(const TableResult& t, const std::vector<std::string>& header);

void to_json(Json& j, const CellResult& c);
void to_json(Json& j, const TableResult& t);
void to_json(Json& j, const ReproductionReport& r);

}  // namespace rainbow
