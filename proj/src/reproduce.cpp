#include "rainbow/reproduce.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "rainbow/numerics.hpp"

namespace rainbow {

namespace {

constexpr const char* kModule = "reproduce";

template <class T>
std::optional<T> optional_at(const Json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<T>();
}

}  // namespace

PaperParams paper_params_from_json(const Json& doc) {
  // Reports of the command-line tool wrap their payload in "result".
  const Json& j = doc.contains("result") && doc["result"].contains("assets") ? doc["result"] : doc;
  PaperParams p;
  try {
    p.raw = j;
    p.rate = j.contains("rate") && j["rate"].is_number() ? j["rate"].get<double>() : NAN;
    p.n_returns = j.value("n_returns", std::size_t{0});
    for (const auto& a : j.at("assets")) {
      ParamAsset asset;
      asset.id = a.at("id").get<std::string>();
      asset.mixture = a.at("mixture").get<GaussianMixture>();
      if (a.contains("mixture_moments")) {
        const auto& m = a["mixture_moments"];
        asset.printed_moments =
            MixtureMoments{m.at("mean").get<double>(), m.at("sd").get<double>(),
                           m.at("skewness").get<double>(), m.at("kurtosis").get<double>()};
      }
      if (a.contains("empirical")) {
        const auto& e = a["empirical"];
        SummaryStats s;
        s.mean = e.at("mean").get<double>();
        s.sd = e.at("sd").get<double>();
        s.skewness = e.at("skewness").get<double>();
        s.kurtosis = e.at("kurtosis").get<double>();
        asset.printed_empirical = s;
      }
      if (a.contains("sdf")) {
        asset.alpha = a["sdf"].at("alpha").get<double>();
        asset.beta = optional_at<double>(a["sdf"], "beta");
      }
      p.assets.push_back(std::move(asset));
    }
    for (const auto& c : j.value("copulas", Json::array())) {
      ParamCopula pc{copula_from_json(c), optional_at<double>(c, "cvm"),
                     optional_at<double>(c, "p_value"), optional_at<double>(c, "loglik"),
                     optional_at<double>(c, "aic"), optional_at<double>(c, "bic")};
      p.copulas.push_back(std::move(pc));
    }
    if (j.contains("price_tables")) {
      for (const auto& t : j["price_tables"]) {
        PriceTableSpec spec;
        spec.table = t.at("table").get<int>();
        spec.kind = parse_option_kind(t.at("kind").get<std::string>());
        spec.spots = t.at("spots").get<std::vector<double>>();
        for (const auto& r : t.at("rows")) {
          PriceRow row;
          row.label = r.at("label").get<std::string>();
          row.strikes = r.at("strikes").get<std::vector<double>>();
          if (r.contains("printed"))
            for (const auto& [k, v] : r["printed"].items())
              row.printed[std::string(family_name(parse_family(k)))] = v.get<double>();
          spec.rows.push_back(std::move(row));
        }
        p.tables.push_back(std::move(spec));
      }
    }
  } catch (const Json::exception& e) {
    throw Error(kModule, std::string("malformed parameter file: ") + e.what());
  }
  if (p.assets.empty() || p.assets.size() > 2)
    throw Error(kModule, "parameter file must list one or two assets");
  return p;
}

PaperParams load_paper_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(kModule, "cannot open parameter file '" + path.string() + "'");
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw Error(kModule, "cannot parse '" + path.string() + "': " + e.what());
  }
  return paper_params_from_json(j);
}

MarketModel build_market(const PaperParams& p, const std::vector<double>& spots,
                         const CopulaModel& copula) {
  if (spots.size() != p.assets.size())
    throw Error(kModule, "one spot per asset is required");
  if (!std::isfinite(p.rate)) throw Error(kModule, "no interest rate given");
  MarketModel m;
  m.rate = p.rate;
  m.copula = copula;
  for (std::size_t i = 0; i < spots.size(); ++i) {
    const auto& a = p.assets[i];
    const double alpha = a.alpha ? *a.alpha : calibrate_sdf(a.mixture, p.rate).alpha;
    m.assets.push_back({a.id, spots[i], risk_neutralize(a.mixture, alpha, p.rate)});
  }
  return m;
}

double CellResult::z_score() const {
  if (mc.std_error == 0.0) return mc.price == reference.price ? 0.0 : INFINITY;
  return (mc.price - reference.price) / mc.std_error;
}

std::optional<double> CellResult::relative_deviation() const {
  if (!printed || *printed == 0.0) return std::nullopt;
  return (mc.price - *printed) / *printed;
}

ReproductionReport reproduce_tables(const PaperParams& p, std::size_t n, std::uint64_t seed) {
  ReproductionReport report;
  report.n = n;
  report.seed = seed;
  if (!std::isfinite(p.rate)) throw Error(kModule, "no interest rate given");
  for (const auto& a : p.assets) {
    const SdfParams solved = calibrate_sdf(a.mixture, p.rate);
    report.calibration.push_back(
        {a.id, solved, a.alpha, a.beta, sdf_residuals(a.mixture, solved)});
  }

  for (const auto& spec : p.tables) {
    TableResult t;
    t.table = spec.table;
    t.kind = spec.kind;
    t.spots = spec.spots;
    for (const auto& pc : p.copulas) t.families.push_back(pc.copula.name());
    std::vector<std::vector<CellResult>> by_family(p.copulas.size());
    parallel_for(p.copulas.size(), [&](std::size_t f) {
      const MarketModel market = build_market(p, spec.spots, p.copulas[f].copula);
      const Eigen::MatrixXd terminal = simulate_terminal(market, n, seed);
      for (const auto& row : spec.rows) {
        const OptionSpec option{spec.kind, row.strikes};
        CellResult cell;
        cell.row = row.label;
        cell.strikes = row.strikes;
        cell.family = market.copula.name();
        cell.mc = price_paths(market, option, terminal, seed);
        cell.reference = price_reference(market, option);
        if (auto it = row.printed.find(cell.family); it != row.printed.end())
          cell.printed = it->second;
        by_family[f].push_back(std::move(cell));
      }
    });
    for (std::size_t r = 0; r < spec.rows.size(); ++r)
      for (std::size_t f = 0; f < by_family.size(); ++f) t.cells.push_back(by_family[f][r]);
    report.tables.push_back(std::move(t));
  }
  return report;
}

std::string table_csv(const TableResult& t, const std::vector<std::string>& header) {
  std::ostringstream os;
  for (const auto& h : header) os << "# " << h << '\n';
  os << "row,strikes";
  for (const auto& f : t.families) os << ',' << f;
  os << '\n';
  const std::size_t cols = t.families.size();
  for (std::size_t r = 0; cols && r * cols < t.cells.size(); ++r) {
    const auto& first = t.cells[r * cols];
    os << first.row << ',';
    for (std::size_t k = 0; k < first.strikes.size(); ++k)
      os << (k ? ";" : "") << format_sig6(first.strikes[k]);
    for (std::size_t c = 0; c < cols; ++c) os << ',' << format_sig6(t.cells[r * cols + c].mc.price);
    os << '\n';
  }
  return os.str();
}

void to_json(Json& j, const CellResult& c) {
  j = {{"row", c.row},
       {"strikes", c.strikes},
       {"family", c.family},
       {"mc", c.mc},
       {"reference", c.reference},
       {"z_score", c.z_score()}};
  j["printed"] = c.printed ? Json(*c.printed) : Json(nullptr);
  const auto dev = c.relative_deviation();
  j["relative_deviation"] = dev ? Json(*dev) : Json(nullptr);
}

void to_json(Json& j, const TableResult& t) {
  j = {{"table", t.table},
       {"kind", std::string(option_kind_name(t.kind))},
       {"spots", t.spots},
       {"families", t.families},
       {"cells", t.cells}};
}

void to_json(Json& j, const ReproductionReport& r) {
  Json cal = Json::array();
  for (const auto& c : r.calibration)
    cal.push_back({{"asset", c.id},
                   {"solved", c.solved},
                   {"printed",
                    {{"alpha", c.printed_alpha ? Json(*c.printed_alpha) : Json(nullptr)},
                     {"beta", c.printed_beta ? Json(*c.printed_beta) : Json(nullptr)}}},
                   {"residuals",
                    {{"bond", c.residuals.bond},
                     {"underlying", c.residuals.underlying},
                     {"martingale", c.residuals.martingale}}}});
  j = {{"n", r.n}, {"seed", r.seed}, {"calibration", std::move(cal)}, {"tables", r.tables}};
}

}  // namespace rainbow
