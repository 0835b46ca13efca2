#include "rainbow/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "rainbow/fitgof.hpp"
#include "rainbow/market_data.hpp"
#include "rainbow/numerics.hpp"
#include "rainbow/pricing.hpp"
#include "rainbow/reproduce.hpp"

namespace rainbow::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kModule = "cli";
constexpr std::size_t kDefaultPricingPaths = 100000;
constexpr std::size_t kDefaultSimulatedReturns = 1533;
constexpr int kDefaultGofBootstrap = 200;

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(kModule, message);
}

Json envelope(const RunConfig& cfg, Json result) {
  return {{"config", cfg}, {"result", std::move(result)}};
}

std::string csv_with_config(const RunConfig& cfg, const std::string& body) {
  return "# config " + Json(cfg).dump() + "\n" + body;
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(kModule, "cannot write '" + path.string() + "'");
  f << text;
  if (!f) throw Error(kModule, "write to '" + path.string() + "' failed");
}

void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.out.empty())
    out << text;
  else
    write_file(cfg.out, text);
}

void emit_report(const RunConfig& cfg, const Json& result, const std::string& csv_body,
                 std::ostream& out) {
  if (cfg.format == "csv")
    emit(cfg, csv_with_config(cfg, csv_body), out);
  else
    emit(cfg, envelope(cfg, result).dump(2) + "\n", out);
}

std::string asset_id_for(const RunConfig& cfg, std::size_t i) {
  if (i < cfg.assets.size()) return cfg.assets[i];
  return fs::path(cfg.inputs[i]).stem().string();
}

std::vector<PriceSeries> load_inputs(const RunConfig& cfg, std::size_t min_count,
                                     std::size_t max_count) {
  require(!cfg.inputs.empty(), cfg.command + " needs --input");
  require(cfg.inputs.size() >= min_count && cfg.inputs.size() <= max_count,
          cfg.command + " takes " +
              (min_count == max_count ? std::to_string(min_count)
                                      : std::to_string(min_count) + " or " +
                                            std::to_string(max_count)) +
              " input file(s)");
  require(cfg.assets.empty() || cfg.assets.size() == cfg.inputs.size(),
          "--assets must name one id per input file");
  std::vector<PriceSeries> series;
  for (std::size_t i = 0; i < cfg.inputs.size(); ++i)
    series.push_back(load_price_csv(cfg.inputs[i], asset_id_for(cfg, i)));
  return series;
}

Eigen::MatrixXd load_pair(const RunConfig& cfg, std::vector<std::string>* ids = nullptr) {
  const auto series = load_inputs(cfg, 2, 2);
  const AlignedPair pair = align_on_dates(series[0], series[1]);
  if (ids) *ids = {series[0].asset_id, series[1].asset_id};
  return paired_returns(pair);
}

std::vector<CopulaFamily> parse_families(const RunConfig& cfg) {
  require(!cfg.families.empty(), cfg.command + " needs --families");
  std::vector<CopulaFamily> out;
  for (const auto& f : cfg.families) out.push_back(parse_family(f));
  return out;
}

EmConfig em_config(const RunConfig& cfg) {
  EmConfig em;
  em.seed = cfg.seed;
  return em;
}

std::string join_sig6(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ";" : "") + format_sig6(xs[i]);
  return s;
}

/// Parameter or model file, reordered by --assets, rate overridden by --rate.
PaperParams load_model(const RunConfig& cfg) {
  require(!cfg.params.empty(), cfg.command + " needs --params");
  PaperParams p = load_paper_params(cfg.params);
  if (cfg.rate) p.rate = *cfg.rate;
  if (!cfg.assets.empty()) {
    std::vector<ParamAsset> ordered;
    for (const auto& id : cfg.assets) {
      auto it = std::find_if(p.assets.begin(), p.assets.end(),
                             [&](const ParamAsset& a) { return a.id == id; });
      require(it != p.assets.end(), "asset '" + id + "' not found in '" + cfg.params + "'");
      ordered.push_back(*it);
    }
    p.assets = std::move(ordered);
  }
  require(std::isfinite(p.rate), cfg.command + " needs --rate (none in '" + cfg.params + "')");
  return p;
}

CopulaModel resolve_copula(const RunConfig& cfg, const PaperParams& p) {
  const int dim = static_cast<int>(p.assets.size());
  if (cfg.copula.empty()) {
    require(cfg.theta.empty(), "--theta given without --copula");
    return CopulaModel::independence(dim);
  }
  const CopulaFamily family = parse_family(cfg.copula);
  if (!cfg.theta.empty() || parameter_count(family) == 0)
    return CopulaModel(family, cfg.theta, dim);
  for (const auto& pc : p.copulas)
    if (pc.copula.family() == family) return pc.copula;
  throw Error(kModule, "copula '" + cfg.copula + "' needs --theta (no entry in '" + cfg.params + "')");
}

// ---------------------------------------------------------------------------

void cmd_ingest(const RunConfig& cfg, std::ostream& out) {
  const auto series = load_inputs(cfg, 1, 2);
  Json assets = Json::array();
  for (const auto& s : series) {
    assets.push_back({{"id", s.asset_id},
                      {"n_prices", s.dates.size()},
                      {"first_date", s.dates.empty() ? "" : format_iso_date(s.dates.front())},
                      {"last_date", s.dates.empty() ? "" : format_iso_date(s.dates.back())},
                      {"returns", summary_stats(log_returns(s))}});
  }
  Json result = {{"assets", assets}};

  std::ostringstream csv;
  csv.precision(17);
  if (series.size() == 1) {
    const auto r = log_returns(series[0]);
    csv << "date," << series[0].asset_id << '\n';
    for (Eigen::Index i = 0; i < r.values.size(); ++i)
      csv << format_iso_date(series[0].dates[static_cast<std::size_t>(i) + 1]) << ','
          << r.values[i] << '\n';
  } else {
    const AlignedPair pair = align_on_dates(series[0], series[1]);
    const Eigen::MatrixXd x = paired_returns(pair);
    result["aligned"] = {{"n_dates", pair.first.dates.size()},
                         {"n_returns", x.rows()},
                         {"dropped", {pair.dropped_first, pair.dropped_second}}};
    csv << "date," << series[0].asset_id << ',' << series[1].asset_id << '\n';
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      csv << format_iso_date(pair.first.dates[static_cast<std::size_t>(i) + 1]) << ','
          << x(i, 0) << ',' << x(i, 1) << '\n';
  }
  emit_report(cfg, result, csv.str(), out);
}

void cmd_fit_margins(const RunConfig& cfg, std::ostream& out) {
  const auto series = load_inputs(cfg, 1, 2);
  Json assets = Json::array();
  std::ostringstream csv;
  csv << "asset,component,p,mu,sigma\n";
  for (const auto& s : series) {
    const ReturnSeries r = log_returns(s);
    const EmFit fit = fit_em(r, em_config(cfg));
    Json a = fit;
    a["id"] = s.asset_id;
    a["empirical"] = summary_stats(r);
    assets.push_back(std::move(a));
    for (std::size_t k = 0; k < fit.mixture.size(); ++k)
      csv << s.asset_id << ',' << k + 1 << ',' << format_sig6(fit.mixture[k].weight) << ','
          << format_sig6(fit.mixture[k].mean) << ',' << format_sig6(fit.mixture[k].sd) << '\n';
  }
  Json result = {{"assets", std::move(assets)}};
  result["rate"] = cfg.rate ? Json(*cfg.rate) : Json(nullptr);
  emit_report(cfg, result, csv.str(), out);
}

void cmd_calibrate(const RunConfig& cfg, std::ostream& out) {
  std::vector<std::pair<std::string, GaussianMixture>> margins;
  double rate = NAN;
  if (!cfg.params.empty()) {
    const PaperParams p = load_model(cfg);
    rate = p.rate;
    for (const auto& a : p.assets) margins.emplace_back(a.id, a.mixture);
  } else {
    require(cfg.rate.has_value(), "calibrate needs --rate");
    rate = *cfg.rate;
    for (const auto& s : load_inputs(cfg, 1, 2))
      margins.emplace_back(s.asset_id, fit_em(log_returns(s), em_config(cfg)).mixture);
  }
  Json assets = Json::array();
  std::ostringstream csv;
  csv << "asset,alpha,beta,rate,bond_residual,underlying_residual,martingale_residual\n";
  for (const auto& [id, m] : margins) {
    const SdfParams sdf = calibrate_sdf(m, rate);
    const SdfResiduals res = sdf_residuals(m, sdf);
    assets.push_back({{"id", id},
                      {"mixture", m},
                      {"sdf", sdf},
                      {"residuals",
                       {{"bond", res.bond}, {"underlying", res.underlying}, {"martingale", res.martingale}}},
                      {"risk_neutral", risk_neutralize(m, sdf.alpha, rate)}});
    csv << id << ',' << format_sig6(sdf.alpha) << ',' << format_sig6(sdf.beta) << ','
        << format_sig6(rate) << ',' << format_sig6(res.bond) << ',' << format_sig6(res.underlying)
        << ',' << format_sig6(res.martingale) << '\n';
  }
  emit_report(cfg, {{"rate", rate}, {"assets", std::move(assets)}}, csv.str(), out);
}

void cmd_fit_copula(const RunConfig& cfg, std::ostream& out) {
  std::vector<std::string> ids;
  const Eigen::MatrixXd x = load_pair(cfg, &ids);
  const auto families = parse_families(cfg);
  std::vector<EmFit> margins;
  for (Eigen::Index j = 0; j < 2; ++j) margins.push_back(fit_em(x.col(j), em_config(cfg)));

  Json fits = Json::array();
  std::ostringstream csv;
  csv << "family,params,loglik,aic,bic,kendall_tau,boundary\n";
  for (const auto family : families) {
    const IfmResult r = fit_ifm(x, family, margins);
    const int m = parameter_count(family);
    const auto ic = information_criteria(r.loglik, m, static_cast<double>(x.rows()));
    const double tau = kendall_tau(r.copula);
    fits.push_back({{"copula", r.copula},
                    {"loglik", r.loglik},
                    {"aic", ic.aic},
                    {"bic", ic.bic},
                    {"kendall_tau", tau},
                    {"boundary", r.boundary}});
    csv << r.copula.name() << ',' << (m ? join_sig6(r.copula.params()) : "-") << ','
        << format_sig6(r.loglik) << ',' << format_sig6(ic.aic) << ',' << format_sig6(ic.bic) << ','
        << format_sig6(tau) << ',' << (r.boundary ? "true" : "false") << '\n';
  }
  Json margin_json = Json::array();
  for (std::size_t j = 0; j < 2; ++j) {
    Json a = margins[j];
    a["id"] = ids[j];
    margin_json.push_back(std::move(a));
  }
  emit_report(cfg,
              {{"n", x.rows()},
               {"assets", std::move(margin_json)},
               {"copulas", std::move(fits)},
               {"empirical_kendall_tau", empirical_kendall_tau(x.col(0), x.col(1))}},
              csv.str(), out);
}

void cmd_gof(const RunConfig& cfg, std::ostream& out) {
  const Eigen::MatrixXd x = load_pair(cfg);
  const auto families = parse_families(cfg);
  const PseudoObservations pobs = pseudo_observations(x);
  Json reports = Json::array();
  std::ostringstream csv;
  csv << "family,statistic,p_value,bootstrap_reps,failed_reps,seed\n";
  for (const auto family : families) {
    const GofReport g = bootstrap_pvalue(pobs, family, cfg.bootstrap, cfg.seed);
    Json r = g;
    r["family"] = std::string(family_name(family));
    reports.push_back(std::move(r));
    csv << family_name(family) << ',' << format_sig6(g.statistic) << ','
        << format_sig6(g.p_value) << ',' << g.bootstrap_reps << ',' << g.failed_reps << ','
        << g.seed << '\n';
  }
  emit_report(cfg, {{"n", pobs.n()}, {"tests", std::move(reports)}}, csv.str(), out);
}

void cmd_select(const RunConfig& cfg, std::ostream& out) {
  const Eigen::MatrixXd x = load_pair(cfg);
  SelectionConfig sc;
  sc.em = em_config(cfg);
  sc.bootstrap = cfg.bootstrap;
  sc.seed = cfg.seed;
  const SelectionReport report = select_copula(x, parse_families(cfg), sc);
  emit_report(cfg, report, selection_csv(report), out);
}

void cmd_price(const RunConfig& cfg, std::ostream& out) {
  const PaperParams p = load_model(cfg);
  require(!cfg.kind.empty(), "price needs --kind");
  require(!cfg.strikes.empty(), "price needs --strike");
  require(cfg.spots.size() == p.assets.size(),
          "price needs one --spots value per asset (" + std::to_string(p.assets.size()) + ")");
  const OptionSpec option{parse_option_kind(cfg.kind), cfg.strikes};
  require(!(option.kind == OptionKind::Spread && cfg.assets.empty()),
          "spread pays S2 - S1 - K; give the asset order explicitly with --assets");
  const MarketModel market = build_market(p, cfg.spots, resolve_copula(cfg, p));
  option.validate(market.dim());

  const bool want_mc = cfg.method == "all" || cfg.method == "mc";
  const bool want_ref = cfg.method != "mc";
  require(cfg.method == "all" || cfg.method == "mc" || cfg.method == "quadrature" ||
              cfg.method == "closed_form" || cfg.method == "reference",
          "unknown --method '" + cfg.method + "'");

  Json model = {{"rate", market.rate}, {"tau", market.tau}, {"copula", market.copula}};
  Json assets = Json::array();
  for (const auto& a : market.assets)
    assets.push_back({{"id", a.id}, {"spot", a.spot}, {"risk_neutral", a.rn}});
  model["assets"] = std::move(assets);
  Json result = {{"model", std::move(model)},
                 {"option", {{"kind", std::string(option_kind_name(option.kind))}, {"strikes", option.strikes}}}};

  std::ostringstream csv;
  csv << "method,price,std_error,n,seed\n";
  if (want_mc) {
    const PricingResult r = price_mc(market, option, cfg.n ? cfg.n : kDefaultPricingPaths, cfg.seed);
    result["mc"] = r;
    csv << "mc," << format_sig6(r.price) << ',' << format_sig6(r.std_error) << ','
        << r.n_samples << ',' << r.seed << '\n';
  }
  if (want_ref) {
    PricingResult r;
    if (cfg.method == "quadrature")
      r = price_quadrature(market, option);
    else if (cfg.method == "closed_form")
      r = price_digital_closed(market, option);
    else
      r = price_reference(market, option);
    result["reference"] = r;
    csv << method_name(r.method) << ',' << format_sig6(r.price) << ",0,0,0\n";
  }
  emit_report(cfg, result, csv.str(), out);
}

std::vector<std::string> table_header(const RunConfig& cfg, const PaperParams& p,
                                      const PriceTableSpec& spec, const ReproductionReport& r) {
  std::vector<std::string> h;
  h.push_back("table " + std::to_string(spec.table) + ": " +
              std::string(option_kind_name(spec.kind)) + ", spots " + Json(spec.spots).dump());
  if (spec.kind == OptionKind::Spread)
    h.push_back("payoff max(S2 - S1 - K, 0) with S1 = " + p.assets[0].id + ", S2 = " + p.assets[1].id);
  if (auto it = p.raw.find("price_tables"); it != p.raw.end())
    for (const auto& t : *it)
      if (t.value("table", 0) == spec.table && t.contains("strike_convention"))
        h.push_back("strike convention: " + t["strike_convention"].get<std::string>());
  h.push_back("rate " + Json(p.rate).dump() + ", tau 1");
  for (const auto& a : p.assets) {
    std::string line = "asset " + a.id + ": mixture " + Json(a.mixture).dump();
    line += a.alpha ? ", alpha " + Json(*a.alpha).dump() + " (given)"
                    : ", alpha solved";
    h.push_back(line);
  }
  for (const auto& c : p.copulas) h.push_back("copula " + Json(c.copula).dump());
  h.push_back("mc: n " + std::to_string(r.n) + ", seed " + std::to_string(r.seed) + ", shard_size " +
              std::to_string(kDefaultShardSize) + ", one path set per copula reused across rows");
  h.push_back("config " + Json(cfg).dump());
  return h;
}

void cmd_reproduce(const RunConfig& cfg, std::ostream& out) {
  const PaperParams p = load_model(cfg);
  require(p.assets.size() == 2, "reproduce-tables needs two assets");
  require(!p.copulas.empty(), "reproduce-tables needs copulas in '" + cfg.params + "'");
  require(!p.tables.empty(), "reproduce-tables needs price_tables in '" + cfg.params + "'");
  const std::size_t n = cfg.n ? cfg.n : kDefaultPricingPaths;
  const ReproductionReport report = reproduce_tables(p, n, cfg.seed);

  std::vector<std::pair<std::string, std::string>> csvs;
  for (std::size_t t = 0; t < report.tables.size(); ++t) {
    const auto& table = report.tables[t];
    csvs.emplace_back("table" + std::to_string(table.table) + "_" +
                          std::string(option_kind_name(table.kind)) + ".csv",
                      table_csv(table, table_header(cfg, p, p.tables[t], report)));
  }
  const Json full = envelope(cfg, report);

  if (!cfg.out.empty()) {
    const fs::path dir(cfg.out);
    fs::create_directories(dir);
    Json written = Json::array();
    for (const auto& [name, text] : csvs) {
      write_file(dir / name, text);
      written.push_back((dir / name).string());
    }
    write_file(dir / "reproduction.json", full.dump(2) + "\n");
    written.push_back((dir / "reproduction.json").string());
    out << Json{{"written", written}}.dump(2) << '\n';
  } else if (cfg.format == "csv") {
    for (const auto& [name, text] : csvs) out << text << '\n';
  } else {
    out << full.dump(2) << '\n';
  }
}

void cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  const PaperParams p = load_model(cfg);
  require(!cfg.out.empty(), "simulate needs --out (directory for the price files)");
  const CopulaModel copula = resolve_copula(cfg, p);
  const std::size_t n = cfg.n ? cfg.n : kDefaultSimulatedReturns;
  const Eigen::MatrixXd u = sample(copula, n, cfg.seed);

  std::vector<Date> dates;
  std::chrono::sys_days day{std::chrono::year{2014} / std::chrono::July / 1};
  while (dates.size() < n + 1) {
    const std::chrono::weekday wd{day};
    if (wd != std::chrono::Saturday && wd != std::chrono::Sunday) dates.emplace_back(day);
    day += std::chrono::days{1};
  }

  const fs::path dir(cfg.out);
  Json files = Json::array();
  for (std::size_t j = 0; j < p.assets.size(); ++j) {
    std::ostringstream csv;
    csv.precision(17);
    csv << "date,close\n";
    double price = 100.0;
    csv << format_iso_date(dates[0]) << ',' << price << '\n';
    for (std::size_t i = 0; i < n; ++i) {
      price *= std::exp(quantile(p.assets[j].mixture, u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
      csv << format_iso_date(dates[i + 1]) << ',' << price << '\n';
    }
    const fs::path file = dir / (p.assets[j].id + ".csv");
    write_file(file, csv.str());
    files.push_back(file.string());
  }
  out << envelope(cfg, {{"copula", copula}, {"n_returns", n}, {"files", files}}).dump(2) << '\n';
}

void validate_common(const RunConfig& cfg) {
  require(cfg.format == "json" || cfg.format == "csv", "--format must be json or csv");
}

}  // namespace

void to_json(Json& j, const RunConfig& c) {
  j = {{"command", c.command},
       {"inputs", c.inputs},
       {"assets", c.assets},
       {"rate", c.rate ? Json(*c.rate) : Json(nullptr)},
       {"families", c.families},
       {"kind", c.kind},
       {"strikes", c.strikes},
       {"spots", c.spots},
       {"n", c.n},
       {"bootstrap", c.bootstrap},
       {"seed", c.seed},
       {"out", c.out},
       {"format", c.format},
       {"params", c.params},
       {"copula", c.copula},
       {"theta", c.theta},
       {"method", c.method}};
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  double rate = NAN;
  CLI::App app{"Rainbow option pricing with Gaussian-mixture margins and copulas", "rainbow"};
  app.require_subcommand(1);

  auto add = [&](CLI::App* sub, const std::string& flags) {
    auto has = [&](const char* name) { return flags.find(name) != std::string::npos; };
    if (has("input"))
      sub->add_option("--input,-i", cfg.inputs, "price CSV file(s) with header date,close")->delimiter(',');
    if (has("assets")) sub->add_option("--assets,-a", cfg.assets, "asset ids, in order")->delimiter(',');
    if (has("rate")) sub->add_option("--rate,-r", rate, "one-period risk-free rate");
    if (has("families"))
      sub->add_option("--families,-f", cfg.families, "copula families, comma separated")->delimiter(',');
    if (has("kind")) sub->add_option("--kind", cfg.kind, "spread | call_max | call_min | digital");
    if (has("strike"))
      sub->add_option("--strike,-k,--k", cfg.strikes, "strike(s); one per asset for digital")->delimiter(',');
    if (has("spots")) sub->add_option("--spots,-s", cfg.spots, "spot prices, in asset order")->delimiter(',');
    if (has("n")) sub->add_option("--n,-n", cfg.n, "sample size");
    if (has("bootstrap")) sub->add_option("--bootstrap,-B", cfg.bootstrap, "bootstrap replicates");
    if (has("copula")) {
      sub->add_option("--copula", cfg.copula, "copula family");
      sub->add_option("--theta", cfg.theta, "copula parameter(s)")->delimiter(',');
    }
    if (has("params"))
      sub->add_option("--params,--model,-p", cfg.params, "parameter / model JSON");
    if (has("method")) sub->add_option("--method", cfg.method, "all | mc | quadrature | closed_form | reference");
    sub->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    sub->add_option("--out,-o", cfg.out, "output path (stdout when omitted)");
    sub->add_option("--format", cfg.format, "json | csv")->capture_default_str();
  };

  add(app.add_subcommand("ingest", "load price CSVs, align dates, summarize log-returns"),
      "input assets");
  add(app.add_subcommand("fit-margins", "fit two-component Gaussian mixtures by EM"),
      "input assets rate");
  add(app.add_subcommand("calibrate", "solve the SDF tilt and risk-neutralize the margins"),
      "input assets rate params");
  add(app.add_subcommand("fit-copula", "IFM copula fit per family"), "input assets families");
  add(app.add_subcommand("gof", "Cramer-von Mises goodness of fit with parametric bootstrap"),
      "input assets families bootstrap");
  add(app.add_subcommand("select", "fit and rank copula families by AIC, BIC and CvM"),
      "input assets families bootstrap");
  add(app.add_subcommand("price", "price a rainbow option"),
      "params assets rate kind strike spots n copula method");
  add(app.add_subcommand("reproduce-tables", "price the tables of a parameter file"),
      "params rate n");
  add(app.add_subcommand("simulate", "simulate daily price files from a parameter file"),
      "params assets copula n");

  auto error_record = [&](const std::string& module, const std::string& message) {
    err << Json{{"error", {{"module", module}, {"message", message}}}}.dump() << '\n';
  };

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    error_record(kModule, e.what());
    return 2;
  }

  const CLI::App* sub = app.get_subcommands().front();
  cfg.command = sub->get_name();
  if (std::isfinite(rate)) cfg.rate = rate;
  if (cfg.command == "gof" && cfg.bootstrap == 0) cfg.bootstrap = kDefaultGofBootstrap;

  try {
    validate_common(cfg);
    if (cfg.command == "ingest") cmd_ingest(cfg, out);
    else if (cfg.command == "fit-margins") cmd_fit_margins(cfg, out);
    else if (cfg.command == "calibrate") cmd_calibrate(cfg, out);
    else if (cfg.command == "fit-copula") cmd_fit_copula(cfg, out);
    else if (cfg.command == "gof") cmd_gof(cfg, out);
    else if (cfg.command == "select") cmd_select(cfg, out);
    else if (cfg.command == "price") cmd_price(cfg, out);
    else if (cfg.command == "reproduce-tables") cmd_reproduce(cfg, out);
    else if (cfg.command == "simulate") cmd_simulate(cfg, out);
  } catch (const Error& e) {
    error_record(e.module(), e.what());
    return 1;
  } catch (const std::exception& e) {
    error_record(kModule, e.what());
    return 1;
  }
  return 0;
}

}  // namespace rainbow::cli
