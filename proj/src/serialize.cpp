#include "rainbow/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "rainbow/numerics.hpp"

namespace rainbow {

void to_json(Json& j, const GaussianMixture& m) {
  j = Json::object();
  Json comps = Json::array();
  for (const auto& c : m.components()) comps.push_back({{"p", c.weight}, {"mu", c.mean}, {"sigma", c.sd}});
  j["components"] = std::move(comps);
}

void from_json(const Json& j, GaussianMixture& m) {
  std::vector<MixtureComponent> comps;
  try {
    for (const auto& c : j.at("components"))
      comps.push_back({c.at("p").get<double>(), c.at("mu").get<double>(),
                       c.at("sigma").get<double>()});
  } catch (const Json::exception& e) {
    throw Error("mixture", std::string("malformed mixture JSON: ") + e.what());
  }
  // Published weights are rounded; accept a sum within 1e-6 and rescale.
  double total = 0.0;
  for (const auto& c : comps) total += c.weight;
  if (std::abs(total - 1.0) <= 1e-6)
    for (auto& c : comps) c.weight /= total;
  m = GaussianMixture(std::move(comps));
}

void to_json(Json& j, const SdfParams& s) {
  j = {{"alpha", s.alpha}, {"beta", s.beta}, {"rate", s.rate}};
}

void from_json(const Json& j, SdfParams& s) {
  s.alpha = j.at("alpha").get<double>();
  s.beta = j.value("beta", 0.0);
  s.rate = j.at("rate").get<double>();
}

void to_json(Json& j, const RiskNeutralMixture& q) {
  Json comps = Json::array();
  for (std::size_t i = 0; i < q.tilted.size(); ++i)
    comps.push_back({{"v", q.tilted[i].weight},
                     {"mu", q.tilted[i].mean},
                     {"sigma", q.tilted[i].sd},
                     {"gamma", q.gammas[i]}});
  j = {{"alpha", q.alpha}, {"rate", q.rate}, {"components", std::move(comps)}};
}

void to_json(Json& j, const CopulaModel& c) {
  j = {{"family", c.name()}, {"params", c.params()}};
  if (c.dim() != 2) j["dim"] = c.dim();
}

CopulaModel copula_from_json(const Json& j) {
  try {
    return CopulaModel(parse_family(j.at("family").get<std::string>()),
                       j.value("params", std::vector<double>{}), j.value("dim", 2));
  } catch (const Json::exception& e) {
    throw Error("copula", std::string("malformed copula JSON: ") + e.what());
  }
}

namespace {

Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace

void to_json(Json& j, const SummaryStats& s) {
  j = {{"n", s.n},
       {"mean", s.mean},
       {"sd", s.sd},
       {"skewness", finite_or_null(s.skewness)},
       {"kurtosis", finite_or_null(s.kurtosis)},
       {"degenerate", s.degenerate}};
}

void to_json(Json& j, const MixtureMoments& m) {
  j = {{"mean", m.mean}, {"sd", m.sd}, {"skewness", m.skewness}, {"kurtosis", m.kurtosis}};
}

void to_json(Json& j, const FitDiagnostics& d) {
  j = {{"loglik", d.loglik},
       {"iterations", d.iterations},
       {"converged", d.converged},
       {"restarts_used", d.restarts_used},
       {"restarts_failed", d.restarts_failed},
       {"best_restart", d.best_restart}};
}

void to_json(Json& j, const EmFit& f) {
  j = {{"mixture", f.mixture}, {"diagnostics", f.diagnostics}, {"moments", moments(f.mixture)}};
}

void to_json(Json& j, const PricingResult& r) {
  j = {{"price", r.price},
       {"std_error", r.std_error},
       {"n", r.n_samples},
       {"seed", r.seed},
       {"method", std::string(method_name(r.method))}};
  if (r.method == PricingMethod::MonteCarlo) {
    j["shard_size"] = r.shard_size;
    j["n_shards"] = r.n_shards;
  }
}

void to_json(Json& j, const GofReport& g) {
  j = {{"statistic", g.statistic},
       {"p_value", g.p_value},
       {"bootstrap_reps", g.bootstrap_reps},
       {"failed_reps", g.failed_reps},
       {"seed", g.seed}};
  if (g.fitted) j["copula"] = *g.fitted;
}

void to_json(Json& j, const SelectionReport& r) {
  Json entries = Json::array();
  for (const auto& e : r.entries) {
    Json x = {{"family", std::string(family_name(e.family))}};
    if (e.copula) {
      x["copula"] = *e.copula;
      x["loglik"] = e.loglik;
      x["aic"] = e.aic;
      x["bic"] = e.bic;
      x["cvm"] = e.cvm;
      x["p_value"] = e.p_value ? Json(*e.p_value) : Json(nullptr);
      x["boundary"] = e.boundary;
    } else {
      x["error"] = e.error;
    }
    entries.push_back(std::move(x));
  }
  auto names = [&r](const std::vector<std::size_t>& idx) {
    Json a = Json::array();
    for (auto i : idx) a.push_back(std::string(family_name(r.entries[i].family)));
    return a;
  };
  j = {{"n", r.n},
       {"margins", r.margins},
       {"families", std::move(entries)},
       {"ranking", {{"aic", names(r.rank_aic)}, {"bic", names(r.rank_bic)}, {"cvm", names(r.rank_cvm)}}}};
}

std::string format_sig6(double x) {
  if (!std::isfinite(x)) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string selection_csv(const SelectionReport& r) {
  std::ostringstream os;
  os << "row";
  for (const auto& e : r.entries) os << ',' << family_name(e.family);
  os << '\n';
  auto row = [&](const char* label, auto value) {
    os << label;
    for (const auto& e : r.entries) os << ',' << (e.copula ? value(e) : std::string("NA"));
    os << '\n';
  };
  row("parameter", [](const SelectionEntry& e) {
    std::string s;
    for (std::size_t i = 0; i < e.copula->params().size(); ++i)
      s += (i ? ";" : "") + format_sig6(e.copula->params()[i]);
    return s.empty() ? std::string("-") : s;
  });
  row("statistic", [](const SelectionEntry& e) { return format_sig6(e.cvm); });
  row("p-value", [](const SelectionEntry& e) {
    return e.p_value ? format_sig6(*e.p_value) : std::string("NA");
  });
  row("lnL", [](const SelectionEntry& e) { return format_sig6(e.loglik); });
  row("AIC", [](const SelectionEntry& e) { return format_sig6(e.aic); });
  row("BIC", [](const SelectionEntry& e) { return format_sig6(e.bic); });
  return os.str();
}

}  // namespace rainbow
