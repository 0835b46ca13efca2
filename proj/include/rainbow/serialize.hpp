// JSON and CSV encodings of the model objects and reports.
#pragma once

#include <string>

#include <json.hpp>

#include "rainbow/copula.hpp"
#include "rainbow/fitgof.hpp"
#include "rainbow/market_data.hpp"
#include "rainbow/mixture.hpp"
#include "rainbow/pricing.hpp"
#include "rainbow/risk_neutral.hpp"

namespace rainbow {

using Json = nlohmann::json;

// {components: [{p, mu, sigma}]}; weights summing to 1 within 1e-6 are rescaled
void to_json(Json& j, const GaussianMixture& m);
void from_json(const Json& j, GaussianMixture& m);

void to_json(Json& j, const SdfParams& s);
void from_json(const Json& j, SdfParams& s);

// {alpha, rate, components: [{v, mu, sigma, gamma}]}
void to_json(Json& j, const RiskNeutralMixture& q);

// {family, params: [...]} plus dim when it is not 2
void to_json(Json& j, const CopulaModel& c);
CopulaModel copula_from_json(const Json& j);

void to_json(Json& j, const SummaryStats& s);
void to_json(Json& j, const MixtureMoments& m);
void to_json(Json& j, const FitDiagnostics& d);
void to_json(Json& j, const EmFit& f);

// {price, std_error, n, seed, method, shard_size, n_shards}
void to_json(Json& j, const PricingResult& r);

void to_json(Json& j, const GofReport& g);
void to_json(Json& j, const SelectionReport& r);

/// Table layout: one column per family; rows parameter, statistic, p-value,
/// lnL, AIC, BIC.
std::string selection_csv(const SelectionReport& r);

/// Fixed 6-significant-digit rendering used in CSV tables.
std::string format_sig6(double x);

}  // namespace rainbow
