#pragma once

#include "storecast/arima.hpp"
#include "storecast/bayes.hpp"
#include "storecast/copulas.hpp"
#include "storecast/ensemble.hpp"
#include "storecast/gbt.hpp"
#include "storecast/lasso.hpp"
#include "storecast/report.hpp"
#include "storecast/vine.hpp"

namespace storecast {

/// Versioned JSON for every fitted artifact. Each document carries
/// "schema": "storecast/<kind>/v1"; loaders check the tag (KindMismatch on
/// the wrong document) and reject missing or ill-typed fields
/// (MalformedRow). Serialization is loss-free: save then load gives a
/// model with identical parameters, bit for bit.
Json to_json(const ArimaModel& model);
Json to_json(const LassoModel& model);
Json to_json(const GbtModel& model);
Json to_json(const JointModel& model);
Json to_json(const CVineSpec& spec);
Json to_json(const McmcChain& chain);

ArimaModel arima_from_json(const Json& doc);
LassoModel lasso_from_json(const Json& doc);
GbtModel gbt_from_json(const Json& doc);
JointModel joint_model_from_json(const Json& doc);
CVineSpec cvine_spec_from_json(const Json& doc);
McmcChain chain_from_json(const Json& doc);

CopulaFamily copula_family_from_name(const std::string& name);

}  // namespace storecast
