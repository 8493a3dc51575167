#pragma once

#include <string>

#include <json.hpp>

#include "rpcm/design.hpp"
#include "rpcm/model.hpp"
#include "rpcm/optimality.hpp"
#include "rpcm/optimizer.hpp"
#include "rpcm/simulate.hpp"

namespace rpcm {

using nlohmann::json;

/// ModelSpec wire format:
///   {"family":"poisson"|"poisson-gamma", "theta0":num?, "a":num?, "b":num?,
///    "k":int, "beta0":num, "effects":[num,...]}
/// Family/parameter mismatches are rejected (theta0 only with poisson; a, b
/// only with poisson-gamma).
json model_to_json(const ModelSpec& m);
ModelSpec model_from_json(const json& j);

/// Design wire format:
///   {"kind":"approximate"|"exact", "n":int?,
///    "points":[{"item":[0,1,...], "weight":num | "count":int}, ...]}
json design_to_json(const Design& d);
Design design_from_json(const json& j);

json condition_report_to_json(const ConditionReport& r);
json certification_report_to_json(const CertificationReport& r);
json optimize_report_to_json(const OptimizeReport& r);
json covariance_report_to_json(const CovarianceReport& r);

/// SimConfig wire format:
///   {"design":{...}, "model":{...}, "replications":int, "seed":uint}
json sim_config_to_json(const SimConfig& c);
SimConfig sim_config_from_json(const json& j);

}  // namespace rpcm
