#include "rpcm/json_io.hpp"

#include <cmath>
#include <stdexcept>

namespace rpcm {

namespace {

json item_to_json(const Item& x) { return json(x.bits()); }

Item item_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("item: expected an array of 0/1");
  return Item::from_bits(j.get<std::vector<int>>());
}

double require_number(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw std::invalid_argument(std::string("missing or non-numeric field: ") + key);
  return j.at(key).get<double>();
}

}  // namespace

json model_to_json(const ModelSpec& m) {
  json j;
  j["family"] = m.family == Family::poisson ? "poisson" : "poisson-gamma";
  if (m.family == Family::poisson) {
    j["theta0"] = m.theta0;
  } else {
    j["a"] = m.a;
    j["b"] = m.b;
  }
  j["k"] = m.k;
  j["beta0"] = m.beta0;
  j["effects"] = m.effects;
  return j;
}

ModelSpec model_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("model: expected an object");
  const std::string family = j.value("family", std::string());
  const int k = j.contains("k") && j.at("k").is_number_integer()
                    ? j.at("k").get<int>()
                    : throw std::invalid_argument("model: missing integer field k");
  if (!j.contains("effects") || !j.at("effects").is_array())
    throw std::invalid_argument("model: missing effects array");
  auto effects = j.at("effects").get<std::vector<double>>();
  const double beta0 = require_number(j, "beta0");

  if (family == "poisson") {
    if (j.contains("a") || j.contains("b"))
      throw std::invalid_argument("model: a/b are not poisson parameters");
    return ModelSpec::poisson(k, j.contains("theta0") ? require_number(j, "theta0") : 1.0,
                              beta0, std::move(effects));
  }
  if (family == "poisson-gamma") {
    if (j.contains("theta0"))
      throw std::invalid_argument("model: theta0 is not a poisson-gamma parameter");
    return ModelSpec::poisson_gamma(k, require_number(j, "a"), require_number(j, "b"),
                                    beta0, std::move(effects));
  }
  throw std::invalid_argument("model: family must be \"poisson\" or \"poisson-gamma\"");
}

json design_to_json(const Design& d) {
  json j;
  j["kind"] = d.kind() == DesignKind::approximate ? "approximate" : "exact";
  if (d.kind() == DesignKind::exact) j["n"] = d.n();
  json pts = json::array();
  for (const auto& p : d.points()) {
    json pj;
    pj["item"] = item_to_json(p.item);
    if (d.kind() == DesignKind::approximate)
      pj["weight"] = p.weight;
    else
      pj["count"] = p.count;
    pts.push_back(std::move(pj));
  }
  j["points"] = std::move(pts);
  return j;
}

Design design_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("design: expected an object");
  const std::string kind = j.value("kind", std::string());
  if (!j.contains("points") || !j.at("points").is_array() || j.at("points").empty())
    throw std::invalid_argument("design: missing nonempty points array");

  if (kind == "approximate") {
    std::vector<std::pair<Item, double>> pts;
    for (const auto& pj : j.at("points"))
      pts.emplace_back(item_from_json(pj.at("item")), require_number(pj, "weight"));
    return Design::approximate(std::move(pts));
  }
  if (kind == "exact") {
    std::vector<std::pair<Item, std::uint64_t>> pts;
    std::uint64_t sum = 0;
    for (const auto& pj : j.at("points")) {
      if (!pj.contains("count") || !pj.at("count").is_number_integer())
        throw std::invalid_argument("design: exact points need integer counts");
      const auto c = pj.at("count").get<std::int64_t>();
      if (c <= 0) throw std::invalid_argument("design: counts must be positive");
      pts.emplace_back(item_from_json(pj.at("item")), static_cast<std::uint64_t>(c));
      sum += static_cast<std::uint64_t>(c);
    }
    if (j.contains("n") && j.at("n").get<std::uint64_t>() != sum)
      throw std::invalid_argument("design: n does not equal the sum of counts");
    return Design::exact(std::move(pts));
  }
  throw std::invalid_argument("design: kind must be \"approximate\" or \"exact\"");
}

json condition_report_to_json(const ConditionReport& r) {
  json j;
  j["holds"] = r.holds();
  j["checked_count"] = r.checked_count;
  json vio = json::array();
  for (const auto& v : r.violations) {
    json vj;
    if (std::holds_alternative<std::pair<int, int>>(v.witness)) {
      const auto& [a, b] = std::get<std::pair<int, int>>(v.witness);
      vj["pair"] = {a + 1, b + 1};  // 1-based feature labels
    } else {
      vj["item"] = item_to_json(std::get<Item>(v.witness));
    }
    vj["slack"] = v.slack;
    vio.push_back(std::move(vj));
  }
  j["violations"] = std::move(vio);
  return j;
}

json certification_report_to_json(const CertificationReport& r) {
  json j;
  j["optimal"] = r.optimal;
  j["max_sensitivity"] = r.max_sensitivity;
  j["threshold"] = r.threshold;
  j["worst_item"] = item_to_json(r.worst_item);
  json ps = json::array();
  for (const auto& s : r.per_support)
    ps.push_back({{"item", item_to_json(s.item)}, {"sensitivity", s.value}});
  j["per_support"] = std::move(ps);
  return j;
}

json optimize_report_to_json(const OptimizeReport& r) {
  json j;
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["final_logdet"] = r.final_logdet;
  j["design"] = design_to_json(r.design);
  j["certification"] = certification_report_to_json(r.certification);
  if (!r.history.empty()) {
    json h = json::array();
    for (const auto& e : r.history)
      h.push_back({{"iteration", e.iteration},
                   {"logdet", e.logdet},
                   {"max_sensitivity", e.max_sensitivity}});
    j["history"] = std::move(h);
  }
  return j;
}

namespace {
json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}
}  // namespace

json covariance_report_to_json(const CovarianceReport& r) {
  json j;
  j["replications"] = r.replications;
  j["failures"] = r.failures;
  j["empirical_cov"] = matrix_to_json(r.empirical);
  j["predicted_cov"] = matrix_to_json(r.predicted);
  j["max_rel_error_diag"] = r.max_rel_error_diag;
  return j;
}

json sim_config_to_json(const SimConfig& c) {
  json j;
  j["design"] = design_to_json(c.design);
  j["model"] = model_to_json(c.model);
  j["replications"] = c.replications;
  j["seed"] = c.seed;
  return j;
}

SimConfig sim_config_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("sim config: expected an object");
  if (!j.contains("design") || !j.contains("model"))
    throw std::invalid_argument("sim config: design and model are required");
  SimConfig c{design_from_json(j.at("design")), model_from_json(j.at("model")),
              j.value("replications", 1), j.value("seed", std::uint64_t{0})};
  c.validate();
  return c;
}

}  // namespace rpcm
