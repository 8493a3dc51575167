#include "rpcm/model.hpp"

#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rpcm {

Item::Item(int k, std::uint32_t rank) : k_(k), rank_(rank) {
  if (k < 1 || k > kMaxFeatures)
    throw std::invalid_argument("Item: K must be in [1, 16]");
  if (rank >= (1u << k))
    throw std::invalid_argument("Item: rank out of range for K");
}

Item Item::from_bits(const std::vector<int>& bits) {
  const int k = static_cast<int>(bits.size());
  if (k < 1 || k > kMaxFeatures)
    throw std::invalid_argument("Item: K must be in [1, 16]");
  std::uint32_t rank = 0;
  for (int j = 0; j < k; ++j) {
    if (bits[j] != 0 && bits[j] != 1)
      throw std::invalid_argument("Item: entries must be 0 or 1");
    rank |= static_cast<std::uint32_t>(bits[j]) << (k - 1 - j);
  }
  return Item(k, rank);
}

int Item::ones() const { return std::popcount(rank_); }

std::vector<int> Item::bits() const {
  std::vector<int> out(k_);
  for (int j = 0; j < k_; ++j) out[j] = feature(j) ? 1 : 0;
  return out;
}

std::string Item::to_string() const {
  std::ostringstream os;
  os << '(';
  for (int j = 0; j < k_; ++j) {
    if (j) os << ',';
    os << (feature(j) ? 1 : 0);
  }
  os << ')';
  return os.str();
}

Item basic_item(int k) { return Item(k, 0); }

Item unit_item(int k, int j) {
  if (j < 0 || j >= k) throw std::invalid_argument("unit_item: feature index");
  return Item(k, 1u << (k - 1 - j));
}

void StandardizedParams::validate() const {
  if (effects.empty() || k() > kMaxFeatures)
    throw std::invalid_argument("StandardizedParams: K must be in [1, 16]");
  if (!(b_scale >= 0.0))
    throw std::invalid_argument("StandardizedParams: b_scale must be >= 0");
}

ModelSpec ModelSpec::poisson(int k, double theta0, double beta0,
                             std::vector<double> effects) {
  ModelSpec m;
  m.family = Family::poisson;
  m.theta0 = theta0;
  m.k = k;
  m.beta0 = beta0;
  m.effects = std::move(effects);
  m.validate();
  return m;
}

ModelSpec ModelSpec::poisson_gamma(int k, double a, double b, double beta0,
                                   std::vector<double> effects) {
  ModelSpec m;
  m.family = Family::poisson_gamma;
  m.a = a;
  m.b = b;
  m.k = k;
  m.beta0 = beta0;
  m.effects = std::move(effects);
  m.validate();
  return m;
}

void ModelSpec::validate() const {
  if (k < 1) throw std::invalid_argument("ModelSpec: k must be >= 1");
  if (static_cast<int>(effects.size()) != k)
    throw std::invalid_argument("ModelSpec: effects length must equal k");
  if (family == Family::poisson) {
    if (!(theta0 > 0.0))
      throw std::invalid_argument("ModelSpec: theta0 must be > 0");
  } else {
    if (!(a > 0.0) || !(b > 0.0))
      throw std::invalid_argument("ModelSpec: a and b must be > 0");
  }
  for (double e : effects)
    if (!std::isfinite(e))
      throw std::invalid_argument("ModelSpec: effects must be finite");
  if (!std::isfinite(beta0))
    throw std::invalid_argument("ModelSpec: beta0 must be finite");
}

double ModelSpec::mean_ability() const {
  return family == Family::poisson ? theta0 : a * b;
}

double ModelSpec::info_scale() const { return mean_ability() * std::exp(beta0); }

StandardizedParams ModelSpec::standardized() const {
  StandardizedParams s;
  s.effects = effects;
  s.b_scale = family == Family::poisson ? 0.0 : b * std::exp(beta0);
  return s;
}

ModelSpec standardized_model(const StandardizedParams& s) {
  s.validate();
  if (s.b_scale == 0.0) return ModelSpec::poisson(s.k(), 1.0, 0.0, s.effects);
  return ModelSpec::poisson_gamma(s.k(), 1.0 / s.b_scale, s.b_scale, 0.0,
                                  s.effects);
}

namespace {

void check_dims(const Item& x, int k, const char* where) {
  if (x.k() != k) throw std::invalid_argument(std::string(where) + ": item length does not match model K");
}

// f(x)'beta = beta0 + sum_k beta_k x_k
double linear_predictor(const Item& x, double beta0,
                        const std::vector<double>& effects) {
  double eta = beta0;
  for (int j = 0; j < x.k(); ++j)
    if (x.feature(j)) eta += effects[j];
  return eta;
}

}  // namespace

Eigen::VectorXd regression_vector(const Item& x) {
  Eigen::VectorXd f(x.k() + 1);
  f(0) = 1.0;
  for (int j = 0; j < x.k(); ++j) f(j + 1) = x.feature(j) ? 1.0 : 0.0;
  return f;
}

double mean_response(const Item& x, const ModelSpec& m) {
  m.validate();
  check_dims(x, m.k, "mean_response");
  return m.mean_ability() * std::exp(linear_predictor(x, m.beta0, m.effects));
}

double variance_response(const Item& x, const ModelSpec& m) {
  const double mean = mean_response(x, m);
  if (m.family == Family::poisson) return mean;
  const double sigma = std::exp(linear_predictor(x, m.beta0, m.effects));
  return (1.0 + m.b * sigma) * mean;
}

double inverse_weight(const Item& x, const ModelSpec& m) {
  m.validate();
  check_dims(x, m.k, "inverse_weight");
  const double eta = linear_predictor(x, m.beta0, m.effects);
  if (m.family == Family::poisson) return std::exp(-eta) / m.theta0;
  return (m.b + std::exp(-eta)) / (m.a * m.b);
}

double standardized_inverse_weight(const Item& x, const StandardizedParams& s) {
  s.validate();
  check_dims(x, s.k(), "standardized_inverse_weight");
  return s.b_scale + std::exp(-linear_predictor(x, 0.0, s.effects));
}

double WeightForm::at_rank(std::uint32_t rank) const {
  double eta = 0.0;
  for (std::uint32_t m = rank; m != 0; m &= m - 1) {
    const int j = k - 1 - std::countr_zero(m);
    eta += effects[j];
  }
  return c0 * (b + std::exp(-eta));
}

WeightForm weight_form(const ModelSpec& m) {
  m.validate();
  WeightForm w;
  w.k = m.k;
  w.effects = m.effects;
  w.c0 = std::exp(-m.beta0) / m.mean_ability();
  w.b = m.family == Family::poisson ? 0.0 : m.b * std::exp(m.beta0);
  return w;
}

WeightForm weight_form(const StandardizedParams& s) {
  s.validate();
  WeightForm w;
  w.k = s.k();
  w.effects = s.effects;
  w.c0 = 1.0;
  w.b = s.b_scale;
  return w;
}

}  // namespace rpcm
