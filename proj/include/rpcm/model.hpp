#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace rpcm {

/// Hard cap on the number of binary item features. Certification and
/// optimization enumerate all 2^K candidate items exhaustively, so K is
/// limited to keep those scans exact and bounded (2^16 = 65536 candidates).
inline constexpr int kMaxFeatures = 16;

/// One item type: a vertex x = (x_1,...,x_K) of the K-dimensional unit cube.
///
/// Stored as (K, rank) where rank is the position of x in lexicographic
/// order: bit (K-1-j) of rank holds x_{j+1}. Scanning ranks in ascending
/// order therefore visits items lexicographically, which is the
/// deterministic tie-break order used by all reductions.
class Item {
public:
  Item(int k, std::uint32_t rank);
  static Item from_bits(const std::vector<int>& bits);

  int k() const { return k_; }
  std::uint32_t rank() const { return rank_; }
  /// x_{j+1} for feature index j in [0, K).
  bool feature(int j) const { return (rank_ >> (k_ - 1 - j)) & 1u; }
  /// |x|: number of active features.
  int ones() const;
  std::vector<int> bits() const;
  /// Human-readable form "(1,0,1)".
  std::string to_string() const;

  friend bool operator==(const Item& a, const Item& b) {
    return a.k_ == b.k_ && a.rank_ == b.rank_;
  }
  friend bool operator<(const Item& a, const Item& b) {
    return a.k_ != b.k_ ? a.k_ < b.k_ : a.rank_ < b.rank_;
  }

private:
  int k_;
  std::uint32_t rank_;
};

/// The basic item x = 0.
Item basic_item(int k);
/// The one-feature item e_{j+1} (feature index j in [0, K)).
Item unit_item(int k, int j);

enum class Family { poisson, poisson_gamma };

/// Effects-only parameterization with theta0 = 1 and beta0 = 0. The
/// Poisson-Gamma scale is carried in b_scale; b_scale = 0 encodes the pure
/// Poisson limit. The standardized inverse weight is
///   q(x) = b_scale + exp(-sum_k beta_k x_k).
struct StandardizedParams {
  std::vector<double> effects;
  double b_scale = 0.0;

  int k() const { return static_cast<int>(effects.size()); }
  void validate() const;
};

/// Count-response regression model with K binary predictors and intercept.
///
/// Poisson: Y ~ Poisson(theta0 * sigma(x)) with known ability theta0.
/// Poisson-Gamma: ability Theta ~ Gamma(shape a, scale b), Y | Theta ~
/// Poisson(Theta * sigma(x)); marginally negative binomial.
/// In both, log sigma(x) = beta0 + sum_k beta_k x_k (main effects only,
/// p = K + 1 parameters).
struct ModelSpec {
  Family family = Family::poisson;
  double theta0 = 1.0;  // Poisson only: known ability (> 0)
  double a = 1.0;       // Poisson-Gamma only: Gamma shape (> 0)
  double b = 1.0;       // Poisson-Gamma only: Gamma scale (> 0)
  int k = 1;
  double beta0 = 0.0;
  std::vector<double> effects;  // beta_1..beta_K, log-easiness per feature

  static ModelSpec poisson(int k, double theta0, double beta0,
                           std::vector<double> effects);
  static ModelSpec poisson_gamma(int k, double a, double b, double beta0,
                                 std::vector<double> effects);

  void validate() const;  // throws std::invalid_argument
  int p() const { return k + 1; }

  /// Mean ability: theta0 for Poisson, a*b for Poisson-Gamma.
  double mean_ability() const;
  /// Information scale factor: M(xi) = info_scale() * M0(xi) where M0 is the
  /// information matrix of standardized().
  double info_scale() const;
  /// Standardized view (theta0 = 1, beta0 = 0). For Poisson-Gamma the scale
  /// becomes b_scale = b * exp(beta0), which is what makes the factorization
  /// above exact; for Poisson b_scale = 0.
  StandardizedParams standardized() const;
};

/// A model whose information matrix equals that of the standardized
/// parameters exactly (Poisson with theta0 = 1 when b_scale = 0, otherwise
/// Poisson-Gamma with a*b = 1).
ModelSpec standardized_model(const StandardizedParams& s);

/// f(x) = (1, x_1, ..., x_K).
Eigen::VectorXd regression_vector(const Item& x);

/// E(Y) at item x: theta0*sigma(x) (Poisson) or a*b*sigma(x) (Poisson-Gamma).
double mean_response(const Item& x, const ModelSpec& m);

/// Var(Y) at item x: equal to the mean (Poisson) or (1+b*sigma(x))*mean
/// (Poisson-Gamma overdispersion).
double variance_response(const Item& x, const ModelSpec& m);

/// Inverse weight q(x; beta) of the per-observation Fisher information:
/// one observation at x contributes q(x)^{-1} f(x) f(x)^T.
///   Poisson:        q(x) = exp(-f(x)'beta) / theta0
///   Poisson-Gamma:  q(x) = (b + exp(-f(x)'beta)) / (a*b)
double inverse_weight(const Item& x, const ModelSpec& m);

/// q(x) = b_scale + exp(-sum_k beta_k x_k), the standardized inverse weight.
double standardized_inverse_weight(const Item& x, const StandardizedParams& s);

/// Canonical inverse-weight form shared by the scan kernels:
///   q(x) = c0 * (b + exp(-sum_j effects[j] x_j)).
/// Both families and the standardized case reduce to this shape.
struct WeightForm {
  double c0 = 1.0;
  double b = 0.0;
  int k = 0;
  std::vector<double> effects;

  /// q at the item with the given lexicographic rank.
  double at_rank(std::uint32_t rank) const;
};

WeightForm weight_form(const ModelSpec& m);
WeightForm weight_form(const StandardizedParams& s);

}  // namespace rpcm
