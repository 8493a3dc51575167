#pragma once

#include <string>

#include <Eigen/Dense>

#include "rpcm/design.hpp"
#include "rpcm/model.hpp"

namespace rpcm {

/// Condition-number limit beyond which an information matrix is declared
/// numerically singular.
inline constexpr double kSingularConditionLimit = 1e12;

/// Symmetric (K+1)x(K+1) Fisher information with cached log-determinant,
/// inverse, and condition estimate. Built once, then immutable; safe to share
/// across threads.
class InfoMatrix {
public:
  /// Symmetrizes the input and eigendecomposes it. Declared singular when the
  /// smallest eigenvalue is nonpositive or the condition estimate
  /// (lambda_max / lambda_min) exceeds kSingularConditionLimit.
  explicit InfoMatrix(const Eigen::MatrixXd& m);

  const Eigen::MatrixXd& entries() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

  /// ln det M; -infinity when singular.
  double log_det() const { return logdet_; }
  bool singular() const { return singular_; }
  bool well_conditioned() const { return !singular_; }
  /// lambda_max / lambda_min estimate; +infinity when singular.
  double condition() const { return cond_; }

  /// M^{-1}; throws std::domain_error when singular.
  const Eigen::MatrixXd& inverse() const;

private:
  Eigen::MatrixXd m_;
  Eigen::MatrixXd inv_;
  double logdet_;
  double cond_;
  bool singular_;
};

/// M(xi; beta) = sum_i w_i q(x_i; beta)^{-1} f(x_i) f(x_i)^T. For an exact
/// design the counts are normalized, so this is the per-observation
/// information.
InfoMatrix info_matrix(const Design& d, const ModelSpec& m);

/// Same accumulation from the canonical weight form; used by the optimizer's
/// inner loop. weights[r] is the weight of the item with rank r (zeros are
/// skipped).
Eigen::MatrixXd info_from_weights(const std::vector<double>& weights,
                                  const WeightForm& q);

/// ln det of an information matrix (-infinity flags singularity).
double log_det(const InfoMatrix& m);

/// Sensitivity (variance) function d(x; xi) = q(x)^{-1} f(x)' M(xi)^{-1} f(x).
/// Bounded by p = K+1 everywhere iff xi is locally D-optimal, with equality
/// at the support points of an optimal design.
double sensitivity(const Item& x, const Design& d, const ModelSpec& m);
double sensitivity(const Item& x, const InfoMatrix& info, const ModelSpec& m);

/// Closed form of the sensitivity function of xi0 in the standardized model:
///   d(x; xi0) = (K+1) q(x)^{-1} ((|x|-1)^2 q_0 + sum_k x_k q_k)
/// with q_0 = b+1 and q_k = b + exp(-beta_k). Agrees with the generic
/// sensitivity of xi0; the (K+1) factor comes from M(xi0)^{-1}.
double closed_form_sensitivity_xi0(const Item& x, const StandardizedParams& s);

/// Row-major CSV with a one-line header (parameter labels b0..bK).
std::string matrix_csv(const Eigen::MatrixXd& m);

}  // namespace rpcm
