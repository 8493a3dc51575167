#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rpcm/design.hpp"
#include "rpcm/kernels.hpp"
#include "rpcm/model.hpp"

namespace rpcm {

/// Monte-Carlo configuration: an exact design, the true model, replication
/// count and RNG seed. Replication r draws from stream (seed, r).
struct SimConfig {
  Design design;  // exact, total n >= 5 (K+1)
  ModelSpec model;
  int replications = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Sampled counts for one replication: counts[i] holds one count per
/// administration of design point i (points in lexicographic order).
struct SampleSet {
  std::vector<Item> items;
  std::vector<std::vector<std::uint32_t>> counts;
};

/// Draws the count responses for one replication. Poisson-Gamma counts are
/// generated through the mixture: ability ~ Gamma(a, scale b) per person,
/// then Y ~ Poisson(ability * sigma(x)); each person answers exactly one
/// item. Deterministic given (seed, replication).
SampleSet sample_responses(const SimConfig& cfg, std::uint64_t replication = 0);

/// Family parameters treated as known when fitting: theta0 (Poisson) or a, b
/// (Poisson-Gamma). Only beta = (beta0, beta_1..beta_K) is estimated.
struct FamilyParams {
  Family family = Family::poisson;
  double theta0 = 1.0;
  double a = 1.0;
  double b = 1.0;

  static FamilyParams of(const ModelSpec& m) {
    return {m.family, m.theta0, m.a, m.b};
  }
  double mean_ability() const {
    return family == Family::poisson ? theta0 : a * b;
  }
};

struct FitOptions {
  int max_iter = 200;
  double score_tol = 1e-8;  // sup-norm of the score at convergence
  std::optional<Eigen::VectorXd> start;  // default: beta = 0
};

struct FitResult {
  Eigen::VectorXd beta_hat;
  bool converged = false;
  int iterations = 0;
  double log_lik = 0.0;
  bool degenerate = false;  // zero totals at some support point
  std::string message;
};

/// Maximum likelihood for beta by Fisher scoring with the per-observation
/// information weights q(x)^{-1} and step halving; converges when the score
/// sup-norm drops below score_tol. Starts at beta = 0 (one perturbed restart
/// on non-convergence). Degenerate data (all-zero counts at a support point)
/// is reported through the flags, never thrown.
FitResult fit_mle(const SampleSet& data, const Design& design,
                  const FamilyParams& family, const FitOptions& opts = {});

/// Empirical covariance of the MLE across replications against the
/// asymptotic prediction (n M(xi; beta))^{-1}.
struct CovarianceReport {
  Eigen::MatrixXd empirical;
  Eigen::MatrixXd predicted;
  double max_rel_error_diag = 0.0;
  int replications = 0;
  int failures = 0;  // non-converged or degenerate replications (excluded)
  std::vector<Eigen::VectorXd> beta_hats;  // per successful replication
};

/// Runs cfg.replications independent replications (parallel across streams),
/// fits each, and compares the sample covariance of beta_hat with the inverse
/// total information. Requires replications >= 500.
CovarianceReport covariance_check(const SimConfig& cfg,
                                  kernels::Exec exec = kernels::default_exec());

}  // namespace rpcm
