#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rpcm/design.hpp"
#include "rpcm/fisher.hpp"
#include "rpcm/kernels.hpp"
#include "rpcm/model.hpp"

namespace rpcm {

/// Default tolerance on the relative excess max d / p - 1 accepted by the
/// equivalence-theorem certificate.
inline constexpr double kDefaultKwTol = 1e-6;

/// Witness of a violated optimality condition: either a feature pair (j, k)
/// (0-based) or an item vector.
using Witness = std::variant<std::pair<int, int>, Item>;

struct Violation {
  Witness witness;
  double slack;  // lhs - rhs in the q scale; <= 0 means satisfied
};

/// Result of a closed-form optimality check. holds() iff no violations.
struct ConditionReport {
  std::vector<Violation> violations;
  long checked_count = 0;

  bool holds() const { return violations.empty(); }
};

/// Pairwise conditions for local D-optimality of xi0 (effects <= 0):
///   q_0 + q_j + q_k <= q_jk  for all pairs 1 <= j < k <= K,
/// with q_0 = b+1, q_j = b+exp(-beta_j), q_jk = b+exp(-beta_j-beta_k).
/// holds() is necessary and sufficient. Throws std::invalid_argument when a
/// positive effect is supplied (the conditions assume beta_k <= 0).
ConditionReport check_pairwise_conditions(const StandardizedParams& s);

/// Exhaustive sufficient conditions for D-optimality of xi0: for every x with
/// |x| >= 2,  (|x|-1)^2 q_0 + sum_k x_k q_k <= q(x). Checks 2^K - K - 1
/// vertices; requires K <= 16 and effects <= 0.
ConditionReport check_exhaustive_conditions(
    const StandardizedParams& s,
    kernels::Exec exec = kernels::default_exec());

/// One point of the pairwise-condition boundary in difficulty coordinates
/// (u = exp(-beta_j) against v = exp(-beta_k)).
struct BoundaryPoint {
  double v;
  double u_min;  // +infinity when v <= 1 (condition unsatisfiable)
};

/// u_min(v) = (v + 1 + 2b) / (v - 1): the pair (j, k) satisfies the
/// pairwise condition iff exp(-beta_j) >= u_min(exp(-beta_k)).
std::vector<BoundaryPoint> boundary_curve(double b,
                                          const std::vector<double>& v_grid);

/// Equal-effects fixed point of the boundary: u* = 1 + sqrt(2 + 2b). At b = 0
/// this is 1 + sqrt(2), i.e. exp(beta) = sqrt(2) - 1 ~ 0.414.
double boundary_equal_effects_threshold(double b);

struct SupportSensitivity {
  Item item;
  double value;
};

/// Equivalence-theorem certificate: scans all 2^K vertices of the candidate
/// set. optimal iff max_x d(x; xi) <= (K+1)(1+tol).
struct CertificationReport {
  double max_sensitivity = 0.0;
  Item worst_item;
  double threshold = 0.0;
  bool optimal = false;
  std::vector<SupportSensitivity> per_support;
};

/// Certifies local D-optimality of d under m. Throws std::domain_error when
/// the information matrix is singular; requires K <= 16.
CertificationReport kw_certify(const Design& d, const ModelSpec& m,
                               double tol = kDefaultKwTol,
                               kernels::Exec exec = kernels::default_exec());

/// D-efficiency of d relative to d_opt:
///   (det M(d) / det M(d_opt))^{1/p}  with p = K+1.
/// When warn is non-null, d_opt is certified first and a warning is written
/// if it fails (the value is still computed).
double d_efficiency(const Design& d, const Design& d_opt, const ModelSpec& m,
                    std::ostream* warn = nullptr);

/// Minimal D-efficiency of the full factorial over beta <= 0 (attained in the
/// limit of large negative effects): (K+1)/2^K.
double fullfactorial_min_efficiency(int k);

/// Published closed-form value for the efficiency of xi0 at indifference:
/// 2^{(K+2)/(K+1)} / (K+1). Kept as a documented constant only; it disagrees
/// with the direct determinant-ratio computation for K >= 3 (see
/// indifference_report).
double published_indifference_efficiency(int k);

/// Efficiency of xi0 against the full factorial at indifference
/// (beta = 0, Poisson weights), computed numerically from the determinants.
double indifference_efficiency_xi0(int k);

/// Both the numeric value and the published closed form, with a discrepancy
/// flag when they disagree beyond 1e-4 relative.
struct IndifferenceReport {
  int k = 0;
  double numeric = 0.0;
  double published_closed_form = 0.0;
  bool agree = false;
};

IndifferenceReport indifference_report(int k);
std::string format_indifference_report(const IndifferenceReport& r);

/// Comparison of the two classic 8-run designs with three binary factors
/// under indifference (unit) weights: the full factorial against the design
/// that duplicates the basic and one-feature items. Reports the ratio of the
/// confidence-ellipsoid volumes; a published reference value for it is 2.7,
/// which disagrees with the direct computation (2.0).
struct VolumeRatioReport {
  double det_ratio = 0.0;     // det M(full factorial) / det M(duplicated xi0)
  double volume_ratio = 0.0;  // sqrt of det_ratio
  double published = 2.7;
  bool agree = false;
};

VolumeRatioReport reference_volume_ratio();
std::string format_volume_ratio_report(const VolumeRatioReport& r);

/// The two designs behind reference_volume_ratio(), as exact 8-run designs.
Design reference_design_factorial();  // all 8 items once
Design reference_design_onefeature();  // basic + one-feature items, twice each

}  // namespace rpcm
