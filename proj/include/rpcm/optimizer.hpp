#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rpcm/design.hpp"
#include "rpcm/kernels.hpp"
#include "rpcm/model.hpp"
#include "rpcm/optimality.hpp"

namespace rpcm {

struct OptimizeOptions {
  long max_iter = 100000;
  double tol = 1e-6;              // relative excess of max d over p
  double prune_threshold = 1e-8;  // weights below this are dropped
  std::optional<Design> start;    // default: full factorial (never singular)
  bool record_history = false;
  kernels::Exec exec = kernels::default_exec();
};

struct HistoryEntry {
  long iteration;
  double logdet;
  double max_sensitivity;
};

struct OptimizeReport {
  Design design;
  long iterations = 0;  // multiplicative updates performed
  double final_logdet = 0.0;
  CertificationReport certification;
  bool converged = false;
  std::vector<HistoryEntry> history;  // filled when record_history
};

/// Locally D-optimal approximate design over the 2^K candidate items by the
/// multiplicative weight update
///   w_i <- w_i * d(x_i; xi) / p
/// iterated until max_x d(x; xi) <= p (1 + tol) or max_iter, with the scan
/// always taken over all 2^K vertices. Weights below prune_threshold are
/// dropped and the rest renormalized each iteration; if the scan's worst
/// vertex has been pruned, it is reinstated with the det-optimal exchange
/// step (d/p - 1)/(d - 1), and once the scan passes, residual support points
/// with d < p (1 - 10 tol) are cleared (zeroing them strictly increases
/// det M). Every step is monotone in log det M, so the loop can only stop at
/// a certified design or at max_iter. Candidates are visited in
/// lexicographic order and all reductions are deterministic, so runs are
/// reproducible bit-for-bit for either execution lane.
///
/// Non-convergence within max_iter is reported (converged = false, best
/// design so far), not thrown. Throws std::invalid_argument for K > 16 or a
/// singular starting design.
OptimizeReport optimize(const ModelSpec& m, const OptimizeOptions& opts = {});

/// Efficient apportionment of an approximate design into n replications:
/// n_i = ceil((n - s/2) w_i) initially, then counts are adjusted one at a
/// time toward sum n_i = n (increment the point minimizing n_i/w_i, decrement
/// the one maximizing (n_i - 1)/w_i; ties broken by larger weight, then by
/// lexicographic item order). Zero-weight points are dropped first. Requires
/// n >= support size.
Design round_to_exact(const Design& d, std::uint64_t n);

struct ComparisonRow {
  std::string id;
  bool singular = false;
  double logdet = 0.0;             // -inf when singular
  double efficiency_vs_best = 0.0; // (det M / det M_best)^{1/p}
  double volume_ratio_vs_best = 0.0;  // sqrt(det M_best / det M)
};

/// log-determinants and efficiencies relative to the best design in the
/// list. Singular designs are flagged per row and excluded from "best".
std::vector<ComparisonRow> compare_designs(
    const std::vector<std::pair<std::string, Design>>& designs,
    const ModelSpec& m);

/// History as CSV: iteration,logdet,max_sensitivity.
std::string history_csv(const std::vector<HistoryEntry>& history);

}  // namespace rpcm
