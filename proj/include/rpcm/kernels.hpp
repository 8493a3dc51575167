#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "rpcm/model.hpp"

namespace rpcm::kernels {

/// Execution lane for the vertex-scan kernels. Serial is the reference
/// implementation; parallel uses OpenMP when compiled in and must produce
/// bit-identical results (per-vertex arithmetic is identical and reductions
/// are exact max/argmin-rank combines).
enum class Exec { serial, parallel };

/// parallel when built with OpenMP, serial otherwise.
Exec default_exec();

bool openmp_enabled();
int max_threads();

struct MaxSensitivity {
  double value = 0.0;
  std::uint32_t rank = 0;  // lexicographically smallest argmax
};

/// max over all 2^K vertices of d(x) = q(x)^{-1} f(x)' Minv f(x), with ties
/// broken toward the smallest rank.
MaxSensitivity max_sensitivity(const Eigen::MatrixXd& minv, const WeightForm& q,
                               Exec exec);

/// d(x) for every vertex rank in [0, 2^K).
std::vector<double> sensitivity_all(const Eigen::MatrixXd& minv,
                                    const WeightForm& q, Exec exec);

struct ScanViolation {
  std::uint32_t rank;
  double slack;  // lhs - rhs in the q scale; > 0 means violated
};

/// Scans all vertices with |x| >= 2 for violations of
///   (|x|-1)^2 q_0 + sum_k x_k q_k <= q(x)
/// in the standardized model. Violations are returned sorted by rank.
std::vector<ScanViolation> exhaustive_condition_scan(const StandardizedParams& s, Exec exec);

}  // namespace rpcm::kernels
