#include "rpcm/kernels.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rpcm::kernels {

namespace {

// f(x)' A f(x) for f = (1, x), iterating only the active rows/columns.
inline double quad_form(const Eigen::MatrixXd& a, std::uint32_t rank, int k) {
  int idx[kMaxFeatures + 1];
  int nidx = 0;
  idx[nidx++] = 0;
  for (std::uint32_t m = rank; m != 0; m &= m - 1)
    idx[nidx++] = k - std::countr_zero(m);  // feature j = k-1-tz -> row j+1
  double acc = 0.0;
  for (int r = 0; r < nidx; ++r) {
    const double* col = a.data() + idx[r] * a.rows();
    for (int c = 0; c < nidx; ++c) acc += col[idx[c]];
  }
  return acc;
}

inline void combine_max(MaxSensitivity& best, double v, std::uint32_t rank) {
  if (v > best.value || (v == best.value && rank < best.rank)) {
    best.value = v;
    best.rank = rank;
  }
}

}  // namespace

Exec default_exec() {
#ifdef _OPENMP
  return Exec::parallel;
#else
  return Exec::serial;
#endif
}

bool openmp_enabled() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

MaxSensitivity max_sensitivity(const Eigen::MatrixXd& minv, const WeightForm& q,
                               Exec exec) {
  if (minv.rows() != q.k + 1 || minv.cols() != q.k + 1)
    throw std::invalid_argument("max_sensitivity: matrix dimension must be K+1");
  const std::int64_t nverts = std::int64_t{1} << q.k;
  MaxSensitivity best{-std::numeric_limits<double>::infinity(), 0};
  if (exec == Exec::serial) {
    for (std::int64_t r = 0; r < nverts; ++r) {
      const auto rank = static_cast<std::uint32_t>(r);
      combine_max(best, quad_form(minv, rank, q.k) / q.at_rank(rank), rank);
    }
    return best;
  }
#ifdef _OPENMP
#pragma omp parallel
  {
    MaxSensitivity local{-std::numeric_limits<double>::infinity(), 0};
#pragma omp for nowait
    for (std::int64_t r = 0; r < nverts; ++r) {
      const auto rank = static_cast<std::uint32_t>(r);
      combine_max(local, quad_form(minv, rank, q.k) / q.at_rank(rank), rank);
    }
#pragma omp critical(rpcm_max_sensitivity)
    combine_max(best, local.value, local.rank);
  }
  return best;
#else
  return max_sensitivity(minv, q, Exec::serial);
#endif
}

std::vector<double> sensitivity_all(const Eigen::MatrixXd& minv,
                                    const WeightForm& q, Exec exec) {
  if (minv.rows() != q.k + 1 || minv.cols() != q.k + 1)
    throw std::invalid_argument("sensitivity_all: matrix dimension must be K+1");
  const std::int64_t nverts = std::int64_t{1} << q.k;
  std::vector<double> out(static_cast<std::size_t>(nverts));
  if (exec == Exec::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (std::int64_t r = 0; r < nverts; ++r) {
      const auto rank = static_cast<std::uint32_t>(r);
      out[static_cast<std::size_t>(r)] =
          quad_form(minv, rank, q.k) / q.at_rank(rank);
    }
    return out;
#endif
  }
  for (std::int64_t r = 0; r < nverts; ++r) {
    const auto rank = static_cast<std::uint32_t>(r);
    out[static_cast<std::size_t>(r)] =
        quad_form(minv, rank, q.k) / q.at_rank(rank);
  }
  return out;
}

std::vector<ScanViolation> exhaustive_condition_scan(const StandardizedParams& s, Exec exec) {
  s.validate();
  const int k = s.k();
  const double q0 = s.b_scale + 1.0;
  // q_j cached per feature
  double qf[kMaxFeatures];
  for (int j = 0; j < k; ++j) qf[j] = s.b_scale + std::exp(-s.effects[j]);
  const WeightForm w = weight_form(s);

  auto slack_at = [&](std::uint32_t rank) {
    const int ones = std::popcount(rank);
    double lhs = double(ones - 1) * double(ones - 1) * q0;
    for (std::uint32_t m = rank; m != 0; m &= m - 1)
      lhs += qf[k - 1 - std::countr_zero(m)];
    return lhs - w.at_rank(rank);
  };

  const std::int64_t nverts = std::int64_t{1} << k;
  std::vector<ScanViolation> out;
  if (exec == Exec::parallel) {
#ifdef _OPENMP
#pragma omp parallel
    {
      std::vector<ScanViolation> local;
#pragma omp for nowait
      for (std::int64_t r = 0; r < nverts; ++r) {
        const auto rank = static_cast<std::uint32_t>(r);
        if (std::popcount(rank) < 2) continue;
        const double sl = slack_at(rank);
        if (sl > 0.0) local.push_back({rank, sl});
      }
#pragma omp critical(rpcm_exhaustive_condition_scan)
      out.insert(out.end(), local.begin(), local.end());
    }
    std::sort(out.begin(), out.end(),
              [](const ScanViolation& a, const ScanViolation& b) {
                return a.rank < b.rank;
              });
    return out;
#endif
  }
  for (std::int64_t r = 0; r < nverts; ++r) {
    const auto rank = static_cast<std::uint32_t>(r);
    if (std::popcount(rank) < 2) continue;
    const double sl = slack_at(rank);
    if (sl > 0.0) out.push_back({rank, sl});
  }
  return out;
}

}  // namespace rpcm::kernels
