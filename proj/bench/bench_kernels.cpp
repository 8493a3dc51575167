// Serial reference vs OpenMP lanes for the hot paths: the 2^K sensitivity
// scans, a full optimizer run, and the replicated simulation. Run with
// --benchmark_filter=... to narrow.

#include <benchmark/benchmark.h>

#include <vector>

#include "rpcm/design.hpp"
#include "rpcm/fisher.hpp"
#include "rpcm/kernels.hpp"
#include "rpcm/optimizer.hpp"
#include "rpcm/simulate.hpp"

namespace {

using rpcm::kernels::Exec;

struct ScanInputs {
  Eigen::MatrixXd minv;
  rpcm::WeightForm q;
};

ScanInputs scan_inputs(int k) {
  const rpcm::ModelSpec m = rpcm::ModelSpec::poisson_gamma(
      k, 2.0, 0.5, 0.0, std::vector<double>(k, -1.5));
  const rpcm::InfoMatrix info = rpcm::info_matrix(rpcm::full_factorial(k), m);
  return {info.inverse(), rpcm::weight_form(m)};
}

void BM_max_scan(benchmark::State& state, Exec exec) {
  const int k = static_cast<int>(state.range(0));
  const ScanInputs in = scan_inputs(k);
  for (auto _ : state) {
    auto r = rpcm::kernels::max_sensitivity(in.minv, in.q, exec);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * (1LL << k));
}

void BM_sensitivity_all(benchmark::State& state, Exec exec) {
  const int k = static_cast<int>(state.range(0));
  const ScanInputs in = scan_inputs(k);
  std::vector<double> out;
  for (auto _ : state) {
    out = rpcm::kernels::sensitivity_all(in.minv, in.q, exec);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * (1LL << k));
}

void BM_optimize(benchmark::State& state, Exec exec) {
  const int k = static_cast<int>(state.range(0));
  const rpcm::ModelSpec m =
      rpcm::ModelSpec::poisson(k, 1.0, 0.0, std::vector<double>(k, -2.0));
  rpcm::OptimizeOptions opts;
  opts.exec = exec;
  for (auto _ : state) {
    auto r = rpcm::optimize(m, opts);
    benchmark::DoNotOptimize(r.final_logdet);
  }
}

void BM_covariance_check(benchmark::State& state, Exec exec) {
  const rpcm::ModelSpec m = rpcm::ModelSpec::poisson(2, 1.0, 0.0, {-1.0, -1.0});
  const rpcm::SimConfig cfg{rpcm::round_to_exact(rpcm::xi0(2), 60), m, 500, 42};
  for (auto _ : state) {
    auto r = rpcm::covariance_check(cfg, exec);
    benchmark::DoNotOptimize(r.max_rel_error_diag);
  }
  state.SetItemsProcessed(state.iterations() * 500);
}

}  // namespace

BENCHMARK_CAPTURE(BM_max_scan, serial, Exec::serial)->Arg(12)->Arg(14)->Arg(16);
BENCHMARK_CAPTURE(BM_max_scan, parallel, Exec::parallel)->Arg(12)->Arg(14)->Arg(16);
BENCHMARK_CAPTURE(BM_sensitivity_all, serial, Exec::serial)->Arg(14)->Arg(16);
BENCHMARK_CAPTURE(BM_sensitivity_all, parallel, Exec::parallel)->Arg(14)->Arg(16);
BENCHMARK_CAPTURE(BM_optimize, serial, Exec::serial)->Arg(8)->Arg(10);
BENCHMARK_CAPTURE(BM_optimize, parallel, Exec::parallel)->Arg(8)->Arg(10);
BENCHMARK_CAPTURE(BM_covariance_check, serial, Exec::serial);
BENCHMARK_CAPTURE(BM_covariance_check, parallel, Exec::parallel);

BENCHMARK_MAIN();
