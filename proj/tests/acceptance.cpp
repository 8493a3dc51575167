// Acceptance suite: one line per criterion, [PASS]/[FAIL], with the measured
// runtime checked against each criterion's budget. Exit code = number of
// failing criteria. Always built with assertions on.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rpcm/design.hpp"
#include "rpcm/fisher.hpp"
#include "rpcm/optimality.hpp"
#include "rpcm/optimizer.hpp"
#include "rpcm/simulate.hpp"

using namespace rpcm;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool cond, const std::string& msg) {
    if (!cond && pass) {
      pass = false;
      detail = msg;
    }
  }
};

std::string fmt(double v, int prec = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

// ------------------------------------------------------------------------
// 1. pairwise-condition verdict flips at easiness 0.414 (b = 0)
Outcome criterion1() {
  Outcome o;
  const double lo = std::log(0.4142), hi = std::log(0.4143);
  o.require(check_pairwise_conditions({{lo, lo}, 0.0}).holds(),
            "conditions must hold at easiness 0.4142");
  o.require(!check_pairwise_conditions({{hi, hi}, 0.0}).holds(),
            "conditions must fail at easiness 0.4143");
  o.detail = "verdict flips between easiness 0.4142 and 0.4143";
  return o;
}

// 2. xi0 efficiency at indifference, K = 2
Outcome criterion2() {
  Outcome o;
  const ModelSpec m = ModelSpec::poisson(2, 1.0, 0.0, {0.0, 0.0});
  const double eff = d_efficiency(xi0(2), full_factorial(2), m);
  o.require(std::fabs(eff - 0.8399) <= 1e-4,
            "efficiency " + fmt(eff) + " not within 1e-4 of 0.8399");
  o.detail = "efficiency " + fmt(eff);
  return o;
}

// 3. full-factorial efficiency approaches (K+1)/2^K at strong effects
Outcome criterion3() {
  Outcome o;
  std::string vals;
  for (int k : {2, 3, 6}) {
    const ModelSpec m =
        ModelSpec::poisson(k, 1.0, 0.0, std::vector<double>(k, -8.0));
    const OptimizeReport opt = optimize(m);
    o.require(opt.converged, "optimizer must converge at K=" + std::to_string(k));
    const double eff = d_efficiency(full_factorial(k), opt.design, m);
    const double target = fullfactorial_min_efficiency(k);
    o.require(std::fabs(eff - target) <= 0.02 * target,
              "K=" + std::to_string(k) + ": efficiency " + fmt(eff) +
                  " not within 2% of " + fmt(target));
    vals += (vals.empty() ? "" : ", ") + std::string("K=") + std::to_string(k) +
            ": " + fmt(eff, 4) + " vs " + fmt(target, 4);
  }
  o.detail = vals;
  return o;
}

// 4. the optimizer recovers xi0 wherever the pairwise conditions hold
Outcome criterion4() {
  Outcome o;
  oracle::Uniform u(20240704);
  int runs = 0;
  for (int k : {3, 4, 5}) {
    for (double b : {0.0, 0.5, 1.0}) {
      for (int rep = 0; rep < 3; ++rep) {
        StandardizedParams s;
        s.b_scale = b;
        s.effects.resize(k);
        do {
          for (double& e : s.effects) e = u(-6.0, -1.2);
        } while (!check_pairwise_conditions(s).holds());
        const ModelSpec m = standardized_model(s);
        const OptimizeReport r = optimize(m);
        ++runs;
        o.require(r.converged && r.certification.optimal,
                  "no certified convergence at K=" + std::to_string(k) +
                      ", b=" + fmt(b, 1));
        o.require(r.design.support_size() == static_cast<std::size_t>(k + 1),
                  "support is not the K+1 one-feature items (K=" +
                      std::to_string(k) + ", b=" + fmt(b, 1) + ")");
        for (const auto& pt : r.design.points()) {
          o.require(pt.item.ones() <= 1, "support contains a multi-feature item");
          o.require(std::fabs(pt.weight - 1.0 / (k + 1)) <= 1e-4,
                    "weight " + fmt(pt.weight) + " not within 1e-4 of 1/(K+1)");
        }
      }
    }
  }
  o.detail = std::to_string(runs) + " certified recoveries across K in {3,4,5}, b in {0,0.5,1}";
  return o;
}

// 5. necessity: when a pairwise condition fails, xi0 is strictly beaten
Outcome criterion5() {
  Outcome o;
  oracle::Uniform u(5150);
  double min_gap = 1e300;
  for (int t = 0; t < 100; ++t) {
    StandardizedParams s;
    s.b_scale = 0.0;
    s.effects.resize(3);
    // failing draws, kept a fixed margin away from the verdict boundary
    // (the log-det gap vanishes continuously as the boundary is approached,
    // so the 1e-8 threshold is only meaningful at a margin)
    for (;;) {
      for (double& e : s.effects) e = u(-1.2, 0.0);
      const ConditionReport rep = check_pairwise_conditions(s);
      double worst = 0.0;
      for (const auto& v : rep.violations) worst = std::max(worst, v.slack);
      if (worst >= 0.03) break;
    }
    const ModelSpec m = standardized_model(s);
    OptimizeOptions opts;
    opts.tol = 1e-8;  // stopping slack well below the asserted gap
    const OptimizeReport r = optimize(m, opts);
    const double gap = r.final_logdet - info_matrix(xi0(3), m).log_det();
    min_gap = std::min(min_gap, gap);
    o.require(gap > 1e-8,
              "log-det gap " + fmt(gap, 12) + " not above 1e-8 at draw " +
                  std::to_string(t));
  }
  o.detail = "100 failing draws, smallest log-det gap " + fmt(min_gap, 6);
  return o;
}

// 6. pairwise conditions imply the exhaustive ones (plus the phi recursion)
Outcome criterion6() {
  Outcome o;
  oracle::Uniform u(606060);
  int nonvacuous = 0;
  for (int t = 0; t < 10000; ++t) {
    const int k = u.integer(3, 8);
    StandardizedParams s;
    s.b_scale = (u.integer(0, 9) < 4) ? 0.0 : u(0.0, 3.0);
    s.effects.resize(k);
    const bool biased = u.integer(0, 9) < 7;
    for (double& e : s.effects) e = biased ? u(-6.0, -0.9) : u(-6.0, 0.0);

    if (!check_pairwise_conditions(s).holds()) continue;
    ++nonvacuous;
    if (!check_exhaustive_conditions(s).holds()) {
      o.require(false, "pairwise conditions held but an exhaustive condition "
                       "failed at draw " + std::to_string(t));
      break;
    }
    // phi recursion: with all pairwise phi_2 <= 0 the sequence is decreasing
    std::vector<double> z;
    z.reserve(k);
    for (double e : s.effects) z.push_back(std::exp(-e));
    for (int m = 2; m < k; ++m) {
      const std::vector<double> head(z.begin(), z.begin() + m);
      const std::vector<double> next(z.begin(), z.begin() + m + 1);
      if (oracle::phi(next, s.b_scale) > oracle::phi(head, s.b_scale) + 1e-9) {
        o.require(false, "phi recursion increased at draw " + std::to_string(t));
        break;
      }
    }
    if (!o.pass) break;
  }
  o.require(nonvacuous >= 500,
            "only " + std::to_string(nonvacuous) + " non-vacuous draws");
  if (o.pass)
    o.detail = "10000 draws, " + std::to_string(nonvacuous) +
               " non-vacuous, zero counterexamples";
  return o;
}

// 7. the full factorial is optimal at indifference for K = 1..8
Outcome criterion7() {
  Outcome o;
  for (int k = 1; k <= 8; ++k) {
    const ModelSpec m =
        ModelSpec::poisson(k, 1.0, 0.0, std::vector<double>(k, 0.0));
    const CertificationReport cert = kw_certify(full_factorial(k), m, 1e-6);
    o.require(cert.optimal, "certificate failed at K=" + std::to_string(k) +
                                " (max " + fmt(cert.max_sensitivity) + ")");
  }
  o.detail = "certificates pass for K = 1..8";
  return o;
}

// 8. exhaustive weight grid (step 0.01) never beats the optimizer at K = 2
Outcome criterion8() {
  Outcome o;
  oracle::Uniform u(808);
  double worst = -1e300;
  for (int t = 0; t < 20; ++t) {
    const double b = (t % 2 == 0) ? 0.0 : u(0.0, 2.0);
    const std::vector<double> eff = {u(-2.5, 0.0), u(-2.5, 0.0)};
    const ModelSpec m = (b == 0.0)
        ? ModelSpec::poisson(2, 1.0, 0.0, eff)
        : ModelSpec::poisson_gamma(2, 1.0 / b, b, 0.0, eff);
    const OptimizeReport r = optimize(m);
    o.require(r.converged, "optimizer must converge at draw " + std::to_string(t));
    const double grid = oracle::best_logdet_grid_k2(
        m.family == Family::poisson,
        m.family == Family::poisson ? m.theta0 : m.a, m.b, m.beta0, eff, 100);
    const double excess = grid - r.final_logdet;
    worst = std::max(worst, excess);
    o.require(excess <= 1e-6, "grid beat the optimizer by " + fmt(excess, 9) +
                                  " at draw " + std::to_string(t));
  }
  o.detail = "20 draws, largest grid excess " + fmt(worst, 9);
  return o;
}

// 9. empirical covariance of the MLE matches (n M)^{-1}
Outcome criterion9() {
  Outcome o;
  const ModelSpec m = ModelSpec::poisson(3, 1.0, 0.0, {-1.0, -1.0, -1.0});
  const SimConfig cfg{round_to_exact(xi0(3), 2000), m, 1000, 90210};
  const CovarianceReport rep = covariance_check(cfg);
  o.require(rep.failures == 0,
            std::to_string(rep.failures) + " replications failed to fit");
  o.require(rep.max_rel_error_diag < 0.15,
            "diagonal relative error " + fmt(rep.max_rel_error_diag) +
                " not below 0.15");
  o.detail = "1000 replications, max diagonal relative error " +
             fmt(rep.max_rel_error_diag, 4);
  return o;
}

// 10. the published values that disagree with direct computation are printed
//     next to the computed ones, flagged
Outcome criterion10() {
  Outcome o;
  const std::string r3 = format_indifference_report(indifference_report(3));
  const std::string r6 = format_indifference_report(indifference_report(6));
  const std::string rv = format_volume_ratio_report(reference_volume_ratio());
  std::printf("%s%s%s", r3.c_str(), r6.c_str(), rv.c_str());

  auto has = [](const std::string& s, const char* needle) {
    return s.find(needle) != std::string::npos;
  };
  o.require(has(r3, "0.7071") && has(r3, "0.5946") && has(r3, "DISCREPANCY"),
            "K=3 report must show 0.7071 and 0.5946 with a discrepancy flag");
  o.require(has(r6, "0.4687") && has(r6, "0.3154") && has(r6, "DISCREPANCY"),
            "K=6 report must show 0.4687 and 0.3154 with a discrepancy flag");
  o.require(has(rv, "2.7") && has(rv, "2.000") && has(rv, "DISCREPANCY"),
            "volume report must show 2.7 and 2.0 with a discrepancy flag");
  o.detail = "published and computed values printed side by side, flagged";
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> fn;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "pairwise-condition threshold 0.414", 0.001, criterion1},
      {2, "xi0 indifference efficiency at K=2", 0.001, criterion2},
      {3, "full-factorial efficiency floor (K+1)/2^K", 5.0, criterion3},
      {4, "optimizer recovers xi0 in the holding region", 10.0, criterion4},
      {5, "necessity: xi0 strictly beaten when conditions fail", 30.0, criterion5},
      {6, "pairwise implies exhaustive (10^4 draws, phi recursion)", 10.0, criterion6},
      {7, "full factorial optimal at indifference, K=1..8", 5.0, criterion7},
      {8, "grid-oracle equivalence at K=2", 60.0, criterion8},
      {9, "simulation calibration against (nM)^{-1}", 120.0, criterion9},
      {10, "documented discrepancies printed with flags", 10.0, criterion10},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o = c.fn();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (secs > c.budget_seconds) {
      o.pass = false;
      o.detail = "runtime " + fmt(secs, 3) + "s exceeds budget " +
                 fmt(c.budget_seconds, 3) + "s";
    }
    std::printf("[%s] %2d. %s (%.1f ms): %s\n", o.pass ? "PASS" : "FAIL", c.id,
                c.name, secs * 1e3, o.pass ? o.detail.c_str() : o.detail.c_str());
    if (!o.pass) ++failures;
  }
  if (failures == 0)
    std::printf("all %zu acceptance criteria pass\n", criteria.size());
  else
    std::printf("%d acceptance criteria FAILED\n", failures);
  return failures;
}
