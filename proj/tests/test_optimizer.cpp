#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rpcm/fisher.hpp"
#include "rpcm/optimality.hpp"
#include "rpcm/optimizer.hpp"

using namespace rpcm;

TEST_CASE("xi0 and full factorial constructors") {
  const Design d3 = xi0(3);
  REQUIRE(d3.support_size() == 4);
  for (const auto& p : d3.points()) {
    CHECK(p.weight == doctest::Approx(0.25));
    CHECK(p.item.ones() <= 1);
  }

  const Design d1 = xi0(1);
  REQUIRE(d1.support_size() == 2);
  CHECK(d1.points()[0].weight == doctest::Approx(0.5));

  CHECK(xi0(2).support_size() == 3);
  CHECK(xi0(2).points()[0].weight == doctest::Approx(1.0 / 3.0));

  const Design ff = full_factorial(3);
  REQUIRE(ff.support_size() == 8);
  for (const auto& p : ff.points()) CHECK(p.weight == 0.125);

  // K = 1: the two designs coincide
  const Design ff1 = full_factorial(1);
  REQUIRE(ff1.support_size() == 2);
  CHECK(ff1.points()[0].item == d1.points()[0].item);
  CHECK(ff1.points()[0].weight == d1.points()[0].weight);

  CHECK_THROWS_AS((void)full_factorial(0), std::invalid_argument);
  CHECK_THROWS_AS((void)full_factorial(17), std::invalid_argument);
}

TEST_CASE("optimizer recovers xi0 deep in the holding region") {
  const ModelSpec m = ModelSpec::poisson(3, 1.0, 0.0, {-2, -2, -2});
  const OptimizeReport rep = optimize(m);
  CHECK(rep.converged);
  CHECK(rep.certification.optimal);
  REQUIRE(rep.design.support_size() == 4);
  for (const auto& p : rep.design.points()) {
    CHECK(p.item.ones() <= 1);
    CHECK(std::fabs(p.weight - 0.25) < 1e-4);
  }
}

TEST_CASE("optimizer keeps the full factorial at indifference") {
  const ModelSpec m = ModelSpec::poisson(3, 1.0, 0.0, {0, 0, 0});
  const OptimizeReport rep = optimize(m);
  CHECK(rep.converged);
  REQUIRE(rep.design.support_size() == 8);
  for (const auto& p : rep.design.points())
    CHECK(std::fabs(p.weight - 0.125) < 1e-4);
}

TEST_CASE("optimizer beats xi0 where the pairwise conditions fail") {
  const ModelSpec m = ModelSpec::poisson(3, 1.0, 0.0, {-0.5, -0.5, -0.5});
  OptimizeOptions opts;
  opts.record_history = true;
  const OptimizeReport rep = optimize(m, opts);
  CHECK(rep.converged);
  CHECK(rep.certification.optimal);
  bool has_two_feature = false;
  for (const auto& p : rep.design.points())
    if (p.item.ones() == 2 && p.weight > 1e-3) has_two_feature = true;
  CHECK(has_two_feature);
  CHECK(rep.final_logdet > info_matrix(xi0(3), m).log_det() + 1e-6);

  // monotone ascent along the recorded trace
  REQUIRE(rep.history.size() > 2);
  for (std::size_t i = 1; i < rep.history.size(); ++i)
    CHECK(rep.history[i].logdet >= rep.history[i - 1].logdet - 1e-9);
  // the trace ends at the certificate tolerance
  CHECK(rep.history.back().max_sensitivity <= 4.0 * (1 + 1e-6));
}

TEST_CASE("certificate soundness at convergence") {
  oracle::Uniform u(83);
  for (int t = 0; t < 10; ++t) {
    const int k = u.integer(2, 4);
    std::vector<double> eff(k);
    for (double& e : eff) e = u(-2.5, 0);
    const ModelSpec m = u.integer(0, 1)
        ? ModelSpec::poisson(k, u(0.5, 2), u(-0.5, 0.5), eff)
        : ModelSpec::poisson_gamma(k, u(0.5, 2), u(0.1, 1.5), u(-0.5, 0.5), eff);
    const OptimizeReport rep = optimize(m);
    REQUIRE(rep.converged);
    const double p = k + 1;
    for (const auto& s : rep.certification.per_support)
      CHECK(std::fabs(s.value - p) <= 10 * 1e-6 * p);
  }
}

TEST_CASE("grid oracle never beats the optimizer at K = 2") {
  oracle::Uniform u(89);
  for (int t = 0; t < 3; ++t) {
    const double b = u(0, 1.5);
    const std::vector<double> eff = {u(-2.5, 0), u(-2.5, 0)};
    const ModelSpec m = b == 0.0
        ? ModelSpec::poisson(2, 1.0, 0.0, eff)
        : ModelSpec::poisson_gamma(2, 1.0 / b, b, 0.0, eff);
    const OptimizeReport rep = optimize(m);
    REQUIRE(rep.converged);
    const double grid_best = oracle::best_logdet_grid_k2(
        m.family == Family::poisson, m.family == Family::poisson ? m.theta0 : m.a,
        m.b, m.beta0, eff, 100);
    CHECK(rep.final_logdet >= grid_best - 1e-6);
  }
}

TEST_CASE("optimizer output is invariant under the information scale") {
  const std::vector<double> eff = {-0.8, -1.6, -0.4};
  const ModelSpec base = ModelSpec::poisson(3, 1.0, 0.0, eff);
  const OptimizeReport r0 = optimize(base);
  REQUIRE(r0.converged);

  const ModelSpec scaled = ModelSpec::poisson(3, 3.7, 1.2, eff);
  const OptimizeReport r1 = optimize(scaled);
  REQUIRE(r1.converged);
  REQUIRE(r1.design.support_size() == r0.design.support_size());
  for (std::size_t i = 0; i < r0.design.support_size(); ++i) {
    CHECK(r1.design.points()[i].item == r0.design.points()[i].item);
    CHECK(std::fabs(r1.design.points()[i].weight - r0.design.points()[i].weight) < 1e-6);
  }

  // Poisson-Gamma with b * exp(beta0) held fixed
  const double b = 0.6, beta0 = 0.9;
  const ModelSpec g0 = ModelSpec::poisson_gamma(3, 1.0, b, 0.0, eff);
  const ModelSpec g1 =
      ModelSpec::poisson_gamma(3, 2.3, b * std::exp(-beta0), beta0, eff);
  const OptimizeReport s0 = optimize(g0);
  const OptimizeReport s1 = optimize(g1);
  REQUIRE(s0.converged);
  REQUIRE(s1.converged);
  REQUIRE(s1.design.support_size() == s0.design.support_size());
  for (std::size_t i = 0; i < s0.design.support_size(); ++i)
    CHECK(std::fabs(s1.design.points()[i].weight - s0.design.points()[i].weight) < 1e-6);
}

TEST_CASE("non-convergence is reported, not thrown") {
  const ModelSpec m = ModelSpec::poisson(3, 1.0, 0.0, {-0.5, -0.5, -0.5});
  OptimizeOptions opts;
  opts.max_iter = 1;
  const OptimizeReport rep = optimize(m, opts);
  CHECK_FALSE(rep.converged);
  CHECK(rep.iterations == 1);
  CHECK(rep.design.support_size() >= 4);  // best design so far is returned
}

TEST_CASE("singular start is rejected") {
  const ModelSpec m = ModelSpec::poisson(3, 1.0, 0.0, {-1, -1, -1});
  OptimizeOptions opts;
  opts.start = Design::approximate({{basic_item(3), 1.0}});
  CHECK_THROWS_AS((void)optimize(m, opts), std::invalid_argument);
}

TEST_CASE("efficient rounding") {
  const Design d8 = round_to_exact(xi0(3), 8);
  CHECK(d8.n() == 8);
  for (const auto& p : d8.points()) CHECK(p.count == 2);

  const Design d10 = round_to_exact(xi0(3), 10);
  CHECK(d10.n() == 10);
  // lexicographic tie-break sends the two extra runs to the first two items
  CHECK(d10.points()[0].item == Item::from_bits({0, 0, 0}));
  CHECK(d10.points()[0].count == 3);
  CHECK(d10.points()[1].count == 3);
  CHECK(d10.points()[2].count == 2);
  CHECK(d10.points()[3].count == 2);

  const Design half = Design::approximate(
      {{Item::from_bits({0}), 0.5}, {Item::from_bits({1}), 0.5}});
  const Design r3 = round_to_exact(half, 3);
  CHECK(r3.points()[0].count == 2);
  CHECK(r3.points()[1].count == 1);

  CHECK_THROWS_AS((void)round_to_exact(xi0(3), 3), std::invalid_argument);
  CHECK_THROWS_AS((void)round_to_exact(d8, 16), std::invalid_argument);
}

TEST_CASE("rounded designs stay efficient") {
  oracle::Uniform u(101);
  for (int t = 0; t < 6; ++t) {
    const int k = u.integer(2, 4);
    std::vector<double> eff(k);
    for (double& e : eff) e = u(-2, 0);
    const ModelSpec m = ModelSpec::poisson(k, 1.0, 0.0, eff);
    const Design approx = optimize(m).design;
    const std::uint64_t n = 20 * (k + 1);
    const Design exact = round_to_exact(approx, n);
    CHECK(exact.n() == n);
    for (const auto& p : exact.points()) CHECK(p.count >= 1);
    CHECK(d_efficiency(exact, approx, m) >= 0.95);
  }
}

TEST_CASE("design comparison table") {
  const ModelSpec m = ModelSpec::poisson(3, 1.0, 0.0, {-2, -2, -2});
  const auto rows = compare_designs(
      {{"xi0", xi0(3)}, {"factorial", full_factorial(3)}}, m);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].efficiency_vs_best == doctest::Approx(1.0));
  CHECK(rows[1].efficiency_vs_best < 1.0);
  CHECK(rows[1].volume_ratio_vs_best > 1.0);

  const auto dup = compare_designs({{"a", xi0(3)}, {"b", xi0(3)}}, m);
  CHECK(dup[0].logdet == dup[1].logdet);
  CHECK(dup[0].efficiency_vs_best == doctest::Approx(1.0));
  CHECK(dup[1].efficiency_vs_best == doctest::Approx(1.0));

  // the two reference 8-run designs under unit weights: determinant ratio 4
  const ModelSpec unit = ModelSpec::poisson(3, 1.0, 0.0, {0, 0, 0});
  const auto ref = compare_designs({{"factorial", reference_design_factorial()},
                                    {"one-feature", reference_design_onefeature()}},
                                   unit);
  CHECK(std::exp(ref[0].logdet - ref[1].logdet) == doctest::Approx(4.0).epsilon(1e-10));

  // singular rows are flagged and excluded from "best"
  const Design single = Design::approximate({{basic_item(3), 1.0}});
  const auto with_singular =
      compare_designs({{"xi0", xi0(3)}, {"single", single}}, m);
  CHECK_FALSE(with_singular[0].singular);
  CHECK(with_singular[1].singular);
  CHECK(with_singular[0].efficiency_vs_best == doctest::Approx(1.0));
}
