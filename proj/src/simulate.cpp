#include "rpcm/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "rpcm/fisher.hpp"
#include "rpcm/rng.hpp"

namespace rpcm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double linear_predictor(const Item& x, double beta0,
                        const std::vector<double>& effects) {
  double eta = beta0;
  for (int j = 0; j < x.k(); ++j)
    if (x.feature(j)) eta += effects[j];
  return eta;
}
}  // namespace

void SimConfig::validate() const {
  model.validate();
  if (design.kind() != DesignKind::exact)
    throw std::invalid_argument("SimConfig: design must be exact");
  if (design.k() != model.k)
    throw std::invalid_argument("SimConfig: design and model K differ");
  if (design.n() < 5ull * static_cast<std::uint64_t>(model.p()))
    throw std::invalid_argument("SimConfig: total n must be at least 5 (K+1)");
  if (replications < 1)
    throw std::invalid_argument("SimConfig: replications must be >= 1");
}

SampleSet sample_responses(const SimConfig& cfg, std::uint64_t replication) {
  cfg.validate();
  rng::Xoshiro256StarStar eng = rng::Xoshiro256StarStar::stream(cfg.seed, replication);

  SampleSet out;
  out.items.reserve(cfg.design.support_size());
  out.counts.reserve(cfg.design.support_size());

  std::gamma_distribution<double> ability(cfg.model.a, cfg.model.b);
  for (const auto& pt : cfg.design.points()) {
    const double sigma =
        std::exp(linear_predictor(pt.item, cfg.model.beta0, cfg.model.effects));
    std::vector<std::uint32_t> ys;
    ys.reserve(pt.count);
    if (cfg.model.family == Family::poisson) {
      const double mu = cfg.model.theta0 * sigma;
      if (!(mu < 1e8))
        throw std::domain_error("sample_responses: mean response too large");
      std::poisson_distribution<long> dist(mu);
      for (std::uint64_t i = 0; i < pt.count; ++i)
        ys.push_back(static_cast<std::uint32_t>(dist(eng)));
    } else {
      for (std::uint64_t i = 0; i < pt.count; ++i) {
        const double mu = ability(eng) * sigma;
        if (!(mu < 1e8))
          throw std::domain_error("sample_responses: mean response too large");
        std::poisson_distribution<long> dist(mu);
        ys.push_back(static_cast<std::uint32_t>(dist(eng)));
      }
    }
    out.items.push_back(pt.item);
    out.counts.push_back(std::move(ys));
  }
  return out;
}

namespace {

struct Aggregate {
  Eigen::MatrixXd f;          // s x p design rows
  Eigen::VectorXd totals;     // S_i
  Eigen::VectorXd n_per;      // N_i
  double const_term;          // beta-free part of the log likelihood
  bool any_zero_point;
  bool all_zero;
};

Aggregate aggregate(const SampleSet& data, const Design& design,
                    const FamilyParams& fam) {
  const std::size_t s = design.support_size();
  if (data.items.size() != s || data.counts.size() != s)
    throw std::invalid_argument("fit_mle: data does not match the design support");
  const int p = design.k() + 1;
  Aggregate ag{Eigen::MatrixXd(s, p), Eigen::VectorXd(s), Eigen::VectorXd(s),
               0.0, false, true};
  for (std::size_t i = 0; i < s; ++i) {
    const auto& pt = design.points()[i];
    if (!(data.items[i] == pt.item) ||
        data.counts[i].size() != static_cast<std::size_t>(pt.count))
      throw std::invalid_argument("fit_mle: data does not match the design support");
    ag.f.row(i) = regression_vector(pt.item).transpose();
    double total = 0.0;
    for (std::uint32_t y : data.counts[i]) {
      total += y;
      if (fam.family == Family::poisson) {
        ag.const_term -= std::lgamma(y + 1.0);
      } else {
        ag.const_term += std::lgamma(fam.a + y) - std::lgamma(fam.a) -
                         std::lgamma(y + 1.0);
      }
    }
    ag.totals(i) = total;
    ag.n_per(i) = static_cast<double>(pt.count);
    if (total == 0.0) ag.any_zero_point = true;
    ag.all_zero &= (total == 0.0);
  }
  return ag;
}

double log_lik(const Aggregate& ag, const FamilyParams& fam,
               const Eigen::VectorXd& beta) {
  const Eigen::VectorXd eta = ag.f * beta;
  double ll = ag.const_term;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    if (fam.family == Family::poisson) {
      ll += ag.totals(i) * (std::log(fam.theta0) + eta(i)) -
            ag.n_per(i) * fam.theta0 * std::exp(eta(i));
    } else {
      ll += ag.totals(i) * (std::log(fam.b) + eta(i)) -
            (ag.totals(i) + ag.n_per(i) * fam.a) *
                std::log1p(fam.b * std::exp(eta(i)));
    }
  }
  return ll;
}

// score vector and expected-information weights at beta
void score_and_weights(const Aggregate& ag, const FamilyParams& fam,
                       const Eigen::VectorXd& beta, Eigen::VectorXd& score,
                       Eigen::VectorXd& wdiag) {
  const Eigen::VectorXd eta = ag.f * beta;
  const Eigen::Index s = eta.size();
  Eigen::VectorXd resid(s);
  wdiag.resize(s);
  for (Eigen::Index i = 0; i < s; ++i) {
    if (fam.family == Family::poisson) {
      const double mu = fam.theta0 * std::exp(eta(i));
      resid(i) = ag.totals(i) - ag.n_per(i) * mu;
      wdiag(i) = ag.n_per(i) * mu;
    } else {
      const double bs = fam.b * std::exp(eta(i));
      const double t = bs / (1.0 + bs);
      resid(i) = ag.totals(i) - (ag.totals(i) + ag.n_per(i) * fam.a) * t;
      wdiag(i) = ag.n_per(i) * fam.a * t;
    }
  }
  score = ag.f.transpose() * resid;
}

FitResult run_scoring(const Aggregate& ag, const FamilyParams& fam,
                      Eigen::VectorXd beta, const FitOptions& opts) {
  FitResult res;
  res.degenerate = ag.any_zero_point;
  if (ag.any_zero_point)
    res.message = "zero count total at one or more support points";

  double ll = log_lik(ag, fam, beta);
  Eigen::VectorXd score, wdiag;
  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    score_and_weights(ag, fam, beta, score, wdiag);
    if (score.lpNorm<Eigen::Infinity>() < opts.score_tol) {
      res.converged = true;
      break;
    }
    const Eigen::MatrixXd h =
        ag.f.transpose() * wdiag.asDiagonal() * ag.f;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
    if (ldlt.info() != Eigen::Success) {
      res.message = "expected information not factorizable at iterate";
      break;
    }
    const Eigen::VectorXd step = ldlt.solve(score);
    if (!step.allFinite()) {
      res.message = "singular expected information at iterate";
      break;
    }
    // step halving keeps the likelihood ascent monotone
    double lam = 1.0;
    bool accepted = false;
    for (int h2 = 0; h2 < 40; ++h2, lam *= 0.5) {
      const Eigen::VectorXd cand = beta + lam * step;
      const double llc = log_lik(ag, fam, cand);
      if (std::isfinite(llc) && llc >= ll - 1e-12) {
        beta = cand;
        ll = llc;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      res.message = "no ascent step found";
      break;
    }
  }
  res.beta_hat = std::move(beta);
  res.iterations = iter;
  res.log_lik = ll;
  return res;
}

}  // namespace

FitResult fit_mle(const SampleSet& data, const Design& design,
                  const FamilyParams& family, const FitOptions& opts) {
  if (design.kind() != DesignKind::exact)
    throw std::invalid_argument("fit_mle: design must be exact");
  if (family.family == Family::poisson ? !(family.theta0 > 0.0)
                                       : !(family.a > 0.0 && family.b > 0.0))
    throw std::invalid_argument("fit_mle: invalid family parameters");
  const Aggregate ag = aggregate(data, design, family);
  const int p = design.k() + 1;

  if (ag.all_zero) {
    FitResult res;
    res.beta_hat = Eigen::VectorXd::Zero(p);
    res.degenerate = true;
    res.message = "all counts are zero: likelihood has no interior maximum";
    return res;
  }

  Eigen::VectorXd start = opts.start.value_or(Eigen::VectorXd::Zero(p));
  if (start.size() != p)
    throw std::invalid_argument("fit_mle: start vector has wrong length");
  FitResult res = run_scoring(ag, family, start, opts);
  if (!res.converged && !opts.start.has_value()) {
    // one retry from a moment-matched intercept
    const double ybar =
        std::max(ag.totals.sum() / ag.n_per.sum(), 0.5 / ag.n_per.sum());
    Eigen::VectorXd retry = Eigen::VectorXd::Zero(p);
    retry(0) = std::log(ybar / family.mean_ability());
    FitResult second = run_scoring(ag, family, retry, opts);
    if (second.converged || second.log_lik > res.log_lik) return second;
  }
  return res;
}

CovarianceReport covariance_check(const SimConfig& cfg, kernels::Exec exec) {
  cfg.validate();
  if (cfg.replications < 500)
    throw std::invalid_argument("covariance_check: replications must be >= 500");

  const InfoMatrix info = info_matrix(cfg.design, cfg.model);
  if (info.singular())
    throw std::domain_error("covariance_check: singular design information");
  const int p = cfg.model.p();
  const int reps = cfg.replications;
  const FamilyParams fam = FamilyParams::of(cfg.model);

  Eigen::MatrixXd draws(reps, p);
  std::vector<char> ok(reps, 0);

  const bool parallel = (exec == kernels::Exec::parallel);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
  for (int r = 0; r < reps; ++r) {
    const SampleSet data = sample_responses(cfg, static_cast<std::uint64_t>(r));
    const FitResult fit = fit_mle(data, cfg.design, fam);
    // degenerate replications (zero totals at a support point) have no
    // finite MLE; counting their runaway estimates would corrupt the
    // empirical covariance, so they are failures
    if (fit.converged && !fit.degenerate) {
      draws.row(r) = fit.beta_hat.transpose();
      ok[r] = 1;
    }
  }
  (void)parallel;

  CovarianceReport rep;
  rep.replications = reps;
  for (int r = 0; r < reps; ++r)
    if (!ok[r]) ++rep.failures;
  const int good = reps - rep.failures;
  if (good < 2)
    throw std::domain_error("covariance_check: fewer than two successful fits");

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(p);
  for (int r = 0; r < reps; ++r)
    if (ok[r]) mean += draws.row(r).transpose();
  mean /= good;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(p, p);
  for (int r = 0; r < reps; ++r) {
    if (!ok[r]) continue;
    const Eigen::VectorXd c = draws.row(r).transpose() - mean;
    cov += c * c.transpose();
  }
  cov /= (good - 1);

  rep.empirical = std::move(cov);
  rep.predicted = info.inverse() / static_cast<double>(cfg.design.n());
  rep.max_rel_error_diag = 0.0;
  for (int i = 0; i < p; ++i) {
    const double relerr =
        std::fabs(rep.empirical(i, i) - rep.predicted(i, i)) / rep.predicted(i, i);
    rep.max_rel_error_diag = std::max(rep.max_rel_error_diag, relerr);
  }
  rep.beta_hats.reserve(good);
  for (int r = 0; r < reps; ++r)
    if (ok[r]) rep.beta_hats.push_back(draws.row(r).transpose());
  return rep;
}

}  // namespace rpcm
