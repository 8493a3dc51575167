// rpcm-design: locally D-optimal designs for Poisson / Poisson-Gamma count
// regression with binary predictors.
//
// Exit codes: 0 success; 1 input parse error (malformed JSON, unreadable
// file); 2 invalid input (model/range/argument validation); 3 check ran fine
// but xi0 is not optimal; 4 optimize ran fine but did not converge.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rpcm/design.hpp"
#include "rpcm/fisher.hpp"
#include "rpcm/json_io.hpp"
#include "rpcm/model.hpp"
#include "rpcm/optimality.hpp"
#include "rpcm/optimizer.hpp"
#include "rpcm/simulate.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitNotOptimal = 3;
constexpr int kExitNoConverge = 4;

struct CliError : std::runtime_error {
  int code;
  CliError(int code, const std::string& what) : std::runtime_error(what), code(code) {}
};

// Accepts either inline JSON ("{...}") or a file path.
nlohmann::json load_json_arg(const std::string& arg) {
  std::string text;
  if (!arg.empty() && arg.front() == '{') {
    text = arg;
  } else {
    std::ifstream in(arg);
    if (!in) throw CliError(kExitParse, "cannot read file: " + arg);
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw CliError(kExitParse, std::string("JSON parse error: ") + e.what());
  }
}

rpcm::ModelSpec load_model(const std::string& arg) {
  return rpcm::model_from_json(load_json_arg(arg));
}

// Design argument: preset name, inline JSON, or path.
rpcm::Design load_design(const std::string& arg, const rpcm::ModelSpec& m) {
  if (arg == "xi0") return rpcm::xi0(m.k);
  if (arg == "full-factorial") return rpcm::full_factorial(m.k);
  return rpcm::design_from_json(load_json_arg(arg));
}

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw CliError(kExitInvalid, "cannot write file: " + out_path);
  out << text;
}

std::string fixed6(double v) {
  std::ostringstream os;
  os.precision(6);
  os << std::fixed << v;
  return os.str();
}

std::string describe_model(const rpcm::ModelSpec& m) {
  std::ostringstream os;
  os << "model: "
     << (m.family == rpcm::Family::poisson ? "poisson" : "poisson-gamma")
     << ", K=" << m.k << ", beta0=" << fixed6(m.beta0);
  if (m.family == rpcm::Family::poisson)
    os << ", theta0=" << fixed6(m.theta0);
  else
    os << ", a=" << fixed6(m.a) << ", b=" << fixed6(m.b);
  os << "\nfeature effects (difficulty multiplier exp(-beta_k)):\n";
  for (int j = 0; j < m.k; ++j)
    os << "  feature " << (j + 1) << ": beta=" << fixed6(m.effects[j])
       << "  difficulty x" << fixed6(std::exp(-m.effects[j])) << "\n";
  return os.str();
}

// ---------------------------------------------------------------- check ----

int run_check(const std::string& model_arg, double tol, const std::string& format,
              const std::string& out_path) {
  const rpcm::ModelSpec m = load_model(model_arg);
  const rpcm::StandardizedParams s = m.standardized();
  const rpcm::ConditionReport t1 = rpcm::check_pairwise_conditions(s);
  const rpcm::ConditionReport l1 = rpcm::check_exhaustive_conditions(s);
  const rpcm::CertificationReport cert = rpcm::kw_certify(rpcm::xi0(m.k), m, tol);

  std::ostringstream os;
  if (format == "json") {
    nlohmann::json j;
    j["model"] = rpcm::model_to_json(m);
    j["pairwise_conditions"] = rpcm::condition_report_to_json(t1);
    j["exhaustive_conditions"] = rpcm::condition_report_to_json(l1);
    j["certificate"] = rpcm::certification_report_to_json(cert);
    j["xi0_optimal"] = cert.optimal;
    os << j.dump(2) << "\n";
  } else {
    os << describe_model(m);
    os << "pairwise conditions q0 + qj + qk <= qjk: "
       << (t1.holds() ? "HOLD" : "VIOLATED") << " (" << t1.checked_count
       << " pairs checked)\n";
    for (const auto& v : t1.violations) {
      const auto& [j, k] = std::get<std::pair<int, int>>(v.witness);
      os << "  violated for pair (" << (j + 1) << "," << (k + 1)
         << "): slack = " << fixed6(v.slack) << "\n";
    }
    os << "exhaustive conditions over |x| >= 2: "
       << (l1.holds() ? "HOLD" : "VIOLATED") << " (" << l1.checked_count
       << " settings checked)\n";
    for (const auto& v : l1.violations)
      os << "  violated at item " << std::get<rpcm::Item>(v.witness).to_string()
         << ": slack = " << fixed6(v.slack) << "\n";
    os << "equivalence-theorem certificate for xi0 (tol " << tol << "):\n"
       << "  max sensitivity " << fixed6(cert.max_sensitivity) << " at item "
       << cert.worst_item.to_string() << ", threshold "
       << fixed6(cert.threshold) << "\n";
    for (const auto& ps : cert.per_support)
      os << "  support " << ps.item.to_string() << ": d = " << fixed6(ps.value)
         << "\n";
    os << (cert.optimal ? "xi0 OPTIMAL\n" : "xi0 NOT optimal\n");
  }
  write_output(os.str(), out_path);
  return cert.optimal ? kExitOk : kExitNotOptimal;
}

// ------------------------------------------------------------- boundary ----

int run_boundary(const std::string& b_list, const std::string& v_list,
                 const std::string& v_range, double step,
                 const std::string& out_path) {
  std::vector<double> bs;
  for (const auto& tok : CLI::detail::split(b_list, ','))
    bs.push_back(std::stod(tok));
  for (double b : bs)
    if (!(b >= 0.0)) throw CliError(kExitInvalid, "b values must be >= 0");

  std::vector<double> vs;
  if (!v_list.empty()) {
    for (const auto& tok : CLI::detail::split(v_list, ','))
      vs.push_back(std::stod(tok));
  } else if (!v_range.empty()) {
    const auto colon = v_range.find(':');
    if (colon == std::string::npos)
      throw CliError(kExitInvalid, "--v-range must be lo:hi");
    const double lo = std::stod(v_range.substr(0, colon));
    const double hi = std::stod(v_range.substr(colon + 1));
    if (!(step > 0.0) || !(hi >= lo))
      throw CliError(kExitInvalid, "invalid --v-range/--step");
    for (double v = lo; v <= hi + 1e-12; v += step) vs.push_back(v);
  } else {
    throw CliError(kExitInvalid, "one of --v or --v-range is required");
  }
  for (double v : vs)
    if (!(v > 1.0))
      throw CliError(kExitInvalid, "difficulty values v must be > 1");

  std::ostringstream os;
  os << "b,v,u_min\n";
  os.precision(12);
  for (double b : bs)
    for (const auto& pt : rpcm::boundary_curve(b, vs))
      os << b << ',' << pt.v << ',' << pt.u_min << '\n';
  write_output(os.str(), out_path);
  return kExitOk;
}

// ------------------------------------------------------------- optimize ----

int run_optimize(const std::string& model_arg, long max_iter, double tol,
                 double prune, const std::string& start_arg,
                 const std::string& history_path, const std::string& design_out,
                 const std::string& info_csv, const std::string& format,
                 const std::string& out_path) {
  const rpcm::ModelSpec m = load_model(model_arg);
  rpcm::OptimizeOptions opts;
  opts.max_iter = max_iter;
  opts.tol = tol;
  opts.prune_threshold = prune;
  opts.record_history = !history_path.empty();
  if (!start_arg.empty()) opts.start = load_design(start_arg, m);

  const rpcm::OptimizeReport rep = rpcm::optimize(m, opts);

  if (!history_path.empty())
    write_output(rpcm::history_csv(rep.history), history_path);
  if (!design_out.empty())
    write_output(rpcm::design_to_json(rep.design).dump(2) + "\n", design_out);
  if (!info_csv.empty())
    write_output(rpcm::matrix_csv(rpcm::info_matrix(rep.design, m).entries()),
                 info_csv);

  std::ostringstream os;
  if (format == "json") {
    os << rpcm::optimize_report_to_json(rep).dump(2) << "\n";
  } else {
    os << describe_model(m);
    os << (rep.converged ? "converged" : "NOT converged") << " after "
       << rep.iterations << " updates, log det M = " << fixed6(rep.final_logdet)
       << "\n"
       << "max sensitivity " << fixed6(rep.certification.max_sensitivity)
       << " (threshold " << fixed6(rep.certification.threshold) << ")\n"
       << "support:\n";
    for (const auto& pt : rep.design.points())
      os << "  " << pt.item.to_string() << "  w = " << fixed6(pt.weight) << "\n";
  }
  write_output(os.str(), out_path);
  return rep.converged ? kExitOk : kExitNoConverge;
}

// ----------------------------------------------------------- efficiency ----

int run_efficiency(const std::string& model_arg, const std::string& design_arg,
                   const std::string& ref_arg, bool ref_optimal,
                   bool indifference, int k_flag, const std::string& format,
                   const std::string& out_path) {
  std::ostringstream os;
  if (indifference) {
    int k = k_flag;
    if (k <= 0 && !model_arg.empty()) k = load_model(model_arg).k;
    if (k <= 0)
      throw CliError(kExitInvalid, "--indifference needs --k or --model");
    const rpcm::IndifferenceReport rep = rpcm::indifference_report(k);
    if (format == "json") {
      nlohmann::json j{{"k", rep.k},
                       {"numeric", rep.numeric},
                       {"published_closed_form", rep.published_closed_form},
                       {"agree", rep.agree}};
      os << j.dump(2) << "\n";
    } else {
      os << rpcm::format_indifference_report(rep);
    }
    write_output(os.str(), out_path);
    return kExitOk;
  }

  if (model_arg.empty() || design_arg.empty())
    throw CliError(kExitInvalid, "--model and --design are required");
  const rpcm::ModelSpec m = load_model(model_arg);
  const rpcm::Design d = load_design(design_arg, m);
  const rpcm::Design ref = [&]() {
    if (ref_optimal) return rpcm::optimize(m).design;
    if (ref_arg.empty())
      throw CliError(kExitInvalid, "--ref or --ref-optimal required");
    return load_design(ref_arg, m);
  }();
  const double eff = rpcm::d_efficiency(d, ref, m, &std::cerr);
  if (format == "json") {
    nlohmann::json j{{"efficiency", eff}};
    os << j.dump(2) << "\n";
  } else {
    os << "D-efficiency: " << fixed6(eff) << "\n";
  }
  write_output(os.str(), out_path);
  return kExitOk;
}

// ---------------------------------------------------------------- round ----

int run_round(const std::string& design_arg, std::int64_t n,
              const std::string& out_path) {
  if (n < 1) throw CliError(kExitInvalid, "--n must be positive");
  const rpcm::Design d = rpcm::design_from_json(load_json_arg(design_arg));
  const rpcm::Design exact = rpcm::round_to_exact(d, static_cast<std::uint64_t>(n));
  write_output(rpcm::design_to_json(exact).dump(2) + "\n", out_path);
  return kExitOk;
}

// ------------------------------------------------------------- simulate ----

int run_simulate(const std::string& config_arg, std::optional<std::uint64_t> seed,
                 std::optional<int> replications, const std::string& betahat_csv,
                 const std::string& out_path) {
  const nlohmann::json cj = load_json_arg(config_arg);
  rpcm::SimConfig cfg = rpcm::sim_config_from_json(cj);
  if (seed) cfg.seed = *seed;                    // flags override the file
  if (replications) cfg.replications = *replications;
  cfg.validate();

  nlohmann::json j;
  std::vector<Eigen::VectorXd> beta_hats;
  if (cfg.replications >= 500) {
    const rpcm::CovarianceReport rep = rpcm::covariance_check(cfg);
    j = rpcm::covariance_report_to_json(rep);
    beta_hats = rep.beta_hats;
  } else {
    const rpcm::FamilyParams fam = rpcm::FamilyParams::of(cfg.model);
    nlohmann::json fits = nlohmann::json::array();
    for (int r = 0; r < cfg.replications; ++r) {
      const rpcm::SampleSet data =
          rpcm::sample_responses(cfg, static_cast<std::uint64_t>(r));
      const rpcm::FitResult fit = rpcm::fit_mle(data, cfg.design, fam);
      nlohmann::json fj;
      fj["replication"] = r;
      fj["converged"] = fit.converged;
      fj["degenerate"] = fit.degenerate;
      fj["iterations"] = fit.iterations;
      fj["log_lik"] = fit.log_lik;
      fj["beta_hat"] = std::vector<double>(fit.beta_hat.data(),
                                           fit.beta_hat.data() + fit.beta_hat.size());
      if (!fit.message.empty()) fj["message"] = fit.message;
      fits.push_back(std::move(fj));
      if (fit.converged) beta_hats.push_back(fit.beta_hat);
    }
    j["replications"] = cfg.replications;
    j["fits"] = std::move(fits);
  }
  j["seed"] = cfg.seed;

  if (!betahat_csv.empty()) {
    std::ostringstream cs;
    cs.precision(17);
    cs << "replication";
    const int p = cfg.model.p();
    for (int c = 0; c < p; ++c) cs << ",beta" << c;
    cs << "\n";
    for (std::size_t r = 0; r < beta_hats.size(); ++r) {
      cs << r;
      for (int c = 0; c < p; ++c) cs << ',' << beta_hats[r](c);
      cs << "\n";
    }
    write_output(cs.str(), betahat_csv);
  }
  write_output(j.dump(2) + "\n", out_path);
  return kExitOk;
}

// -------------------------------------------------------------- compare ----

int run_compare(const std::string& model_arg,
                const std::vector<std::string>& design_args, bool reference,
                const std::string& format, const std::string& out_path) {
  std::ostringstream os;
  if (reference) {
    const rpcm::VolumeRatioReport rep = rpcm::reference_volume_ratio();
    if (format == "json") {
      nlohmann::json j{{"det_ratio", rep.det_ratio},
                       {"volume_ratio", rep.volume_ratio},
                       {"published", rep.published},
                       {"agree", rep.agree}};
      os << j.dump(2) << "\n";
    } else {
      os << rpcm::format_volume_ratio_report(rep);
    }
    write_output(os.str(), out_path);
    return kExitOk;
  }

  if (model_arg.empty() || design_args.size() < 2)
    throw CliError(kExitInvalid, "--model and at least two --design are required");
  const rpcm::ModelSpec m = load_model(model_arg);
  std::vector<std::pair<std::string, rpcm::Design>> ds;
  for (const auto& arg : design_args) ds.emplace_back(arg, load_design(arg, m));
  const auto rows = rpcm::compare_designs(ds, m);

  if (format == "json") {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : rows)
      j.push_back({{"id", r.id},
                   {"singular", r.singular},
                   {"logdet", r.singular ? nlohmann::json() : nlohmann::json(r.logdet)},
                   {"efficiency_vs_best", r.efficiency_vs_best},
                   {"volume_ratio_vs_best", r.volume_ratio_vs_best}});
    os << j.dump(2) << "\n";
  } else if (format == "csv") {
    os << "id,logdet,efficiency_vs_best,volume_ratio_vs_best,singular\n";
    os.precision(12);
    for (const auto& r : rows)
      os << r.id << ',' << r.logdet << ',' << r.efficiency_vs_best << ','
         << r.volume_ratio_vs_best << ',' << (r.singular ? 1 : 0) << '\n';
  } else {
    os << "design  logdet  efficiency-vs-best  volume-ratio-vs-best\n";
    for (const auto& r : rows) {
      if (r.singular) {
        os << r.id << "  SINGULAR\n";
      } else {
        os << r.id << "  " << fixed6(r.logdet) << "  "
           << fixed6(r.efficiency_vs_best) << "  "
           << fixed6(r.volume_ratio_vs_best) << "\n";
      }
    }
  }
  write_output(os.str(), out_path);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"locally D-optimal designs for Poisson / Poisson-Gamma count regression"};
  app.require_subcommand(1);

  std::string model_arg, design_arg, ref_arg, start_arg, config_arg;
  std::string out_path, format = "human", history_path, design_out, betahat_csv;
  std::string info_csv;
  std::string b_list = "0", v_list, v_range;
  std::vector<std::string> design_args;
  double tol = rpcm::kDefaultKwTol, prune = 1e-8, step = 0.05;
  long max_iter = 100000;
  std::int64_t n_round = 0;
  int k_flag = 0;
  bool ref_optimal = false, indifference = false, reference = false;
  std::optional<std::uint64_t> seed;
  std::optional<int> replications;

  auto add_common = [&](CLI::App* sub, std::vector<std::string> formats) {
    sub->add_option("--out", out_path, "output file (default: stdout)");
    std::string help = "output format:";
    for (const auto& f : formats) help += " " + f;
    sub->add_option("--format", format, help)
        ->check(CLI::IsMember(std::move(formats)));
  };

  auto* check = app.add_subcommand(
      "check", "closed-form conditions and certificate for xi0");
  check->add_option("--model", model_arg, "model JSON (path or inline)")->required();
  check->add_option("--tol", tol, "certificate tolerance");
  add_common(check, {"human", "json"});

  auto* boundary = app.add_subcommand(
      "boundary", "pairwise-condition boundary curves in difficulty coordinates");
  boundary->add_option("--b", b_list, "comma-separated overdispersion scales");
  boundary->add_option("--v", v_list, "comma-separated difficulty values (> 1)");
  boundary->add_option("--v-range", v_range, "lo:hi difficulty range (lo > 1)");
  boundary->add_option("--step", step, "grid step for --v-range");
  boundary->add_option("--out", out_path, "output file (default: stdout)");

  auto* optimize = app.add_subcommand("optimize", "multiplicative-algorithm D-optimal design");
  optimize->add_option("--model", model_arg, "model JSON (path or inline)")->required();
  optimize->add_option("--max-iter", max_iter, "iteration cap");
  optimize->add_option("--tol", tol, "certificate tolerance");
  optimize->add_option("--prune", prune, "weight pruning threshold");
  optimize->add_option("--start", start_arg, "starting design (path/inline/xi0/full-factorial)");
  optimize->add_option("--history", history_path, "iteration trace CSV path");
  optimize->add_option("--design-out", design_out, "write the design JSON here");
  optimize->add_option("--info-csv", info_csv,
                       "write the final information matrix as CSV here");
  add_common(optimize, {"human", "json"});

  auto* efficiency = app.add_subcommand("efficiency", "D-efficiency of one design against another");
  efficiency->add_option("--model", model_arg, "model JSON (path or inline)");
  efficiency->add_option("--design", design_arg, "design (path/inline/xi0/full-factorial)");
  efficiency->add_option("--ref", ref_arg, "reference design (path/inline/xi0/full-factorial)");
  efficiency->add_flag("--ref-optimal", ref_optimal, "optimize the reference design");
  efficiency->add_flag("--indifference", indifference,
                       "report xi0's indifference efficiency (computed and published)");
  efficiency->add_option("--k", k_flag, "number of features for --indifference");
  add_common(efficiency, {"human", "json"});

  auto* round = app.add_subcommand("round", "efficient apportionment into n runs");
  round->add_option("--design", design_arg, "approximate design (path or inline)")->required();
  round->add_option("--n", n_round, "total number of runs")->required();
  round->add_option("--out", out_path, "output file (default: stdout)");

  auto* simulate = app.add_subcommand("simulate", "sample, fit, and calibrate covariance");
  simulate->add_option("--config", config_arg, "SimConfig JSON (path or inline)")->required();
  simulate->add_option("--seed", seed, "override the config seed");
  simulate->add_option("--replications", replications, "override the config replications");
  simulate->add_option("--betahat-csv", betahat_csv, "per-replication estimates CSV");
  simulate->add_option("--out", out_path, "output file (default: stdout)");

  auto* compare = app.add_subcommand("compare", "rank designs by log det M");
  compare->add_option("--model", model_arg, "model JSON (path or inline)");
  compare->add_option("--design", design_args, "designs (repeatable)");
  compare->add_flag("--reference", reference,
                    "compare the two classic 8-run three-factor designs under unit weights");
  add_common(compare, {"human", "json", "csv"});

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }

  try {
    if (check->parsed())
      return run_check(model_arg, tol, format, out_path);
    if (boundary->parsed())
      return run_boundary(b_list, v_list, v_range, step, out_path);
    if (optimize->parsed())
      return run_optimize(model_arg, max_iter, tol, prune, start_arg,
                          history_path, design_out, info_csv, format, out_path);
    if (efficiency->parsed())
      return run_efficiency(model_arg, design_arg, ref_arg, ref_optimal,
                            indifference, k_flag, format, out_path);
    if (round->parsed()) return run_round(design_arg, n_round, out_path);
    if (simulate->parsed())
      return run_simulate(config_arg, seed, replications, betahat_csv, out_path);
    if (compare->parsed())
      return run_compare(model_arg, design_args, reference, format, out_path);
    return kExitInvalid;
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  }
}
