#include "rpcm/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "rpcm/fisher.hpp"

namespace rpcm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Renormalize in place; extended-precision accumulation keeps the sum within
// the Design validation tolerance even for 2^16 support points.
void normalize(std::vector<double>& w) {
  long double sum = 0.0L;
  for (double x : w) sum += x;
  if (!(sum > 0.0L)) throw std::domain_error("optimize: all weights vanished");
  for (double& x : w) x = static_cast<double>(x / sum);
}

Design design_from_weights(const std::vector<double>& w, int k) {
  std::vector<std::pair<Item, double>> pts;
  for (std::uint32_t r = 0; r < w.size(); ++r)
    if (w[r] > 0.0) pts.emplace_back(Item(k, r), w[r]);
  return Design::approximate(std::move(pts));
}
}  // namespace

OptimizeReport optimize(const ModelSpec& m, const OptimizeOptions& opts) {
  m.validate();
  if (m.k > kMaxFeatures)
    throw std::invalid_argument("optimize: K must be <= 16");
  if (!(opts.tol > 0.0) || !(opts.prune_threshold >= 0.0) || opts.max_iter < 1)
    throw std::invalid_argument("optimize: invalid options");

  const int p = m.p();
  const std::size_t nverts = std::size_t{1} << m.k;
  const WeightForm q = weight_form(m);

  std::vector<double> w(nverts, 0.0);
  if (opts.start.has_value()) {
    const Design& start = *opts.start;
    if (start.k() != m.k)
      throw std::invalid_argument("optimize: start design K does not match model");
    for (const auto& pt : start.points()) w[pt.item.rank()] = pt.weight;
    if (InfoMatrix(info_from_weights(w, q)).singular())
      throw std::invalid_argument("optimize: singular starting design");
  } else {
    w.assign(nverts, 1.0 / static_cast<double>(nverts));
  }

  std::vector<HistoryEntry> history;
  long updates = 0;
  bool converged = false;
  for (long iter = 0; iter < opts.max_iter; ++iter) {
    const InfoMatrix info(info_from_weights(w, q));
    if (info.singular())
      throw std::domain_error("optimize: information matrix became singular");
    const std::vector<double> d =
        kernels::sensitivity_all(info.inverse(), q, opts.exec);

    double maxd = -kInf;
    std::size_t argmax = 0;
    for (std::size_t r = 0; r < nverts; ++r) {
      if (d[r] > maxd) {
        maxd = d[r];
        argmax = r;
      }
    }
    if (opts.record_history)
      history.push_back({iter, info.log_det(), maxd});

    if (maxd <= p * (1.0 + opts.tol)) {
      // Clear support points whose sensitivity sits clearly below p: zeroing
      // such a point and renormalizing strictly increases det M (matrix
      // determinant lemma), so they cannot belong to the optimal support at
      // this tolerance. Iterate on: the scan must pass again afterwards.
      bool removed = false;
      for (std::size_t r = 0; r < nverts; ++r) {
        if (w[r] > 0.0 && d[r] < p * (1.0 - 10.0 * opts.tol)) {
          w[r] = 0.0;
          removed = true;
        }
      }
      if (!removed) {
        converged = true;
        break;
      }
      normalize(w);
      ++updates;
      continue;
    }

    if (w[argmax] == 0.0) {
      // The scan's worst vertex was pruned earlier but is needed after all
      // (multiplicative updates cannot revive a zero weight). Reinstate it
      // with the exchange step that maximizes det along (1-a) xi + a delta_x;
      // strictly monotone since d > p there.
      const double alpha = (maxd / p - 1.0) / (maxd - 1.0);
      for (double& x : w) x *= (1.0 - alpha);
      w[argmax] = alpha;
      normalize(w);
      ++updates;
      continue;
    }

    for (std::size_t r = 0; r < nverts; ++r)
      if (w[r] > 0.0) w[r] *= d[r] / p;
    normalize(w);
    if (opts.prune_threshold > 0.0) {
      for (double& x : w)
        if (x < opts.prune_threshold) x = 0.0;
      normalize(w);
    }
    ++updates;
  }

  Design out = design_from_weights(w, m.k);
  CertificationReport cert = kw_certify(out, m, opts.tol, opts.exec);
  const double logdet = info_matrix(out, m).log_det();
  const bool certified = converged && cert.optimal;
  return OptimizeReport{std::move(out), updates,  logdet,
                        std::move(cert), certified, std::move(history)};
}

Design round_to_exact(const Design& d, std::uint64_t n) {
  if (d.kind() != DesignKind::approximate)
    throw std::invalid_argument("round_to_exact: design must be approximate");

  struct Entry {
    Item item;
    double weight;
    std::uint64_t count;
  };
  std::vector<Entry> sup;
  for (const auto& pt : d.points())
    if (pt.weight > 0.0) sup.push_back({pt.item, pt.weight, 0});
  const std::size_t s = sup.size();
  if (n < s)
    throw std::invalid_argument("round_to_exact: n must be at least the support size");

  std::uint64_t total = 0;
  for (auto& e : sup) {
    e.count = static_cast<std::uint64_t>(
        std::ceil((static_cast<double>(n) - 0.5 * static_cast<double>(s)) * e.weight));
    total += e.count;
  }

  // ties: larger weight first, then lexicographic item order
  auto tie_before = [](const Entry& a, const Entry& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.item < b.item;
  };
  while (total < n) {
    std::size_t pick = 0;
    for (std::size_t i = 1; i < s; ++i) {
      const double ri = static_cast<double>(sup[i].count) / sup[i].weight;
      const double rp = static_cast<double>(sup[pick].count) / sup[pick].weight;
      if (ri < rp || (ri == rp && tie_before(sup[i], sup[pick]))) pick = i;
    }
    ++sup[pick].count;
    ++total;
  }
  while (total > n) {
    std::size_t pick = 0;
    for (std::size_t i = 1; i < s; ++i) {
      if (sup[i].count <= 1) continue;
      if (sup[pick].count <= 1) { pick = i; continue; }
      const double ri = static_cast<double>(sup[i].count - 1) / sup[i].weight;
      const double rp = static_cast<double>(sup[pick].count - 1) / sup[pick].weight;
      if (ri > rp || (ri == rp && tie_before(sup[i], sup[pick]))) pick = i;
    }
    --sup[pick].count;
    --total;
  }

  std::vector<std::pair<Item, std::uint64_t>> pts;
  pts.reserve(s);
  for (const auto& e : sup) pts.emplace_back(e.item, e.count);
  return Design::exact(std::move(pts));
}

std::vector<ComparisonRow> compare_designs(
    const std::vector<std::pair<std::string, Design>>& designs,
    const ModelSpec& m) {
  std::vector<ComparisonRow> rows;
  rows.reserve(designs.size());
  double best = -kInf;
  for (const auto& [id, d] : designs) {
    ComparisonRow row;
    row.id = id;
    const InfoMatrix info = info_matrix(d, m);
    row.singular = info.singular();
    row.logdet = info.log_det();
    if (!row.singular) best = std::max(best, row.logdet);
    rows.push_back(std::move(row));
  }
  for (auto& row : rows) {
    if (row.singular || best == -kInf) {
      row.efficiency_vs_best = 0.0;
      row.volume_ratio_vs_best = kInf;
      continue;
    }
    row.efficiency_vs_best = std::exp((row.logdet - best) / m.p());
    row.volume_ratio_vs_best = std::exp(0.5 * (best - row.logdet));
  }
  return rows;
}

std::string history_csv(const std::vector<HistoryEntry>& history) {
  std::ostringstream os;
  os.precision(17);
  os << "iteration,logdet,max_sensitivity\n";
  for (const auto& h : history)
    os << h.iteration << ',' << h.logdet << ',' << h.max_sensitivity << '\n';
  return os.str();
}

}  // namespace rpcm
