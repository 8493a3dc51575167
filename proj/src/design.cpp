#include "rpcm/design.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rpcm {

namespace {

constexpr double kWeightSumTol = 1e-12;

template <typename T>
void sort_and_check_distinct(std::vector<std::pair<Item, T>>& pts) {
  if (pts.empty()) throw std::invalid_argument("Design: support must be nonempty");
  const int k = pts.front().first.k();
  for (const auto& p : pts)
    if (p.first.k() != k)
      throw std::invalid_argument("Design: items must share the same K");
  std::sort(pts.begin(), pts.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (pts[i].first == pts[i - 1].first)
      throw std::invalid_argument("Design: items must be mutually distinct");
}

}  // namespace

Design Design::approximate(std::vector<std::pair<Item, double>> points) {
  sort_and_check_distinct(points);
  long double sum = 0.0L;
  for (const auto& [item, w] : points) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw std::invalid_argument("Design: weights must be nonnegative");
    sum += w;
  }
  if (std::fabs(static_cast<double>(sum) - 1.0) > kWeightSumTol)
    throw std::invalid_argument("Design: weights must sum to 1");
  Design d;
  d.kind_ = DesignKind::approximate;
  d.k_ = points.front().first.k();
  d.n_ = 0;
  d.points_.reserve(points.size());
  for (const auto& [item, w] : points) d.points_.push_back({item, w, 0});
  return d;
}

Design Design::exact(std::vector<std::pair<Item, std::uint64_t>> points) {
  sort_and_check_distinct(points);
  std::uint64_t n = 0;
  for (const auto& [item, c] : points) {
    if (c == 0) throw std::invalid_argument("Design: counts must be positive");
    n += c;
  }
  Design d;
  d.kind_ = DesignKind::exact;
  d.k_ = points.front().first.k();
  d.n_ = n;
  d.points_.reserve(points.size());
  for (const auto& [item, c] : points)
    d.points_.push_back({item, static_cast<double>(c) / static_cast<double>(n), c});
  return d;
}

Design Design::as_approximate() const {
  if (kind_ == DesignKind::approximate) return *this;
  std::vector<std::pair<Item, double>> pts;
  pts.reserve(points_.size());
  for (const auto& p : points_) pts.emplace_back(p.item, p.weight);
  return approximate(std::move(pts));
}

Design xi0(int k) {
  if (k < 1 || k > kMaxFeatures)
    throw std::invalid_argument("xi0: K must be in [1, 16]");
  const double w = 1.0 / (k + 1);
  std::vector<std::pair<Item, double>> pts;
  pts.emplace_back(basic_item(k), w);
  for (int j = 0; j < k; ++j) pts.emplace_back(unit_item(k, j), w);
  return Design::approximate(std::move(pts));
}

Design full_factorial(int k) {
  if (k < 1 || k > kMaxFeatures)
    throw std::invalid_argument("full_factorial: K must be in [1, 16]");
  const std::uint32_t nverts = 1u << k;
  const double w = 1.0 / nverts;
  std::vector<std::pair<Item, double>> pts;
  pts.reserve(nverts);
  for (std::uint32_t r = 0; r < nverts; ++r) pts.emplace_back(Item(k, r), w);
  return Design::approximate(std::move(pts));
}

}  // namespace rpcm
