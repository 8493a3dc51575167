#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rpcm/model.hpp"

namespace rpcm {

enum class DesignKind { approximate, exact };

struct DesignPoint {
  Item item;
  double weight = 0.0;       // approximate weight, or count/n for exact
  std::uint64_t count = 0;   // exact designs only
};

/// A design on the 2^K candidate items: mutually distinct support points with
/// nonnegative weights summing to 1 (approximate), or positive replication
/// counts summing to n (exact, weights = count/n). Points are kept sorted in
/// lexicographic item order.
class Design {
public:
  static Design approximate(std::vector<std::pair<Item, double>> points);
  static Design exact(std::vector<std::pair<Item, std::uint64_t>> points);

  DesignKind kind() const { return kind_; }
  int k() const { return k_; }
  std::uint64_t n() const { return n_; }  // total count; 0 for approximate
  const std::vector<DesignPoint>& points() const { return points_; }
  std::size_t support_size() const { return points_.size(); }

  /// Weights as an approximate design (counts normalized for exact designs).
  Design as_approximate() const;

private:
  Design() = default;
  DesignKind kind_ = DesignKind::approximate;
  int k_ = 0;
  std::uint64_t n_ = 0;
  std::vector<DesignPoint> points_;
};

/// The design putting weight 1/(K+1) on the basic item and the K one-feature
/// items.
Design xi0(int k);

/// Uniform weight 1/2^K on all 2^K items. Requires k <= 16.
Design full_factorial(int k);

}  // namespace rpcm
