#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "dimlab/core.hpp"
#include "dimlab/grid_index.hpp"

namespace dimlab {

/// Centers of pairwise-disjoint closed balls at a common radius. Disjointness
/// of closed balls is strict separation: d(center_i, center_j) > 2r. When
/// maximal, every cloud point lies within 2r of some center (the doubled
/// balls cover the cloud).
struct Packing {
  double radius = 0;
  std::vector<int> center_ids;
  bool maximal = false;
  int size() const { return static_cast<int>(center_ids.size()); }
};

/// Scans points in `order`, accepting a point as a center iff its distance to
/// every accepted center exceeds 2r. Deterministic given the order.
inline Packing greedy_maximal_packing(const PointCloud& cloud, double r,
                                      std::span<const int> order) {
  if (r <= 0) throw InputError("radius must be positive");
  if (static_cast<int>(order.size()) != cloud.size())
    throw InputError("order must be a permutation of all indices");
  Packing p;
  p.radius = r;
  p.maximal = true;
  GridIndex centers(cloud, 2 * r, /*defer=*/true);
  for (int id : order) {
    if (!centers.any_within(cloud.point(id), 2 * r)) {
      centers.insert(id);
      p.center_ids.push_back(id);
    }
  }
  return p;
}

inline Packing greedy_maximal_packing(const PointCloud& cloud, double r) {
  std::vector<int> order(cloud.size());
  std::iota(order.begin(), order.end(), 0);
  return greedy_maximal_packing(cloud, r, order);
}

// Input-order greedy over an ascending 1-D cloud is a left-to-right sweep.
inline Packing greedy_packing_sorted_1d(const PointCloud& cloud, double r) {
  Packing p;
  p.radius = r;
  p.maximal = true;
  const auto& xs = cloud.coords();
  double last = xs[0];
  p.center_ids.push_back(0);
  for (int i = 1; i < cloud.size(); ++i) {
    if (beyond(xs[i] - last, 2 * r)) {
      p.center_ids.push_back(i);
      last = xs[i];
    }
  }
  return p;
}

namespace detail {

// lex-ordered candidates: accepted centers stay x-sorted, so conflicts sit
// in a binary-searchable x-window
inline int greedy_count_lex2d(const PointCloud& cloud, double r,
                              std::span<const int> ids) {
  const auto& cs = cloud.coords();
  const bool cheb = cloud.metric() == Metric::chebyshev;
  std::vector<std::pair<double, double>> accepted;
  accepted.reserve(64);
  for (int id : ids) {
    const double cx = cs[static_cast<std::size_t>(id) * 2];
    const double cy = cs[static_cast<std::size_t>(id) * 2 + 1];
    auto it = std::lower_bound(
        accepted.begin(), accepted.end(),
        std::make_pair(cx - 2 * r - kBallEps,
                       -std::numeric_limits<double>::infinity()));
    bool conflict = false;
    for (; it != accepted.end() && it->first <= cx + 2 * r + kBallEps; ++it) {
      const double dx = it->first - cx, dy = it->second - cy;
      const double d = cheb ? std::max(std::abs(dx), std::abs(dy))
                            : std::sqrt(dx * dx + dy * dy);
      if (within(d, 2 * r)) {
        conflict = true;
        break;
      }
    }
    if (!conflict) accepted.push_back({cx, cy});
  }
  return static_cast<int>(accepted.size());
}

}  // namespace detail

/// Greedy packing of a sub-cloud (indices into `cloud`), scan in the order
/// the ids are listed. Returns the accepted count.
inline int greedy_count_subset(const PointCloud& cloud, double r,
                               std::span<const int> ids) {
  if (ids.empty()) return 0;
  if (cloud.lex_sorted_2d() &&
      std::is_sorted(ids.begin(), ids.end()))
    return detail::greedy_count_lex2d(cloud, r, ids);
  if (cloud.dim() == 1) {
    // ids from range queries are ascending; a sweep reproduces that scan.
    bool asc = true;
    for (std::size_t i = 1; i < ids.size(); ++i) {
      if (cloud.coords()[ids[i]] < cloud.coords()[ids[i - 1]]) {
        asc = false;
        break;
      }
    }
    if (asc) {
      int count = 1;
      double last = cloud.coords()[ids[0]];
      for (std::size_t i = 1; i < ids.size(); ++i) {
        const double x = cloud.coords()[ids[i]];
        if (beyond(x - last, 2 * r)) {
          ++count;
          last = x;
        }
      }
      return count;
    }
  }
  GridIndex centers(cloud, 2 * r, /*defer=*/true);
  int count = 0;
  for (int id : ids) {
    if (!centers.any_within(cloud.point(id), 2 * r)) {
      centers.insert(id);
      ++count;
    }
  }
  return count;
}

struct BallRestriction {
  std::vector<double> center;
  double radius;
};

/// Size of the greedy maximal r-packing of the cloud, or of the sub-cloud
/// within the closed ball B(x, R) when `restrict_to` is given. Lies in
/// [N_exact(2r), N_exact(r)] by the sandwich property of maximal packings.
inline int packing_count(const PointCloud& cloud, double r,
                         const std::optional<BallRestriction>& restrict_to = {},
                         const GridIndex* index = nullptr) {
  if (r <= 0) throw InputError("radius must be positive");
  if (restrict_to) {
    if (restrict_to->radius <= r)
      throw InputError("restriction radius must exceed packing radius");
    std::vector<int> ids;
    if (index) {
      ids = index->query(restrict_to->center, restrict_to->radius);
    } else {
      GridIndex tmp(cloud, restrict_to->radius);
      ids = tmp.query(restrict_to->center, restrict_to->radius);
    }
    if (ids.empty()) return 0;
    return greedy_count_subset(cloud, r, ids);
  }
  if (cloud.ascending_1d())
    return greedy_packing_sorted_1d(cloud, r).size();
  return greedy_maximal_packing(cloud, r).size();
}

/// Exact N_r by branch-and-bound maximum independent set on the conflict
/// graph (edges between points at distance <= 2r). Test oracle only.
inline int exact_packing_number(const PointCloud& cloud, double r,
                                int cap = 20) {
  if (r <= 0) throw InputError("radius must be positive");
  const int n = cloud.size();
  if (n > cap || n > 31) throw CapacityError("cloud exceeds exact-oracle cap");
  std::vector<std::uint32_t> adj(n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (within(cloud.dist(i, j), 2 * r)) {
        adj[i] |= 1u << j;
        adj[j] |= 1u << i;
      }
  const std::uint32_t full = n == 32 ? ~0u : ((1u << n) - 1);
  int best = 0;
  auto rec = [&](auto&& self, std::uint32_t cand, int size) -> void {
    if (size + std::popcount(cand) <= best) return;
    if (cand == 0) {
      best = std::max(best, size);
      return;
    }
    // branch on the candidate with most conflicts
    int pick = -1, deg = -1;
    for (std::uint32_t m = cand; m;) {
      const int v = std::countr_zero(m);
      m &= m - 1;
      const int dv = std::popcount(adj[v] & cand);
      if (dv > deg) {
        deg = dv;
        pick = v;
      }
    }
    self(self, cand & ~(adj[pick] | (1u << pick)), size + 1);
    self(self, cand & ~(1u << pick), size);
  };
  rec(rec, full, 0);
  return best;
}

/// Binary-lifted greedy jump counter over an ascending 1-D coordinate list:
/// count of the left-to-right greedy packing restricted to any index window
/// in O(log n), after O(n log n) setup per separation.
class JumpCounter {
 public:
  JumpCounter(const std::vector<double>& xs_ascending, double separation)
      : n_(static_cast<int>(xs_ascending.size())) {
    levels_ = 1;
    while ((1 << levels_) < std::max(n_, 2)) ++levels_;
    ++levels_;
    up_.assign(static_cast<std::size_t>(levels_) * (n_ + 1), n_);
    // up_[0][i]: first j with xs[j] beyond xs[i] + separation
    int j = 0;
    for (int i = 0; i < n_; ++i) {
      if (j < i + 1) j = i + 1;
      while (j < n_ && !beyond(xs_ascending[j] - xs_ascending[i], separation)) ++j;
      up_[i] = j;
    }
    for (int l = 1; l < levels_; ++l)
      for (int i = 0; i <= n_; ++i) {
        const int mid = up_[(l - 1) * (n_ + 1) + i];
        up_[l * (n_ + 1) + i] = mid >= n_ ? n_ : up_[(l - 1) * (n_ + 1) + mid];
      }
  }

  // Greedy count over indices [lo, hi] inclusive; 0 if the window is empty.
  int count(int lo, int hi) const {
    if (lo > hi || lo >= n_) return 0;
    int count = 1, i = lo;
    for (int l = levels_ - 1; l >= 0; --l) {
      const int j = up_[l * (n_ + 1) + i];
      if (j <= hi) {
        count += 1 << l;
        i = j;
      }
    }
    return count;
  }

 private:
  int n_;
  int levels_;
  std::vector<int> up_;  // levels_ x (n_+1), sentinel n_
};

}  // namespace dimlab
