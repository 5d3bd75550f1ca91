#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dimlab {

// Closed-ball membership slack. Coordinate arithmetic puts exact boundary
// points a few ulp off the radius (|0.6 - 0.3| lands above 0.3 in doubles),
// and boundary points belong to a closed ball. Every distance-vs-radius
// comparison routes through within()/beyond() with this absolute slack.
inline constexpr double kBallEps = 1e-12;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ContractViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Metric { euclidean, chebyshev };

inline const char* metric_name(Metric m) {
  return m == Metric::euclidean ? "euclidean" : "chebyshev";
}

inline Metric metric_from_name(const std::string& s) {
  if (s == "euclidean") return Metric::euclidean;
  if (s == "chebyshev") return Metric::chebyshev;
  throw InputError("unknown metric: " + s);
}

inline double distance(std::span<const double> a, std::span<const double> b,
                       Metric metric) {
  if (a.size() != b.size()) throw InputError("dimension mismatch");
  if (metric == Metric::euclidean) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = a[i] - b[i];
      s += d * d;
    }
    return std::sqrt(s);
  }
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline bool within(double dist, double radius) {
  return dist <= radius + kBallEps;
}
inline bool beyond(double dist, double radius) { return !within(dist, radius); }

struct FixtureMeta {
  std::string name;
  std::string kind;  // fixture family: cantor, sequence, bm, corner, inhomog, grid
  double scale_factor = 1.0;  // factor applied to raw coordinates
  double mesh = 0.0;  // bound on distance from the represented set to the sample
  double dedup_eps = 1e-12;
};

/// Finite point set in d-space standing in for a compact metric space.
/// Immutable after construction; safe for concurrent reads.
class PointCloud {
 public:
  PointCloud(std::vector<double> coords, int dim, Metric metric,
             FixtureMeta meta = {})
      : coords_(std::move(coords)),
        dim_(dim),
        metric_(metric),
        meta_(std::move(meta)) {
    if (dim_ <= 0) throw InputError("dimension must be positive");
    if (coords_.empty() || coords_.size() % static_cast<std::size_t>(dim_) != 0)
      throw InputError("coordinate list does not match dimension");
    for (double c : coords_)
      if (!std::isfinite(c)) throw InputError("non-finite coordinate");
    if (meta_.scale_factor <= 0) throw InputError("scale_factor must be positive");
    if (meta_.mesh < 0) throw InputError("mesh must be non-negative");
    ascending_1d_ =
        dim_ == 1 && std::is_sorted(coords_.begin(), coords_.end());
    lex_sorted_2d_ = false;
    if (dim_ == 2) {
      lex_sorted_2d_ = true;
      for (std::size_t i = 2; i + 1 < coords_.size(); i += 2) {
        if (coords_[i] < coords_[i - 2] ||
            (coords_[i] == coords_[i - 2] && coords_[i + 1] < coords_[i - 1])) {
          lex_sorted_2d_ = false;
          break;
        }
      }
    }
  }

  int size() const { return static_cast<int>(coords_.size()) / dim_; }
  int dim() const { return dim_; }
  Metric metric() const { return metric_; }
  const FixtureMeta& meta() const { return meta_; }
  FixtureMeta& meta() { return meta_; }

  std::span<const double> point(int i) const {
    return {coords_.data() + static_cast<std::size_t>(i) * dim_,
            static_cast<std::size_t>(dim_)};
  }
  const std::vector<double>& coords() const { return coords_; }

  // 1-D clouds whose input order is ascending admit sweep-based packing and
  // mass fast paths that reproduce input-order scans exactly.
  bool ascending_1d() const { return ascending_1d_; }

  // 2-D clouds in (x, y)-lexicographic input order admit x-slab candidate
  // scans (binary search on the first coordinate) for ball queries.
  bool lex_sorted_2d() const { return lex_sorted_2d_; }

  // first index with x-coordinate >= bound (lex-sorted 2-D clouds)
  int slab_begin(double bound) const {
    int lo = 0, hi = size();
    while (lo < hi) {
      const int mid = (lo + hi) / 2;
      if (coords_[static_cast<std::size_t>(mid) * 2] < bound) lo = mid + 1;
      else hi = mid;
    }
    return lo;
  }
  // first index with x-coordinate > bound
  int slab_end(double bound) const {
    int lo = 0, hi = size();
    while (lo < hi) {
      const int mid = (lo + hi) / 2;
      if (coords_[static_cast<std::size_t>(mid) * 2] <= bound) lo = mid + 1;
      else hi = mid;
    }
    return lo;
  }

  double dist(int i, int j) const {
    return distance(point(i), point(j), metric_);
  }
  double dist_to(int i, std::span<const double> x) const {
    return distance(point(i), x, metric_);
  }

  // Bounding-box diagonal: an upper bound for (chebyshev: equal to) the
  // diameter, computable in O(n).
  double bbox_diameter() const {
    std::vector<double> lo(dim_, std::numeric_limits<double>::infinity());
    std::vector<double> hi(dim_, -std::numeric_limits<double>::infinity());
    const int n = size();
    for (int i = 0; i < n; ++i) {
      auto p = point(i);
      for (int k = 0; k < dim_; ++k) {
        lo[k] = std::min(lo[k], p[k]);
        hi[k] = std::max(hi[k], p[k]);
      }
    }
    if (metric_ == Metric::chebyshev) {
      double m = 0;
      for (int k = 0; k < dim_; ++k) m = std::max(m, hi[k] - lo[k]);
      return m;
    }
    double s = 0;
    for (int k = 0; k < dim_; ++k) s += (hi[k] - lo[k]) * (hi[k] - lo[k]);
    return std::sqrt(s);
  }

 private:
  std::vector<double> coords_;
  int dim_;
  Metric metric_;
  FixtureMeta meta_;
  bool ascending_1d_;
  bool lex_sorted_2d_ = false;
};

/// Normalizes raw coordinates to bounding-box diameter <= 1 (recording the
/// factor and scaling the mesh) and removes duplicate points at
/// meta.dedup_eps, keeping first occurrences in input order.
inline PointCloud finalize_cloud(std::vector<double> coords, int dim,
                                 Metric metric, FixtureMeta meta) {
  if (dim <= 0 || coords.empty() || coords.size() % static_cast<std::size_t>(dim) != 0)
    throw InputError("bad coordinate list");
  const std::size_t n = coords.size() / static_cast<std::size_t>(dim);

  PointCloud raw(coords, dim, metric, {});
  const double diam = raw.bbox_diameter();
  if (diam > 1.0) {
    const double f = 1.0 / diam;
    for (double& c : coords) c *= f;
    meta.scale_factor *= f;
    meta.mesh *= f;
  }

  // dedup: lexicographic sort of index views, group within eps, keep the
  // lowest original index of each group, preserve input order.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto cmp = [&](std::size_t a, std::size_t b) {
    for (int k = 0; k < dim; ++k) {
      const double da = coords[a * dim + k], db = coords[b * dim + k];
      if (da != db) return da < db;
    }
    return a < b;
  };
  std::sort(order.begin(), order.end(), cmp);
  std::vector<char> drop(n, 0);
  const double eps = meta.dedup_eps;
  std::size_t group_head = 0;
  for (std::size_t i = 1; i < n; ++i) {
    bool same = true;
    for (int k = 0; k < dim; ++k) {
      if (std::abs(coords[order[i] * dim + k] - coords[order[group_head] * dim + k]) > eps) {
        same = false;
        break;
      }
    }
    if (same) {
      // keep the lower original index
      if (order[i] < order[group_head]) {
        drop[order[group_head]] = 1;
        group_head = i;
      } else {
        drop[order[i]] = 1;
      }
    } else {
      group_head = i;
    }
  }
  std::vector<double> kept;
  kept.reserve(coords.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (drop[i]) continue;
    for (int k = 0; k < dim; ++k) kept.push_back(coords[i * dim + k]);
  }
  return PointCloud(std::move(kept), dim, metric, std::move(meta));
}

}  // namespace dimlab
