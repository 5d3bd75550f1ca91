#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "dimlab/core.hpp"

namespace dimlab {

/// Uniform bucket grid over integer cell coordinates. A closed-ball query of
/// radius r inspects only cells within Chebyshev distance floor(r/cell)+1 of
/// the query cell and filters candidates with the exact metric, so it returns
/// exactly the closed-ball members. Supports incremental insertion (used for
/// packing-center conflict queries). Cell keys are exact for d <= 2; higher
/// dimensions use a hashed key with per-query bucket dedup.
class GridIndex {
 public:
  GridIndex(const PointCloud& cloud, double cell_size)
      : cloud_(&cloud), cell_(cell_size), dim_(cloud.dim()) {
    if (cell_size <= 0) throw InputError("cell_size must be positive");
    buckets_.reserve(static_cast<std::size_t>(cloud.size()) * 2);
    for (int i = 0; i < cloud.size(); ++i) insert(i);
  }

  // Empty index over the same cloud; points are added with insert().
  GridIndex(const PointCloud& cloud, double cell_size, bool /*defer*/)
      : cloud_(&cloud), cell_(cell_size), dim_(cloud.dim()) {
    if (cell_size <= 0) throw InputError("cell_size must be positive");
  }

  double cell_size() const { return cell_; }

  void insert(int id) {
    std::int64_t cells[kMaxDim];
    cell_coords(cloud_->point(id), cells);
    buckets_[key_of(cells)].push_back(id);
  }

  // Indices i with d(p_i, x) <= r (closed ball), ascending.
  std::vector<int> query(std::span<const double> x, double r) const {
    std::vector<int> out;
    visit(x, r, [&](int id, double) { out.push_back(id); });
    std::sort(out.begin(), out.end());
    return out;
  }

  bool any_within(std::span<const double> x, double r) const {
    bool hit = false;
    visit_until(x, r, [&](int, double) {
      hit = true;
      return true;
    });
    return hit;
  }

  template <typename Fn>  // Fn(id, dist)
  void visit(std::span<const double> x, double r, Fn&& fn) const {
    visit_until(x, r, [&](int id, double d) {
      fn(id, d);
      return false;
    });
  }

 private:
  static constexpr int kMaxDim = 8;

  void cell_coords(std::span<const double> p, std::int64_t* out) const {
    for (int k = 0; k < dim_; ++k)
      out[k] = static_cast<std::int64_t>(std::floor(p[k] / cell_));
  }

  std::uint64_t key_of(const std::int64_t* cells) const {
    if (dim_ == 1) return static_cast<std::uint64_t>(cells[0]);
    if (dim_ == 2)
      return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(cells[0])) << 32) |
             static_cast<std::uint64_t>(static_cast<std::uint32_t>(cells[1]));
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (int k = 0; k < dim_; ++k)
      h ^= static_cast<std::uint64_t>(cells[k]) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
  }

  template <typename Fn>  // Fn(id, dist) -> bool stop
  void visit_until(std::span<const double> x, double r, Fn&& fn) const {
    if (static_cast<int>(x.size()) != dim_) throw InputError("dimension mismatch");
    if (dim_ > kMaxDim) throw CapacityError("grid index supports up to 8 dims");
    const int reach = static_cast<int>(std::floor(r / cell_)) + 1;
    std::int64_t base[kMaxDim];
    cell_coords(x, base);

    std::vector<std::uint64_t> seen;  // hashed keys only (d > 2)
    const bool hashed = dim_ > 2;

    std::int64_t off[kMaxDim];
    for (int k = 0; k < dim_; ++k) off[k] = -reach;
    std::int64_t cells[kMaxDim];
    for (;;) {
      for (int k = 0; k < dim_; ++k) cells[k] = base[k] + off[k];
      const std::uint64_t key = key_of(cells);
      bool skip = false;
      if (hashed) {
        if (std::find(seen.begin(), seen.end(), key) != seen.end()) skip = true;
        else seen.push_back(key);
      }
      if (!skip) {
        if (auto it = buckets_.find(key); it != buckets_.end()) {
          for (int id : it->second) {
            const double dist = cloud_->dist_to(id, x);
            if (within(dist, r) && fn(id, dist)) return;
          }
        }
      }
      int k = dim_ - 1;
      while (k >= 0 && off[k] == reach) off[k--] = -reach;
      if (k < 0) break;
      ++off[k];
    }
  }

  const PointCloud* cloud_;
  double cell_;
  int dim_;
  std::unordered_map<std::uint64_t, std::vector<int>> buckets_;
};

/// Realizes B(x, r) on the sample: exactly the indices whose points lie in
/// the closed ball, ascending.
inline std::vector<int> range_query(const PointCloud& cloud,
                                    const GridIndex& index,
                                    std::span<const double> x, double r) {
  if (r <= 0) throw InputError("radius must be positive");
  return index.query(x, r);
}

}  // namespace dimlab
