#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <vector>

#include "dimlab/core.hpp"
#include "dimlab/grid_index.hpp"
#include "dimlab/packing.hpp"
#include "dimlab/parallel.hpp"
#include "dimlab/scaling.hpp"

namespace dimlab {

/// Finite atomic Borel measure on a host point cloud. Weights are stored
/// densely (index-aligned with the host); atoms are the positive entries.
/// A fully supported measure carries an atom on every host point, so every
/// ball around a host point has positive mass. Immutable after construction.
class DiscreteMeasure {
 public:
  DiscreteMeasure(std::shared_ptr<const PointCloud> host,
                  std::vector<double> weights, bool full_support)
      : host_(std::move(host)),
        weights_(std::move(weights)),
        full_support_(full_support) {
    if (!host_) throw InputError("measure needs a host cloud");
    if (static_cast<int>(weights_.size()) != host_->size())
      throw InputError("weight list does not match host size");
    total_mass_ = 0;
    for (double w : weights_) {
      if (w < 0 || !std::isfinite(w)) throw InputError("weights must be finite and non-negative");
      if (full_support_ && !(w > 0))
        throw ContractViolation("fully supported measure needs an atom on every host point");
      total_mass_ += w;
    }
    if (!(total_mass_ > 0)) throw InputError("measure must have positive total mass");

    if (host_->ascending_1d()) {
      prefix_.resize(weights_.size() + 1, 0.0);
      for (std::size_t i = 0; i < weights_.size(); ++i)
        prefix_[i + 1] = prefix_[i] + weights_[i];
    }
  }

  const PointCloud& host() const { return *host_; }
  std::shared_ptr<const PointCloud> host_ptr() const { return host_; }
  const std::vector<double>& weights() const { return weights_; }
  double total_mass() const { return total_mass_; }
  bool full_support() const { return full_support_; }

  int atom_count() const {
    int c = 0;
    for (double w : weights_) c += w > 0;
    return c;
  }

 private:
  std::shared_ptr<const PointCloud> host_;
  std::vector<double> weights_;
  bool full_support_;
  double total_mass_ = 0;
  std::vector<double> prefix_;  // ascending 1-D hosts only

  friend double ball_mass(const DiscreteMeasure&, std::span<const double>, double);
  friend std::vector<double> ball_masses_all(const DiscreteMeasure&, double);
};

namespace detail {

// slab scan for lex-sorted 2-D hosts: candidates are the contiguous
// x-range, filtered by the exact metric
inline double slab_mass_2d(const DiscreteMeasure& mu, std::span<const double> x,
                           double r) {
  const PointCloud& cloud = mu.host();
  const int b = cloud.slab_begin(x[0] - r - kBallEps);
  const int e = cloud.slab_end(x[0] + r + kBallEps);
  const auto& cs = cloud.coords();
  double s = 0;
  if (cloud.metric() == Metric::chebyshev) {
    const double ylo = x[1] - r - kBallEps, yhi = x[1] + r + kBallEps;
    for (int i = b; i < e; ++i) {
      const double y = cs[static_cast<std::size_t>(i) * 2 + 1];
      if (y >= ylo && y <= yhi) s += mu.weights()[i];
    }
  } else {
    for (int i = b; i < e; ++i) {
      const double dx = cs[static_cast<std::size_t>(i) * 2] - x[0];
      const double dy = cs[static_cast<std::size_t>(i) * 2 + 1] - x[1];
      if (within(std::sqrt(dx * dx + dy * dy), r)) s += mu.weights()[i];
    }
  }
  return s;
}

}  // namespace detail

/// Sum of atom weights within the closed ball B(x, r).
inline double ball_mass(const DiscreteMeasure& mu, std::span<const double> x,
                        double r) {
  if (r <= 0) throw InputError("radius must be positive");
  const PointCloud& cloud = mu.host();
  if (static_cast<int>(x.size()) != cloud.dim())
    throw InputError("dimension mismatch");
  if (!mu.prefix_.empty()) {
    const auto& xs = cloud.coords();
    // closed interval [x-r, x+r] with the shared boundary slack
    auto lo = std::lower_bound(xs.begin(), xs.end(), x[0] - r - kBallEps);
    auto hi = std::upper_bound(xs.begin(), xs.end(), x[0] + r + kBallEps);
    const std::size_t a = static_cast<std::size_t>(lo - xs.begin());
    const std::size_t b = static_cast<std::size_t>(hi - xs.begin());
    return mu.prefix_[b] - mu.prefix_[a];
  }
  if (cloud.lex_sorted_2d()) return detail::slab_mass_2d(mu, x, r);
  GridIndex index(cloud, r);
  double s = 0;
  index.visit(x, r, [&](int id, double) { s += mu.weights()[id]; });
  return s;
}

/// Masses of B(p_i, r) for every host point p_i. Two-pointer sweep on
/// ascending 1-D hosts, slab scans on lex-sorted 2-D hosts, grid-index
/// queries otherwise; results independent of thread count.
inline std::vector<double> ball_masses_all(const DiscreteMeasure& mu, double r) {
  if (r <= 0) throw InputError("radius must be positive");
  const PointCloud& cloud = mu.host();
  const int n = cloud.size();
  std::vector<double> out(n);
  if (!mu.prefix_.empty()) {
    const auto& xs = cloud.coords();
    int lo = 0, hi = 0;
    for (int i = 0; i < n; ++i) {
      while (lo < n && xs[lo] < xs[i] - r - kBallEps) ++lo;
      if (hi < lo) hi = lo;
      while (hi < n && xs[hi] <= xs[i] + r + kBallEps) ++hi;
      out[i] = mu.prefix_[hi] - mu.prefix_[lo];
    }
    return out;
  }
  if (cloud.lex_sorted_2d()) {
    parallel_for(n, [&](std::int64_t b, std::int64_t e) {
      for (std::int64_t i = b; i < e; ++i)
        out[i] = detail::slab_mass_2d(mu, cloud.point(static_cast<int>(i)), r);
    });
    return out;
  }
  GridIndex index(cloud, r);
  parallel_for(n, [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t i = b; i < e; ++i) {
      double s = 0;
      index.visit(cloud.point(static_cast<int>(i)), r,
                  [&](int id, double) { s += mu.weights()[id]; });
      out[i] = s;
    }
  });
  return out;
}

struct BallMassExtrema {
  double min_mass = 0;
  int argmin = -1;
  double max_mass = 0;
  int argmax = -1;
};

/// Extrema of ball mass over every host point as center; ties break to the
/// lowest point index.
inline BallMassExtrema ball_mass_extrema(const DiscreteMeasure& mu, double r) {
  if (!mu.full_support())
    throw ContractViolation("ball_mass_extrema needs a fully supported measure");
  const std::vector<double> masses = ball_masses_all(mu, r);
  BallMassExtrema ex;
  for (int i = 0; i < static_cast<int>(masses.size()); ++i) {
    if (ex.argmin < 0 || masses[i] < ex.min_mass) {
      ex.min_mass = masses[i];
      ex.argmin = i;
    }
    if (ex.argmax < 0 || masses[i] > ex.max_mass) {
      ex.max_mass = masses[i];
      ex.argmax = i;
    }
  }
  return ex;
}

struct DoublingSweep {
  LogLogTable worst_ratios;  // (log r, log of max_x mass(2r)/mass(r))
  double max_ratio = 0;      // empirical lower bound on the doubling constant
  std::vector<double> octave_max;  // per-octave maxima, coarse to fine
};

inline DoublingSweep doubling_sweep(const DiscreteMeasure& mu,
                                    const ScaleGrid& grid) {
  if (!mu.full_support())
    throw ContractViolation("doubling_sweep needs a fully supported measure");
  DoublingSweep sweep;
  std::vector<double> rs, ratios;
  const int per_octave = grid.per_octave;
  for (std::size_t j = 0; j < grid.scales.size(); ++j) {
    const double r = grid.scales[j];
    const std::vector<double> m1 = ball_masses_all(mu, r);
    const std::vector<double> m2 = ball_masses_all(mu, 2 * r);
    double worst = 0;
    for (std::size_t i = 0; i < m1.size(); ++i) {
      if (!(m1[i] > 0))
        throw ContractViolation("zero ball mass under a fully supported measure");
      worst = std::max(worst, m2[i] / m1[i]);
    }
    rs.push_back(r);
    ratios.push_back(worst);
    sweep.max_ratio = std::max(sweep.max_ratio, worst);
    const std::size_t oct = j / static_cast<std::size_t>(per_octave);
    if (sweep.octave_max.size() <= oct) sweep.octave_max.resize(oct + 1, 0.0);
    sweep.octave_max[oct] = std::max(sweep.octave_max[oct], worst);
  }
  sweep.worst_ratios = LogLogTable::from_values(rs, ratios, "doubling_worst_ratio");
  return sweep;
}

/// Geometric mixing: component n (1-indexed) enters with coefficient 2^-n.
/// Components may live on different hosts; atoms at coinciding positions
/// (within dedup_eps) merge on the union cloud.
inline DiscreteMeasure mix_measures(const std::vector<DiscreteMeasure>& components) {
  if (components.empty()) throw InputError("mix_measures needs at least one component");
  const int dim = components[0].host().dim();
  const Metric metric = components[0].host().metric();
  struct Atom {
    std::vector<double> pos;
    double w;
  };
  std::vector<Atom> atoms;
  double coeff = 1.0;
  for (const auto& mu : components) {
    coeff *= 0.5;
    if (mu.host().dim() != dim || mu.host().metric() != metric)
      throw InputError("mix components must share dimension and metric");
    for (int i = 0; i < mu.host().size(); ++i) {
      if (!(mu.weights()[i] > 0)) continue;
      auto p = mu.host().point(i);
      atoms.push_back({{p.begin(), p.end()}, coeff * mu.weights()[i]});
    }
  }
  const double eps = components[0].host().meta().dedup_eps;
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) {
    return a.pos < b.pos;
  });
  std::vector<double> coords;
  std::vector<double> weights;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    bool merged = false;
    if (!weights.empty()) {
      merged = true;
      const std::size_t last = weights.size() - 1;
      for (int k = 0; k < dim; ++k)
        if (std::abs(coords[last * dim + k] - atoms[i].pos[k]) > eps) {
          merged = false;
          break;
        }
    }
    if (merged) {
      weights.back() += atoms[i].w;
    } else {
      coords.insert(coords.end(), atoms[i].pos.begin(), atoms[i].pos.end());
      weights.push_back(atoms[i].w);
    }
  }
  FixtureMeta meta = components[0].host().meta();
  meta.name += "_mix";
  auto host = std::make_shared<PointCloud>(std::move(coords), dim, metric, meta);
  return DiscreteMeasure(std::move(host), std::move(weights), /*full_support=*/true);
}

struct WitnessLevel {
  int k = 0;
  double radius = 0;  // 2^-k
  int packing_size = 0;
};

struct WitnessResult {
  DiscreteMeasure measure;  // host = sub-cloud of packing centers
  std::vector<WitnessLevel> levels;
  bool mesh_warning = false;
  double cover_radius = 0;  // every cloud point is within this of an atom
};

/// Sums, over k in k_list, the measure that puts k^-2/N_k on each center of
/// a greedy maximal 2^-k packing (N_k its size). A full ladder k=1..kmax
/// drives the uniform-in-r mass bound; a sparse list drives the
/// along-a-sequence variant. The returned measure lives on the sub-cloud of
/// centers and is fully supported there.
inline WitnessResult witness_measure(const PointCloud& cloud,
                                     const std::vector<int>& k_list) {
  if (k_list.empty()) throw InputError("k_list must be non-empty");
  for (std::size_t i = 0; i < k_list.size(); ++i) {
    if (k_list[i] < 1 || (i > 0 && k_list[i] <= k_list[i - 1]))
      throw InputError("k_list must be strictly increasing positive integers");
  }
  if (cloud.bbox_diameter() > 1 + 1e-9)
    throw InputError("witness construction expects a cloud of diameter <= 1");

  const int n = cloud.size();
  std::vector<double> weight(n, 0.0);
  WitnessResult result{
      DiscreteMeasure(std::make_shared<PointCloud>(cloud), std::vector<double>(n, 1.0), true),
      {},
      false,
      0.0};
  for (int k : k_list) {
    const double r = std::pow(2.0, -k);
    if (r < cloud.meta().mesh) result.mesh_warning = true;
    const Packing packing = cloud.ascending_1d()
                                ? greedy_packing_sorted_1d(cloud, r)
                                : greedy_maximal_packing(cloud, r);
    const double w = 1.0 / (static_cast<double>(k) * k * packing.size());
    for (int id : packing.center_ids) weight[id] += w;
    result.levels.push_back({k, r, packing.size()});
  }
  result.cover_radius = 2 * std::pow(2.0, -k_list.back());

  std::vector<double> coords;
  std::vector<double> atom_weights;
  for (int i = 0; i < n; ++i) {
    if (!(weight[i] > 0)) continue;
    auto p = cloud.point(i);
    coords.insert(coords.end(), p.begin(), p.end());
    atom_weights.push_back(weight[i]);
  }
  FixtureMeta meta = cloud.meta();
  meta.name += "_witness";
  meta.mesh = cloud.meta().mesh + result.cover_radius;
  auto host = std::make_shared<PointCloud>(std::move(coords), cloud.dim(),
                                           cloud.metric(), std::move(meta));
  result.measure = DiscreteMeasure(std::move(host), std::move(atom_weights),
                                   /*full_support=*/true);
  return result;
}

}  // namespace dimlab
