#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "dimlab/core.hpp"
#include "dimlab/estimators.hpp"
#include "dimlab/grid_index.hpp"
#include "dimlab/packing.hpp"
#include "dimlab/parallel.hpp"
#include "dimlab/scaling.hpp"

namespace dimlab {

namespace detail {

// max/min over all centers x of the greedy r-packing count of B(x, rho)
struct LocalCountStats {
  std::int64_t max_count = 0;
  std::int64_t min_count = 0;
};

// 1-D ascending clouds: greedy restricted counts via the jump counter; the
// center windows [x-rho, x+rho] advance monotonically.
inline LocalCountStats local_counts_sorted_1d(const PointCloud& cloud,
                                              const JumpCounter& counter,
                                              double rho) {
  const auto& xs = cloud.coords();
  const int n = cloud.size();
  LocalCountStats stats;
  stats.min_count = std::numeric_limits<std::int64_t>::max();
  int lo = 0, hi = -1;
  for (int i = 0; i < n; ++i) {
    while (lo < n && xs[lo] < xs[i] - rho - kBallEps) ++lo;
    if (hi < lo - 1) hi = lo - 1;
    while (hi + 1 < n && xs[hi + 1] <= xs[i] + rho + kBallEps) ++hi;
    const std::int64_t c = counter.count(lo, hi);
    stats.max_count = std::max(stats.max_count, c);
    stats.min_count = std::min(stats.min_count, c);
  }
  return stats;
}

inline LocalCountStats local_counts_general(const PointCloud& cloud, double r,
                                            double rho) {
  const int n = cloud.size();
  std::vector<std::int64_t> counts(n);
  if (cloud.lex_sorted_2d()) {
    // candidates from the contiguous x-slab, exact-metric filtered; the
    // gathered ids stay in input order
    const auto& cs = cloud.coords();
    const bool cheb = cloud.metric() == Metric::chebyshev;
    parallel_for(n, [&](std::int64_t lo, std::int64_t hi) {
      std::vector<int> ids;
      for (std::int64_t i = lo; i < hi; ++i) {
        const double cx = cs[static_cast<std::size_t>(i) * 2];
        const double cy = cs[static_cast<std::size_t>(i) * 2 + 1];
        const int b = cloud.slab_begin(cx - rho - kBallEps);
        const int e = cloud.slab_end(cx + rho + kBallEps);
        ids.clear();
        for (int j = b; j < e; ++j) {
          const double dx = cs[static_cast<std::size_t>(j) * 2] - cx;
          const double dy = cs[static_cast<std::size_t>(j) * 2 + 1] - cy;
          const double d = cheb ? std::max(std::abs(dx), std::abs(dy))
                                : std::sqrt(dx * dx + dy * dy);
          if (within(d, rho)) ids.push_back(j);
        }
        counts[i] = greedy_count_subset(cloud, r, ids);
      }
    });
  } else {
    GridIndex index(cloud, rho);
    parallel_for(n, [&](std::int64_t b, std::int64_t e) {
      for (std::int64_t i = b; i < e; ++i) {
        const std::vector<int> ids =
            index.query(cloud.point(static_cast<int>(i)), rho);
        counts[i] = greedy_count_subset(cloud, r, ids);
      }
    });
  }
  LocalCountStats stats;
  stats.min_count = std::numeric_limits<std::int64_t>::max();
  for (std::int64_t c : counts) {
    stats.max_count = std::max(stats.max_count, c);
    stats.min_count = std::min(stats.min_count, c);
  }
  return stats;
}

inline DimensionEstimate make_estimate(Quantity q, const Envelope& env,
                                       bool upper_type, const ScaleGrid& grid,
                                       bool warn, int dropped) {
  DimensionEstimate est;
  est.quantity = q;
  est.raw_value = upper_type ? env.upper : env.lower;
  est.value = clamp0(est.raw_value);
  est.report = SlopeReport{env.global, env.upper, env.lower, env.window, dropped};
  est.grid = GridEcho(grid);
  est.mesh_warning = warn;
  return est;
}

// Rows where the outer ball radius reaches half the diameter are degenerate
// (the ball swallows the space from a central point and the two-scale
// comparison collapses); they are dropped when at least `window` informative
// rows remain, and counted either way.
struct SpectrumRows {
  std::vector<double> xs, ys;
  int dropped = 0;
};

inline SpectrumRows trim_saturated(const std::vector<double>& xs,
                                   const std::vector<double>& ys,
                                   const std::vector<char>& saturated,
                                   int window) {
  SpectrumRows rows;
  int keep = 0;
  for (char s : saturated) keep += !s;
  if (keep < std::max(window, 4)) {
    rows.xs = xs;
    rows.ys = ys;
    return rows;
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (saturated[i]) {
      ++rows.dropped;
      continue;
    }
    rows.xs.push_back(xs[i]);
    rows.ys.push_back(ys[i]);
  }
  return rows;
}

}  // namespace detail

/// Global greedy packing counts on the grid scales.
inline std::vector<std::int64_t> packing_counts(const PointCloud& cloud,
                                                const ScaleGrid& grid) {
  std::vector<std::int64_t> counts(grid.scales.size());
  for (std::size_t j = 0; j < grid.scales.size(); ++j)
    counts[j] = packing_count(cloud, grid.scales[j]);
  return counts;
}

struct MinkowskiSetResult {
  DimensionEstimate upper;
  DimensionEstimate lower;
  LogLogTable table;  // (log r, log N_r)
};

/// Upper/lower Minkowski dimension of the sample: envelope slopes of
/// log N_r against -log r.
inline MinkowskiSetResult minkowski_dims_set(const PointCloud& cloud,
                                             const ScaleGrid& grid,
                                             int window = 0) {
  const bool warn = mesh_guard_violated(grid, cloud.meta().mesh);
  const std::vector<std::int64_t> counts = packing_counts(cloud, grid);
  std::vector<double> xs, ys, rs, vs;
  for (std::size_t j = 0; j < grid.scales.size(); ++j) {
    xs.push_back(-std::log(grid.scales[j]));
    ys.push_back(std::log(static_cast<double>(counts[j])));
    rs.push_back(grid.scales[j]);
    vs.push_back(static_cast<double>(counts[j]));
  }
  const int w = window > 0 ? window
                           : auto_window(static_cast<int>(xs.size()), grid.per_octave);
  const Envelope env = envelope_slopes(xs, ys, w);
  MinkowskiSetResult res{
      detail::make_estimate(Quantity::minkowski_upper, env, true, grid, warn, 0),
      detail::make_estimate(Quantity::minkowski_lower, env, false, grid, warn, 0),
      LogLogTable::from_values(rs, vs, "packing_count")};
  return res;
}

/// Minkowski dimensions with an explicit scan order (robustness variant;
/// greedy sizes for any order stay inside the exact-count sandwich).
inline MinkowskiSetResult minkowski_dims_set_ordered(const PointCloud& cloud,
                                                     const ScaleGrid& grid,
                                                     std::span<const int> order,
                                                     int window = 0) {
  const bool warn = mesh_guard_violated(grid, cloud.meta().mesh);
  std::vector<double> xs, ys, rs, vs;
  for (double r : grid.scales) {
    const int count = greedy_maximal_packing(cloud, r, order).size();
    xs.push_back(-std::log(r));
    ys.push_back(std::log(static_cast<double>(count)));
    rs.push_back(r);
    vs.push_back(static_cast<double>(count));
  }
  const int w = window > 0 ? window
                           : auto_window(static_cast<int>(xs.size()), grid.per_octave);
  const Envelope env = envelope_slopes(xs, ys, w);
  return MinkowskiSetResult{
      detail::make_estimate(Quantity::minkowski_upper, env, true, grid, warn, 0),
      detail::make_estimate(Quantity::minkowski_lower, env, false, grid, warn, 0),
      LogLogTable::from_values(rs, vs, "packing_count")};
}

namespace detail {

struct SetSpectrumData {
  Envelope env_max;  // slopes of log max_x count vs (1-theta)(-log r)
  Envelope env_min;
  int dropped = 0;
  double signal_max = 0;  // y-range of the fitted rows
  double signal_min = 0;
};

inline double y_range(const std::vector<double>& ys) {
  if (ys.empty()) return 0;
  const auto [lo, hi] = std::minmax_element(ys.begin(), ys.end());
  return *hi - *lo;
}

inline SetSpectrumData set_spectrum_data(const PointCloud& cloud, double theta,
                                         const ScaleGrid& grid, int window) {
  if (!(theta > 0 && theta < 1)) throw InputError("theta must be in (0,1)");
  const bool sorted1d = cloud.ascending_1d();
  const double half_diam = cloud.bbox_diameter() / 2;
  std::vector<double> xs, ys_max, ys_min;
  std::vector<char> saturated;
  for (double r : grid.scales) {
    const double rho = std::pow(r, theta);
    LocalCountStats stats;
    if (sorted1d) {
      JumpCounter counter(cloud.coords(), 2 * r);
      stats = local_counts_sorted_1d(cloud, counter, rho);
    } else {
      stats = local_counts_general(cloud, r, rho);
    }
    xs.push_back((1 - theta) * -std::log(r));
    ys_max.push_back(std::log(static_cast<double>(std::max<std::int64_t>(stats.max_count, 1))));
    ys_min.push_back(std::log(static_cast<double>(std::max<std::int64_t>(stats.min_count, 1))));
    saturated.push_back(rho >= half_diam);
  }
  const int keep_floor = std::max(4, 2 * grid.per_octave + 2);
  const SpectrumRows max_rows = trim_saturated(xs, ys_max, saturated, keep_floor);
  const SpectrumRows min_rows = trim_saturated(xs, ys_min, saturated, keep_floor);
  SetSpectrumData data;
  data.dropped = max_rows.dropped;
  const int rows = static_cast<int>(max_rows.xs.size());
  const int w = window > 0 ? std::min(window, rows) : rows;
  data.env_max = envelope_slopes(max_rows.xs, max_rows.ys, w);
  data.env_min = envelope_slopes(min_rows.xs, min_rows.ys, w);
  data.signal_max = y_range(max_rows.ys);
  data.signal_min = y_range(min_rows.ys);
  return data;
}

}  // namespace detail

/// Assouad spectrum at theta: envelope slopes of log max_x N_r(B(x, r^theta))
/// against (1-theta)(-log r).
inline DimensionEstimate assouad_spectrum_set(const PointCloud& cloud,
                                              double theta,
                                              const ScaleGrid& grid,
                                              int window = 0) {
  const bool warn = mesh_guard_violated(grid, cloud.meta().mesh);
  const detail::SetSpectrumData data =
      detail::set_spectrum_data(cloud, theta, grid, window);
  DimensionEstimate est = detail::make_estimate(
      Quantity::assouad_spectrum, data.env_max, true, grid, warn, data.dropped);
  est.theta = theta;
  est.signal = data.signal_max;
  return est;
}

/// Lower spectrum at theta: envelope slopes of log min_x N_r(B(x, r^theta)),
/// lower envelope, clamped at 0.
inline DimensionEstimate lower_spectrum_set(const PointCloud& cloud,
                                            double theta, const ScaleGrid& grid,
                                            int window = 0) {
  const bool warn = mesh_guard_violated(grid, cloud.meta().mesh);
  const detail::SetSpectrumData data =
      detail::set_spectrum_data(cloud, theta, grid, window);
  DimensionEstimate est = detail::make_estimate(
      Quantity::lower_spectrum, data.env_min, false, grid, warn, data.dropped);
  est.theta = theta;
  est.signal = data.signal_min;
  return est;
}

/// Both spectra at one theta from a single sweep (the max and min local
/// counts come from the same pass).
struct SetSpectrumPair {
  DimensionEstimate assouad;
  DimensionEstimate lower;
};

inline SetSpectrumPair spectrum_pair_set(const PointCloud& cloud, double theta,
                                         const ScaleGrid& grid, int window = 0) {
  const bool warn = mesh_guard_violated(grid, cloud.meta().mesh);
  const detail::SetSpectrumData data =
      detail::set_spectrum_data(cloud, theta, grid, window);
  SetSpectrumPair pair;
  pair.assouad = detail::make_estimate(Quantity::assouad_spectrum, data.env_max,
                                       true, grid, warn, data.dropped);
  pair.assouad.theta = theta;
  pair.assouad.signal = data.signal_max;
  pair.lower = detail::make_estimate(Quantity::lower_spectrum, data.env_min,
                                     false, grid, warn, data.dropped);
  pair.lower.theta = theta;
  pair.lower.signal = data.signal_min;
  return pair;
}

/// Assouad dimension: worst two-scale localization exponent. For each coarse
/// scale R spanning at least ratio_floor+1 octaves above r_min, fit
/// log max_x N_r(B(x,R)) against log(R/r) over the finer grid scales; the
/// estimate is the steepest stratum.
inline DimensionEstimate assouad_dim_set(const PointCloud& cloud,
                                         const ScaleGrid& grid,
                                         int ratio_floor = 3) {
  if (grid.octaves() < ratio_floor + 2)
    throw InputError("grid must span at least ratio_floor + 2 octaves");
  const bool warn = mesh_guard_violated(grid, cloud.meta().mesh);
  const std::size_t nscale = grid.scales.size();

  // strata[i]: (log(R_i/r_j), log maxcount) rows for eligible coarse R_i
  std::vector<std::vector<double>> sx(nscale), sy(nscale);
  const bool sorted1d = cloud.ascending_1d();
  for (std::size_t j = 0; j < nscale; ++j) {
    const double r = grid.scales[j];
    std::unique_ptr<JumpCounter> counter;
    if (sorted1d) counter = std::make_unique<JumpCounter>(cloud.coords(), 2 * r);
    for (std::size_t i = 0; i < j; ++i) {
      const double R = grid.scales[i];
      if (R < 2 * r) continue;
      if (std::log2(R / grid.r_min) < ratio_floor + 1) continue;
      const detail::LocalCountStats stats =
          sorted1d ? detail::local_counts_sorted_1d(cloud, *counter, R)
                   : detail::local_counts_general(cloud, r, R);
      sx[i].push_back(std::log(R / r));
      sy[i].push_back(std::log(static_cast<double>(std::max<std::int64_t>(stats.max_count, 1))));
    }
  }

  std::vector<double> slopes;
  double signal = 0;
  for (std::size_t i = 0; i < nscale; ++i) {
    if (sx[i].size() < 4) continue;
    slopes.push_back(ls_slope(sx[i], sy[i], 0, sx[i].size()));
    signal = std::max(signal, detail::y_range(sy[i]));
  }
  if (slopes.empty()) throw InputError("no eligible scale pairs for the Assouad sweep");
  Envelope env;
  env.upper = *std::max_element(slopes.begin(), slopes.end());
  env.lower = *std::min_element(slopes.begin(), slopes.end());
  env.global = std::accumulate(slopes.begin(), slopes.end(), 0.0) /
               static_cast<double>(slopes.size());
  env.window = static_cast<int>(slopes.size());
  DimensionEstimate est =
      detail::make_estimate(Quantity::assouad, env, true, grid, warn, 0);
  est.signal = signal;
  return est;
}

}  // namespace dimlab
