#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "dimlab/core.hpp"

namespace dimlab {

/// Geometric scale ladder r_j = r_max * 2^(-j/per_octave) down to r_min.
struct ScaleGrid {
  double r_max = 0;
  double r_min = 0;
  int per_octave = 0;
  std::vector<double> scales;  // strictly decreasing, in (0,1)

  static ScaleGrid geometric(double r_max, double r_min, int per_octave) {
    if (!(r_max > 0 && r_max < 1)) throw InputError("r_max must be in (0,1)");
    if (!(r_min > 0 && r_min < r_max)) throw InputError("r_min must be in (0, r_max)");
    if (per_octave < 1) throw InputError("per_octave must be positive");
    ScaleGrid g{r_max, r_min, per_octave, {}};
    const double step = std::pow(2.0, -1.0 / per_octave);
    double r = r_max;
    // tolerate rounding at the bottom scale
    while (r >= r_min * (1 - 1e-12)) {
      g.scales.push_back(r);
      r *= step;
    }
    if (g.scales.size() < 4) throw InputError("grid needs at least 4 scales");
    return g;
  }

  int octaves() const {
    return static_cast<int>(std::floor(std::log2(r_max / r_min) + 1e-9));
  }
};

/// (log r, log v) rows with v > 0; rows with v <= 0 are dropped and counted.
struct LogLogTable {
  std::vector<double> log_r;  // strictly decreasing
  std::vector<double> log_v;
  std::string label;
  int dropped_rows = 0;

  int rows() const { return static_cast<int>(log_r.size()); }

  static LogLogTable from_values(std::span<const double> r,
                                 std::span<const double> v,
                                 std::string label) {
    LogLogTable t;
    t.label = std::move(label);
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (!(v[i] > 0) || !std::isfinite(v[i])) {
        ++t.dropped_rows;
        continue;
      }
      t.log_r.push_back(std::log(r[i]));
      t.log_v.push_back(std::log(v[i]));
    }
    return t;
  }

  // rows already in log space (used when values only exist as logs)
  static LogLogTable from_logs(std::vector<double> log_r,
                               std::vector<double> log_v, std::string label,
                               int dropped = 0) {
    LogLogTable t;
    t.log_r = std::move(log_r);
    t.log_v = std::move(log_v);
    t.label = std::move(label);
    t.dropped_rows = dropped;
    return t;
  }
};

struct SlopeReport {
  double global_ls = 0;   // least-squares slope over all rows
  double upper_env = 0;   // max window slope
  double lower_env = 0;   // min window slope
  int window = 0;
  int dropped_rows = 0;
};

inline double ls_slope(std::span<const double> x, std::span<const double> y,
                       std::size_t b, std::size_t e) {
  const std::size_t n = e - b;
  double mx = 0, my = 0;
  for (std::size_t i = b; i < e; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0, sxx = 0;
  for (std::size_t i = b; i < e; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx == 0 ? 0 : sxy / sxx;
}

struct Envelope {
  double global = 0, upper = 0, lower = 0;
  int window = 0;
};

/// Least squares over every run of exactly `window` consecutive rows plus the
/// full run. Including the full run keeps lower <= global <= upper true
/// unconditionally.
inline Envelope envelope_slopes(std::span<const double> x,
                                std::span<const double> y, int window) {
  if (window < 2) throw InputError("window must be at least 2");
  const int n = static_cast<int>(x.size());
  if (n < window) throw InputError("table has fewer rows than the window");
  Envelope env;
  env.window = window;
  env.global = ls_slope(x, y, 0, n);
  env.upper = env.lower = env.global;
  for (int b = 0; b + window <= n; ++b) {
    const double s = ls_slope(x, y, b, b + window);
    env.upper = std::max(env.upper, s);
    env.lower = std::min(env.lower, s);
  }
  return env;
}

/// Window slopes of log v against log r (exponents of v ~ r^slope).
inline SlopeReport slope_envelope(const LogLogTable& table, int window) {
  const Envelope env = envelope_slopes(table.log_r, table.log_v, window);
  return SlopeReport{env.global, env.upper, env.lower, window,
                     table.dropped_rows};
}

/// Default estimator window: long fits so that lattice fixtures' staircase
/// wobble averages out; at least an octave, at most the whole table.
inline int auto_window(int rows, int per_octave) {
  const int w = std::max(per_octave + 1, rows - 2 * per_octave);
  return std::min(w, rows);
}

// Below the sample resolution the cloud looks 0-dimensional; estimators
// warn when the grid dips under 4x the fixture mesh.
inline bool mesh_guard_violated(const ScaleGrid& grid, double mesh) {
  return mesh > 0 && grid.r_min < 4 * mesh * (1 - 1e-12);
}

}  // namespace dimlab
