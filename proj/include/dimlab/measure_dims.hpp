#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "dimlab/core.hpp"
#include "dimlab/estimators.hpp"
#include "dimlab/measure.hpp"
#include "dimlab/parallel.hpp"
#include "dimlab/scaling.hpp"
#include "dimlab/set_dims.hpp"

namespace dimlab {

namespace detail {

// masses[j][i] = mu(B(p_i, r_j)); throws if full support is broken
inline std::vector<std::vector<double>> mass_matrix(const DiscreteMeasure& mu,
                                                    const std::vector<double>& radii) {
  std::vector<std::vector<double>> m(radii.size());
  for (std::size_t j = 0; j < radii.size(); ++j) {
    m[j] = ball_masses_all(mu, radii[j]);
    for (double v : m[j])
      if (!(v > 0))
        throw ContractViolation("zero ball mass under a fully supported measure");
  }
  return m;
}

inline void require_full_support(const DiscreteMeasure& mu) {
  if (!mu.full_support())
    throw ContractViolation("estimator requires a fully supported measure");
}

}  // namespace detail

struct MinkowskiMeasureResult {
  DimensionEstimate upper;
  DimensionEstimate lower;
  LogLogTable table;  // (log r, log min ball mass)
};

/// Minkowski dimensions of a measure: envelope slopes of -log m(r) against
/// -log r where m(r) is the minimum ball mass over all host centers. The
/// along-a-sequence lower variant is realized as the best window.
inline MinkowskiMeasureResult minkowski_dims_measure(const DiscreteMeasure& mu,
                                                     const ScaleGrid& grid,
                                                     int window = 0) {
  detail::require_full_support(mu);
  const bool warn = mesh_guard_violated(grid, mu.host().meta().mesh);
  std::vector<double> xs, ys, rs, vs;
  for (double r : grid.scales) {
    const BallMassExtrema ex = ball_mass_extrema(mu, r);
    if (!(ex.min_mass > 0))
      throw ContractViolation("zero ball mass under a fully supported measure");
    xs.push_back(-std::log(r));
    ys.push_back(-std::log(ex.min_mass));
    rs.push_back(r);
    vs.push_back(ex.min_mass);
  }
  const int w = window > 0 ? window
                           : auto_window(static_cast<int>(xs.size()), grid.per_octave);
  const Envelope env = envelope_slopes(xs, ys, w);
  return MinkowskiMeasureResult{
      detail::make_estimate(Quantity::minkowski_upper, env, true, grid, warn, 0),
      detail::make_estimate(Quantity::minkowski_lower, env, false, grid, warn, 0),
      LogLogTable::from_values(rs, vs, "min_ball_mass")};
}

/// Frostman dimension: the greatest exponent with all ball masses <= C r^s;
/// lower envelope of -log max-mass slopes, clamped at 0.
inline DimensionEstimate frostman_dim(const DiscreteMeasure& mu,
                                      const ScaleGrid& grid, int window = 0) {
  detail::require_full_support(mu);
  const bool warn = mesh_guard_violated(grid, mu.host().meta().mesh);
  std::vector<double> xs, ys;
  for (double r : grid.scales) {
    const BallMassExtrema ex = ball_mass_extrema(mu, r);
    xs.push_back(-std::log(r));
    ys.push_back(-std::log(ex.max_mass));
  }
  const int w = window > 0 ? window
                           : auto_window(static_cast<int>(xs.size()), grid.per_octave);
  const Envelope env = envelope_slopes(xs, ys, w);
  return detail::make_estimate(Quantity::frostman, env, false, grid, warn, 0);
}

struct PointwiseExponent {
  int point_index = 0;
  double exponent = 0;
};

struct DensityResult {
  DimensionEstimate estimate;  // max over points of the pointwise exponent
  std::vector<PointwiseExponent> pointwise;
  int arg_max = 0;
};

/// Density dimension: per host point, the lower envelope of its ball-mass
/// slopes (the least exponent keeping the lower density positive at finite
/// scale); the estimate is the worst point.
inline DensityResult density_dim(const DiscreteMeasure& mu,
                                 const ScaleGrid& grid, int window = 0) {
  detail::require_full_support(mu);
  const bool warn = mesh_guard_violated(grid, mu.host().meta().mesh);
  const std::vector<std::vector<double>> masses =
      detail::mass_matrix(mu, grid.scales);
  const int n = mu.host().size();
  const int rows = static_cast<int>(grid.scales.size());
  std::vector<double> xs(rows);
  for (int j = 0; j < rows; ++j) xs[j] = -std::log(grid.scales[j]);
  const int w = window > 0 ? window : auto_window(rows, grid.per_octave);

  std::vector<double> exponents(n);
  std::vector<double> lower_envs(n);
  parallel_for(n, [&](std::int64_t b, std::int64_t e) {
    std::vector<double> ys(rows);
    for (std::int64_t i = b; i < e; ++i) {
      for (int j = 0; j < rows; ++j) ys[j] = -std::log(masses[j][i]);
      const Envelope env = envelope_slopes(xs, ys, w);
      lower_envs[i] = env.lower;
      exponents[i] = clamp0(env.lower);
    }
  });

  DensityResult res;
  res.pointwise.resize(n);
  int arg = 0;
  for (int i = 0; i < n; ++i) {
    res.pointwise[i] = {i, exponents[i]};
    if (exponents[i] > exponents[arg]) arg = i;
  }
  res.arg_max = arg;

  // report echoes the worst point's envelope
  std::vector<double> ys(rows);
  for (int j = 0; j < rows; ++j) ys[j] = -std::log(masses[j][arg]);
  const Envelope env = envelope_slopes(xs, ys, w);
  res.estimate = detail::make_estimate(Quantity::density, env, false, grid, warn, 0);
  res.estimate.value = exponents[arg];
  res.estimate.raw_value = lower_envs[arg];
  return res;
}

struct LqResult {
  DimensionEstimate dim;  // tau/(q-1), clamped at 0
  double tau = 0;
  LogLogTable table;  // (log r, log of the better packing-moment sum)
};

/// L^q spectrum: per scale, the packing-moment sum sum_B mu(B)^q is
/// approximated by the better of two greedy maximal packings (input order
/// and mass-extremal order: ascending masses for q < 1, descending for
/// q > 1); tau is the lower envelope of the sum's log-log slopes.
inline LqResult lq_spectrum(const DiscreteMeasure& mu, double q,
                            const ScaleGrid& grid, int window = 0) {
  if (q == 1) throw InputError("q must differ from 1");
  detail::require_full_support(mu);
  const bool warn = mesh_guard_violated(grid, mu.host().meta().mesh);
  const PointCloud& cloud = mu.host();
  const int n = cloud.size();

  auto log_moment_sum = [&](const std::vector<int>& centers,
                            const std::vector<double>& masses) {
    // log sum exp of q*log(mass) over the packing centers
    double peak = -std::numeric_limits<double>::infinity();
    for (int id : centers)
      peak = std::max(peak, q * std::log(masses[id]));
    double acc = 0;
    for (int id : centers) acc += std::exp(q * std::log(masses[id]) - peak);
    return peak + std::log(acc);
  };

  std::vector<double> xs, ys;
  std::vector<double> log_rs, log_vs;
  for (double r : grid.scales) {
    const std::vector<double> masses = ball_masses_all(mu, r);
    for (double v : masses)
      if (!(v > 0))
        throw ContractViolation("zero ball mass under a fully supported measure");

    const Packing input_order = cloud.ascending_1d()
                                    ? greedy_packing_sorted_1d(cloud, r)
                                    : greedy_maximal_packing(cloud, r);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return q > 1 ? masses[a] > masses[b] : masses[a] < masses[b];
    });
    const Packing extremal = greedy_maximal_packing(cloud, r, order);

    const double s = std::max(log_moment_sum(input_order.center_ids, masses),
                              log_moment_sum(extremal.center_ids, masses));
    xs.push_back(-std::log(r));
    ys.push_back(s);
    log_rs.push_back(std::log(r));
    log_vs.push_back(s);
  }
  const int w = window > 0 ? window : static_cast<int>(xs.size());
  // slope of log M_q vs -log r is -tau; liminf tau = -(limsup of -tau)
  const Envelope env = envelope_slopes(xs, ys, w);
  const double tau = -env.upper;

  LqResult res;
  res.tau = tau;
  Envelope dim_env;  // oriented to the dimension scale
  dim_env.global = -env.global / (q - 1);
  const double a = -env.upper / (q - 1), b = -env.lower / (q - 1);
  dim_env.upper = std::max(a, b);
  dim_env.lower = std::min(a, b);
  dim_env.window = env.window;
  res.dim = detail::make_estimate(Quantity::lq, dim_env, q < 1, grid, warn, 0);
  res.dim.q = q;
  res.dim.raw_value = tau / (q - 1);
  res.dim.value = clamp0(res.dim.raw_value);
  res.table = LogLogTable::from_logs(std::move(log_rs), std::move(log_vs),
                                     "lq_moment_sum");
  return res;
}

namespace detail {

struct MeasureSpectrumData {
  Envelope env_max;  // slopes of log max_x ratio vs (1-theta)(-log r)
  Envelope env_min;
  int dropped = 0;
  double signal_max = 0;  // y-range of the fitted rows
  double signal_min = 0;
};

inline MeasureSpectrumData measure_spectrum_data(const DiscreteMeasure& mu,
                                                 double theta,
                                                 const ScaleGrid& grid,
                                                 int window) {
  if (!(theta > 0 && theta < 1)) throw InputError("theta must be in (0,1)");
  require_full_support(mu);
  const int n = mu.host().size();
  const double half_diam = mu.host().bbox_diameter() / 2;
  std::vector<double> xs, ys_max, ys_min;
  std::vector<char> saturated;
  for (double r : grid.scales) {
    const double rho = std::pow(r, theta);
    const std::vector<double> m_r = ball_masses_all(mu, r);
    const std::vector<double> m_rho = ball_masses_all(mu, rho);
    double worst = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int p = 0; p < n; ++p) {
      if (!(m_r[p] > 0))
        throw ContractViolation("zero ball mass under a fully supported measure");
      const double ratio = m_rho[p] / m_r[p];
      worst = std::max(worst, ratio);
      best = std::min(best, ratio);
    }
    xs.push_back((1 - theta) * -std::log(r));
    ys_max.push_back(std::log(worst));
    ys_min.push_back(std::log(best));
    saturated.push_back(rho >= half_diam);
  }
  const int keep_floor = std::max(4, 2 * grid.per_octave + 2);
  const SpectrumRows max_rows = trim_saturated(xs, ys_max, saturated, keep_floor);
  const SpectrumRows min_rows = trim_saturated(xs, ys_min, saturated, keep_floor);
  MeasureSpectrumData data;
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

/// Assouad spectrum of a measure at theta: envelope slopes of
/// log max_x mass(x, r^theta)/mass(x, r) against (1-theta)(-log r).
inline DimensionEstimate assouad_spectrum_measure(const DiscreteMeasure& mu,
                                                  double theta,
                                                  const ScaleGrid& grid,
                                                  int window = 0) {
  const bool warn = mesh_guard_violated(grid, mu.host().meta().mesh);
  const detail::MeasureSpectrumData data =
      detail::measure_spectrum_data(mu, theta, grid, window);
  DimensionEstimate est = detail::make_estimate(
      Quantity::assouad_spectrum, data.env_max, true, grid, warn, data.dropped);
  est.theta = theta;
  est.signal = data.signal_max;
  return est;
}

/// Lower spectrum of a measure at theta: envelope slopes of
/// log min_x mass(x, r^theta)/mass(x, r), lower envelope, clamped at 0.
inline DimensionEstimate lower_spectrum_measure(const DiscreteMeasure& mu,
                                                double theta,
                                                const ScaleGrid& grid,
                                                int window = 0) {
  const bool warn = mesh_guard_violated(grid, mu.host().meta().mesh);
  const detail::MeasureSpectrumData data =
      detail::measure_spectrum_data(mu, theta, grid, window);
  DimensionEstimate est = detail::make_estimate(
      Quantity::lower_spectrum, data.env_min, false, grid, warn, data.dropped);
  est.theta = theta;
  est.signal = data.signal_min;
  return est;
}

/// Both measure spectra at one theta from a single pair of mass sweeps.
struct MeasureSpectrumPair {
  DimensionEstimate assouad;
  DimensionEstimate lower;
};

inline MeasureSpectrumPair spectrum_pair_measure(const DiscreteMeasure& mu,
                                                 double theta,
                                                 const ScaleGrid& grid,
                                                 int window = 0) {
  const bool warn = mesh_guard_violated(grid, mu.host().meta().mesh);
  const detail::MeasureSpectrumData data =
      detail::measure_spectrum_data(mu, theta, grid, window);
  MeasureSpectrumPair pair;
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

/// Assouad dimension of a measure (upper regularity). Two families of scale
/// pairs are probed and the steeper wins: fixed-R strata (LS slope of
/// log max_x mass(x,R)/mass(x,r) against log(R/r)) and the R = r^theta
/// diagonals. Non-doubling measures concentrate their worst ratios on tied
/// scale pairs, which fixed-R strata cannot see; diagonal probes whose
/// table range sits under the signal floor contribute noise, not exponent
/// evidence, and are skipped.
inline DimensionEstimate assouad_dim_measure(const DiscreteMeasure& mu,
                                             const ScaleGrid& grid,
                                             int ratio_floor = 3,
                                             int probe_window = 0) {
  detail::require_full_support(mu);
  if (grid.octaves() < ratio_floor + 2)
    throw InputError("grid must span at least ratio_floor + 2 octaves");
  const bool warn = mesh_guard_violated(grid, mu.host().meta().mesh);
  const std::vector<std::vector<double>> masses =
      detail::mass_matrix(mu, grid.scales);
  const std::size_t nscale = grid.scales.size();
  const int n = mu.host().size();

  std::vector<double> slopes;
  for (std::size_t i = 0; i < nscale; ++i) {
    const double R = grid.scales[i];
    if (std::log2(R / grid.r_min) < ratio_floor + 1) continue;
    std::vector<double> sx, sy;
    for (std::size_t j = i + 1; j < nscale; ++j) {
      const double r = grid.scales[j];
      if (R < 2 * r) continue;
      double worst = 0;
      for (int p = 0; p < n; ++p)
        worst = std::max(worst, masses[i][p] / masses[j][p]);
      sx.push_back(std::log(R / r));
      sy.push_back(std::log(worst));
    }
    if (sx.size() < 4) continue;
    slopes.push_back(ls_slope(sx, sy, 0, sx.size()));
  }
  if (slopes.empty()) throw InputError("no eligible scale pairs for the Assouad sweep");
  double signal = 0;
  for (std::size_t i = 0; i < nscale; ++i) {
    const double R = grid.scales[i];
    if (std::log2(R / grid.r_min) < ratio_floor + 1) continue;
    for (std::size_t j = i + 1; j < nscale; ++j) {
      if (R < 2 * grid.scales[j]) continue;
      double worst = 0;
      for (int p = 0; p < n; ++p)
        worst = std::max(worst, masses[i][p] / masses[j][p]);
      signal = std::max(signal, std::log(worst));
    }
  }
  for (double theta : {0.5, 0.7, 0.9}) {
    const detail::MeasureSpectrumData data =
        detail::measure_spectrum_data(mu, theta, grid, probe_window);
    if (data.signal_max < kSpectrumSignalFloor) continue;
    slopes.push_back(data.env_max.upper);
    signal = std::max(signal, data.signal_max);
  }
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
