#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dimlab/core.hpp"
#include "dimlab/estimators.hpp"
#include "dimlab/measure.hpp"
#include "dimlab/measure_dims.hpp"
#include "dimlab/scaling.hpp"
#include "dimlab/set_dims.hpp"

namespace dimlab {

struct VerifyCheck {
  std::string name;
  double lhs = 0;  // checked as lhs <= rhs + slack (or |lhs-rhs| <= slack)
  double rhs = 0;
  double slack = 0;
  bool pass = false;
};

struct VerifyReport {
  std::string fixture;
  std::vector<VerifyCheck> checks;
  std::map<std::string, double> gap_metrics;
  bool mesh_warning = false;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  int failures() const {
    int f = 0;
    for (const auto& c : checks) f += !c.pass;
    return f;
  }
};

struct VerifyConfig {
  double r_max = 0.25;
  double r_min = 0;  // 0: derived from the fixture mesh guard
  int per_octave = 3;
  int window = 0;  // 0: auto
  int ratio_floor = 3;
  double slack = 0.1;         // inequality checks
  double limit_slack = 0.15;  // limit-style checks
  double monotone_slack = 0.02;
  double lower_frostman_slack = 0.05;
  double q_limit = -32;
  std::vector<double> thetas = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<double> qs = {-8, -4, -2, 0, 0.5};
  int witness_kmax = 0;           // 0: deep ladder derived from the sample
  std::vector<int> sparse_klist;  // empty: geometric {2,4,8,...}
  // spectrum checks are asserted only where the table carries this much
  // signal; below it the comparison reads quantization noise
  double signal_floor = kSpectrumSignalFloor;
};

namespace detail {

inline void add_le(VerifyReport& rep, std::string name, double lhs, double rhs,
                   double slack) {
  rep.checks.push_back({std::move(name), lhs, rhs, slack, lhs <= rhs + slack});
}

inline void add_abs(VerifyReport& rep, std::string name, double lhs, double rhs,
                    double slack) {
  rep.checks.push_back(
      {std::move(name), lhs, rhs, slack, std::abs(lhs - rhs) <= slack});
}

inline double min_gap_sorted_1d(const PointCloud& cloud) {
  if (!cloud.ascending_1d()) return 0;
  double g = 1;
  const auto& xs = cloud.coords();
  for (std::size_t i = 1; i < xs.size(); ++i)
    g = std::min(g, xs[i] - xs[i - 1]);
  return g;
}

inline std::string theta_tag(double theta) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", theta);
  return buf;
}

}  // namespace detail

/// Runs the inequality-chain and limit checks against a fixture: the ladder
/// (witness) roundtrip, the q- and theta-parameterized chains and their
/// limits, the set-vs-measure spectrum inequality, the lower-spectrum /
/// Frostman bound, and the Frostman-vs-set consistency check. Gap metrics
/// (density gap, condensation spectrum gap, doubling trend, witness-measure
/// slope bias) are reported, not gated.
inline VerifyReport verify_suite(std::shared_ptr<const PointCloud> cloud,
                                 std::optional<DiscreteMeasure> measure,
                                 const VerifyConfig& config = {}) {
  VerifyReport rep;
  rep.fixture = cloud->meta().name;

  const double mesh = cloud->meta().mesh;
  double r_min = config.r_min;
  if (r_min <= 0) r_min = std::max(4 * mesh, config.r_max * std::pow(2.0, -20));
  if (r_min >= config.r_max) r_min = config.r_max / 64;
  const ScaleGrid grid =
      ScaleGrid::geometric(config.r_max, r_min, config.per_octave);
  rep.mesh_warning = mesh_guard_violated(grid, mesh);

  const MinkowskiSetResult set_mink =
      minkowski_dims_set(*cloud, grid, config.window);

  // (a) ladder roundtrip: the construction must reproduce the set's
  // dimensions through its own support. The measure-side slope estimates
  // carry an O(1/log(1/r)) bias from the k^-2 weights and are reported as
  // gap metrics instead of being gated.
  {
    int kmax = config.witness_kmax;
    if (kmax <= 0) {
      const double gap = detail::min_gap_sorted_1d(*cloud);
      const double floor_scale = gap > 0 ? gap / 4 : r_min / 8;
      kmax = std::max(4, static_cast<int>(std::ceil(-std::log2(floor_scale))) + 8);
      kmax = std::min(kmax, 60);
    }
    std::vector<int> full(kmax);
    for (int k = 1; k <= kmax; ++k) full[k - 1] = k;
    const WitnessResult witness = witness_measure(*cloud, full);

    const double wit_rmin =
        std::max(r_min, 4 * witness.measure.host().meta().mesh);
    ScaleGrid wgrid = grid;
    if (wit_rmin > r_min * (1 + 1e-9) && wit_rmin < config.r_max / 8)
      wgrid = ScaleGrid::geometric(config.r_max, wit_rmin, config.per_octave);

    const MinkowskiSetResult support_mink =
        minkowski_dims_set(witness.measure.host(), wgrid, config.window);
    detail::add_abs(rep, "witness_roundtrip_upper", support_mink.upper.value,
                    set_mink.upper.value, config.slack);

    const MinkowskiMeasureResult wit_mu_mink =
        minkowski_dims_measure(witness.measure, wgrid, config.window);
    rep.gap_metrics["witness_measure_upper"] = wit_mu_mink.upper.value;
    rep.gap_metrics["witness_measure_upper_bias"] =
        wit_mu_mink.upper.value - set_mink.upper.value;

    std::vector<int> sparse = config.sparse_klist;
    if (sparse.empty())
      for (int k = 2; k <= kmax; k *= 2) sparse.push_back(k);
    const WitnessResult sparse_witness = witness_measure(*cloud, sparse);
    const double sp_rmin =
        std::max(r_min, 4 * sparse_witness.measure.host().meta().mesh);
    ScaleGrid sgrid = grid;
    if (sp_rmin > r_min * (1 + 1e-9) && sp_rmin < config.r_max / 8)
      sgrid = ScaleGrid::geometric(config.r_max, sp_rmin, config.per_octave);
    const MinkowskiSetResult sparse_support_mink =
        minkowski_dims_set(sparse_witness.measure.host(), sgrid, config.window);
    detail::add_abs(rep, "witness_roundtrip_lower",
                    sparse_support_mink.lower.value, set_mink.lower.value,
                    config.slack);
    const MinkowskiMeasureResult sparse_mu_mink =
        minkowski_dims_measure(sparse_witness.measure, sgrid, config.window);
    rep.gap_metrics["witness_measure_lower"] = sparse_mu_mink.lower.value;

    // non-doubling evidence: worst doubling ratios per octave, a few
    // percent of lattice wobble tolerated in the trend
    const DoublingSweep sweep = doubling_sweep(witness.measure, wgrid);
    rep.gap_metrics["witness_doubling_max_ratio"] = sweep.max_ratio;
    bool trend = true;
    for (std::size_t o = 1; o < sweep.octave_max.size(); ++o)
      if (sweep.octave_max[o] < 0.95 * sweep.octave_max[o - 1]) trend = false;
    rep.gap_metrics["witness_doubling_trend_monotone"] = trend ? 1.0 : 0.0;

    // condensation-style gap: witness spectrum minus set spectrum of the
    // same fixture, minimized over theta (positive for non-doubling
    // witnesses on condensation fixtures)
    double min_gap = std::numeric_limits<double>::infinity();
    for (double theta : config.thetas) {
      const DimensionEstimate mu_spec = assouad_spectrum_measure(
          witness.measure, theta, wgrid, config.window);
      const DimensionEstimate set_spec =
          assouad_spectrum_set(*cloud, theta, grid, config.window);
      min_gap = std::min(min_gap, mu_spec.value - set_spec.value);
    }
    rep.gap_metrics["assouad_spectrum_gap_min_over_theta"] = min_gap;
  }

  if (!measure) return rep;
  const DiscreteMeasure& mu = *measure;

  const MinkowskiMeasureResult mink_mu =
      minkowski_dims_measure(mu, grid, config.window);
  const DimensionEstimate frostman = frostman_dim(mu, grid, config.window);
  const DimensionEstimate assouad_mu =
      assouad_dim_measure(mu, grid, config.ratio_floor, config.window);

  // (b) chain per q and theta, plus the theta -> 0 limit
  std::vector<double> lq_dims;
  for (double q : config.qs) {
    const LqResult lq = lq_spectrum(mu, q, grid, config.window);
    lq_dims.push_back(lq.dim.value);
    detail::add_le(rep, "chain_lq_le_minkowski_q=" + std::to_string(q),
                   lq.dim.value, mink_mu.upper.value, config.slack);
  }
  for (double theta : config.thetas) {
    const DimensionEstimate spec =
        assouad_spectrum_measure(mu, theta, grid, config.window);
    if (spec.signal < config.signal_floor) continue;
    detail::add_le(rep,
                   "chain_minkowski_le_spectrum_theta=" + detail::theta_tag(theta),
                   mink_mu.upper.value, spec.value, config.slack);
    const double cap = std::min(assouad_mu.value,
                                mink_mu.upper.value / (1 - theta));
    detail::add_le(rep, "chain_spectrum_le_cap_theta=" + detail::theta_tag(theta),
                   spec.value, cap, config.slack);
  }
  if (!config.thetas.empty()) {
    const DimensionEstimate spec = assouad_spectrum_measure(
        mu, config.thetas.front(), grid, config.window);
    detail::add_abs(rep, "spectrum_limit_theta_to_0", spec.value,
                    mink_mu.upper.value, config.limit_slack);
  }

  // (c) lq monotone in q and the q -> -inf limit
  for (std::size_t i = 1; i < lq_dims.size(); ++i)
    detail::add_le(rep,
                   "lq_monotone_q=" + std::to_string(config.qs[i - 1]) + "_to_" +
                       std::to_string(config.qs[i]),
                   lq_dims[i], lq_dims[i - 1], config.monotone_slack);
  {
    const LqResult deep = lq_spectrum(mu, config.q_limit, grid, config.window);
    detail::add_abs(rep, "lq_limit_q_to_minus_inf", deep.dim.value,
                    mink_mu.upper.value, config.limit_slack);
  }

  // (d) set spectrum below measure spectrum, and (e) lower spectrum below
  // Frostman, per theta
  for (double theta : config.thetas) {
    const SetSpectrumPair set_pair =
        spectrum_pair_set(*cloud, theta, grid, config.window);
    const MeasureSpectrumPair mu_pair =
        spectrum_pair_measure(mu, theta, grid, config.window);
    if (set_pair.assouad.signal >= config.signal_floor &&
        mu_pair.assouad.signal >= config.signal_floor) {
      detail::add_le(
          rep, "set_spectrum_le_measure_spectrum_theta=" + detail::theta_tag(theta),
          set_pair.assouad.value, mu_pair.assouad.value, config.slack);
    }
    // a flat min-ratio table is itself liminf evidence (the ratio stays
    // bounded), so a zero estimate is asserted even under the signal floor
    if (mu_pair.lower.signal >= config.signal_floor || mu_pair.lower.value == 0) {
      detail::add_le(rep,
                     "lower_spectrum_le_frostman_theta=" + detail::theta_tag(theta),
                     mu_pair.lower.value, frostman.value,
                     config.lower_frostman_slack);
    }
  }

  // (f) Frostman consistency with the set's lower Minkowski dimension
  detail::add_le(rep, "frostman_le_set_lower_minkowski", frostman.value,
                 set_mink.lower.value, config.slack);

  // (g) gap metrics
  {
    const DensityResult density =
        density_dim(mu, grid, grid.per_octave + 1);  // liminf-faithful window
    rep.gap_metrics["dimm_upper_minus_density"] =
        mink_mu.upper.value - density.estimate.value;
  }
  rep.gap_metrics["assouad_measure_minus_set"] =
      assouad_mu.value - assouad_dim_set(*cloud, grid, config.ratio_floor).value;
  {
    const DoublingSweep sweep = doubling_sweep(mu, grid);
    rep.gap_metrics["doubling_max_ratio"] = sweep.max_ratio;
  }
  return rep;
}

}  // namespace dimlab
