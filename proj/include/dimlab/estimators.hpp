#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "dimlab/scaling.hpp"

namespace dimlab {

enum class Quantity {
  minkowski_upper,
  minkowski_lower,
  assouad,
  assouad_spectrum,
  lower_spectrum,
  frostman,
  density,
  lq,
};

inline const char* quantity_name(Quantity q) {
  switch (q) {
    case Quantity::minkowski_upper: return "minkowski_upper";
    case Quantity::minkowski_lower: return "minkowski_lower";
    case Quantity::assouad: return "assouad";
    case Quantity::assouad_spectrum: return "assouad_spectrum";
    case Quantity::lower_spectrum: return "lower_spectrum";
    case Quantity::frostman: return "frostman";
    case Quantity::density: return "density";
    case Quantity::lq: return "lq";
  }
  return "unknown";
}

struct GridEcho {
  double r_max = 0, r_min = 0;
  int per_octave = 0;
  GridEcho() = default;
  GridEcho(const ScaleGrid& g)
      : r_max(g.r_max), r_min(g.r_min), per_octave(g.per_octave) {}
};

/// A dimension estimate: `value` is the designated envelope of the report
/// (upper_env for limsup-type quantities, lower_env for liminf-type),
/// clamped at 0 with the raw value retained. Report slopes are oriented so
/// they live on the dimension scale.
struct DimensionEstimate {
  Quantity quantity{};
  double value = 0;
  double raw_value = 0;
  std::optional<double> theta;
  std::optional<double> q;
  SlopeReport report;
  GridEcho grid;
  bool mesh_warning = false;
  // log-range of the fitted data: how much two-scale signal the sample
  // carried for this quantity; estimates under ~2 nats are noise-bound
  double signal = 0;
};

// Spectrum assertions below this signal range compare quantization noise,
// not exponents.
inline constexpr double kSpectrumSignalFloor = 2.0;

inline double clamp0(double v) { return v > 0 ? v : 0.0; }

/// Estimates of one quantity over a grid of theta or q parameters.
struct SpectrumCurve {
  Quantity quantity{};
  std::vector<double> parameter;  // strictly increasing
  std::vector<DimensionEstimate> estimates;
  std::string fixture;
};

}  // namespace dimlab
