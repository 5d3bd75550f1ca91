#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dimlab/core.hpp"
#include "dimlab/measure.hpp"

namespace dimlab {

/// One contracting similitude x -> ratio * O x + translation with O
/// orthogonal (row-major, verified to 1e-9).
struct Similitude {
  double ratio = 0;
  std::vector<double> ortho;        // d*d row-major; empty means identity
  std::vector<double> translation;  // d entries
};

struct IFSSpec {
  int dim = 0;
  std::vector<Similitude> maps;

  void validate() const {
    if (dim <= 0) throw InputError("IFS dimension must be positive");
    if (maps.size() < 2) throw InputError("IFS needs at least 2 maps");
    for (const auto& m : maps) {
      if (!(m.ratio > 0 && m.ratio < 1))
        throw InputError("similitude ratios must lie in (0,1)");
      if (static_cast<int>(m.translation.size()) != dim)
        throw InputError("translation dimension mismatch");
      if (!m.ortho.empty()) {
        if (static_cast<int>(m.ortho.size()) != dim * dim)
          throw InputError("orthogonal block must be d x d");
        for (int i = 0; i < dim; ++i)
          for (int j = 0; j < dim; ++j) {
            double dot = 0;
            for (int k = 0; k < dim; ++k)
              dot += m.ortho[i * dim + k] * m.ortho[j * dim + k];
            const double want = i == j ? 1.0 : 0.0;
            if (std::abs(dot - want) > 1e-9)
              throw InputError("matrix is not orthogonal");
          }
      }
    }
  }

  void apply(int map_index, const double* in, double* out) const {
    const Similitude& m = maps[map_index];
    if (m.ortho.empty()) {
      for (int k = 0; k < dim; ++k)
        out[k] = m.ratio * in[k] + m.translation[k];
      return;
    }
    for (int i = 0; i < dim; ++i) {
      double acc = 0;
      for (int k = 0; k < dim; ++k) acc += m.ortho[i * dim + k] * in[k];
      out[i] = m.ratio * acc + m.translation[i];
    }
  }

  double max_ratio() const {
    double m = 0;
    for (const auto& s : maps) m = std::max(m, s.ratio);
    return m;
  }

  // fixed point of the first map: seed that stays inside the attractor hull
  std::vector<double> first_map_fixed_point() const {
    std::vector<double> x(dim, 0.0), y(dim, 0.0);
    for (int iter = 0; iter < 256; ++iter) {
      apply(0, x.data(), y.data());
      x.swap(y);
    }
    return x;
  }

  // radius bound: the attractor lies within R of the seed when
  // |phi_i(seed)-seed| <= (1-rho)R for every map
  double hull_radius(std::span<const double> seed) const {
    double worst = 0;
    std::vector<double> img(dim);
    for (std::size_t i = 0; i < maps.size(); ++i) {
      apply(static_cast<int>(i), seed.data(), img.data());
      double d = 0;
      for (int k = 0; k < dim; ++k) d += (img[k] - seed[k]) * (img[k] - seed[k]);
      worst = std::max(worst, std::sqrt(d));
    }
    return worst / (1 - max_ratio());
  }
};

/// Root of sum_i ratio_i^s = 1, by bisection to 1e-12. The left side is
/// strictly decreasing in s, so the root is unique.
inline double similitude_dimension(const std::vector<double>& ratios) {
  if (ratios.size() < 2) throw InputError("need at least 2 ratios");
  for (double r : ratios)
    if (!(r > 0 && r < 1)) throw InputError("ratios must lie in (0,1)");
  auto f = [&](double s) {
    double acc = 0;
    for (double r : ratios) acc += std::pow(r, s);
    return acc - 1.0;
  };
  double hi = 1.0;
  while (f(hi) > 0) hi *= 2;
  double lo = 0.0;
  for (int iter = 0; iter < 200 && hi - lo > 1e-12; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline constexpr std::int64_t kDefaultWordCap = 4'000'000;

namespace detail {

// phi_w(seed) for every word w of the given length, lexicographic order
inline void enumerate_words(const IFSSpec& spec, int depth,
                            std::span<const double> seed,
                            std::vector<double>& out) {
  const int d = spec.dim;
  if (depth == 0) {
    out.insert(out.end(), seed.begin(), seed.end());
    return;
  }
  std::vector<int> word(depth, 0);
  const int nmaps = static_cast<int>(spec.maps.size());
  std::vector<double> p(d), q(d);
  for (;;) {
    std::copy(seed.begin(), seed.end(), p.begin());
    for (int i = depth - 1; i >= 0; --i) {
      spec.apply(word[i], p.data(), q.data());
      p.swap(q);
    }
    out.insert(out.end(), p.begin(), p.end());
    int k = depth - 1;
    while (k >= 0 && word[k] == nmaps - 1) word[k--] = 0;
    if (k < 0) break;
    ++word[k];
  }
}

}  // namespace detail

struct CloudResult {
  std::shared_ptr<PointCloud> cloud;
  std::int64_t words_before_dedup = 0;
};

/// All depth-fold words applied to the seed, deduplicated, normalized to
/// diameter <= 1. mesh = (max ratio)^depth * hull diameter bound.
inline CloudResult self_similar_cloud(const IFSSpec& spec, int depth,
                                      std::optional<std::vector<double>> seed_opt = {},
                                      std::int64_t cap = kDefaultWordCap,
                                      Metric metric = Metric::euclidean,
                                      std::string name = "self_similar") {
  spec.validate();
  if (depth < 0) throw InputError("depth must be non-negative");
  const std::int64_t words =
      static_cast<std::int64_t>(std::llround(std::pow(static_cast<double>(spec.maps.size()), depth)));
  if (words > cap) throw CapacityError("word count exceeds the cap");
  const std::vector<double> seed =
      seed_opt ? *seed_opt : spec.first_map_fixed_point();
  if (static_cast<int>(seed.size()) != spec.dim)
    throw InputError("seed dimension mismatch");

  std::vector<double> coords;
  coords.reserve(static_cast<std::size_t>(words) * spec.dim);
  detail::enumerate_words(spec, depth, seed, coords);

  FixtureMeta meta;
  meta.name = std::move(name);
  meta.kind = "self_similar";
  // every attractor point lies within ratio^depth * diam of its word's
  // sample point; diam <= sample bbox diagonal + 2 * mesh closes the bound
  const double contraction = std::pow(spec.max_ratio(), depth);
  const double diag =
      PointCloud(coords, spec.dim, metric, {}).bbox_diameter();
  meta.mesh = contraction < 0.5
                  ? contraction * diag / (1 - 2 * contraction)
                  : contraction * spec.hull_radius(seed);
  CloudResult res;
  res.words_before_dedup = words;
  res.cloud = std::make_shared<PointCloud>(
      finalize_cloud(std::move(coords), spec.dim, metric, std::move(meta)));
  return res;
}

/// Inhomogeneous attractor sample: the self-similar sample union
/// phi_w(condensation) over all words w of length 0..depth.
inline CloudResult inhomogeneous_cloud(const IFSSpec& spec,
                                       const PointCloud& condensation,
                                       int depth,
                                       std::int64_t cap = kDefaultWordCap,
                                       std::string name = "inhomog") {
  spec.validate();
  if (condensation.dim() != spec.dim)
    throw InputError("condensation dimension mismatch");
  const int nmaps = static_cast<int>(spec.maps.size());
  double words_d = std::pow(static_cast<double>(nmaps), depth);
  std::int64_t total = static_cast<std::int64_t>(words_d);
  double copies = 0;
  for (int l = 0; l <= depth; ++l) copies += std::pow(static_cast<double>(nmaps), l);
  total += static_cast<std::int64_t>(copies) * condensation.size();
  if (total > cap) throw CapacityError("word count exceeds the cap");

  std::vector<double> coords;
  const std::vector<double> seed = spec.first_map_fixed_point();
  detail::enumerate_words(spec, depth, seed, coords);

  // phi_w(C) for every word of length 0..depth
  const int d = spec.dim;
  std::vector<int> word;
  std::vector<double> p(d), q(d);
  auto emit_copies = [&](const std::vector<int>& w) {
    for (int c = 0; c < condensation.size(); ++c) {
      auto pt = condensation.point(c);
      std::copy(pt.begin(), pt.end(), p.begin());
      for (int i = static_cast<int>(w.size()) - 1; i >= 0; --i) {
        spec.apply(w[i], p.data(), q.data());
        p.swap(q);
      }
      coords.insert(coords.end(), p.begin(), p.end());
    }
  };
  auto rec = [&](auto&& self, int remaining) -> void {
    emit_copies(word);
    if (remaining == 0) return;
    for (int m = 0; m < nmaps; ++m) {
      word.push_back(m);
      self(self, remaining - 1);
      word.pop_back();
    }
  };
  rec(rec, depth);

  FixtureMeta meta;
  meta.name = std::move(name);
  meta.kind = "inhomog";
  // missing deep copies phi_w(C), |w| > depth, sit within ratio^depth * diam
  // of the kept copy under the length-depth prefix of w
  const double contraction = std::pow(spec.max_ratio(), depth);
  const double diag =
      PointCloud(coords, spec.dim, condensation.metric(), {}).bbox_diameter();
  meta.mesh = contraction < 0.5
                  ? contraction * diag / (1 - 2 * contraction)
                  : contraction * (2 * spec.hull_radius(seed) +
                                   condensation.bbox_diameter() + 2);
  CloudResult res;
  res.words_before_dedup = total;
  res.cloud = std::make_shared<PointCloud>(finalize_cloud(
      std::move(coords), spec.dim, condensation.metric(), std::move(meta)));
  return res;
}

struct BMCarpetSpec {
  int p = 0, q = 0;                       // q > p > 1
  std::vector<std::pair<int, int>> digits;  // (j, k) with 0<=j<p, 0<=k<q

  void validate() const {
    if (!(q > p && p > 1)) throw InputError("carpet needs q > p > 1");
    if (digits.size() < 2 || digits.size() > static_cast<std::size_t>(p) * q)
      throw InputError("digit set size must be in [2, p*q]");
    std::set<std::pair<int, int>> seen;
    for (auto [j, k] : digits) {
      if (j < 0 || j >= p || k < 0 || k >= q) throw InputError("digit out of range");
      if (!seen.insert({j, k}).second) throw InputError("duplicate digit");
    }
  }

  std::vector<int> column_counts() const {
    std::vector<int> n(p, 0);
    for (auto [j, k] : digits) ++n[j];
    return n;
  }

  bool uniform_fibers() const {
    const std::vector<int> n = column_counts();
    int common = 0;
    for (int c : n) {
      if (c == 0) continue;
      if (common == 0) common = c;
      else if (c != common) return false;
    }
    return true;
  }
};

struct BMResult {
  std::shared_ptr<PointCloud> cloud;
  std::vector<int> column_counts;
  bool uniform_fibers = false;
};

/// Depth-fold digit strings applied to (0,0): points
/// (sum_m j_m p^-m, sum_m k_m q^-m). Chebyshev metric keeps the sample
/// inside the unit square without rescaling.
inline BMResult bedford_mcmullen_cloud(const BMCarpetSpec& spec, int depth,
                                       std::int64_t cap = kDefaultWordCap,
                                       std::string name = "bm") {
  spec.validate();
  if (depth < 1) throw InputError("depth must be positive");
  const double words_d = std::pow(static_cast<double>(spec.digits.size()), depth);
  if (words_d > static_cast<double>(cap)) throw CapacityError("word count exceeds the cap");

  std::vector<std::pair<int, int>> digits = spec.digits;
  std::sort(digits.begin(), digits.end());

  std::vector<double> coords;
  coords.reserve(static_cast<std::size_t>(words_d) * 2);
  std::vector<int> word(depth, 0);
  const int nd = static_cast<int>(digits.size());
  for (;;) {
    double x = 0, y = 0, px = 1, qy = 1;
    for (int m = 0; m < depth; ++m) {
      px /= spec.p;
      qy /= spec.q;
      x += digits[word[m]].first * px;
      y += digits[word[m]].second * qy;
    }
    coords.push_back(x);
    coords.push_back(y);
    int k = depth - 1;
    while (k >= 0 && word[k] == nd - 1) word[k--] = 0;
    if (k < 0) break;
    ++word[k];
  }

  FixtureMeta meta;
  meta.name = std::move(name);
  meta.kind = "bm";
  meta.mesh = std::pow(1.0 / spec.p, depth);  // chebyshev cell bound
  BMResult res;
  res.column_counts = spec.column_counts();
  res.uniform_fibers = spec.uniform_fibers();
  res.cloud = std::make_shared<PointCloud>(finalize_cloud(
      std::move(coords), 2, Metric::chebyshev, std::move(meta)));
  return res;
}

struct FixturePair {
  std::shared_ptr<PointCloud> cloud;
  std::optional<DiscreteMeasure> measure;
};

/// Points {0} u {1/n : 1 <= n <= N}, ascending; weight 1 at 0 and n^-2 at
/// 1/n. Total mass tends to 1 + pi^2/6 as N grows.
inline FixturePair sequence_fixture(int N) {
  if (N < 2) throw InputError("sequence fixture needs N >= 2");
  std::vector<double> coords;
  std::vector<double> weights;
  coords.push_back(0.0);
  weights.push_back(1.0);
  for (int n = N; n >= 1; --n) {
    coords.push_back(1.0 / n);
    weights.push_back(1.0 / (static_cast<double>(n) * n));
  }
  FixtureMeta meta;
  meta.name = "sequence";
  meta.kind = "sequence";
  meta.mesh = 1.0 / (N + 1);  // dropped tail points sit within 1/(N+1) of 0
  auto cloud = std::make_shared<PointCloud>(std::move(coords), 1,
                                            Metric::euclidean, std::move(meta));
  FixturePair res;
  res.cloud = cloud;
  res.measure.emplace(cloud, std::move(weights), /*full_support=*/true);
  return res;
}

/// Corner assembly: component dusts X_n (four-corner IFS with ratio
/// 4^(-1/s_n), s_n = s(1 - 1/2n), so their similitude dimension is exactly
/// s_n) placed by the maps (y + t_i)/3^(k+1), t in {(0,2),(2,2),(2,0)},
/// k = n-1, plus the origin.
inline CloudResult corner_fixture(double s, int k_max, int depth,
                                  std::int64_t cap = kDefaultWordCap) {
  if (!(s > 0 && s <= 2)) throw InputError("s must lie in (0,2]");
  if (k_max < 1 || depth < 1) throw InputError("k_max and depth must be positive");
  const double per_component = std::pow(4.0, depth);
  if (3.0 * k_max * per_component > static_cast<double>(cap))
    throw CapacityError("word count exceeds the cap");

  std::vector<double> coords = {0.0, 0.0};
  const std::vector<std::vector<double>> corner_t = {
      {0, 2}, {2, 2}, {2, 0}};  // outer translations (map 1 is the contraction to 0)
  double mesh = 0;
  for (int n = 1; n <= k_max; ++n) {
    const double sn = s * (1.0 - 1.0 / (2.0 * n));
    const double rho = std::pow(4.0, -1.0 / sn);
    // four-corner dust in [0,1]^2 with ratio rho
    IFSSpec dust;
    dust.dim = 2;
    for (auto [cx, cy] : std::vector<std::pair<double, double>>{
             {0, 0}, {0, 1 - rho}, {1 - rho, 1 - rho}, {1 - rho, 0}}) {
      dust.maps.push_back({rho, {}, {cx, cy}});
    }
    std::vector<double> pts;
    detail::enumerate_words(dust, depth, std::vector<double>{0.0, 0.0}, pts);
    const double scale = std::pow(3.0, -n);  // 1/3^(k+1) with k = n-1
    for (const auto& t : corner_t) {
      for (std::size_t i = 0; i < pts.size(); i += 2) {
        coords.push_back((pts[i] + t[0]) * scale);
        coords.push_back((pts[i + 1] + t[1]) * scale);
      }
    }
    mesh = std::max(mesh, std::pow(rho, depth) * std::sqrt(2.0) * scale);
  }
  // the untruncated tail (components beyond k_max) sits within 3^-k_max of 0
  mesh = std::max(mesh, std::pow(3.0, -k_max));
  // lexicographic order admits slab queries; scan order is a free choice
  std::vector<std::pair<double, double>> pts(coords.size() / 2);
  for (std::size_t i = 0; i < pts.size(); ++i)
    pts[i] = {coords[i * 2], coords[i * 2 + 1]};
  std::sort(pts.begin(), pts.end());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    coords[i * 2] = pts[i].first;
    coords[i * 2 + 1] = pts[i].second;
  }
  FixtureMeta meta;
  meta.name = "corner";
  meta.kind = "corner";
  meta.mesh = mesh;
  CloudResult res;
  res.words_before_dedup = 1 + 3LL * k_max * static_cast<std::int64_t>(per_component);
  res.cloud = std::make_shared<PointCloud>(finalize_cloud(
      std::move(coords), 2, Metric::euclidean, std::move(meta)));
  return res;
}

/// count equally spaced points on [0,1].
inline CloudResult grid_fixture(int count) {
  if (count < 2) throw InputError("grid fixture needs at least 2 points");
  std::vector<double> coords(count);
  for (int i = 0; i < count; ++i)
    coords[i] = static_cast<double>(i) / (count - 1);
  FixtureMeta meta;
  meta.name = "grid";
  meta.kind = "grid";
  meta.mesh = 0.5 / (count - 1);
  CloudResult res;
  res.words_before_dedup = count;
  res.cloud = std::make_shared<PointCloud>(std::move(coords), 1,
                                           Metric::euclidean, std::move(meta));
  return res;
}

/// Standard middle-thirds sample on the line: maps x/3 and x/3 + 2/3.
inline CloudResult cantor_cloud(int depth, std::int64_t cap = kDefaultWordCap) {
  IFSSpec spec;
  spec.dim = 1;
  spec.maps = {{1.0 / 3.0, {}, {0.0}}, {1.0 / 3.0, {}, {2.0 / 3.0}}};
  CloudResult res = self_similar_cloud(spec, depth, std::vector<double>{0.0},
                                       cap, Metric::euclidean, "cantor");
  res.cloud->meta().kind = "cantor";
  return res;
}

/// Uniform weights on every point of a cloud.
inline DiscreteMeasure uniform_measure(std::shared_ptr<const PointCloud> cloud) {
  const int n = cloud->size();
  return DiscreteMeasure(std::move(cloud),
                         std::vector<double>(n, 1.0 / n), true);
}

}  // namespace dimlab
