#pragma once

#include <memory>
#include <random>
#include <vector>

#include "dimlab/core.hpp"
#include "dimlab/measure.hpp"

namespace test_util {

inline std::shared_ptr<dimlab::PointCloud> cloud_1d(
    std::vector<double> xs, dimlab::FixtureMeta meta = {}) {
  return std::make_shared<dimlab::PointCloud>(std::move(xs), 1,
                                              dimlab::Metric::euclidean, meta);
}

inline std::shared_ptr<dimlab::PointCloud> cloud_2d(
    std::vector<std::pair<double, double>> pts,
    dimlab::Metric metric = dimlab::Metric::euclidean) {
  std::vector<double> coords;
  for (auto [x, y] : pts) {
    coords.push_back(x);
    coords.push_back(y);
  }
  return std::make_shared<dimlab::PointCloud>(std::move(coords), 2, metric,
                                              dimlab::FixtureMeta{});
}

inline std::shared_ptr<dimlab::PointCloud> random_cloud(std::mt19937& rng,
                                                        int max_points, int dim) {
  std::uniform_int_distribution<int> size_dist(1, max_points);
  std::uniform_real_distribution<double> coord(0.0, 1.0);
  const int n = size_dist(rng);
  std::vector<double> coords;
  coords.reserve(static_cast<std::size_t>(n) * dim);
  for (int i = 0; i < n * dim; ++i) coords.push_back(coord(rng));
  return std::make_shared<dimlab::PointCloud>(
      dimlab::finalize_cloud(std::move(coords), dim, dimlab::Metric::euclidean,
                             dimlab::FixtureMeta{}));
}

inline dimlab::DiscreteMeasure measure_on(
    std::shared_ptr<const dimlab::PointCloud> cloud,
    std::vector<double> weights) {
  return dimlab::DiscreteMeasure(std::move(cloud), std::move(weights), true);
}

}  // namespace test_util
