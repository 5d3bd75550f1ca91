#include <cmath>
#include <vector>

#include <catch_amalgamated.hpp>

#include "dimlab/generators.hpp"
#include "dimlab/set_dims.hpp"
#include "test_util.hpp"

using namespace dimlab;

namespace {

const double kCantorDim = std::log(2.0) / std::log(3.0);

ScaleGrid cantor_grid() { return ScaleGrid::geometric(0.25, std::pow(2.0, -13), 3); }

}  // namespace

TEST_CASE("minkowski dimension of the sequence sample is one half") {
  const FixturePair pair = sequence_fixture(100000);
  const ScaleGrid grid =
      ScaleGrid::geometric(std::pow(2.0, -6), std::pow(2.0, -14), 3);
  const MinkowskiSetResult res = minkowski_dims_set(*pair.cloud, grid);
  CHECK(res.upper.value == Catch::Approx(0.5).margin(0.05));
}

TEST_CASE("minkowski dimension of the middle-thirds sample") {
  const CloudResult cantor = cantor_cloud(10);
  const MinkowskiSetResult res = minkowski_dims_set(*cantor.cloud, cantor_grid());
  CHECK(res.upper.value == Catch::Approx(kCantorDim).margin(0.05));
  CHECK(res.lower.value == Catch::Approx(kCantorDim).margin(0.05));
  CHECK_FALSE(res.upper.mesh_warning);
}

TEST_CASE("minkowski dimension of a uniform grid sample") {
  const CloudResult grid_points = grid_fixture(1001);
  const ScaleGrid grid = ScaleGrid::geometric(0.125, std::pow(2.0, -8), 3);
  const MinkowskiSetResult res =
      minkowski_dims_set(*grid_points.cloud, grid,
                         static_cast<int>(grid.scales.size()));
  CHECK(res.upper.value == Catch::Approx(1.0).margin(0.05));
  CHECK(res.lower.value == Catch::Approx(1.0).margin(0.05));
}

TEST_CASE("assouad dimension estimates") {
  SECTION("middle-thirds sample: local counts match the global exponent") {
    const CloudResult cantor = cantor_cloud(10);
    const DimensionEstimate est = assouad_dim_set(*cantor.cloud, cantor_grid());
    CHECK(est.value == Catch::Approx(kCantorDim).margin(0.08));
  }
  SECTION("sequence sample: dense-end windows reach full dimension") {
    const FixturePair pair = sequence_fixture(100000);
    const ScaleGrid grid =
        ScaleGrid::geometric(std::pow(2.0, -4), std::pow(2.0, -14), 3);
    const DimensionEstimate est = assouad_dim_set(*pair.cloud, grid);
    CHECK(est.value == Catch::Approx(1.0).margin(0.1));
  }
  SECTION("singleton") {
    auto single = test_util::cloud_1d({0.5});
    const ScaleGrid grid = ScaleGrid::geometric(0.25, 0.25 / 256, 2);
    const DimensionEstimate est = assouad_dim_set(*single, grid);
    CHECK(est.value == Catch::Approx(0.0).margin(1e-9));
  }
  SECTION("grid must span enough octaves") {
    auto single = test_util::cloud_1d({0.0, 1.0});
    const ScaleGrid grid = ScaleGrid::geometric(0.25, 0.0625, 2);
    CHECK_THROWS_AS(assouad_dim_set(*single, grid, 3), InputError);
  }
}

TEST_CASE("assouad spectrum of sets") {
  SECTION("middle-thirds sample is constant in theta") {
    const CloudResult cantor = cantor_cloud(10);
    const DimensionEstimate est =
        assouad_spectrum_set(*cantor.cloud, 0.5, cantor_grid());
    CHECK(est.value == Catch::Approx(kCantorDim).margin(0.08));
  }
  SECTION("sequence sample at theta = 1/4") {
    const FixturePair pair = sequence_fixture(100000);
    const ScaleGrid grid =
        ScaleGrid::geometric(std::pow(2.0, -6), std::pow(2.0, -14), 3);
    const DimensionEstimate est = assouad_spectrum_set(*pair.cloud, 0.25, grid);
    CHECK(est.value == Catch::Approx(1.0 / (2 * (1 - 0.25))).margin(0.1));
  }
  SECTION("theta near zero approaches the upper Minkowski dimension") {
    // theta = 0.1 compares scales r and r^0.1; informative rows need
    // r^0.1 < diam/2, so the sample must resolve well below 2^-10
    const CloudResult cantor = cantor_cloud(13);
    const ScaleGrid deep = ScaleGrid::geometric(
        0.25, 4 * cantor.cloud->meta().mesh, 3);
    const MinkowskiSetResult mink = minkowski_dims_set(*cantor.cloud, deep);
    const DimensionEstimate spec =
        assouad_spectrum_set(*cantor.cloud, 0.1, deep);
    CHECK(std::abs(spec.value - mink.upper.value) <= 0.1);

    // theta = 0.1 needs scales below diam^(1/theta), hence a fine grid sample
    const CloudResult grid_points = grid_fixture(100001);
    const ScaleGrid ggrid = ScaleGrid::geometric(0.125, std::pow(2.0, -15), 3);
    const MinkowskiSetResult gmink = minkowski_dims_set(*grid_points.cloud, ggrid);
    const DimensionEstimate gspec =
        assouad_spectrum_set(*grid_points.cloud, 0.1, ggrid);
    CHECK(std::abs(gspec.value - gmink.upper.value) <= 0.1);
  }
}

TEST_CASE("lower spectrum of sets") {
  SECTION("middle-thirds sample: min equals max by self-similarity") {
    const CloudResult cantor = cantor_cloud(12);
    const ScaleGrid deep = ScaleGrid::geometric(
        0.25, 4 * cantor.cloud->meta().mesh, 3);
    const DimensionEstimate est = lower_spectrum_set(*cantor.cloud, 0.5, deep);
    CHECK(est.value == Catch::Approx(kCantorDim).margin(0.08));
  }
  SECTION("sequence sample: the isolated end pins the minimum at zero") {
    const FixturePair pair = sequence_fixture(10000);
    const ScaleGrid grid =
        ScaleGrid::geometric(std::pow(2.0, -6), std::pow(2.0, -11), 3);
    const DimensionEstimate est = lower_spectrum_set(*pair.cloud, 0.5, grid);
    CHECK(est.value == Catch::Approx(0.0).margin(0.05));
  }
  SECTION("uniform grid sample") {
    // counts must span a few bits before the envelope beats quantization
    const CloudResult grid_points = grid_fixture(100001);
    const ScaleGrid grid = ScaleGrid::geometric(0.25, std::pow(2.0, -15), 3);
    const DimensionEstimate est = lower_spectrum_set(*grid_points.cloud, 0.5, grid);
    CHECK(est.value == Catch::Approx(1.0).margin(0.1));
  }
}

TEST_CASE("ordering chain across set estimators") {
  const double tol = 0.1;
  auto check_chain = [&](const PointCloud& cloud, const ScaleGrid& grid) {
    const MinkowskiSetResult mink = minkowski_dims_set(cloud, grid);
    const DimensionEstimate assouad = assouad_dim_set(cloud, grid);
    for (double theta : {0.3, 0.5, 0.7}) {
      const DimensionEstimate lower = lower_spectrum_set(cloud, theta, grid);
      const DimensionEstimate upper = assouad_spectrum_set(cloud, theta, grid);
      CHECK(lower.value <= mink.lower.value + tol);
      CHECK(mink.lower.value <= mink.upper.value + 1e-12);
      CHECK(mink.upper.value <= upper.value + tol);
      CHECK(upper.value <= assouad.value + tol);
      CHECK(upper.value <= mink.upper.value / (1 - theta) + tol);
    }
  };
  const CloudResult cantor = cantor_cloud(10);
  check_chain(*cantor.cloud, cantor_grid());
  const CloudResult grid_points = grid_fixture(1001);
  check_chain(*grid_points.cloud, ScaleGrid::geometric(0.25, std::pow(2.0, -8), 3));
  const FixturePair seq = sequence_fixture(10000);
  check_chain(*seq.cloud, ScaleGrid::geometric(std::pow(2.0, -4), std::pow(2.0, -11), 3));
}

TEST_CASE("isometry invariance of set estimates") {
  const CloudResult cantor = cantor_cloud(8);
  const ScaleGrid grid = ScaleGrid::geometric(0.25, std::pow(2.0, -10), 3);
  const MinkowskiSetResult base = minkowski_dims_set(*cantor.cloud, grid);

  std::vector<double> shifted(cantor.cloud->coords());
  for (double& x : shifted) x += 1.0;
  const PointCloud moved(std::move(shifted), 1, Metric::euclidean,
                         cantor.cloud->meta());
  const MinkowskiSetResult after = minkowski_dims_set(moved, grid);
  CHECK(after.upper.value == Catch::Approx(base.upper.value).margin(1e-9));
  CHECK(after.lower.value == Catch::Approx(base.lower.value).margin(1e-9));

  // 2-D quarter-turn: distances are exactly preserved
  const CloudResult corner = corner_fixture(1.0, 2, 3);
  const ScaleGrid cgrid = ScaleGrid::geometric(0.25, std::pow(2.0, -9), 3);
  const MinkowskiSetResult cbase = minkowski_dims_set(*corner.cloud, cgrid);
  std::vector<double> rotated;
  for (int i = 0; i < corner.cloud->size(); ++i) {
    auto p = corner.cloud->point(i);
    rotated.push_back(-p[1]);
    rotated.push_back(p[0]);
  }
  const PointCloud turned(std::move(rotated), 2, Metric::euclidean,
                          corner.cloud->meta());
  const MinkowskiSetResult cafter = minkowski_dims_set(turned, cgrid);
  CHECK(cafter.upper.value == cbase.upper.value);
  CHECK(cafter.lower.value == cbase.lower.value);
}

TEST_CASE("scale covariance of set estimates") {
  const CloudResult cantor = cantor_cloud(8);
  const ScaleGrid grid = ScaleGrid::geometric(0.25, std::pow(2.0, -10), 3);
  const MinkowskiSetResult base = minkowski_dims_set(*cantor.cloud, grid);

  std::vector<double> scaled(cantor.cloud->coords());
  for (double& x : scaled) x *= 0.5;
  const PointCloud small(std::move(scaled), 1, Metric::euclidean,
                         cantor.cloud->meta());
  const ScaleGrid half_grid = ScaleGrid::geometric(0.125, std::pow(2.0, -11), 3);
  const MinkowskiSetResult after = minkowski_dims_set(small, half_grid);
  CHECK(after.upper.value == Catch::Approx(base.upper.value).margin(1e-9));
  CHECK(after.lower.value == Catch::Approx(base.lower.value).margin(1e-9));
}

TEST_CASE("estimates clamp at zero and keep the raw value") {
  auto pair_cloud = test_util::cloud_1d({0.0, 1.0});
  const ScaleGrid grid = ScaleGrid::geometric(0.25, 0.25 / 4096, 2);
  const MinkowskiSetResult res = minkowski_dims_set(*pair_cloud, grid);
  CHECK(res.upper.value == Catch::Approx(0.0).margin(1e-12));
  CHECK(res.upper.raw_value <= 1e-12);
  CHECK(res.upper.value >= 0.0);
}

TEST_CASE("mesh guard warning flag") {
  FixtureMeta meta;
  meta.mesh = 0.01;
  auto cloud = test_util::cloud_1d({0.0, 0.2, 0.4, 0.6, 0.8, 1.0}, meta);
  const ScaleGrid grid = ScaleGrid::geometric(0.25, 0.01, 2);
  const MinkowskiSetResult res = minkowski_dims_set(*cloud, grid);
  CHECK(res.upper.mesh_warning);
}
