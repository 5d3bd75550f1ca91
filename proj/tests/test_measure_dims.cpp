#include <cmath>
#include <vector>

#include <catch_amalgamated.hpp>

#include "dimlab/generators.hpp"
#include "dimlab/measure_dims.hpp"
#include "test_util.hpp"

using namespace dimlab;
using test_util::cloud_1d;
using test_util::measure_on;

namespace {

const double kCantorDim = std::log(2.0) / std::log(3.0);

struct CantorFixture {
  std::shared_ptr<PointCloud> cloud;
  DiscreteMeasure measure;
  ScaleGrid grid;
};

CantorFixture uniform_cantor(int depth = 12) {
  const CloudResult res = cantor_cloud(depth);
  const double r_min = std::max(4 * res.cloud->meta().mesh, 1e-7);
  return {res.cloud, uniform_measure(res.cloud),
          ScaleGrid::geometric(0.25, r_min, 3)};
}

DiscreteMeasure single_atom() {
  return measure_on(cloud_1d({0.5}), {1.0});
}

}  // namespace

TEST_CASE("minkowski dimensions of measures") {
  SECTION("uniform middle-thirds measure") {
    const CantorFixture fix = uniform_cantor();
    const MinkowskiMeasureResult res =
        minkowski_dims_measure(fix.measure, fix.grid);
    CHECK(res.upper.value == Catch::Approx(kCantorDim).margin(0.08));
    CHECK(res.lower.value == Catch::Approx(kCantorDim).margin(0.08));
  }
  SECTION("sequence measure: min masses decay no slower than the set demands") {
    const FixturePair pair = sequence_fixture(10000);
    const ScaleGrid grid =
        ScaleGrid::geometric(std::pow(2.0, -6), std::pow(2.0, -11), 3);
    const MinkowskiMeasureResult res = minkowski_dims_measure(*pair.measure, grid);
    CHECK(res.upper.value >= 0.45);
  }
  SECTION("single atom") {
    const ScaleGrid grid = ScaleGrid::geometric(0.25, 0.001, 3);
    const MinkowskiMeasureResult res = minkowski_dims_measure(single_atom(), grid);
    CHECK(res.upper.value == Catch::Approx(0.0).margin(1e-9));
    CHECK(res.lower.value == Catch::Approx(0.0).margin(1e-9));
  }
}

TEST_CASE("frostman dimension") {
  SECTION("sequence measure is pinned near zero by the unit atom") {
    const FixturePair pair = sequence_fixture(10000);
    const ScaleGrid grid =
        ScaleGrid::geometric(std::pow(2.0, -6), std::pow(2.0, -11), 3);
    const DimensionEstimate est = frostman_dim(*pair.measure, grid);
    CHECK(est.value == Catch::Approx(0.0).margin(0.05));
  }
  SECTION("uniform middle-thirds measure") {
    const CantorFixture fix = uniform_cantor();
    const DimensionEstimate est = frostman_dim(fix.measure, fix.grid);
    CHECK(est.value == Catch::Approx(kCantorDim).margin(0.08));
  }
  SECTION("single atom") {
    const ScaleGrid grid = ScaleGrid::geometric(0.25, 0.001, 3);
    CHECK(frostman_dim(single_atom(), grid).value == Catch::Approx(0.0).margin(1e-9));
  }
}

TEST_CASE("density dimension") {
  SECTION("sequence measure: every atom sees a flat window") {
    const FixturePair pair = sequence_fixture(10000);
    const ScaleGrid grid =
        ScaleGrid::geometric(std::pow(2.0, -6), std::pow(2.0, -16), 8);
    // one-octave windows realize the pointwise liminf
    const DensityResult res = density_dim(*pair.measure, grid, grid.per_octave + 1);
    CHECK(res.estimate.value == Catch::Approx(0.0).margin(0.05));
  }
  SECTION("uniform middle-thirds measure matches its exponent") {
    const CantorFixture fix = uniform_cantor();
    const DensityResult res = density_dim(fix.measure, fix.grid);
    CHECK(res.estimate.value == Catch::Approx(kCantorDim).margin(0.08));
  }
  SECTION("single atom") {
    const ScaleGrid grid = ScaleGrid::geometric(0.25, 0.001, 3);
    const DensityResult res = density_dim(single_atom(), grid);
    CHECK(res.estimate.value == Catch::Approx(0.0).margin(1e-9));
    REQUIRE(res.pointwise.size() == 1);
  }
}

TEST_CASE("lq spectrum") {
  SECTION("uniform middle-thirds measure at q = -1, 0") {
    const CantorFixture fix = uniform_cantor();
    const LqResult neg = lq_spectrum(fix.measure, -1.0, fix.grid);
    CHECK(neg.tau == Catch::Approx(-2 * kCantorDim).margin(0.1));
    CHECK(neg.dim.value == Catch::Approx(kCantorDim).margin(0.05));

    const LqResult zero = lq_spectrum(fix.measure, 0.0, fix.grid);
    CHECK(zero.dim.value == Catch::Approx(kCantorDim).margin(0.05));
  }
  SECTION("single atom: moment sums are flat") {
    const ScaleGrid grid = ScaleGrid::geometric(0.25, 0.001, 3);
    for (double q : {-4.0, -1.0, 0.0, 0.5, 2.0}) {
      const LqResult res = lq_spectrum(single_atom(), q, grid);
      CHECK(res.tau == Catch::Approx(0.0).margin(1e-9));
      CHECK(res.dim.value == Catch::Approx(0.0).margin(1e-9));
    }
  }
  SECTION("q = 1 is rejected") {
    const ScaleGrid grid = ScaleGrid::geometric(0.25, 0.001, 3);
    CHECK_THROWS_AS(lq_spectrum(single_atom(), 1.0, grid), InputError);
  }
}

TEST_CASE("assouad dimension of measures") {
  SECTION("uniform middle-thirds measure") {
    const CantorFixture fix = uniform_cantor();
    const DimensionEstimate est = assouad_dim_measure(fix.measure, fix.grid);
    CHECK(est.value == Catch::Approx(kCantorDim).margin(0.08));
  }
  SECTION("ladder witness exceeds the set exponent") {
    const CloudResult cantor = cantor_cloud(10);
    std::vector<int> klist;
    for (int k = 1; k <= 40; ++k) klist.push_back(k);
    const WitnessResult witness = witness_measure(*cantor.cloud, klist);
    const ScaleGrid grid = ScaleGrid::geometric(
        0.25, std::max(4 * witness.measure.host().meta().mesh, 1e-6), 3);
    const DimensionEstimate est = assouad_dim_measure(witness.measure, grid);
    CHECK(est.value > kCantorDim + 0.1);
  }
  SECTION("single atom") {
    const ScaleGrid grid = ScaleGrid::geometric(0.25, 0.25 / 4096, 2);
    CHECK(assouad_dim_measure(single_atom(), grid).value ==
          Catch::Approx(0.0).margin(1e-9));
  }
}

TEST_CASE("assouad spectrum of measures") {
  SECTION("uniform middle-thirds measure at theta = 1/2") {
    const CantorFixture fix = uniform_cantor();
    const DimensionEstimate est =
        assouad_spectrum_measure(fix.measure, 0.5, fix.grid);
    CHECK(est.value == Catch::Approx(kCantorDim).margin(0.08));
  }
  SECTION("two far atoms: ratios are identically one at fine scales") {
    auto cloud = cloud_1d({0.0, 1.0});
    const DiscreteMeasure mu = measure_on(cloud, {0.5, 0.5});
    const ScaleGrid grid = ScaleGrid::geometric(0.01, 0.0001, 3);
    const DimensionEstimate est = assouad_spectrum_measure(mu, 0.5, grid);
    CHECK(est.value == Catch::Approx(0.0).margin(1e-9));
  }
  SECTION("single atom") {
    const ScaleGrid grid = ScaleGrid::geometric(0.25, 0.001, 3);
    for (double theta : {0.2, 0.5, 0.8})
      CHECK(assouad_spectrum_measure(single_atom(), theta, grid).value ==
            Catch::Approx(0.0).margin(1e-9));
  }
}

TEST_CASE("lower spectrum of measures") {
  SECTION("uniform middle-thirds measure at theta = 1/2") {
    const CantorFixture fix = uniform_cantor();
    const DimensionEstimate est =
        lower_spectrum_measure(fix.measure, 0.5, fix.grid);
    CHECK(est.value == Catch::Approx(kCantorDim).margin(0.08));
  }
  SECTION("sequence measure: the isolated end caps the ratio") {
    const FixturePair pair = sequence_fixture(10000);
    const ScaleGrid grid =
        ScaleGrid::geometric(std::pow(2.0, -6), std::pow(2.0, -11), 3);
    const DimensionEstimate est = lower_spectrum_measure(*pair.measure, 0.5, grid);
    CHECK(est.value == Catch::Approx(0.0).margin(0.05));
  }
  SECTION("single atom") {
    const ScaleGrid grid = ScaleGrid::geometric(0.25, 0.001, 3);
    CHECK(lower_spectrum_measure(single_atom(), 0.5, grid).value ==
          Catch::Approx(0.0).margin(1e-9));
  }
}

TEST_CASE("measure estimator inequality chain") {
  const CantorFixture fix = uniform_cantor();
  const FixturePair seq = sequence_fixture(10000);
  const ScaleGrid seq_grid =
      ScaleGrid::geometric(std::pow(2.0, -6), std::pow(2.0, -11), 3);

  auto check_chain = [&](const DiscreteMeasure& mu, const ScaleGrid& grid) {
    const MinkowskiMeasureResult mink = minkowski_dims_measure(mu, grid);
    const DimensionEstimate assouad = assouad_dim_measure(mu, grid);
    const DimensionEstimate frostman = frostman_dim(mu, grid);
    for (double q : {-8.0, -4.0, -2.0, 0.0, 0.5}) {
      const LqResult lq = lq_spectrum(mu, q, grid);
      CHECK(lq.dim.value <= mink.upper.value + 0.1);
    }
    for (double theta : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      const DimensionEstimate spec = assouad_spectrum_measure(mu, theta, grid);
      const DimensionEstimate low = lower_spectrum_measure(mu, theta, grid);
      // assert only where the table carries two-scale signal; below the
      // floor the comparison reads quantization noise
      if (spec.signal >= kSpectrumSignalFloor) {
        CHECK(mink.upper.value <= spec.value + 0.1);
        CHECK(spec.value <=
              std::min(assouad.value, mink.upper.value / (1 - theta)) + 0.1);
      }
      if (low.signal >= kSpectrumSignalFloor || low.value == 0)
        CHECK(low.value <= frostman.value + 0.05);
    }
    const DimensionEstimate spec01 = assouad_spectrum_measure(mu, 0.1, grid);
    CHECK(std::abs(spec01.value - mink.upper.value) <= 0.15);
  };
  check_chain(fix.measure, fix.grid);
  check_chain(*seq.measure, seq_grid);
}

TEST_CASE("lq dimension is non-increasing in q and reaches the limit") {
  const CantorFixture fix = uniform_cantor();
  const FixturePair seq = sequence_fixture(10000);
  const ScaleGrid seq_grid =
      ScaleGrid::geometric(std::pow(2.0, -6), std::pow(2.0, -11), 3);

  auto check = [&](const DiscreteMeasure& mu, const ScaleGrid& grid) {
    const std::vector<double> qs{-32, -8, -4, -2, 0, 0.5};
    double prev = 1e9;
    for (double q : qs) {
      const double dim = lq_spectrum(mu, q, grid).dim.value;
      CHECK(dim <= prev + 0.02);
      prev = dim;
    }
    const MinkowskiMeasureResult mink = minkowski_dims_measure(mu, grid);
    const double deep = lq_spectrum(mu, -32, grid).dim.value;
    CHECK(std::abs(deep - mink.upper.value) <= 0.1);
  };
  check(fix.measure, fix.grid);
  check(*seq.measure, seq_grid);
}

TEST_CASE("mass scaling leaves every estimate unchanged") {
  const CloudResult cantor = cantor_cloud(9);
  const ScaleGrid grid =
      ScaleGrid::geometric(0.25, 4 * cantor.cloud->meta().mesh, 3);
  const DiscreteMeasure base = uniform_measure(cantor.cloud);
  std::vector<double> scaled = base.weights();
  for (double& w : scaled) w *= 2.0;
  const DiscreteMeasure doubled(cantor.cloud, std::move(scaled), true);

  CHECK(minkowski_dims_measure(base, grid).upper.value ==
        Catch::Approx(minkowski_dims_measure(doubled, grid).upper.value).margin(1e-9));
  CHECK(frostman_dim(base, grid).value ==
        Catch::Approx(frostman_dim(doubled, grid).value).margin(1e-9));
  CHECK(density_dim(base, grid).estimate.value ==
        Catch::Approx(density_dim(doubled, grid).estimate.value).margin(1e-9));
  CHECK(assouad_dim_measure(base, grid).value ==
        Catch::Approx(assouad_dim_measure(doubled, grid).value).margin(1e-9));
  CHECK(lq_spectrum(base, -2, grid).dim.value ==
        Catch::Approx(lq_spectrum(doubled, -2, grid).dim.value).margin(1e-9));
}

TEST_CASE("density dimension stays below the measure's upper Minkowski") {
  const CantorFixture fix = uniform_cantor(10);
  const MinkowskiMeasureResult mink = minkowski_dims_measure(fix.measure, fix.grid);
  const DensityResult density = density_dim(fix.measure, fix.grid);
  CHECK(density.estimate.value <= mink.upper.value + 0.05);

  const FixturePair seq = sequence_fixture(10000);
  const ScaleGrid grid =
      ScaleGrid::geometric(std::pow(2.0, -6), std::pow(2.0, -16), 8);
  const MinkowskiMeasureResult smink = minkowski_dims_measure(*seq.measure, grid);
  const DensityResult sdensity =
      density_dim(*seq.measure, grid, grid.per_octave + 1);
  CHECK(sdensity.estimate.value <= smink.upper.value + 0.05);
}

TEST_CASE("full support contract is enforced") {
  auto cloud = cloud_1d({0.0, 0.5, 1.0});
  const DiscreteMeasure partial(cloud, {1.0, 0.0, 1.0}, false);
  const ScaleGrid grid = ScaleGrid::geometric(0.25, 0.001, 3);
  CHECK_THROWS_AS(minkowski_dims_measure(partial, grid), ContractViolation);
  CHECK_THROWS_AS(frostman_dim(partial, grid), ContractViolation);
  CHECK_THROWS_AS(ball_mass_extrema(partial, 0.5), ContractViolation);
}
