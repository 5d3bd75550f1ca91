#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include <catch_amalgamated.hpp>

#include "dimlab/generators.hpp"
#include "test_util.hpp"

using namespace dimlab;

TEST_CASE("similitude dimension closed forms") {
  CHECK(similitude_dimension({1.0 / 3, 1.0 / 3}) ==
        Catch::Approx(std::log(2.0) / std::log(3.0)).margin(1e-10));
  CHECK(similitude_dimension({1.0 / 3, 1.0 / 3, 1.0 / 3, 1.0 / 3}) ==
        Catch::Approx(std::log(4.0) / std::log(3.0)).margin(1e-10));
  // root of u + u^2 = 1 with u = 2^-s: the golden-ratio closed form
  const double golden = (std::sqrt(5.0) - 1) / 2;
  CHECK(similitude_dimension({0.5, 0.25}) ==
        Catch::Approx(-std::log2(golden)).margin(1e-6));
  CHECK_THROWS_AS(similitude_dimension({0.5}), InputError);
  CHECK_THROWS_AS(similitude_dimension({0.5, 1.5}), InputError);
}

TEST_CASE("similitude dimension residual") {
  for (std::vector<double> ratios :
       {std::vector<double>{0.2, 0.3, 0.4}, {0.5, 0.25, 0.125}, {0.9, 0.05}}) {
    const double s = similitude_dimension(ratios);
    double sum = 0;
    for (double r : ratios) sum += std::pow(r, s);
    CHECK(std::abs(sum - 1.0) <= 1e-10);
  }
}

TEST_CASE("self-similar cloud enumeration") {
  IFSSpec spec;
  spec.dim = 1;
  spec.maps = {{1.0 / 3, {}, {0.0}}, {1.0 / 3, {}, {2.0 / 3}}};

  const CloudResult depth2 =
      self_similar_cloud(spec, 2, std::vector<double>{0.0});
  REQUIRE(depth2.cloud->size() == 4);
  const std::vector<double> expect{0.0, 2.0 / 9, 2.0 / 3, 8.0 / 9};
  for (int i = 0; i < 4; ++i)
    CHECK(depth2.cloud->point(i)[0] == Catch::Approx(expect[i]).margin(1e-12));

  const CloudResult depth0 =
      self_similar_cloud(spec, 0, std::vector<double>{0.25});
  REQUIRE(depth0.cloud->size() == 1);
  CHECK(depth0.cloud->point(0)[0] == Catch::Approx(0.25));
}

TEST_CASE("four-map plane IFS emits the corner images") {
  IFSSpec spec;
  spec.dim = 2;
  for (auto [tx, ty] : std::vector<std::pair<double, double>>{
           {0, 0}, {0, 2.0 / 3}, {2.0 / 3, 2.0 / 3}, {2.0 / 3, 0}})
    spec.maps.push_back({1.0 / 3, {}, {tx, ty}});
  const CloudResult res =
      self_similar_cloud(spec, 1, std::vector<double>{0.0, 0.0});
  REQUIRE(res.cloud->size() == 4);
  const std::set<std::pair<double, double>> expect{
      {0, 0}, {0, 2.0 / 3}, {2.0 / 3, 2.0 / 3}, {2.0 / 3, 0}};
  std::set<std::pair<double, double>> got;
  for (int i = 0; i < 4; ++i) {
    auto p = res.cloud->point(i);
    got.insert({std::round(p[0] * 3e9) / 3e9, std::round(p[1] * 3e9) / 3e9});
  }
  CHECK(got == expect);
}

TEST_CASE("word counts and dedup on separated fixtures") {
  IFSSpec spec;
  spec.dim = 1;
  spec.maps = {{0.25, {}, {0.0}}, {0.25, {}, {0.75}}};
  for (int depth : {3, 5, 7}) {
    const CloudResult res = self_similar_cloud(spec, depth);
    CHECK(res.words_before_dedup == static_cast<std::int64_t>(std::pow(2, depth)));
    CHECK(res.cloud->size() == res.words_before_dedup);  // dedup removes nothing
  }
  CHECK_THROWS_AS(self_similar_cloud(spec, 40), CapacityError);
}

TEST_CASE("inhomogeneous cloud contains the attractor and every placed copy") {
  IFSSpec spec;
  spec.dim = 1;
  spec.maps = {{0.25, {}, {0.0}}, {0.25, {}, {0.75}}};
  const PointCloud condensation({0.5}, 1, Metric::euclidean, {});

  const CloudResult res = inhomogeneous_cloud(spec, condensation, 1);
  std::set<double> got;
  for (int i = 0; i < res.cloud->size(); ++i)
    got.insert(std::round(res.cloud->point(i)[0] * 1e12) / 1e12);
  for (double want : {0.5, 0.125, 0.875, 0.0, 0.75})
    CHECK(got.count(std::round(want * 1e12) / 1e12) == 1);

  const CloudResult res0 = inhomogeneous_cloud(spec, condensation, 0);
  std::set<double> got0;
  for (int i = 0; i < res0.cloud->size(); ++i)
    got0.insert(res0.cloud->point(i)[0]);
  CHECK(got0.count(0.5) == 1);  // the condensation under the empty word

  // set inclusion at depth 3: attractor sample and all copies up to depth
  const CloudResult deep = inhomogeneous_cloud(spec, condensation, 3);
  const CloudResult attractor = self_similar_cloud(spec, 3);
  std::set<double> deep_set;
  for (int i = 0; i < deep.cloud->size(); ++i)
    deep_set.insert(std::round(deep.cloud->point(i)[0] * 1e12) / 1e12);
  for (int i = 0; i < attractor.cloud->size(); ++i)
    CHECK(deep_set.count(std::round(attractor.cloud->point(i)[0] * 1e12) / 1e12) == 1);
}

TEST_CASE("bedford-mcmullen digit placement") {
  BMCarpetSpec spec;
  spec.p = 2;
  spec.q = 3;
  spec.digits = {{0, 0}, {1, 0}, {1, 1}};

  const BMResult depth1 = bedford_mcmullen_cloud(spec, 1);
  REQUIRE(depth1.cloud->size() == 3);
  std::set<std::pair<double, double>> got;
  for (int i = 0; i < 3; ++i) {
    auto p = depth1.cloud->point(i);
    got.insert({p[0], p[1]});
  }
  const std::set<std::pair<double, double>> expect{
      {0.0, 0.0}, {0.5, 0.0}, {0.5, 1.0 / 3}};
  CHECK(got == expect);
  CHECK(depth1.column_counts == std::vector<int>{1, 2});
  CHECK_FALSE(depth1.uniform_fibers);

  BMCarpetSpec uniform;
  uniform.p = 2;
  uniform.q = 3;
  uniform.digits = {{0, 0}, {1, 1}};
  CHECK(bedford_mcmullen_cloud(uniform, 1).uniform_fibers);

  const BMResult depth6 = bedford_mcmullen_cloud(spec, 6);
  CHECK(depth6.cloud->size() == 729);
}

TEST_CASE("bedford-mcmullen validation") {
  BMCarpetSpec bad;
  bad.p = 3;
  bad.q = 2;
  bad.digits = {{0, 0}, {1, 1}};
  CHECK_THROWS_AS(bedford_mcmullen_cloud(bad, 1), InputError);

  BMCarpetSpec dup;
  dup.p = 2;
  dup.q = 3;
  dup.digits = {{0, 0}, {0, 0}};
  CHECK_THROWS_AS(bedford_mcmullen_cloud(dup, 1), InputError);

  BMCarpetSpec fine;
  fine.p = 2;
  fine.q = 3;
  fine.digits = {{0, 0}, {1, 1}};
  CHECK_THROWS_AS(bedford_mcmullen_cloud(fine, 25), CapacityError);
}

TEST_CASE("sequence fixture weights and totals") {
  const FixturePair n4 = sequence_fixture(4);
  REQUIRE(n4.cloud->size() == 5);
  CHECK(n4.measure->total_mass() ==
        Catch::Approx(1 + 1 + 0.25 + 1.0 / 9 + 1.0 / 16).margin(1e-12));
  CHECK(n4.measure->total_mass() == Catch::Approx(2.423611).margin(1e-6));

  const FixturePair n2 = sequence_fixture(2);
  CHECK(n2.measure->total_mass() == Catch::Approx(2.25).margin(1e-12));

  // the weight at 0 is 1 regardless of N
  for (int N : {2, 10, 100}) {
    const FixturePair pair = sequence_fixture(N);
    REQUIRE(pair.cloud->point(0)[0] == 0.0);
    CHECK(pair.measure->weights()[0] == 1.0);
  }
  CHECK(sequence_fixture(50).cloud->ascending_1d());
  CHECK_THROWS_AS(sequence_fixture(1), InputError);
}

TEST_CASE("corner fixture components") {
  // s=2, n=1: s_1 = 1, rho = 1/4; s=1, n=2: s_2 = 0.75, rho = 4^(-4/3)
  CHECK(std::pow(4.0, -1.0 / (2.0 * 0.5)) == Catch::Approx(0.25));
  CHECK(std::pow(4.0, -1.0 / (1.0 * 0.75)) == Catch::Approx(0.15749).margin(1e-5));

  const CloudResult res = corner_fixture(1.0, 2, 2);
  bool has_origin = false;
  for (int i = 0; i < res.cloud->size(); ++i) {
    auto p = res.cloud->point(i);
    if (p[0] == 0.0 && p[1] == 0.0) has_origin = true;
  }
  CHECK(has_origin);
  CHECK_THROWS_AS(corner_fixture(3.0, 2, 2), InputError);
  CHECK_THROWS_AS(corner_fixture(1.0, 2, 15), CapacityError);
}

TEST_CASE("grid fixture") {
  const CloudResult res = grid_fixture(1001);
  REQUIRE(res.cloud->size() == 1001);
  CHECK(res.cloud->point(0)[0] == 0.0);
  CHECK(res.cloud->point(1000)[0] == 1.0);
  CHECK(res.cloud->meta().mesh == Catch::Approx(0.0005));
}

TEST_CASE("cantor cloud mesh and order") {
  const CloudResult res = cantor_cloud(6);
  REQUIRE(res.cloud->size() == 64);
  CHECK(res.cloud->ascending_1d());
  CHECK(res.cloud->meta().mesh == Catch::Approx(std::pow(3.0, -6)).epsilon(0.5));
}

TEST_CASE("IFS orthogonal block validation") {
  IFSSpec spec;
  spec.dim = 2;
  spec.maps = {{0.5, {1, 0, 0, 1}, {0, 0}}, {0.5, {0, -1, 1, 0}, {0.5, 0}}};
  CHECK_NOTHROW(spec.validate());
  spec.maps[1].ortho = {1, 1, 0, 1};
  CHECK_THROWS_AS(spec.validate(), InputError);
}
