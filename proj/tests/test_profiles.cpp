#include <cmath>
#include <vector>

#include "doctest.h"
#include "dilatlab/profiles.hpp"

using namespace dilatlab;

namespace {

SpaceOracle euclid_space() {
  const DilatationStructure ds = make_structure("euclidean:k=2,norm=l2");
  return space_from_structure(ds, Point{-2, -2}, Point{2, 2});
}

const Point kOrigin{0.0, 0.0};

}  // namespace

TEST_CASE("profile snapshot: pool size, rescaling, net covering") {
  const SpaceOracle space = euclid_space();
  const ProfileSnapshot snap = profile_snapshot(space, kOrigin, 0.5, 0.1, 7);

  CHECK(snap.sample.size() >= 300);
  CHECK(snap.sample.base() == std::size_t{0});
  CHECK(snap.raw_points.front() == kOrigin);

  // rescaled matrix: dist(i,j) = d(raw_i, raw_j) / eps, ball radius <= 1
  for (std::size_t i = 0; i < snap.sample.size(); i += 97) {
    CHECK(snap.sample.dist(0, i) <= 1.0 + 1e-9);
    for (std::size_t j = 0; j < snap.sample.size(); j += 101)
      CHECK(snap.sample.dist(i, j) ==
            doctest::Approx(space.d(snap.raw_points[i], snap.raw_points[j]) /
                            0.5)
                .epsilon(1e-12));
  }

  // the greedy net really is mu_net-dense and is reported consistently
  CHECK(snap.covering_radius <= 0.1 + 1e-12);
  CHECK(mu_dense_net(snap.sample, snap.net, 0.1).covered);
  CHECK(snap.net.front() == 0);
}

TEST_CASE("halving mu_net grows the net") {
  const SpaceOracle space = euclid_space();
  const ProfileSnapshot coarse = profile_snapshot(space, kOrigin, 1.0, 0.2, 3);
  const ProfileSnapshot fine = profile_snapshot(space, kOrigin, 1.0, 0.1, 3);
  CHECK(fine.net.size() > coarse.net.size());
  CHECK(net_sample(fine).size() == fine.net.size());
}

TEST_CASE("rotational profiles coincide with Euclidean profiles") {
  // the rotational dilation acts by isometries, so every ball profile is the
  // Euclidean disk profile
  const SpaceOracle eu = euclid_space();
  const DilatationStructure rot = make_structure("rotational:theta=1.0");
  const SpaceOracle rs = space_from_structure(rot, Point{-2, -2}, Point{2, 2});
  const ProfileSnapshot a = profile_snapshot(eu, kOrigin, 0.5, 0.1, 11);
  const ProfileSnapshot b = profile_snapshot(rs, kOrigin, 0.25, 0.1, 12);
  CHECK(snapshot_gh(a, b, 5).mu <= 0.2);
}

TEST_CASE("profile consistency of the Euclidean plane") {
  const SpaceOracle space = euclid_space();
  CHECK(profile_consistency(space, kOrigin, 0.5, 0.25, 0.1, 21) <= 0.2);
  // the degenerate sub-ball at eps = 1 compares a ball with itself
  CHECK(profile_consistency(space, kOrigin, 0.5, 1.0, 0.1, 22) <= 0.2);
}

TEST_CASE("tangent existence holds for the plane and fails log-periodically") {
  const SpaceOracle space = euclid_space();
  const Ladder lad{1, 6, 3};
  const TangentReport eu = tangent_existence(space, kOrigin, lad, 0.1, 1);
  CHECK(eu.exists);
  CHECK(eu.threshold == doctest::Approx(0.2));
  REQUIRE(eu.residuals.size() == 5);
  for (const auto& [eps, mu] : eu.residuals) CHECK(mu <= eu.threshold);

  // the emitted terminal snapshot passes the cone self-test
  CHECK(cone_check_snapshot(eu.terminal, 0.8, 9) <= 0.3);

  const DilatationStructure lp = make_structure("logperiodic:kappa=3.0");
  const SpaceOracle ls = space_from_structure(lp, Point{-2, -2}, Point{2, 2});
  const TangentReport bad = tangent_existence(ls, kOrigin, lad, 0.1, 1);
  CHECK_FALSE(bad.exists);
}

TEST_CASE("cone check across scales of the plane") {
  const SpaceOracle space = euclid_space();
  CHECK(cone_check(space, kOrigin, 0.5, 0.25, 0.1, 31) <= 0.2);
}

TEST_CASE("the snowflake line has metric profiles") {
  const SpaceOracle sf = snowflake_space();
  CHECK(sf.d(Point{0.0}, Point{1.0}) == doctest::Approx(1.0));
  CHECK(sf.d(Point{0.0}, Point{0.25}) == doctest::Approx(0.5));
  const ProfileSnapshot snap = profile_snapshot(sf, Point{0.0}, 0.5, 0.1, 41);
  CHECK(snap.sample.size() >= 300);
  CHECK(verify_metric(net_sample(snap)).pass);
  // exact self-similarity: profiles at different scales agree
  const ProfileSnapshot half = profile_snapshot(sf, Point{0.0}, 0.25, 0.1, 42);
  CHECK(snapshot_gh(snap, half, 43).mu <= 0.2);
}

TEST_CASE("parameter validation") {
  const SpaceOracle space = euclid_space();
  CHECK_THROWS_AS(profile_snapshot(space, kOrigin, -1.0, 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(profile_snapshot(space, kOrigin, 1.0, 0.0),
                  std::invalid_argument);
  const ProfileSnapshot snap = profile_snapshot(space, kOrigin, 1.0, 0.2, 1);
  CHECK_THROWS_AS(cone_check_snapshot(snap, 1.5), std::invalid_argument);
}
