#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dilatlab/dilation.hpp"
#include "dilatlab/gh.hpp"
#include "dilatlab/ladder.hpp"
#include "dilatlab/metric.hpp"

namespace dilatlab {

// A space presented as a distance oracle plus a generator box used for
// rejection sampling of balls.
struct SpaceOracle {
  std::string name;
  std::size_t dim = 2;
  DistanceOracle d;
  Point box_lo, box_hi;
};

SpaceOracle space_from_structure(const DilatationStructure& ds,
                                 const Point& box_lo, const Point& box_hi);

// the snowflake line d(x,y) = |x-y|^{1/2} on the box [-2, 2]
SpaceOracle snowflake_space();

// Finite pointed approximation of [closed unit ball of (1/eps) d, base x].
// `sample` holds the rescaled distance matrix over the raw points; its
// attached coordinates are normalized offsets (p - x) / coordinate radius,
// which only serve as matching metadata for the GH heuristic.
struct ProfileSnapshot {
  FiniteSample sample;            // base index 0 = x
  std::vector<Point> raw_points;  // ambient points, raw_points[0] = x
  double eps = 1.0;
  double mu_net = 0.1;
  std::vector<std::size_t> net;   // greedy net indices, net[0] = 0
  double covering_radius = 0.0;   // of the net over the snapshot, rescaled
};

// Rejection-samples `pool` points of the ball B_d(x, eps) along random rays
// from the generator box, then grows a greedy farthest-point net until the
// covering radius is at most mu_net.  Throws std::runtime_error when no ball
// point can be generated.
ProfileSnapshot profile_snapshot(const SpaceOracle& space, const Point& x,
                                 double eps, double mu_net,
                                 std::uint64_t seed = 0,
                                 std::size_t pool = 1000);

// Net restriction of the snapshot (base kept at index 0).
FiniteSample net_sample(const ProfileSnapshot& snap);

// GH distance between two snapshots (full samples; exact mode only when both
// have at most 4 points).
GhResult snapshot_gh(const ProfileSnapshot& a, const ProfileSnapshot& b,
                     std::uint64_t seed = 0);

// GH distance between the snapshot at scale eps*b and the eps-rescaled
// sub-ball of the scale-b snapshot.
double profile_consistency(const SpaceOracle& space, const Point& x, double b,
                           double eps, double mu_net, std::uint64_t seed = 0);

struct TangentReport {
  bool exists = false;
  // (eps of the finer snapshot, GH residual between consecutive snapshots)
  std::vector<std::pair<double, double>> residuals;
  double threshold = 0.0;  // residuals must stay at or below this
  ProfileSnapshot terminal;
};

// GH-Cauchy check of the profile sequence down the ladder; on success the
// terminal snapshot approximates the tangent space [T_x M, d^x, x].
TangentReport tangent_existence(const SpaceOracle& space, const Point& x,
                                const Ladder& ladder, double mu_net,
                                std::uint64_t seed = 0);

// GH distance between the profiles at scales a and b.
double cone_check(const SpaceOracle& space, const Point& x, double a, double b,
                  double mu_net, std::uint64_t seed = 0);

// Cone self-test on an emitted snapshot: GH between the a-rescaled sub-ball
// of the snapshot and the snapshot itself.
double cone_check_snapshot(const ProfileSnapshot& snap, double a,
                           std::uint64_t seed = 0);

}  // namespace dilatlab
