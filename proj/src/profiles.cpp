#include "dilatlab/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dilatlab/rng.hpp"

namespace dilatlab {

SpaceOracle space_from_structure(const DilatationStructure& ds,
                                 const Point& box_lo, const Point& box_hi) {
  return SpaceOracle{ds.name, ds.dim, ds.d, box_lo, box_hi};
}

SpaceOracle snowflake_space() {
  SpaceOracle s;
  s.name = "snowflake";
  s.dim = 1;
  s.d = DistanceOracle([](const Point& a, const Point& b) {
    return std::sqrt(std::abs(a[0] - b[0]));
  });
  s.box_lo = Point{-2.0};
  s.box_hi = Point{2.0};
  return s;
}

namespace {

// greedy farthest-point net (always containing index 0) grown until the
// covering radius drops to mu
std::vector<std::size_t> greedy_net(const FiniteSample& s, double mu,
                                    double* out_radius) {
  const std::size_t n = s.size();
  std::vector<std::size_t> net{0};
  std::vector<double> to_net(n);
  for (std::size_t i = 0; i < n; ++i) to_net[i] = s.dist(i, 0);
  while (true) {
    std::size_t far = 0;
    double radius = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (to_net[i] > radius) {
        radius = to_net[i];
        far = i;
      }
    if (radius <= mu || net.size() == n) {
      *out_radius = radius;
      return net;
    }
    net.push_back(far);
    for (std::size_t i = 0; i < n; ++i)
      to_net[i] = std::min(to_net[i], s.dist(i, far));
  }
}

FiniteSample restrict_sample(const FiniteSample& s,
                             const std::vector<std::size_t>& idx) {
  const std::size_t n = idx.size();
  std::vector<double> matrix(n * n, 0.0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      matrix[a * n + b] = s.dist(idx[a], idx[b]);
  FiniteSample out(n, std::move(matrix), 0);
  if (s.has_points()) {
    std::vector<Point> pts;
    for (std::size_t a : idx) pts.push_back(s.point(a));
    out.set_points(std::move(pts));
  }
  return out;
}

// snapshot assembly shared by profile_snapshot and the sub-ball builders:
// raw points (with raw[0] = x) + rescaled matrix + normalized coordinates +
// greedy net
ProfileSnapshot assemble(std::vector<Point> raw, const DistanceOracle& d,
                         double eps, double mu_net) {
  ProfileSnapshot snap;
  snap.eps = eps;
  snap.mu_net = mu_net;
  snap.raw_points = raw;
  snap.sample = FiniteSample(std::move(raw), d.rescaled(eps), 0);
  const Point& x = snap.raw_points.front();
  double radius = 0.0;
  for (const Point& p : snap.raw_points)
    radius = std::max(radius, norm_l2(p - x));
  if (radius <= 0.0) radius = 1.0;
  std::vector<Point> normalized;
  for (const Point& p : snap.raw_points)
    normalized.push_back((1.0 / radius) * (p - x));
  snap.sample.set_points(std::move(normalized));
  snap.net = greedy_net(snap.sample, mu_net, &snap.covering_radius);
  return snap;
}

// point on the ray x + t * dir with d(x, .) == target (bisection; d is
// continuous and vanishes at t = 0)
Point ray_point(const DistanceOracle& d, const Point& x, const Point& dir,
                double target) {
  double hi = target;
  int guard = 0;
  while (d(x, x + hi * dir) < target && guard++ < 80) hi *= 2.0;
  double lo = 0.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (d(x, x + mid * dir) < target ? lo : hi) = mid;
  }
  return x + 0.5 * (lo + hi) * dir;
}

// `pool` ball points of B_d(x, eps) along random ray directions, radius
// distribution roughly volume-uniform; raw[0] = x
std::vector<Point> ball_points(const SpaceOracle& space, const Point& x,
                               double eps, std::uint64_t seed,
                               std::size_t pool) {
  SplitRng rng = SplitRng(seed).split(0x5eed);
  std::vector<Point> raw{x};
  std::size_t attempts = 0;
  while (raw.size() < pool + 1 && attempts < 40 * pool) {
    ++attempts;
    Point q(std::vector<double>(space.dim, 0.0));
    double n2 = 0.0;
    for (std::size_t k = 0; k < space.dim; ++k) {
      q[k] = rng.uniform(space.box_lo[k], space.box_hi[k]) - x[k];
      n2 += q[k] * q[k];
    }
    if (n2 <= 0.0) continue;
    const Point dir = (1.0 / std::sqrt(n2)) * q;
    const double r =
        std::pow(rng.next_double(), 1.0 / static_cast<double>(space.dim));
    const Point p = ray_point(space.d, x, dir, r * eps);
    if (space.d(x, p) <= eps * (1.0 + 1e-9)) raw.push_back(p);
  }
  if (raw.size() < 2)
    throw std::runtime_error("ball sampling produced no points");
  return raw;
}

}  // namespace

ProfileSnapshot profile_snapshot(const SpaceOracle& space, const Point& x,
                                 double eps, double mu_net, std::uint64_t seed,
                                 std::size_t pool) {
  if (!(eps > 0.0) || !(mu_net > 0.0))
    throw std::invalid_argument("profile_snapshot: eps and mu_net must be > 0");
  return assemble(ball_points(space, x, eps, seed, pool), space.d, eps, mu_net);
}

FiniteSample net_sample(const ProfileSnapshot& snap) {
  return restrict_sample(snap.sample, snap.net);
}

GhResult snapshot_gh(const ProfileSnapshot& a, const ProfileSnapshot& b,
                     std::uint64_t seed) {
  GhConfig cfg;
  cfg.seed = seed;
  cfg.mode = (a.sample.size() <= 4 && b.sample.size() <= 4) ? GhMode::exact
                                                            : GhMode::heuristic;
  return gh_distance(a.sample, b.sample, cfg);
}

double profile_consistency(const SpaceOracle& space, const Point& x, double b,
                           double eps, double mu_net, std::uint64_t seed) {
  const ProfileSnapshot fine =
      profile_snapshot(space, x, eps * b, mu_net, seed ^ 0x01);
  // eps-rescaled sub-ball of the scale-b snapshot, densified to the standard
  // snapshot pool with further points of the same sub-ball of B(x, b)
  const std::vector<Point> coarse =
      ball_points(space, x, b, seed ^ 0x02, 2000);
  std::vector<Point> sub{x};
  for (std::size_t i = 1; i < coarse.size(); ++i)
    if (space.d(x, coarse[i]) <= eps * b) sub.push_back(coarse[i]);
  if (sub.size() < 1001) {
    const std::vector<Point> extra =
        ball_points(space, x, eps * b, seed ^ 0x04, 1000 - sub.size());
    sub.insert(sub.end(), extra.begin() + 1, extra.end());
  }
  if (sub.size() < 2) return std::numeric_limits<double>::infinity();
  const ProfileSnapshot subsnap =
      assemble(std::move(sub), space.d, eps * b, mu_net);
  return snapshot_gh(fine, subsnap, seed ^ 0x03).mu;
}

TangentReport tangent_existence(const SpaceOracle& space, const Point& x,
                                const Ladder& ladder, double mu_net,
                                std::uint64_t seed) {
  TangentReport report;
  report.threshold = 2.0 * mu_net;
  std::vector<ProfileSnapshot> snaps;
  const std::vector<double> scales = ladder.scales();
  for (std::size_t k = 0; k < scales.size(); ++k)
    snaps.push_back(
        profile_snapshot(space, x, scales[k], mu_net, seed ^ (0x100 + k)));
  report.exists = true;
  for (std::size_t k = 1; k < snaps.size(); ++k) {
    const double mu = snapshot_gh(snaps[k - 1], snaps[k], seed ^ (0x200 + k)).mu;
    report.residuals.push_back({scales[k], mu});
    if (mu > report.threshold) report.exists = false;
  }
  report.terminal = snaps.back();
  return report;
}

double cone_check(const SpaceOracle& space, const Point& x, double a, double b,
                  double mu_net, std::uint64_t seed) {
  const ProfileSnapshot sa = profile_snapshot(space, x, a, mu_net, seed ^ 0x11);
  const ProfileSnapshot sb = profile_snapshot(space, x, b, mu_net, seed ^ 0x12);
  return snapshot_gh(sa, sb, seed ^ 0x13).mu;
}

double cone_check_snapshot(const ProfileSnapshot& snap, double a,
                           std::uint64_t seed) {
  if (!(a > 0.0 && a <= 1.0))
    throw std::invalid_argument("cone_check_snapshot: a must be in (0,1]");
  // a-rescaled sub-ball of the snapshot, compared against the snapshot itself
  std::vector<std::size_t> idx{0};
  for (std::size_t i = 1; i < snap.sample.size(); ++i)
    if (snap.sample.dist(0, i) <= a) idx.push_back(i);
  const std::size_t n = idx.size();
  if (n < 2) return std::numeric_limits<double>::infinity();
  std::vector<double> matrix(n * n, 0.0);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q)
      matrix[p * n + q] = snap.sample.dist(idx[p], idx[q]) / a;
  FiniteSample sub(n, std::move(matrix), 0);
  {
    // renormalize matching coordinates of the sub-ball
    const Point& x = snap.raw_points.front();
    double radius = 0.0;
    for (std::size_t i : idx)
      radius = std::max(radius, norm_l2(snap.raw_points[i] - x));
    if (radius <= 0.0) radius = 1.0;
    std::vector<Point> pts;
    for (std::size_t i : idx)
      pts.push_back((1.0 / radius) * (snap.raw_points[i] - x));
    sub.set_points(std::move(pts));
  }
  GhConfig cfg;
  cfg.seed = seed;
  cfg.mode = GhMode::heuristic;
  return gh_distance(sub, snap.sample, cfg).mu;
}

}  // namespace dilatlab
