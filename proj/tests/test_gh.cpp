#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "dilatlab/gh.hpp"
#include "dilatlab/rng.hpp"

using namespace dilatlab;

namespace {

FiniteSample random_sample(SplitRng& rng, std::size_t n) {
  std::vector<Point> pts;
  for (std::size_t i = 0; i < n; ++i)
    pts.push_back(Point{rng.uniform(-1, 1), rng.uniform(-1, 1)});
  return FiniteSample(pts, euclidean_oracle(), 0);
}

// Brute-force minimum of admissibility over every relation containing the
// base pair; independent of the branch-and-bound search order.
double exhaustive_gh(const FiniteSample& s1, const FiniteSample& s2) {
  const std::size_t n1 = s1.size(), n2 = s2.size();
  const std::size_t cells = n1 * n2;
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 1; mask < (1ULL << cells); ++mask) {
    Correspondence rho;
    for (std::size_t c = 0; c < cells; ++c)
      if (mask & (1ULL << c)) rho.pairs.push_back({c / n2, c % n2});
    best = std::min(best, admissibility(rho, s1, s2).mu);
  }
  return best;
}

}  // namespace

TEST_CASE("admissibility of hand-built relations") {
  const FiniteSample s1(std::vector<Point>{{0.0}, {1.0}}, euclidean_oracle(), 0);
  const FiniteSample s2(std::vector<Point>{{0.0}, {1.5}}, euclidean_oracle(), 0);

  Correspondence full;
  full.pairs = {{0, 0}, {1, 1}};
  const GhResult r = admissibility(full, s1, s2);
  CHECK(r.breakdown.base_pair_present);
  CHECK(r.breakdown.dom_covering_radius == 0.0);
  CHECK(r.breakdown.im_covering_radius == 0.0);
  CHECK(r.breakdown.distortion == doctest::Approx(0.5));
  CHECK(r.mu == doctest::Approx(0.5));

  Correspondence partial;
  partial.pairs = {{0, 0}};
  const GhResult p = admissibility(partial, s1, s2);
  CHECK(p.breakdown.dom_covering_radius == doctest::Approx(1.0));
  CHECK(p.breakdown.im_covering_radius == doctest::Approx(1.5));
  CHECK(p.mu == doctest::Approx(1.5));

  Correspondence no_base;
  no_base.pairs = {{1, 1}};
  CHECK(std::isinf(admissibility(no_base, s1, s2).mu));
}

TEST_CASE("exact mode: isometric samples have distance zero") {
  SplitRng rng(9);
  const FiniteSample s1 = random_sample(rng, 4);
  // translate + rotate the points: same matrix
  std::vector<double> m(16);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) m[i * 4 + j] = s1.dist(i, j);
  const FiniteSample s2(4, m, 0);
  const GhResult r = gh_distance(s1, s2);
  CHECK(r.mu == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_FALSE(r.upper_bound_only);
}

TEST_CASE("exact mode: unit gap two-point spaces and point-vs-pair") {
  const FiniteSample a(std::vector<Point>{{0.0}, {1.0}}, euclidean_oracle(), 0);
  const FiniteSample b(std::vector<Point>{{0.0}, {1.5}}, euclidean_oracle(), 0);
  CHECK(gh_distance(a, b).mu == doctest::Approx(0.5));

  const FiniteSample pt(std::vector<Point>{{0.0}}, euclidean_oracle(), 0);
  const FiniteSample pair(std::vector<Point>{{0.0}, {1.0}}, euclidean_oracle(), 0);
  CHECK(gh_distance(pt, pair).mu == doctest::Approx(1.0));
}

TEST_CASE("exact mode agrees with exhaustive enumeration") {
  SplitRng rng(21);
  for (int rep = 0; rep < 30; ++rep) {
    const FiniteSample s1 = random_sample(rng, 2 + rep % 2);  // 2 or 3 points
    const FiniteSample s2 = random_sample(rng, 2 + (rep + 1) % 2);
    const double exact = gh_distance(s1, s2).mu;
    const double brute = exhaustive_gh(s1, s2);
    CHECK(exact == doctest::Approx(brute).epsilon(1e-12));
  }
}

TEST_CASE("exact mode is symmetric") {
  SplitRng rng(33);
  for (int rep = 0; rep < 20; ++rep) {
    const FiniteSample s1 = random_sample(rng, 3);
    const FiniteSample s2 = random_sample(rng, 4);
    CHECK(gh_distance(s1, s2).mu ==
          doctest::Approx(gh_distance(s2, s1).mu).epsilon(1e-12));
  }
}

TEST_CASE("heuristic result is an admissible upper bound on the exact value") {
  SplitRng rng(55);
  for (int rep = 0; rep < 50; ++rep) {
    const FiniteSample s1 = random_sample(rng, 2 + rep % 3);
    const FiniteSample s2 = random_sample(rng, 2 + (rep / 3) % 3);
    GhConfig cfg;
    cfg.mode = GhMode::heuristic;
    cfg.seed = rep;
    cfg.anneal_steps = 2000;
    const GhResult h = gh_distance(s1, s2, cfg);
    CHECK(h.upper_bound_only);
    // the reported relation really achieves the reported value
    CHECK(admissibility(h.relation, s1, s2).mu ==
          doctest::Approx(h.mu).epsilon(1e-12));
    CHECK(h.mu >= gh_distance(s1, s2).mu - 1e-12);
  }
}

TEST_CASE("distance is bounded by half the diameter gap witness relation") {
  // relating everything to everything gives mu <= max diameter
  SplitRng rng(77);
  const FiniteSample s1 = random_sample(rng, 3);
  const FiniteSample s2 = random_sample(rng, 4);
  const double bound = std::max(s1.diameter(), s2.diameter());
  CHECK(gh_distance(s1, s2).mu <= bound + 1e-12);
}

TEST_CASE("exact mode refuses oversized problems by throwing") {
  SplitRng rng(88);
  const FiniteSample s1 = random_sample(rng, 5);
  const FiniteSample s2 = random_sample(rng, 4);  // 20 cells > cap of 16
  CHECK_THROWS_AS(gh_distance(s1, s2), std::length_error);
  GhConfig cfg;
  cfg.mode = GhMode::heuristic;
  CHECK_NOTHROW(gh_distance(s1, s2, cfg));
}

TEST_CASE("square versus triangle: covering forces a unit collapse") {
  // unit square vs a single unit-distance pair: any admissible relation must
  // cover all four square corners, so two corners at distance >= 1 share an
  // image and the distortion is at least 1; the exact search attains 1.
  const std::vector<Point> sq = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const std::vector<Point> tr = {{0, 0}, {1, 0}};
  const FiniteSample s1(sq, euclidean_oracle(), 0);
  const FiniteSample s2(tr, euclidean_oracle(), 0);
  const GhResult r = gh_distance(s1, s2);
  CHECK(r.mu == doctest::Approx(1.0));
}

TEST_CASE("missing base marker makes the distance infinite") {
  const FiniteSample s1(std::vector<Point>{{0.0}, {1.0}}, euclidean_oracle(), 0);
  FiniteSample s2 = s1;
  // a relation that omits the base pair is never admissible
  Correspondence rho;
  rho.pairs = {{0, 1}, {1, 0}};
  CHECK(std::isinf(admissibility(rho, s1, s2).mu));
}
