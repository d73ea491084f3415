#include <algorithm>
#include <cmath>
#include <filesystem>
#include <vector>

#include "doctest.h"
#include "dilatlab/metric.hpp"
#include "dilatlab/rng.hpp"

using namespace dilatlab;

namespace {

std::vector<Point> random_points(SplitRng& rng, std::size_t n, std::size_t dim) {
  std::vector<Point> pts;
  for (std::size_t i = 0; i < n; ++i) {
    Point p(std::vector<double>(dim, 0.0));
    for (std::size_t k = 0; k < dim; ++k) p[k] = rng.uniform(-1.0, 1.0);
    pts.push_back(p);
  }
  return pts;
}

}  // namespace

TEST_CASE("point arithmetic and norms") {
  const Point a{3.0, 4.0}, b{1.0, 1.0};
  CHECK((a + b) == Point{4.0, 5.0});
  CHECK((a - b) == Point{2.0, 3.0});
  CHECK((2.0 * b) == Point{2.0, 2.0});
  CHECK(norm_l2(a) == doctest::Approx(5.0));
  CHECK(norm_l1(a) == doctest::Approx(7.0));
  CHECK(norm_linf(a) == doctest::Approx(4.0));
}

TEST_CASE("random Euclidean samples satisfy the metric axioms") {
  SplitRng rng(42);
  for (int rep = 0; rep < 20; ++rep) {
    FiniteSample s(random_points(rng, 5, 2), euclidean_oracle(), 0);
    const MetricReport r = verify_metric(s);
    CHECK(r.pass);
    CHECK(r.total_violations == 0);
  }
}

TEST_CASE("identity violation is detected with a correct witness") {
  // d(p,q) = 0 for distinct p, q
  std::vector<double> m = {0, 0, 0, 0, 0, 1, 0, 1, 0};
  FiniteSample s(3, m, 0);
  const MetricReport r = verify_metric(s);
  CHECK_FALSE(r.pass);
  REQUIRE_FALSE(r.witnesses.empty());
  bool found = false;
  for (const MetricViolation& w : r.witnesses)
    if (w.axiom == MetricAxiom::identity &&
        ((w.i == 0 && w.j == 1) || (w.i == 1 && w.j == 0)))
      found = true;
  CHECK(found);
}

TEST_CASE("triangle violation d(a,b)=1 d(b,c)=1 d(a,c)=5 has slack 3") {
  std::vector<double> m = {0, 1, 5, 1, 0, 1, 5, 1, 0};
  FiniteSample s(3, m, 0);
  const MetricReport r = verify_metric(s);
  CHECK_FALSE(r.pass);
  bool found = false;
  for (const MetricViolation& w : r.witnesses)
    if (w.axiom == MetricAxiom::triangle && w.slack == doctest::Approx(3.0))
      found = true;
  CHECK(found);
}

TEST_CASE("symmetry violation is detected") {
  std::vector<double> m = {0, 1, 1, 0};
  FiniteSample s(2, m, 0);
  s.set_dist_asym(0, 1, 1.25);
  const MetricReport r = verify_metric(s);
  CHECK_FALSE(r.pass);
  CHECK(r.witnesses.front().axiom == MetricAxiom::symmetry);
}

TEST_CASE("non-finite entry is rejected by name") {
  std::vector<double> m = {0, 1, 1, 0};
  FiniteSample s(2, m, 0);
  s.set_dist(0, 1, std::nan(""));
  CHECK_THROWS_AS(verify_metric(s), std::invalid_argument);
}

TEST_CASE("verdict is invariant under point permutation") {
  SplitRng rng(7);
  std::vector<Point> pts = random_points(rng, 6, 2);
  FiniteSample good(pts, euclidean_oracle(), 0);
  // violating sample: break one triangle
  FiniteSample bad = good;
  bad.set_dist(1, 2, good.diameter() * 10.0);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<std::size_t> perm(pts.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    for (std::size_t i = perm.size(); i > 1; --i)
      std::swap(perm[i - 1], perm[rng.next_below(i)]);
    auto permute = [&](const FiniteSample& s) {
      std::vector<double> m(perm.size() * perm.size());
      for (std::size_t i = 0; i < perm.size(); ++i)
        for (std::size_t j = 0; j < perm.size(); ++j)
          m[i * perm.size() + j] = s.dist(perm[i], perm[j]);
      return FiniteSample(perm.size(), std::move(m), 0);
    };
    CHECK(verify_metric(permute(good)).pass);
    CHECK_FALSE(verify_metric(permute(bad)).pass);
  }
}

TEST_CASE("rescaling the oracle rescales slacks and preserves the verdict") {
  std::vector<double> m = {0, 1, 5, 1, 0, 1, 5, 1, 0};
  FiniteSample s1(3, m, 0);
  for (double& v : m) v *= 0.5;  // oracle rescaled by lambda = 2
  FiniteSample s2(3, m, 0);
  const MetricReport r1 = verify_metric(s1), r2 = verify_metric(s2);
  CHECK_FALSE(r1.pass);
  CHECK_FALSE(r2.pass);
  REQUIRE(r1.witnesses.size() == r2.witnesses.size());
  for (std::size_t i = 0; i < r1.witnesses.size(); ++i)
    CHECK(r2.witnesses[i].slack ==
          doctest::Approx(0.5 * r1.witnesses[i].slack));
}

TEST_CASE("mu_dense_net on the unit grid") {
  std::vector<Point> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(Point{0.1 * i});
  FiniteSample s(grid, euclidean_oracle(), 0);
  std::vector<std::size_t> all(grid.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

  CHECK(mu_dense_net(s, all, 0.05).covered);
  CHECK(mu_dense_net(s, {0}, 1.0).covered);
  const NetReport r = mu_dense_net(s, {0}, 0.5);
  CHECK_FALSE(r.covered);
  CHECK(r.worst_point == 10);
  CHECK(r.covering_radius == doctest::Approx(1.0));
  CHECK_THROWS_AS(mu_dense_net(s, {}, 0.5), std::invalid_argument);
}

TEST_CASE("mu_dense_net is monotone in mu") {
  std::vector<Point> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(Point{0.1 * i});
  FiniteSample s(grid, euclidean_oracle(), 0);
  bool prev = false;
  for (double mu : {0.05, 0.1, 0.3, 0.6, 1.0, 2.0}) {
    const bool cur = mu_dense_net(s, {0, 5}, mu).covered;
    CHECK((prev ? cur : true));  // once covered, stays covered
    prev = cur;
  }
}

TEST_CASE("matrix file round trip preserves the sample") {
  SplitRng rng(3);
  FiniteSample s(random_points(rng, 4, 3), euclidean_oracle(), 2);
  const std::string text = s.serialize();
  const FiniteSample t = FiniteSample::deserialize(text);
  REQUIRE(t.size() == s.size());
  CHECK(t.base() == s.base());
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      CHECK(t.dist(i, j) == s.dist(i, j));

  const std::string path =
      (std::filesystem::temp_directory_path() / "dilatlab_sample.txt").string();
  s.save(path);
  const FiniteSample u = FiniteSample::load(path);
  CHECK(u.serialize() == text);
  std::filesystem::remove(path);
}
