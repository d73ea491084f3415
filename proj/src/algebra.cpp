#include "dilatlab/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace dilatlab {

NormedGroup<Point> additive_group(std::function<double(const Point&)> norm,
                                  std::size_t dim) {
  NormedGroup<Point> g;
  g.compose = [](const Point& a, const Point& b) { return a + b; };
  g.inverse = [](const Point& a) { return -1.0 * a; };
  g.neutral = Point(std::vector<double>(dim, 0.0));
  g.norm = std::move(norm);
  return g;
}

Word reduce_word(Word w) {
  Word out;
  for (int letter : w) {
    if (!out.empty() && out.back() == -letter)
      out.pop_back();
    else
      out.push_back(letter);
  }
  return out;
}

NormedGroup<Word> free_group2() {
  NormedGroup<Word> g;
  g.compose = [](const Word& a, const Word& b) {
    Word w = a;
    w.insert(w.end(), b.begin(), b.end());
    return reduce_word(std::move(w));
  };
  g.inverse = [](const Word& a) {
    Word w(a.rbegin(), a.rend());
    for (int& letter : w) letter = -letter;
    return w;
  };
  g.neutral = Word{};
  g.norm = [](const Word& a) { return static_cast<double>(a.size()); };
  return g;
}

NormedGroupoid trivial_groupoid(const FiniteSample& sample, double tol) {
  const MetricReport mr = verify_metric(sample, tol);
  if (!mr.pass)
    throw std::invalid_argument(
        "trivial_groupoid: sample violates the metric axioms (" +
        std::to_string(mr.total_violations) + " violations)");
  // copy of the matrix keeps the groupoid self-contained
  auto s = std::make_shared<FiniteSample>(sample);
  NormedGroupoid g;
  g.composable = [](const Arrow& a, const Arrow& b) { return a.to == b.from; };
  g.compose = [](const Arrow& a, const Arrow& b) {
    if (a.to != b.from)
      throw std::invalid_argument("trivial_groupoid: non-composable arrows");
    return Arrow{a.from, b.to};
  };
  g.inverse = [](const Arrow& a) { return Arrow{a.to, a.from}; };
  g.source = [](const Arrow& a) { return Arrow{a.to, a.to}; };
  g.target = [](const Arrow& a) { return Arrow{a.from, a.from}; };
  g.norm = [s](const Arrow& a) { return s->dist(a.from, a.to); };
  g.is_object = [](const Arrow& a) { return a.from == a.to; };
  return g;
}

GroupoidReport verify_groupoid(const NormedGroupoid& g,
                               const std::vector<Arrow>& arrows,
                               const FiniteSample& sample, double tol) {
  GroupoidReport r;
  auto note = [&](double& slot, double v) {
    if (v > slot) slot = v;
    if (v > tol) r.pass = false;
  };

  // norm axioms on the arrow sample
  for (const Arrow& a : arrows) {
    if (g.is_object(a))
      note(r.max_norm_residual, std::abs(g.norm(a)));
    else if (g.norm(a) <= tol)
      r.pass = false;  // norm vanishes off Ob(G)
    note(r.max_norm_residual, std::abs(g.norm(g.inverse(a)) - g.norm(a)));
  }
  for (const Arrow& a : arrows)
    for (const Arrow& b : arrows) {
      if (!g.composable(a, b)) {
        ++r.skipped_non_composable;
        continue;
      }
      const double sub = g.norm(g.compose(a, b)) - g.norm(a) - g.norm(b);
      note(r.max_norm_residual, sub > 0 ? sub : 0.0);
    }

  // fiber metric d_x(gh^{-1}) vs the underlying sample metric, through
  // the identification (u,x) -> u
  const std::size_t n = sample.size();
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = 0; v < n; ++v) {
        const Arrow gu{u, x}, gv{v, x};  // alpha = (x,x) for both
        const double fiber = g.norm(g.compose(gu, g.inverse(gv)));
        note(r.max_fiber_distortion, std::abs(fiber - sample.dist(u, v)));
      }

  // right translations are isometries between fibers
  for (const Arrow& u : arrows)
    for (const Arrow& a : arrows)
      for (const Arrow& b : arrows) {
        if (!(g.source(a) == g.target(u)) || !(g.source(b) == g.target(u))) {
          ++r.skipped_non_composable;
          continue;
        }
        const double before = g.norm(g.compose(a, g.inverse(b)));
        const Arrow ra = g.compose(a, u), rb = g.compose(b, u);
        const double after = g.norm(g.compose(ra, g.inverse(rb)));
        note(r.max_translation_residual, std::abs(before - after));
      }
  return r;
}

}  // namespace dilatlab
