#pragma once

#include <cstdlib>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dilatlab/metric.hpp"

namespace dilatlab {

// Normed group over an element type E: composition, inverse, neutral element
// and a norm.  The group laws are checked on samples, never assumed.
template <typename E>
struct NormedGroup {
  std::function<E(const E&, const E&)> compose;
  std::function<E(const E&)> inverse;
  E neutral;
  std::function<double(const E&)> norm;
};

enum class GroupSide { left, right };

// d_L(x,y) = rho(x^{-1} y), d_R(x,y) = rho(x y^{-1})
template <typename E>
std::function<double(const E&, const E&)> group_distance(
    const NormedGroup<E>& g, GroupSide side) {
  if (side == GroupSide::left)
    return [g](const E& x, const E& y) { return g.norm(g.compose(g.inverse(x), y)); };
  return [g](const E& x, const E& y) { return g.norm(g.compose(x, g.inverse(y))); };
}

struct GroupReport {
  bool pass = true;
  double max_law_residual = 0.0;        // associativity / inverse / neutral
  double max_norm_residual = 0.0;       // rho(e), rho(g^-1)-rho(g), sub-additivity slack
  double max_invariance_residual = 0.0; // d_L(zx,zy) - d_L(x,y) (and d_R analog)
};

// Verifies group laws, norm axioms and left/right invariance of the induced
// distances on a finite element sample.  Exact equality of the element
// representation is required for the laws.
template <typename E>
GroupReport verify_group(const NormedGroup<E>& g, const std::vector<E>& elems,
                         double tol = 1e-12) {
  GroupReport r;
  auto note = [&](double& slot, double v) {
    if (v > slot) slot = v;
    if (v > tol) r.pass = false;
  };
  auto dl = group_distance(g, GroupSide::left);
  auto dr = group_distance(g, GroupSide::right);
  note(r.max_norm_residual, g.norm(g.neutral));
  for (const E& x : elems) {
    if (!(g.compose(x, g.inverse(x)) == g.neutral)) r.pass = false;
    if (!(g.compose(x, g.neutral) == x)) r.pass = false;
    note(r.max_norm_residual, std::abs(g.norm(g.inverse(x)) - g.norm(x)));
  }
  for (const E& x : elems)
    for (const E& y : elems) {
      const double sub = g.norm(g.compose(x, y)) - g.norm(x) - g.norm(y);
      note(r.max_norm_residual, sub > 0 ? sub : 0.0);
      for (const E& z : elems) {
        if (!(g.compose(g.compose(x, y), z) == g.compose(x, g.compose(y, z))))
          r.pass = false;
        note(r.max_invariance_residual, std::abs(dl(g.compose(z, x), g.compose(z, y)) - dl(x, y)));
        note(r.max_invariance_residual, std::abs(dr(g.compose(x, z), g.compose(y, z)) - dr(x, y)));
      }
    }
  return r;
}

// ---------------------------------------------------------------------------
// Built-in groups

// (R^n, +) with a chosen norm
NormedGroup<Point> additive_group(std::function<double(const Point&)> norm,
                                  std::size_t dim);

// Free group on two generators; elements are reduced words over
// {+1,-1,+2,-2} (letter -k is the inverse of +k).  Reduction is applied
// after every composition so the word-length norm is well defined.
using Word = std::vector<int>;

Word reduce_word(Word w);

NormedGroup<Word> free_group2();

// ---------------------------------------------------------------------------
// Normed groupoids.  Arrows of the trivial groupoid over a FiniteSample are
// ordered index pairs (tail, head): (x,y)(y,z) = (x,z), (x,y)^{-1} = (y,x),
// alpha((x,y)) = (y,y), omega((x,y)) = (x,x), norm((x,y)) = d(x,y).
struct Arrow {
  std::size_t from = 0, to = 0;
  friend bool operator==(const Arrow& a, const Arrow& b) {
    return a.from == b.from && a.to == b.to;
  }
};

class NormedGroupoid {
 public:
  std::function<bool(const Arrow&, const Arrow&)> composable;
  std::function<Arrow(const Arrow&, const Arrow&)> compose;
  std::function<Arrow(const Arrow&)> inverse;
  std::function<Arrow(const Arrow&)> source;  // alpha(a) = a^{-1} a
  std::function<Arrow(const Arrow&)> target;  // omega(a) = a a^{-1}
  std::function<double(const Arrow&)> norm;
  std::function<bool(const Arrow&)> is_object;
};

// Refuses construction if the sample fails verify_metric.
NormedGroupoid trivial_groupoid(const FiniteSample& sample,
                                double tol = kDefaultMetricTol);

struct GroupoidReport {
  bool pass = true;
  double max_norm_residual = 0.0;       // axioms (i)-(iii) on composable pairs
  double max_fiber_distortion = 0.0;    // fiber metric vs the underlying metric
  double max_translation_residual = 0.0;// right-translation isometry defect
  std::size_t skipped_non_composable = 0;
};

GroupoidReport verify_groupoid(const NormedGroupoid& g,
                               const std::vector<Arrow>& arrows,
                               const FiniteSample& sample, double tol = 1e-12);

}  // namespace dilatlab
