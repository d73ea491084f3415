#include "dilatlab/gh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dilatlab/rng.hpp"

namespace dilatlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double covering_radius(const FiniteSample& s, const std::vector<char>& in_set) {
  double radius = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    double best = kInf;
    for (std::size_t c = 0; c < s.size(); ++c)
      if (in_set[c]) best = std::min(best, s.dist(i, c));
    radius = std::max(radius, best);
  }
  return radius;
}

}  // namespace

GhResult admissibility(const Correspondence& rho, const FiniteSample& s1,
                       const FiniteSample& s2) {
  if (rho.pairs.empty()) throw std::invalid_argument("admissibility: empty relation");
  if (!s1.base() || !s2.base())
    throw std::invalid_argument("admissibility: both samples need base points");
  for (auto [i, j] : rho.pairs)
    if (i >= s1.size() || j >= s2.size())
      throw std::out_of_range("admissibility: relation index out of range");

  GhResult r;
  r.relation = rho;
  std::vector<char> dom(s1.size(), 0), im(s2.size(), 0);
  for (auto [i, j] : rho.pairs) {
    dom[i] = 1;
    im[j] = 1;
    if (i == *s1.base() && j == *s2.base()) r.breakdown.base_pair_present = true;
  }
  r.breakdown.dom_covering_radius = covering_radius(s1, dom);
  r.breakdown.im_covering_radius = covering_radius(s2, im);
  double dist = 0.0;
  for (auto [i, j] : rho.pairs)
    for (auto [k, l] : rho.pairs)
      dist = std::max(dist, std::abs(s2.dist(j, l) - s1.dist(i, k)));
  r.breakdown.distortion = dist;
  r.mu = r.breakdown.base_pair_present
             ? std::max({r.breakdown.dom_covering_radius,
                         r.breakdown.im_covering_radius, dist})
             : kInf;
  return r;
}

namespace {

// exact search: branch-and-bound over all relations containing the base pair
struct ExactSearch {
  const FiniteSample& s1;
  const FiniteSample& s2;
  std::vector<std::pair<std::size_t, std::size_t>> cells;  // all non-base cells
  std::vector<std::pair<std::size_t, std::size_t>> chosen;
  double best_mu = kInf;
  Correspondence best_rel;

  void leaf() {
    Correspondence rho;
    rho.pairs = chosen;
    const GhResult r = admissibility(rho, s1, s2);
    if (r.mu < best_mu) {
      best_mu = r.mu;
      best_rel = rho;
    }
  }

  void recurse(std::size_t depth, double partial_distortion) {
    if (partial_distortion >= best_mu) return;  // distortion only grows
    if (depth == cells.size()) {
      leaf();
      return;
    }
    // exclude the cell
    recurse(depth + 1, partial_distortion);
    // include the cell
    const auto [i, j] = cells[depth];
    double d = partial_distortion;
    for (auto [k, l] : chosen)
      d = std::max(d, std::abs(s2.dist(j, l) - s1.dist(i, k)));
    chosen.push_back(cells[depth]);
    recurse(depth + 1, d);
    chosen.pop_back();
  }
};

GhResult gh_exact(const FiniteSample& s1, const FiniteSample& s2,
                  const GhConfig& cfg) {
  if (s1.size() * s2.size() > cfg.exact_cap)
    throw std::length_error("gh_distance: exact mode size cap exceeded (" +
                            std::to_string(s1.size() * s2.size()) + " > " +
                            std::to_string(cfg.exact_cap) + ")");
  ExactSearch search{s1, s2};
  const std::size_t b1 = *s1.base(), b2 = *s2.base();
  for (std::size_t i = 0; i < s1.size(); ++i)
    for (std::size_t j = 0; j < s2.size(); ++j)
      if (!(i == b1 && j == b2)) search.cells.push_back({i, j});
  search.chosen.push_back({b1, b2});
  search.recurse(0, 0.0);
  GhResult r = admissibility(search.best_rel, s1, s2);
  return r;
}

// heuristic search state: f: s1 -> s2 and g: s2 -> s1, base pair fixed.
// The relation is graph(f) union transpose(graph(g)); related pairs are
// indexed 0..n1-1 (pairs (i, f(i))) then n1..n1+n2-1 (pairs (g(j), j)).
struct AnnealState {
  const FiniteSample& s1;
  const FiniteSample& s2;
  std::vector<std::size_t> f, g;
  std::size_t n1, n2, total;
  std::vector<double> entries;  // total x total distortion entries
  std::vector<double> rowmax;
  std::vector<char> dirty;

  AnnealState(const FiniteSample& a, const FiniteSample& b)
      : s1(a), s2(b), n1(a.size()), n2(b.size()), total(n1 + n2) {
    f.assign(n1, 0);
    g.assign(n2, 0);
    entries.assign(total * total, 0.0);
    rowmax.assign(total, 0.0);
    dirty.assign(total, 0);
  }

  std::size_t px(std::size_t r) const { return r < n1 ? r : g[r - n1]; }
  std::size_t py(std::size_t r) const { return r < n1 ? f[r] : r - n1; }

  double entry(std::size_t r, std::size_t q) const {
    return std::abs(s2.dist(py(r), py(q)) - s1.dist(px(r), px(q)));
  }

  void rebuild() {
    for (std::size_t r = 0; r < total; ++r) {
      double m = 0.0;
      for (std::size_t q = 0; q < total; ++q) {
        const double e = entry(r, q);
        entries[r * total + q] = e;
        m = std::max(m, e);
      }
      rowmax[r] = m;
      dirty[r] = 0;
    }
  }

  // refresh row r after the pair it indexes changed
  void touch(std::size_t r) {
    double m = 0.0;
    for (std::size_t q = 0; q < total; ++q) {
      const double e = entry(r, q);
      const double old = entries[q * total + r];
      entries[r * total + q] = e;
      entries[q * total + r] = e;
      if (q != r) {
        if (e >= rowmax[q])
          rowmax[q] = e;
        else if (old >= rowmax[q] - 1e-300)
          dirty[q] = 1;
      }
      m = std::max(m, e);
    }
    rowmax[r] = m;
    dirty[r] = 0;
  }

  double cost() {
    double m = 0.0;
    for (std::size_t r = 0; r < total; ++r) {
      if (dirty[r]) {
        double rm = 0.0;
        for (std::size_t q = 0; q < total; ++q)
          rm = std::max(rm, entries[r * total + q]);
        rowmax[r] = rm;
        dirty[r] = 0;
      }
      m = std::max(m, rowmax[r]);
    }
    return m;
  }
};

GhResult gh_heuristic(const FiniteSample& s1, const FiniteSample& s2,
                      const GhConfig& cfg) {
  const std::size_t b1 = *s1.base(), b2 = *s2.base();
  AnnealState st(s1, s2);

  // geometric init when both samples carry ambient coordinates of matching
  // dimension: nearest-point matching is a strong start for snapshots of the
  // same space at nearby scales
  const bool geometric = s1.has_points() && s2.has_points() &&
                         s1.point(0).dim() == s2.point(0).dim();
  if (geometric) {
    auto nearest = [](const Point& p, const FiniteSample& s) {
      std::size_t best = 0;
      double bd = kInf;
      for (std::size_t j = 0; j < s.size(); ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < p.dim(); ++k) {
          const double t = p[k] - s.point(j)[k];
          acc += t * t;
        }
        if (acc < bd) {
          bd = acc;
          best = j;
        }
      }
      return best;
    };
    for (std::size_t i = 0; i < st.n1; ++i) st.f[i] = nearest(s1.point(i), s2);
    for (std::size_t j = 0; j < st.n2; ++j) st.g[j] = nearest(s2.point(j), s1);
    st.f[b1] = b2;
    st.g[b2] = b1;
    st.rebuild();
  }

  // greedy init: assign each point to minimize the distortion against the
  // pairs fixed so far
  if (!geometric) {
  st.f[b1] = b2;
  for (std::size_t i = 0; i < st.n1; ++i) {
    if (i == b1) continue;
    double best = kInf;
    std::size_t bestj = 0;
    for (std::size_t j = 0; j < st.n2; ++j) {
      double worst = std::abs(s2.dist(j, b2) - s1.dist(i, b1));
      for (std::size_t k = 0; k < i; ++k)
        worst = std::max(worst, std::abs(s2.dist(j, st.f[k]) - s1.dist(i, k)));
      if (worst < best) {
        best = worst;
        bestj = j;
      }
    }
    st.f[i] = bestj;
  }
  st.g[b2] = b1;
  for (std::size_t j = 0; j < st.n2; ++j) {
    if (j == b2) continue;
    double best = kInf;
    std::size_t besti = 0;
    for (std::size_t i = 0; i < st.n1; ++i) {
      double worst = std::abs(s2.dist(j, b2) - s1.dist(i, b1));
      for (std::size_t k = 0; k < st.n1; ++k)
        worst = std::max(worst, std::abs(s2.dist(j, st.f[k]) - s1.dist(i, k)));
      if (worst < best) {
        best = worst;
        besti = i;
      }
    }
    st.g[j] = besti;
  }
  st.rebuild();
  }

  SplitRng rng = SplitRng(cfg.seed).split(0x6768);
  double cur = st.cost();
  std::vector<std::size_t> best_f = st.f, best_g = st.g;
  double best = cur;
  const int steps = (st.n1 > 1 && st.n2 > 1) ? cfg.anneal_steps : 0;
  for (int step = 0; step < steps; ++step) {
    const double frac = static_cast<double>(step) / std::max(1, steps - 1);
    const double temp = cfg.temp_hi * std::pow(cfg.temp_lo / cfg.temp_hi, frac);
    const bool side_f = rng.next_below(2) == 0;
    std::size_t idx, old_target, new_target, row;
    if (side_f) {
      do { idx = rng.next_below(st.n1); } while (idx == b1);
      old_target = st.f[idx];
      new_target = rng.next_below(st.n2);
      if (new_target == old_target) continue;
      st.f[idx] = new_target;
      row = idx;
    } else {
      do { idx = rng.next_below(st.n2); } while (idx == b2);
      old_target = st.g[idx];
      new_target = rng.next_below(st.n1);
      if (new_target == old_target) continue;
      st.g[idx] = new_target;
      row = st.n1 + idx;
    }
    st.touch(row);
    const double cand = st.cost();
    const double delta = cand - cur;
    if (delta <= 0.0 || rng.next_double() < std::exp(-delta / temp)) {
      cur = cand;
      if (cur < best) {
        best = cur;
        best_f = st.f;
        best_g = st.g;
      }
    } else {
      if (side_f)
        st.f[idx] = old_target;
      else
        st.g[idx] = old_target;
      st.touch(row);
      // cost() lazily repairs any rows marked dirty by the revert
    }
  }

  // polish: rows near the binding maximum get their best-response target;
  // a move is kept only when the global cost strictly improves
  st.f = best_f;
  st.g = best_g;
  st.rebuild();
  cur = st.cost();
  for (int sweep = 0; sweep < 8; ++sweep) {
    bool improved = false;
    const double level = 0.9 * cur;
    for (std::size_t r = 0; r < st.total; ++r) {
      if (st.rowmax[r] < level) continue;
      const bool side_f = r < st.n1;
      const std::size_t idx = side_f ? r : r - st.n1;
      if ((side_f && idx == b1) || (!side_f && idx == b2)) continue;
      const std::size_t old_target = side_f ? st.f[idx] : st.g[idx];
      const std::size_t n_targets = side_f ? st.n2 : st.n1;
      double best_rm = kInf;
      std::size_t best_t = old_target;
      for (std::size_t t = 0; t < n_targets; ++t) {
        double rm = 0.0;
        for (std::size_t q = 0; q < st.total; ++q) {
          if (q == r) continue;  // self-entry is 0 after the move
          const double e =
              side_f ? std::abs(s2.dist(t, st.py(q)) - s1.dist(idx, st.px(q)))
                     : std::abs(s2.dist(idx, st.py(q)) - s1.dist(t, st.px(q)));
          rm = std::max(rm, e);
          if (rm >= best_rm) break;
        }
        if (rm < best_rm) {
          best_rm = rm;
          best_t = t;
        }
      }
      if (best_t == old_target) continue;
      (side_f ? st.f[idx] : st.g[idx]) = best_t;
      st.touch(r);
      const double cand = st.cost();
      if (cand < cur - 1e-15) {
        cur = cand;
        improved = true;
      } else {
        (side_f ? st.f[idx] : st.g[idx]) = old_target;
        st.touch(r);
        cur = st.cost();
      }
    }
    if (!improved) break;
  }
  if (cur < best) {
    best = cur;
    best_f = st.f;
    best_g = st.g;
  }

  Correspondence rho;
  for (std::size_t i = 0; i < st.n1; ++i) rho.pairs.push_back({i, best_f[i]});
  for (std::size_t j = 0; j < st.n2; ++j) rho.pairs.push_back({best_g[j], j});
  GhResult r = admissibility(rho, s1, s2);
  r.upper_bound_only = true;
  return r;
}

}  // namespace

GhResult gh_distance(const FiniteSample& s1, const FiniteSample& s2,
                     const GhConfig& cfg) {
  if (!s1.base() || !s2.base())
    throw std::invalid_argument("gh_distance: both samples need base points");
  if (cfg.mode == GhMode::exact) return gh_exact(s1, s2, cfg);
  return gh_heuristic(s1, s2, cfg);
}

}  // namespace dilatlab
