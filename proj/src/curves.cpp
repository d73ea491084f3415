#include "dilatlab/curves.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "dilatlab/rng.hpp"

namespace dilatlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

SampledCurve::SampledCurve(std::vector<double> times, std::vector<Point> points,
                           DistanceOracle oracle)
    : t_(std::move(times)), p_(std::move(points)), d_(std::move(oracle)) {
  if (t_.size() != p_.size() || t_.size() < 2)
    throw std::invalid_argument("SampledCurve: need matching grids with >= 2 nodes");
  for (std::size_t i = 1; i < t_.size(); ++i)
    if (!(t_[i] > t_[i - 1]))
      throw std::invalid_argument("SampledCurve: time grid must be strictly increasing");
  if (std::abs(t_.front()) > 1e-12 || std::abs(t_.back() - 1.0) > 1e-12)
    throw std::invalid_argument("SampledCurve: time grid must span [0,1]");
}

SampledCurve SampledCurve::from_function(std::function<Point(double)> fn,
                                         std::size_t nodes,
                                         DistanceOracle oracle) {
  if (nodes < 2) throw std::invalid_argument("from_function: need >= 2 nodes");
  std::vector<double> t(nodes);
  std::vector<Point> p(nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    t[i] = static_cast<double>(i) / (nodes - 1);
    p[i] = fn(t[i]);
  }
  SampledCurve c(std::move(t), std::move(p), std::move(oracle));
  c.analytic_ = std::move(fn);
  return c;
}

Point SampledCurve::eval(double time) const {
  if (analytic_) return analytic_(std::clamp(time, 0.0, 1.0));
  time = std::clamp(time, 0.0, 1.0);
  const auto it = std::upper_bound(t_.begin(), t_.end(), time);
  std::size_t hi = std::min<std::size_t>(it - t_.begin(), t_.size() - 1);
  if (hi == 0) hi = 1;
  const std::size_t lo = hi - 1;
  const double w = (time - t_[lo]) / (t_[hi] - t_[lo]);
  return p_[lo] + w * (p_[hi] - p_[lo]);
}

SampledCurve SampledCurve::refined() const {
  std::vector<double> t;
  std::vector<Point> p;
  for (std::size_t i = 0; i + 1 < t_.size(); ++i) {
    const double mid = 0.5 * (t_[i] + t_[i + 1]);
    t.push_back(t_[i]);
    p.push_back(p_[i]);
    t.push_back(mid);
    p.push_back(eval(mid));
  }
  t.push_back(t_.back());
  p.push_back(p_.back());
  SampledCurve c(std::move(t), std::move(p), d_);
  c.analytic_ = analytic_;
  return c;
}

bool SampledCurve::injective_on_nodes(double tol) const {
  for (std::size_t i = 0; i < p_.size(); ++i)
    for (std::size_t j = i + 1; j < p_.size(); ++j)
      if (d_(p_[i], p_[j]) <= tol && !(i == 0 && j == p_.size() - 1))
        return false;
  return true;
}

double SampledCurve::discrete_lipschitz() const {
  double lip = 0.0;
  for (std::size_t i = 0; i + 1 < p_.size(); ++i)
    lip = std::max(lip, d_(p_[i], p_[i + 1]) / (t_[i + 1] - t_[i]));
  return lip;
}

double variation(const SampledCurve& c) {
  double v = 0.0;
  const auto& p = c.nodes();
  for (std::size_t i = 0; i + 1 < p.size(); ++i) v += c.oracle()(p[i], p[i + 1]);
  return v;
}

MetricDerivative metric_derivative(const SampledCurve& c, double t,
                                   const Ladder& ladder) {
  MetricDerivative md;
  const Point ct = c.eval(t);
  std::vector<std::pair<double, double>> fwd, bwd, sym;
  for (double s : ladder.scales()) {
    const bool has_f = t + s <= 1.0 + 1e-15;
    const bool has_b = t - s >= -1e-15;
    double qf = 0.0, qb = 0.0;
    if (has_f) {
      qf = c.oracle()(c.eval(t + s), ct) / s;
      fwd.push_back({s, qf});
    }
    if (has_b) {
      qb = c.oracle()(c.eval(t - s), ct) / s;
      bwd.push_back({s, qb});
    }
    if (has_f && has_b)
      sym.push_back({s, 0.5 * (qf + qb)});
    else if (has_f)
      sym.push_back({s, qf});
    else if (has_b)
      sym.push_back({s, qb});
  }
  md.one_sided = fwd.empty() || bwd.empty();
  md.forward = fit_limit(fwd, ladder.tail);
  md.backward = fit_limit(bwd, ladder.tail);
  md.estimate = fit_limit(sym, ladder.tail);
  // a genuine limit needs both one-sided quotients to agree
  if (!md.one_sided && md.forward.verdict == Verdict::converged &&
      md.backward.verdict == Verdict::converged) {
    const double gap = std::abs(md.forward.limit - md.backward.limit);
    if (gap > 1e-3 * (1.0 + std::abs(md.estimate.limit)))
      md.estimate.verdict = Verdict::oscillating;
  }
  return md;
}

LimitEstimate upper_dilatation(const std::function<Point(const Point&)>& f,
                               const DistanceOracle& dx,
                               const DistanceOracle& dy, const Point& u,
                               std::size_t dim, const Ladder& ladder,
                               std::uint64_t seed, int samples_per_rung) {
  std::vector<std::pair<double, double>> vals;
  SplitRng root = SplitRng(seed).split(0x0d11);
  int rung = 0;
  for (double eps : ladder.scales()) {
    SplitRng rng = root.split(rung++);
    std::vector<Point> pts;
    pts.push_back(u);
    for (int s = 0; s < samples_per_rung; ++s) {
      Point p = u;
      for (std::size_t k = 0; k < dim; ++k) p[k] += rng.uniform(-eps, eps);
      if (dx(p, u) <= eps) pts.push_back(p);
    }
    double sup = -kInf;
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        const double den = dx(pts[i], pts[j]);
        if (den <= 0.0) continue;
        sup = std::max(sup, dy(f(pts[i]), f(pts[j])) / den);
      }
    if (sup >= 0.0) vals.push_back({eps, sup});
  }
  if (vals.empty()) {
    LimitEstimate est;
    est.verdict = Verdict::inconclusive;
    return est;
  }
  LimitEstimate est = fit_limit(vals, ladder.tail);
  // limsup: max over the ladder tail
  const std::size_t t0 = vals.size() > static_cast<std::size_t>(ladder.tail)
                             ? vals.size() - ladder.tail
                             : 0;
  double m = -kInf;
  for (std::size_t i = t0; i < vals.size(); ++i) m = std::max(m, vals[i].second);
  if (est.verdict != Verdict::diverged) est.limit = m;
  return est;
}

SampledCurve reparametrize(const SampledCurve& c) {
  const double total = variation(c);
  if (!(total > 0.0))
    throw std::invalid_argument("reparametrize: zero-length curve");
  const auto& p = c.nodes();
  std::vector<double> cum(p.size(), 0.0);
  for (std::size_t i = 1; i < p.size(); ++i)
    cum[i] = cum[i - 1] + c.oracle()(p[i - 1], p[i]);

  // target arc lengths: uniform samples merged with the original vertices
  std::vector<double> targets;
  const std::size_t m = p.size() - 1;
  for (std::size_t j = 0; j <= m; ++j)
    targets.push_back(total * static_cast<double>(j) / m);
  targets.insert(targets.end(), cum.begin(), cum.end());
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end(),
                            [&](double a, double b) {
                              return std::abs(a - b) <= 1e-12 * (1.0 + total);
                            }),
                targets.end());

  std::vector<double> t_new;
  std::vector<Point> p_new;
  std::size_t seg = 0;
  for (double s : targets) {
    while (seg + 1 < cum.size() && cum[seg + 1] < s) ++seg;
    Point q = p[seg];
    if (seg + 1 < p.size()) {
      const double len = cum[seg + 1] - cum[seg];
      const double w = len > 0.0 ? std::clamp((s - cum[seg]) / len, 0.0, 1.0) : 0.0;
      q = p[seg] + w * (p[seg + 1] - p[seg]);
    }
    t_new.push_back(s / total);
    p_new.push_back(q);
  }
  t_new.front() = 0.0;
  t_new.back() = 1.0;
  return SampledCurve(std::move(t_new), std::move(p_new), c.oracle());
}

namespace {

double golden_refine(const std::function<double(double)>& f1d, double lo,
                     double hi, double flo_best, int iters = 24) {
  (void)flo_best;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f1d(x1), f2 = f1d(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f1d(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f1d(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

}  // namespace

PolylineResult minimize_polyline(
    const std::function<double(const std::vector<Point>&)>& objective,
    const Point& x, const Point& y, const PolylineConfig& cfg) {
  const std::size_t dim = x.dim();
  const std::size_t m = static_cast<std::size_t>(cfg.interior_nodes);
  const double span = std::max(norm_l2(y - x), 1e-12);
  auto feasible = [&](const Point& p) { return !cfg.domain || cfg.domain(p); };
  // the domain constraint applies to the polyline, not just its vertices:
  // every segment is probed at interior interpolation points as well.  The
  // count of violating probe points enters the search as a graded penalty so
  // nodes can slide along an obstacle; only violation-free polylines are
  // accepted as results.
  auto violations = [&](const std::vector<Point>& nodes) {
    if (!cfg.domain) return 0;
    int v = 0;
    for (std::size_t i = 1; i + 1 < nodes.size(); ++i)
      if (!feasible(nodes[i])) ++v;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
      for (int s = 1; s < 8; ++s)
        if (!feasible(nodes[i] +
                      (static_cast<double>(s) / 8.0) * (nodes[i + 1] - nodes[i])))
          ++v;
    return v;
  };
  auto eval = [&](const std::vector<Point>& nodes) {
    return objective(nodes) + span * violations(nodes);
  };

  PolylineResult best;
  best.value = kInf;
  if (!feasible(x) || !feasible(y)) return best;

  SplitRng root = SplitRng(cfg.seed).split(0x9017);
  for (int restart = 0; restart < cfg.restarts; ++restart) {
    SplitRng rng = root.split(restart);
    // a per-restart escape direction keeps infeasible nodes on one side of
    // an obstacle instead of scattering them
    Point dir(std::vector<double>(dim, 0.0));
    {
      const Point chord = (1.0 / span) * (y - x);
      double n2 = 0.0;
      for (int attempt = 0; attempt < 16 && n2 < 1e-6; ++attempt) {
        double along = 0.0;
        for (std::size_t k = 0; k < dim; ++k) dir[k] = rng.uniform(-1.0, 1.0);
        // bow perpendicular to the chord: a parallel component only
        // stretches the path without clearing an obstacle on the chord
        for (std::size_t k = 0; k < dim; ++k) along += dir[k] * chord[k];
        n2 = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
          dir[k] -= along * chord[k];
          n2 += dir[k] * dir[k];
        }
      }
      const double inv = 1.0 / std::max(std::sqrt(n2), 1e-9);
      dir = inv * dir;
    }
    std::vector<Point> nodes(m + 2, x);
    nodes.back() = y;
    for (std::size_t i = 1; i <= m; ++i) {
      const double w = static_cast<double>(i) / (m + 1);
      nodes[i] = x + w * (y - x);
      if (restart > 1) {
        const double amp = 0.3 * span;
        for (std::size_t k = 0; k < dim; ++k) nodes[i][k] += rng.uniform(-amp, amp);
      }
    }
    // if the initial path clips the forbidden region, bow it along the
    // escape direction (endpoints anchored) until it clears
    {
      double step = 0.05 * span;
      int tries = 0;
      while (violations(nodes) > 0 && tries < 400) {
        for (std::size_t i = 1; i <= m; ++i) {
          const double bump =
              std::sin(std::numbers::pi * static_cast<double>(i) / (m + 1));
          nodes[i] = nodes[i] + (step * bump) * dir;
        }
        step *= 1.05;
        ++tries;
      }
    }
    double cur = eval(nodes);

    double h = cfg.step0 * span;
    for (int sweep = 0; sweep < cfg.sweeps; ++sweep) {
      for (std::size_t i = 1; i <= m; ++i) {
        for (std::size_t k = 0; k < dim; ++k) {
          const double center = nodes[i][k];
          auto f1d = [&](double v) {
            nodes[i][k] = v;
            const double r = eval(nodes);
            nodes[i][k] = center;
            return r;
          };
          // coarse probe, then golden-section refinement in the best bracket
          double bv = center, bf = f1d(center);
          for (double off : {-h, -0.5 * h, 0.5 * h, h}) {
            const double f = f1d(center + off);
            if (f < bf) {
              bf = f;
              bv = center + off;
            }
          }
          const double g = golden_refine(f1d, bv - 0.5 * h, bv + 0.5 * h, bf);
          if (f1d(g) <= bf) bv = g;
          nodes[i][k] = bv;
        }
      }
      // midpoint-smoothing proposals: coordinate moves alone stall on
      // circumscribed tangent-line polygons around obstacles
      for (std::size_t i = 1; i <= m; ++i) {
        const Point mid = 0.5 * (nodes[i - 1] + nodes[i + 1]);
        const Point old = nodes[i];
        const double before = eval(nodes);
        double best_val = before;
        Point best_pt = old;
        for (double w : {1.0, 0.5, 0.25, 0.125}) {
          nodes[i] = old + w * (mid - old);
          const double v2 = eval(nodes);
          if (v2 < best_val - 1e-15) {
            best_val = v2;
            best_pt = nodes[i];
          }
        }
        nodes[i] = best_pt;
      }
      const double next = eval(nodes);
      // shrink the search radius only when a full sweep stalls
      if (next >= cur - 1e-12 * (1.0 + std::abs(cur))) h *= 0.5;
      cur = next;
      if (h < 1e-10 * span) break;
    }
    if (violations(nodes) == 0 && objective(nodes) < best.value) {
      best.value = objective(nodes);
      best.nodes = nodes;
      best.feasible = true;
    }
  }
  return best;
}

PolylineResult length_distance(const DistanceOracle& d, const Point& x,
                               const Point& y, const PolylineConfig& cfg) {
  auto objective = [&d](const std::vector<Point>& nodes) {
    double v = 0.0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) v += d(nodes[i], nodes[i + 1]);
    return v;
  };
  if (norm_l2(y - x) <= 1e-15) {
    PolylineResult r;
    r.feasible = true;
    r.value = 0.0;
    r.nodes = {x, y};
    return r;
  }
  return minimize_polyline(objective, x, y, cfg);
}

}  // namespace dilatlab
