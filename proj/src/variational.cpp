#include "dilatlab/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace dilatlab {

LengthFunctionalValue l_eps(const DilatationStructure& ds, const Point& x,
                            const SampledCurve& c, double eps) {
  if (!(eps > 0.0)) throw std::domain_error("l_eps: scale must be > 0");
  std::vector<Point> dilated;
  for (const Point& p : c.nodes()) dilated.push_back(dilate(ds, x, eps, p));
  SampledCurve dc(c.times(), std::move(dilated), ds.d);
  const double var = variation(dc);
  LengthFunctionalValue out;
  out.value = var / eps;
  out.admissible = dc.discrete_lipschitz() <= 2.0 * var * (1.0 + 1e-9) + 1e-12;
  return out;
}

namespace {

// forward residual ladder for one derivative candidate
std::vector<std::pair<double, double>> forward_ladder(
    const DilatationStructure& ds, const SampledCurve& c, double t,
    const Point& x, const Point& u, const Ladder& ladder) {
  std::vector<std::pair<double, double>> values;
  for (double eps : ladder.scales()) {
    if (t + eps > 1.0) continue;
    values.push_back(
        {eps, ds.d(c.eval(t + eps), ds.map(x, eps, u)) / eps});
  }
  return values;
}

// Richardson score: with residuals r(eps) ~ L + a*eps on a halving ladder,
// |2 r_j - r_{j-1}| cancels the linear term and tracks L.  Summing several
// tail pairs keeps a multi-coordinate candidate from gaming a single
// extrapolation equation.
double candidate_score(const DilatationStructure& ds, const SampledCurve& c,
                       double t, const Point& x, const Point& u,
                       const Ladder& ladder) {
  const auto values = forward_ladder(ds, c, t, x, u, ladder);
  if (values.empty()) return std::numeric_limits<double>::infinity();
  if (values.size() == 1) return std::abs(values.back().second);
  double score = 0.0;
  const std::size_t n = values.size();
  const std::size_t first = n > 5 ? n - 5 : 1;
  for (std::size_t j = first; j < n; ++j)
    score += std::abs(2.0 * values[j].second - values[j - 1].second);
  return score;
}

}  // namespace

CurveDerivative curve_derivative(const DilatationStructure& ds,
                                 const SampledCurve& c, double t,
                                 const Ladder& ladder,
                                 const std::vector<Point>& candidates,
                                 double tol) {
  if (!(t > 0.0 && t < 1.0))
    throw std::domain_error("curve_derivative: t must be interior to [0,1]");
  CurveDerivative out;
  out.t = t;
  const Point x = c.eval(t);

  std::vector<Point> grid = candidates;
  if (grid.empty()) {
    // chord-seeded candidates u = x + (c(t+h) - c(t)) / h
    for (double h : {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64}) {
      if (t + h <= 1.0)
        grid.push_back(x + (1.0 / h) * (c.eval(t + h) - x));
      if (t - h >= 0.0)
        grid.push_back(x + (1.0 / h) * (x - c.eval(t - h)));
    }
    if (grid.empty()) grid.push_back(x);
  }

  Point best = grid.front();
  double best_score = std::numeric_limits<double>::infinity();
  for (const Point& u : grid) {
    const LimitEstimate est =
        fit_limit(forward_ladder(ds, c, t, x, u, ladder), ladder.tail);
    out.candidates.push_back({u, est});
    const double score = candidate_score(ds, c, t, x, u, ladder);
    if (score < best_score) {
      best_score = score;
      best = u;
    }
  }

  // coordinate-descent refinement of the winner
  const std::size_t dim = x.dim();
  double step = 0.5;
  for (int sweep = 0; sweep < 96 && step > 1e-12; ++sweep) {
    bool improved = false;
    for (std::size_t k = 0; k < dim; ++k) {
      for (double delta : {-step, -0.5 * step, 0.5 * step, step}) {
        Point trial = best;
        trial[k] += delta;
        const double score = candidate_score(ds, c, t, x, trial, ladder);
        if (score < best_score) {
          best_score = score;
          best = trial;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.55;
  }

  out.u = best;
  out.forward = fit_limit(forward_ladder(ds, c, t, x, best, ladder), ladder.tail);
  {
    const Point inv = ds.invert ? ds.invert(x, best) : x + (x - best);
    std::vector<std::pair<double, double>> values;
    for (double eps : ladder.scales()) {
      if (t - eps < 0.0) continue;
      values.push_back(
          {eps, ds.d(c.eval(t - eps), ds.map(x, eps, inv)) / eps});
    }
    out.backward = fit_limit(values, ladder.tail);
  }
  out.derivable = out.forward.converged_to(0.0, tol) &&
                  out.backward.converged_to(0.0, tol);
  return out;
}

RnpReport rnp_probe(const DilatationStructure& ds,
                    const std::vector<SampledCurve>& battery,
                    int probes_per_curve, const Ladder& ladder,
                    bool keep_details) {
  RnpReport r;
  for (const SampledCurve& c : battery)
    for (int i = 0; i < probes_per_curve; ++i) {
      const double t =
          probes_per_curve == 1
              ? 0.5
              : 0.1 + 0.8 * static_cast<double>(i) / (probes_per_curve - 1);
      CurveDerivative cd = curve_derivative(ds, c, t, ladder);
      ++r.probes;
      if (cd.derivable) ++r.derivable;
      if (keep_details) r.details.push_back(std::move(cd));
    }
  r.fraction = r.probes ? static_cast<double>(r.derivable) / r.probes : 0.0;
  return r;
}

TangentIntegral tangent_length_integral(const DilatationStructure& ds,
                                        const SampledCurve& c,
                                        const Ladder& ladder) {
  TangentIntegral out;
  const std::vector<double>& t = c.times();
  const std::size_t n = t.size();
  if (n < 3) throw std::invalid_argument("tangent_length_integral: grid too coarse");
  std::vector<double> g(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const CurveDerivative cd = curve_derivative(ds, c, t[i], ladder);
    if (!cd.derivable) ++out.bad_nodes;
    const Point x = c.eval(t[i]);
    g[i] = tangent_value(ds, x, x, cd.u, ladder).value;
  }
  g[0] = g[1];
  g[n - 1] = g[n - 2];
  for (std::size_t i = 0; i + 1 < n; ++i)
    out.value += 0.5 * (g[i] + g[i + 1]) * (t[i + 1] - t[i]);
  out.complete = out.bad_nodes == 0;
  return out;
}

LengthFormulaReport length_formula_check(const DilatationStructure& ds,
                                         const Point& x, const Point& y,
                                         const PolylineConfig& cfg,
                                         double rnp_fraction) {
  if (rnp_fraction < 0.99)
    throw std::logic_error(
        "length_formula_check: no RNP evidence (derivable fraction " +
        std::to_string(rnp_fraction) + ")");
  LengthFormulaReport r;
  r.direct = ds.d(x, y);
  // objective: tangent length integral of the polyline, with the chord as
  // the derivative candidate on each segment (exact for vector-space cones)
  auto objective = [&ds](const std::vector<Point>& nodes) {
    const double dt = 1.0 / static_cast<double>(nodes.size() - 1);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      const Point& a = nodes[i];
      const Point u = a + (1.0 / dt) * (nodes[i + 1] - a);
      total += tangent_value(ds, a, a, u).value * dt;
    }
    return total;
  };
  r.polyline = minimize_polyline(objective, x, y, cfg);
  r.integral = r.polyline.value;
  const double denom = std::max(r.direct, 1e-12);
  r.gap = std::abs(r.integral - r.direct) / denom;
  return r;
}

LimitEstimate phi_d(const DilatationStructure& ds_ref, const DistanceOracle& d,
                    const Point& x, const Point& u, const Ladder& ladder) {
  std::vector<std::pair<double, double>> values;
  for (double eps : ladder.scales())
    values.push_back({eps, d(x, ds_ref.map(x, eps, u)) / eps});
  LimitEstimate est = fit_limit(values, ladder.tail);
  if (est.verdict != Verdict::diverged) {
    // limsup realization: max over the ladder tail
    double m = -std::numeric_limits<double>::infinity();
    const std::size_t n = values.size();
    const std::size_t t0 = n > static_cast<std::size_t>(ladder.tail)
                               ? n - ladder.tail
                               : 0;
    for (std::size_t i = t0; i < n; ++i) m = std::max(m, values[i].second);
    est.limit = m;
  }
  return est;
}

TemperedReport tempered_probe(const DilatationStructure& ds,
                              const DistanceOracle& d,
                              const std::vector<Point>& region,
                              const Ladder& ladder) {
  TemperedReport r;
  r.c_hat = std::numeric_limits<double>::infinity();
  r.C_hat = 0.0;
  const std::vector<double> scales = ladder.scales();
  for (const Point& x : region)
    for (std::size_t i = 0; i < region.size(); ++i)
      for (std::size_t j = i + 1; j < region.size(); ++j) {
        const Point& u = region[i];
        const Point& v = region[j];
        const TangentValue denom = tangent_value(ds, x, u, v, ladder);
        if (denom.flagged || denom.value <= 1e-12) {
          ++r.skipped;
          continue;
        }
        for (double eps : scales) {
          const double num = d(ds.map(x, eps, u), ds.map(x, eps, v)) / eps;
          const double ratio = num / denom.value;
          r.c_hat = std::min(r.c_hat, ratio);
          r.C_hat = std::max(r.C_hat, ratio);
        }
      }
  r.tempered = r.c_hat >= 1e-6 && r.C_hat <= 1e6 && r.c_hat <= r.C_hat;
  return r;
}

GammaReport gamma_probe(const DilatationStructure& ds, const Point& x,
                        const std::vector<SampledCurve>& battery,
                        const std::vector<double>& eps_sequence,
                        double tol) {
  GammaReport r;
  if (eps_sequence.empty())
    throw std::invalid_argument("gamma_probe: empty scale sequence");
  const int tail = std::min<int>(5, static_cast<int>(eps_sequence.size()));
  r.pass = true;
  for (const SampledCurve& c : battery) {
    std::vector<std::pair<double, double>> values;
    bool admissible = true;
    for (double eps : eps_sequence) {
      const LengthFunctionalValue v = l_eps(ds, x, c, eps);
      values.push_back({eps, v.value});
      admissible = admissible && v.admissible;
    }
    r.values.push_back(values);
    r.admissible.push_back(admissible);
    if (!admissible) {
      ++r.dropped;
      r.liminf_slacks.push_back(0.0);
      r.recovery_residuals.push_back(0.0);
      continue;
    }
    const double limit0 = fit_limit(values, tail).limit;

    // designed approaching sequence: sin-bump perturbations with amplitude
    // eps_n, vanishing in the product metric D
    Point bump_dir(std::vector<double>(ds.dim, 0.0));
    bump_dir[ds.dim - 1] = 1.0;
    double liminf_val = std::numeric_limits<double>::infinity();
    const std::size_t n = eps_sequence.size();
    const std::size_t t0 = n - static_cast<std::size_t>(tail);
    for (std::size_t k = t0; k < n; ++k) {
      const double amp = eps_sequence[k];
      std::vector<Point> nodes;
      for (std::size_t i = 0; i < c.size(); ++i)
        nodes.push_back(c.nodes()[i] +
                        (amp * std::sin(std::numbers::pi * c.times()[i])) * bump_dir);
      SampledCurve perturbed(c.times(), std::move(nodes), ds.d);
      liminf_val =
          std::min(liminf_val, l_eps(ds, x, perturbed, eps_sequence[k]).value);
    }
    const double slack = liminf_val - limit0;
    r.liminf_slacks.push_back(slack);
    if (slack < -tol) r.pass = false;

    const double recovery = std::abs(values.back().second - limit0);
    r.recovery_residuals.push_back(recovery);
    if (recovery > tol * (1.0 + std::abs(limit0))) r.pass = false;
  }

  // inequality (dsup) on endpoint pairs
  r.dsup_margin = std::numeric_limits<double>::infinity();
  for (const SampledCurve& c : battery) {
    const Point& u = c.nodes().front();
    const Point& v = c.nodes().back();
    const TangentValue dx = tangent_value(ds, x, u, v);
    if (dx.flagged) continue;
    double limsup = -std::numeric_limits<double>::infinity();
    const std::size_t n = eps_sequence.size();
    const std::size_t t0 = n - static_cast<std::size_t>(tail);
    for (std::size_t k = t0; k < n; ++k) {
      const double eps = eps_sequence[k];
      limsup =
          std::max(limsup, ds.d(ds.map(x, eps, u), ds.map(x, eps, v)) / eps);
    }
    r.dsup_margin = std::min(r.dsup_margin, dx.value - limsup);
  }
  if (r.dsup_margin < -tol) r.pass = false;
  return r;
}

}  // namespace dilatlab
