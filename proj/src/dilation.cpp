#include "dilatlab/dilation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "dilatlab/rng.hpp"

namespace dilatlab {

namespace {

// --------------------------------------------------------------------------
// registry

std::map<std::string, std::string> parse_params(const std::string& text) {
  std::map<std::string, std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::invalid_argument("unknown structure: bad parameter '" + item +
                                  "'");
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

double get_double(const std::map<std::string, std::string>& params,
                  const std::string& key, double fallback) {
  const auto it = params.find(key);
  if (it == params.end()) return fallback;
  std::size_t used = 0;
  const double v = std::stod(it->second, &used);
  if (used != it->second.size())
    throw std::invalid_argument("unknown structure: bad value for '" + key +
                                "'");
  return v;
}

std::size_t get_dim(const std::map<std::string, std::string>& params,
                    std::size_t fallback) {
  const double v = get_double(params, "k", static_cast<double>(fallback));
  if (v < 1.0 || v != std::floor(v) || v > 16.0)
    throw std::invalid_argument("unknown structure: bad value for 'k'");
  return static_cast<std::size_t>(v);
}

void reject_unknown(const std::map<std::string, std::string>& params,
                    std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : params) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) ok = true;
    if (!ok)
      throw std::invalid_argument("unknown structure: unknown parameter '" +
                                  key + "'");
  }
}

std::function<double(const Point&)> norm_by_name(const std::string& name) {
  if (name == "l2") return [](const Point& p) { return norm_l2(p); };
  if (name == "l1") return [](const Point& p) { return norm_l1(p); };
  if (name == "linf") return [](const Point& p) { return norm_linf(p); };
  throw std::invalid_argument("unknown structure: unknown norm '" + name + "'");
}

void fill_linear_limits(DilatationStructure& ds) {
  ds.delta_limit = [](const Point& x, const Point& u, const Point& v) {
    return x + (v - u);
  };
  ds.sigma_limit = [](const Point& x, const Point& u, const Point& v) {
    return (u + v) - x;
  };
  ds.invert = [](const Point& x, const Point& u) { return x + (x - u); };
}

DilatationStructure make_euclidean(
    const std::map<std::string, std::string>& params) {
  reject_unknown(params, {"k", "norm"});
  DilatationStructure ds;
  ds.dim = get_dim(params, 2);
  std::string norm_name = "l2";
  if (auto it = params.find("norm"); it != params.end()) norm_name = it->second;
  auto norm = norm_by_name(norm_name);
  ds.name = "euclidean:k=" + std::to_string(ds.dim) + ",norm=" + norm_name;
  ds.d = DistanceOracle(
      [norm](const Point& a, const Point& b) { return norm(a - b); });
  ds.map = [](const Point& x, double eps, const Point& y) {
    return x + eps * (y - x);
  };
  ds.tangent_exact = [norm](const Point&, const Point& u, const Point& v) {
    return norm(u - v);
  };
  fill_linear_limits(ds);
  return ds;
}

DilatationStructure make_rotational(
    const std::map<std::string, std::string>& params) {
  reject_unknown(params, {"theta"});
  DilatationStructure ds;
  ds.dim = 2;
  const double theta = get_double(params, "theta", 1.0);
  ds.name = "rotational:theta=" + std::to_string(theta);
  ds.d = euclidean_oracle();
  ds.map = [theta](const Point& x, double eps, const Point& y) {
    // eps^{1 + i theta} acting on y - x read as a complex number
    const double angle = theta * std::log(eps);
    const double wr = eps * std::cos(angle), wi = eps * std::sin(angle);
    const double zr = y[0] - x[0], zi = y[1] - x[1];
    return Point{x[0] + wr * zr - wi * zi, x[1] + wr * zi + wi * zr};
  };
  // |eps^{i theta}| = 1, so rescaled distances equal d exactly
  ds.tangent_exact = [](const Point&, const Point& u, const Point& v) {
    return norm_l2(u - v);
  };
  fill_linear_limits(ds);
  return ds;
}

DilatationStructure make_quadratic(
    const std::map<std::string, std::string>& params) {
  reject_unknown(params, {"eta", "k"});
  DilatationStructure ds;
  ds.dim = get_dim(params, 2);
  const double eta = get_double(params, "eta", 0.1);
  if (eta < 0.0)
    throw std::invalid_argument("unknown structure: bad value for 'eta'");
  ds.name = "quadratic:eta=" + std::to_string(eta) +
            ",k=" + std::to_string(ds.dim);
  ds.d = DistanceOracle([eta](const Point& a, const Point& b) {
    const double r = norm_l2(a - b);
    return r + eta * r * r;
  });
  ds.map = [](const Point& x, double eps, const Point& y) {
    return x + eps * (y - x);
  };
  ds.tangent_exact = [](const Point&, const Point& u, const Point& v) {
    return norm_l2(u - v);
  };
  fill_linear_limits(ds);
  return ds;
}

DilatationStructure make_logperiodic(
    const std::map<std::string, std::string>& params) {
  reject_unknown(params, {"kappa"});
  DilatationStructure ds;
  ds.dim = 1;
  const double kappa = get_double(params, "kappa", 3.0);
  ds.name = "logperiodic:kappa=" + std::to_string(kappa);
  ds.d = DistanceOracle([kappa](const Point& a, const Point& b) {
    const double r = std::abs(a[0] - b[0]);
    if (r == 0.0) return 0.0;
    return r * (2.0 + std::sin(kappa * std::log(r)));
  });
  ds.map = [](const Point& x, double eps, const Point& y) {
    return x + eps * (y - x);
  };
  // no exact tangent: the rescaled distances oscillate by design
  fill_linear_limits(ds);
  return ds;
}

}  // namespace

DilatationStructure make_structure(const std::string& spec) {
  std::string name = spec, param_text;
  if (const auto colon = spec.find(':'); colon != std::string::npos) {
    name = spec.substr(0, colon);
    param_text = spec.substr(colon + 1);
  }
  const auto params = parse_params(param_text);
  if (name == "euclidean") return make_euclidean(params);
  if (name == "rotational") return make_rotational(params);
  if (name == "quadratic") return make_quadratic(params);
  if (name == "logperiodic") return make_logperiodic(params);
  throw std::invalid_argument("unknown structure: '" + name + "'");
}

Point dilate(const DilatationStructure& ds, const Point& x, double eps,
             const Point& y) {
  if (!(eps > 0.0)) throw std::domain_error("dilate: scale must be > 0");
  if (ds.in_domain && !ds.in_domain(x, y))
    throw std::domain_error("dilate: point outside U(" + ds.name + ")");
  return ds.map(x, eps, y);
}

DistanceOracle rescaled_distance(const DilatationStructure& ds, const Point& x,
                                 double eps) {
  auto map = ds.map;
  auto d = ds.d;
  return DistanceOracle(
      [map, d, x, eps](const Point& u, const Point& v) {
        return d(map(x, eps, u), map(x, eps, v)) / eps;
      });
}

LimitEstimate tangent_pair(const DilatationStructure& ds, const Point& x,
                           const Point& u, const Point& v,
                           const Ladder& ladder) {
  std::vector<std::pair<double, double>> values;
  for (double eps : ladder.scales()) {
    const Point du = ds.map(x, eps, u), dv = ds.map(x, eps, v);
    values.push_back({eps, ds.d(du, dv) / eps});
  }
  return fit_limit(values, ladder.tail);
}

TangentValue tangent_value(const DilatationStructure& ds, const Point& x,
                           const Point& u, const Point& v,
                           const Ladder& ladder) {
  if (ds.tangent_exact) return {ds.tangent_exact(x, u, v), false};
  const LimitEstimate est = tangent_pair(ds, x, u, v, ladder);
  return {est.limit, est.verdict != Verdict::converged};
}

std::string to_string(AxiomTag tag) {
  switch (tag) {
    case AxiomTag::A0: return "A0";
    case AxiomTag::A1: return "A1";
    case AxiomTag::A2: return "A2";
    case AxiomTag::A3: return "A3";
    case AxiomTag::A4: return "A4";
    case AxiomTag::A4plus: return "A4plus";
  }
  return "A0";
}

namespace {

AxiomReport check_a0(const DilatationStructure& ds,
                     const std::vector<Point>& region, const Ladder& ladder,
                     double tol) {
  AxiomReport r{AxiomTag::A0};
  const Point& x = region.front();
  for (double eps : ladder.scales()) {
    for (const Point& y : region) {
      // candidates inside B(x, eps): shrunken copies of the region
      const Point z = ds.map(x, eps, y);
      if (ds.d(x, z) <= eps) {
        // membership in delta^x_eps B(x, A): pull back by the inverse scale
        const double back = ds.d(x, ds.map(x, 1.0 / eps, z));
        r.residual = std::max(r.residual, back - ds.A);
      }
      // V_eps(x) = delta^x_eps B(x, A) must land in delta^x_eps B(x, B)
      if (ds.d(x, y) <= ds.A) {
        const Point w = ds.map(x, eps, y);
        const double back = ds.d(x, ds.map(x, 1.0 / eps, w));
        r.residual = std::max(r.residual, back - ds.B);
      }
    }
  }
  r.pass = r.residual <= tol;
  return r;
}

AxiomReport check_a1(const DilatationStructure& ds,
                     const std::vector<Point>& region, const Ladder& ladder,
                     double tol) {
  AxiomReport r{AxiomTag::A1};
  const Point& x = region.front();
  for (const Point& y : region)
    r.residual = std::max(r.residual, ds.d(y, ds.map(x, 1.0, y)));
  for (double eps : ladder.scales())
    r.residual = std::max(r.residual, ds.d(x, ds.map(x, eps, x)));
  std::vector<std::pair<double, double>> values;
  for (double eps : ladder.scales()) {
    double worst = 0.0;
    for (const Point& y : region)
      worst = std::max(worst, ds.d(x, ds.map(x, eps, y)));
    values.push_back({eps, worst});
  }
  r.estimate = fit_limit(values, ladder.tail);
  r.has_estimate = true;
  r.pass = r.residual <= tol && r.estimate.converged_to(0.0, tol);
  return r;
}

AxiomReport check_a2(const DilatationStructure& ds,
                     const std::vector<Point>& region, const Ladder& ladder,
                     double tol) {
  AxiomReport r{AxiomTag::A2};
  const Point& x = region.front();
  const std::vector<double> scales = ladder.scales();
  for (double eps : scales)
    for (double mu : scales)
      for (const Point& y : region) {
        const Point two_step = ds.map(x, eps, ds.map(x, mu, y));
        const Point one_step = ds.map(x, eps * mu, y);
        r.residual = std::max(r.residual, ds.d(two_step, one_step));
      }
  r.pass = r.residual <= tol;
  return r;
}

AxiomReport check_a3(const DilatationStructure& ds,
                     const std::vector<Point>& region, const Ladder& ladder,
                     double tol) {
  AxiomReport r{AxiomTag::A3};
  const Point& x = region.front();
  // reference tangent values per pair; extrapolated tangents that fail to
  // converge make the whole axiom report inherit their verdict
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < region.size(); ++i)
    for (std::size_t j = i + 1; j < region.size(); ++j) pairs.push_back({i, j});
  std::vector<double> reference(pairs.size(), 0.0);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const Point& u = region[pairs[p].first];
    const Point& v = region[pairs[p].second];
    if (ds.tangent_exact) {
      reference[p] = ds.tangent_exact(x, u, v);
    } else {
      const LimitEstimate est = tangent_pair(ds, x, u, v, ladder);
      if (est.verdict != Verdict::converged) {
        r.estimate = est;
        r.has_estimate = true;
        r.pass = false;
        return r;
      }
      reference[p] = est.limit;
    }
  }
  std::vector<std::pair<double, double>> values;
  for (double eps : ladder.scales()) {
    double worst = 0.0;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const Point& u = region[pairs[p].first];
      const Point& v = region[pairs[p].second];
      const double rescaled =
          ds.d(ds.map(x, eps, u), ds.map(x, eps, v)) / eps;
      worst = std::max(worst, std::abs(rescaled - reference[p]));
    }
    values.push_back({eps, worst});
  }
  r.estimate = fit_limit(values, ladder.tail);
  r.has_estimate = true;
  r.pass = r.estimate.converged_to(0.0, tol);
  return r;
}

AxiomReport check_a4(const DilatationStructure& ds,
                     const std::vector<Point>& region, const Ladder& ladder,
                     double tol, DeltaSigma which) {
  AxiomReport r{which == DeltaSigma::delta ? AxiomTag::A4 : AxiomTag::A4plus};
  const Point& x = region.front();
  const auto& limit_fn =
      which == DeltaSigma::delta ? ds.delta_limit : ds.sigma_limit;
  if (!limit_fn) {
    r.pass = false;
    return r;
  }
  std::vector<std::pair<double, double>> values;
  for (double eps : ladder.scales()) {
    double worst = 0.0;
    for (const Point& u : region)
      for (const Point& v : region) {
        const Point got = delta_sigma(ds, x, u, v, eps, which);
        worst = std::max(worst, ds.d(got, limit_fn(x, u, v)));
      }
    values.push_back({eps, worst});
  }
  r.estimate = fit_limit(values, ladder.tail);
  r.has_estimate = true;
  r.pass = r.estimate.converged_to(0.0, tol);
  return r;
}

}  // namespace

AxiomReport check_axiom(const DilatationStructure& ds, AxiomTag tag,
                        const std::vector<Point>& region, const Ladder& ladder,
                        double tol) {
  if (region.empty())
    throw std::invalid_argument("check_axiom: empty probe region");
  switch (tag) {
    case AxiomTag::A0: return check_a0(ds, region, ladder, tol);
    case AxiomTag::A1: return check_a1(ds, region, ladder, tol);
    case AxiomTag::A2: return check_a2(ds, region, ladder, tol);
    case AxiomTag::A3: return check_a3(ds, region, ladder, tol);
    case AxiomTag::A4: return check_a4(ds, region, ladder, tol, DeltaSigma::delta);
    case AxiomTag::A4plus:
      return check_a4(ds, region, ladder, tol, DeltaSigma::sigma);
  }
  throw std::invalid_argument("check_axiom: unknown axiom tag");
}

TangentValue cone_residual(const DilatationStructure& ds, const Point& x,
                           const Point& u, const Point& v, double mu,
                           const Ladder& ladder) {
  if (!(mu > 0.0)) throw std::domain_error("cone_residual: mu must be > 0");
  const TangentValue full = tangent_value(ds, x, u, v, ladder);
  const TangentValue shrunk =
      tangent_value(ds, x, ds.map(x, mu, u), ds.map(x, mu, v), ladder);
  return {std::abs(full.value - shrunk.value / mu),
          full.flagged || shrunk.flagged};
}

namespace {

// point at d-distance exactly r from x along direction dir (unit vector in
// coordinates), found by bisection on the coordinate radius
Point at_distance(const DilatationStructure& ds, const Point& x,
                  const Point& dir, double r) {
  double lo = 0.0, hi = r;
  while (ds.d(x, x + hi * dir) < r) hi *= 2.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ds.d(x, x + mid * dir) < r ? lo : hi) = mid;
  }
  return x + 0.5 * (lo + hi) * dir;
}

}  // namespace

LimitEstimate first_order_comparison(const DilatationStructure& ds,
                                     const Point& x, const Ladder& ladder,
                                     std::uint64_t seed, int samples_per_rung) {
  SplitRng root(seed ^ 0xf1c5);
  std::vector<std::pair<double, double>> values;
  int rung = 0;
  for (double eps : ladder.scales()) {
    SplitRng rng = root.split(rung++);
    std::vector<std::pair<Point, Point>> pairs;
    // antipodal diameter of B_d(x, eps) along the first axis
    Point e1(std::vector<double>(ds.dim, 0.0));
    e1[0] = 1.0;
    pairs.push_back({at_distance(ds, x, e1, eps),
                     at_distance(ds, x, -1.0 * e1, eps)});
    for (int s = 0; s < samples_per_rung; ++s) {
      Point du(std::vector<double>(ds.dim, 0.0)),
          dv(std::vector<double>(ds.dim, 0.0));
      double nu = 0.0, nv = 0.0;
      for (std::size_t k = 0; k < ds.dim; ++k) {
        du[k] = rng.uniform(-1.0, 1.0);
        dv[k] = rng.uniform(-1.0, 1.0);
        nu += du[k] * du[k];
        nv += dv[k] * dv[k];
      }
      if (nu == 0.0 || nv == 0.0) continue;
      const double ru = rng.next_double(), rv = rng.next_double();
      pairs.push_back(
          {at_distance(ds, x, (1.0 / std::sqrt(nu)) * du, ru * eps),
           at_distance(ds, x, (1.0 / std::sqrt(nv)) * dv, rv * eps)});
    }
    double worst = 0.0;
    for (const auto& [u, v] : pairs) {
      const TangentValue t = tangent_value(ds, x, u, v, ladder);
      worst = std::max(worst, std::abs(ds.d(u, v) - t.value));
    }
    values.push_back({eps, worst / eps});
  }
  return fit_limit(values, ladder.tail);
}

Point delta_sigma(const DilatationStructure& ds, const Point& x,
                  const Point& u, const Point& v, double eps, DeltaSigma which) {
  const Point su = dilate(ds, x, eps, u);
  if (which == DeltaSigma::delta)
    return dilate(ds, su, 1.0 / eps, dilate(ds, x, eps, v));
  return dilate(ds, x, 1.0 / eps, dilate(ds, su, eps, v));
}

double conical_morphism_residual(
    const std::function<Point(const Point&)>& f,
    const DilatationStructure& ds_src, const DilatationStructure& ds_dst,
    const Point& x_src, const Point& x_dst, const std::vector<Point>& samples,
    const std::vector<double>& eps_grid) {
  double worst = 0.0;
  for (const Point& u : samples)
    for (double eps : eps_grid) {
      const Point lhs = f(dilate(ds_src, x_src, eps, u));
      const Point rhs = dilate(ds_dst, x_dst, eps, f(u));
      worst = std::max(worst, ds_dst.d(lhs, rhs));
    }
  return worst;
}

namespace {

PointLimit fit_point_ladder(const std::vector<double>& scales,
                            const std::vector<Point>& pts, int tail) {
  PointLimit out;
  if (pts.empty()) return out;
  const std::size_t dim = pts.front().dim();
  out.point = Point(std::vector<double>(dim, 0.0));
  out.verdict = Verdict::converged;
  auto severity = [](Verdict v) {
    switch (v) {
      case Verdict::converged: return 0;
      case Verdict::inconclusive: return 1;
      case Verdict::oscillating: return 2;
      case Verdict::diverged: return 3;
    }
    return 1;
  };
  int worst = -1;
  for (std::size_t k = 0; k < dim; ++k) {
    std::vector<std::pair<double, double>> values;
    for (std::size_t i = 0; i < pts.size(); ++i)
      values.push_back({scales[i], pts[i][k]});
    const LimitEstimate est = fit_limit(values, tail);
    out.point[k] = est.limit;
    if (severity(est.verdict) > worst) {
      worst = severity(est.verdict);
      out.verdict = est.verdict;
      out.worst_coord = est;
    }
  }
  return out;
}

}  // namespace

EquivalenceReport equivalence_probe(const DilatationStructure& ds1,
                                    const DilatationStructure& ds2,
                                    const Point& x,
                                    const std::vector<Point>& samples,
                                    const Ladder& ladder) {
  EquivalenceReport r;
  const std::vector<double> scales = ladder.scales();
  auto map_limit = [&](const DilatationStructure& fwd,
                       const DilatationStructure& bwd, const Point& u) {
    std::vector<Point> pts;
    for (double eps : scales)
      pts.push_back(bwd.map(x, 1.0 / eps, fwd.map(x, eps, u)));
    return fit_point_ladder(scales, pts, ladder.tail);
  };
  r.equivalent = true;
  for (const Point& u : samples) {
    r.q.push_back(map_limit(ds1, ds2, u));  // Q^x = lim (dbar)^{-1} delta
    r.p.push_back(map_limit(ds2, ds1, u));  // P^x = lim delta^{-1} dbar
    if (r.q.back().verdict != Verdict::converged ||
        r.p.back().verdict != Verdict::converged)
      r.equivalent = false;
  }
  if (r.equivalent && ds1.sigma_limit && ds2.sigma_limit) {
    auto q_of = [&](const Point& u) {
      std::vector<Point> pts;
      for (double eps : scales)
        pts.push_back(ds2.map(x, 1.0 / eps, ds1.map(x, eps, u)));
      return fit_point_ladder(scales, pts, ladder.tail).point;
    };
    for (std::size_t i = 0; i < samples.size(); ++i)
      for (std::size_t j = 0; j < samples.size(); ++j) {
        const Point pu = r.p[i].point, pv = r.p[j].point;
        const Point lhs = ds2.sigma_limit(x, samples[i], samples[j]);
        const Point rhs = q_of(ds1.sigma_limit(x, pu, pv));
        r.isoequiv_residual =
            std::max(r.isoequiv_residual, ds2.d(lhs, rhs));
      }
  }
  return r;
}

LimitEstimate differential_probe(const std::function<Point(const Point&)>& f,
                                 const DilatationStructure& ds_src,
                                 const DilatationStructure& ds_dst,
                                 const Point& x,
                                 const std::function<Point(const Point&)>& Df,
                                 const Ladder& ladder, std::uint64_t seed,
                                 int samples) {
  // fixed probe set in the unit ball around x, reused at every rung
  SplitRng rng(seed ^ 0xd1ff);
  std::vector<Point> probes;
  for (std::size_t k = 0; k < ds_src.dim; ++k) {
    Point e(std::vector<double>(ds_src.dim, 0.0));
    e[k] = 1.0;
    probes.push_back(x + e);
    probes.push_back(x - e);
  }
  while (probes.size() < static_cast<std::size_t>(samples) + 2 * ds_src.dim) {
    Point p = x;
    double n2 = 0.0;
    std::vector<double> delta(ds_src.dim);
    for (std::size_t k = 0; k < ds_src.dim; ++k) {
      delta[k] = rng.uniform(-1.0, 1.0);
      n2 += delta[k] * delta[k];
    }
    if (n2 > 1.0 || n2 == 0.0) continue;
    for (std::size_t k = 0; k < ds_src.dim; ++k) p[k] += delta[k];
    probes.push_back(p);
  }
  const Point fx = f(x);
  std::vector<std::pair<double, double>> values;
  for (double eps : ladder.scales()) {
    double worst = 0.0;
    for (const Point& u : probes) {
      const Point lhs = f(dilate(ds_src, x, eps, u));
      const Point rhs = dilate(ds_dst, fx, eps, Df(u));
      worst = std::max(worst, ds_dst.d(lhs, rhs) / eps);
    }
    values.push_back({eps, worst});
  }
  return fit_limit(values, ladder.tail);
}

}  // namespace dilatlab
