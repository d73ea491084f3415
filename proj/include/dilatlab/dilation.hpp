#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dilatlab/ladder.hpp"
#include "dilatlab/metric.hpp"

namespace dilatlab {

// A metric space with dilations: ambient distance d plus the family
// delta^x_eps, with declared constants A < B and, when the structure admits
// one in closed form, an exact tangent distance d^x for cross-validation.
struct DilatationStructure {
  std::string name;
  std::size_t dim = 2;
  DistanceOracle d;
  // (base x, scale eps > 0, point y) -> delta^x_eps y
  std::function<Point(const Point&, double, const Point&)> map;
  // membership predicate for U(x); empty = defined everywhere
  std::function<bool(const Point&, const Point&)> in_domain;
  double A = 2.0;
  double B = 4.0;
  // optional closed-form tangent distance d^x(u, v)
  std::function<double(const Point&, const Point&, const Point&)> tangent_exact;
  // optional closed-form limits of Delta^x_eps(u,v) and Sigma^x_eps(u,v)
  std::function<Point(const Point&, const Point&, const Point&)> delta_limit;
  std::function<Point(const Point&, const Point&, const Point&)> sigma_limit;
  // inv^x(u): the inverse of u in the tangent cone at x, presented in X
  std::function<Point(const Point&, const Point&)> invert;
};

// Registry lookup: "euclidean:k=2,norm=l2", "rotational:theta=1.0",
// "quadratic:eta=0.1,k=2", "logperiodic:kappa=3.0".  Throws
// std::invalid_argument("unknown structure: ...") for unknown names and for
// unknown or malformed parameters.
DilatationStructure make_structure(const std::string& spec);

// delta^x_eps y with the domain predicate enforced (throws std::domain_error).
Point dilate(const DilatationStructure& ds, const Point& x, double eps,
             const Point& y);

// (u,v) -> (1/eps) d(delta^x_eps u, delta^x_eps v)
DistanceOracle rescaled_distance(const DilatationStructure& ds, const Point& x,
                                 double eps);

// Tangent distance for one pair: the extrapolated limit of the rescaled
// distance down the ladder, with its full ladder attached.
LimitEstimate tangent_pair(const DilatationStructure& ds, const Point& x,
                           const Point& u, const Point& v,
                           const Ladder& ladder = {});

// d^x(u,v) as a number: the declared exact oracle when present, otherwise
// the extrapolated limit; flagged when the ladder fails to converge.
struct TangentValue {
  double value = 0.0;
  bool flagged = false;
};
TangentValue tangent_value(const DilatationStructure& ds, const Point& x,
                           const Point& u, const Point& v,
                           const Ladder& ladder = {});

enum class AxiomTag { A0, A1, A2, A3, A4, A4plus };
std::string to_string(AxiomTag tag);

struct AxiomReport {
  AxiomTag tag = AxiomTag::A0;
  // max pointwise residual for the exactly-checkable parts (A0, A1, A2)
  double residual = 0.0;
  // ladder fit for the limit-type parts (A1 limit, A3, A4, A4+)
  LimitEstimate estimate;
  bool has_estimate = false;
  bool pass = false;
};

// region: probe points, all within B_d(x, A) of the region's first point,
// which serves as the base x.
AxiomReport check_axiom(const DilatationStructure& ds, AxiomTag tag,
                        const std::vector<Point>& region,
                        const Ladder& ladder = {}, double tol = 1e-9);

// | d^x(u,v) - (1/mu) d^x(delta^x_mu u, delta^x_mu v) |
TangentValue cone_residual(const DilatationStructure& ds, const Point& x,
                           const Point& u, const Point& v, double mu,
                           const Ladder& ladder = {});

// (1/eps) sup { |d(u,v) - d^x(u,v)| : d(x,u) <= eps, d(x,v) <= eps } down the
// ladder; pairs include the antipodal diameter of each ball plus seeded
// random pairs.
LimitEstimate first_order_comparison(const DilatationStructure& ds,
                                     const Point& x, const Ladder& ladder = {},
                                     std::uint64_t seed = 0,
                                     int samples_per_rung = 16);

enum class DeltaSigma { delta, sigma };

// Delta^x_eps(u,v) = delta^{delta^x_eps u}_{1/eps} delta^x_eps v
// Sigma^x_eps(u,v) = delta^x_{1/eps} delta^{delta^x_eps u}_eps v
Point delta_sigma(const DilatationStructure& ds, const Point& x,
                  const Point& u, const Point& v, double eps, DeltaSigma which);

// max over samples and scales of d_dst(f(delta^x_eps u), delta^{fx}_eps f(u))
double conical_morphism_residual(
    const std::function<Point(const Point&)>& f,
    const DilatationStructure& ds_src, const DilatationStructure& ds_dst,
    const Point& x_src, const Point& x_dst, const std::vector<Point>& samples,
    const std::vector<double>& eps_grid);

// Limit of a point-valued ladder, fitted per coordinate.
struct PointLimit {
  Point point;          // coordinate-wise extrapolated limit
  Verdict verdict = Verdict::inconclusive;
  LimitEstimate worst_coord;  // the coordinate fit with the worst verdict
};

struct EquivalenceReport {
  std::vector<PointLimit> q;  // Q^x(u) = lim (dbar^x_eps)^{-1} d^x_eps (u)
  std::vector<PointLimit> p;  // P^x(u) = lim (d^x_eps)^{-1} dbar^x_eps (u)
  bool equivalent = false;
  double isoequiv_residual = 0.0;  // max over sample pairs, when equivalent
};

EquivalenceReport equivalence_probe(const DilatationStructure& ds1,
                                    const DilatationStructure& ds2,
                                    const Point& x,
                                    const std::vector<Point>& samples,
                                    const Ladder& ladder = {});

// sup over probes u in B(x,1) of (1/eps) d_dst(f(delta^x_eps u),
// delta^{f(x)}_eps Df(u)); converged to 0 means f is differentiable at x
// with derivative Df.
LimitEstimate differential_probe(const std::function<Point(const Point&)>& f,
                                 const DilatationStructure& ds_src,
                                 const DilatationStructure& ds_dst,
                                 const Point& x,
                                 const std::function<Point(const Point&)>& Df,
                                 const Ladder& ladder = {},
                                 std::uint64_t seed = 0, int samples = 16);

}  // namespace dilatlab
