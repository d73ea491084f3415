#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "dilatlab/ladder.hpp"
#include "dilatlab/metric.hpp"

namespace dilatlab {

// Polyline stand-in for a Lipschitz curve c: [0,1] -> X.  When built from an
// analytic map the map is kept for off-grid evaluation; otherwise evaluation
// interpolates linearly in ambient coordinates.
class SampledCurve {
 public:
  SampledCurve() = default;
  SampledCurve(std::vector<double> times, std::vector<Point> points,
               DistanceOracle oracle);
  static SampledCurve from_function(std::function<Point(double)> fn,
                                    std::size_t nodes, DistanceOracle oracle);

  const std::vector<double>& times() const { return t_; }
  const std::vector<Point>& nodes() const { return p_; }
  const DistanceOracle& oracle() const { return d_; }
  std::size_t size() const { return p_.size(); }

  Point eval(double time) const;

  // doubled grid; analytic curves resample the map, polylines split segments
  SampledCurve refined() const;

  bool injective_on_nodes(double tol = 1e-12) const;

  // max over consecutive nodes of d(c(t_i), c(t_{i+1})) / (t_{i+1} - t_i)
  double discrete_lipschitz() const;

 private:
  std::vector<double> t_;
  std::vector<Point> p_;
  DistanceOracle d_;
  std::function<Point(double)> analytic_;
};

// Sum of consecutive node distances: the partition supremum restricted to
// the grid; refinement converges upward to Var(c).
double variation(const SampledCurve& c);

struct MetricDerivative {
  LimitEstimate estimate;   // symmetric quotient
  LimitEstimate forward;
  LimitEstimate backward;
  bool one_sided = false;   // t at an endpoint
};

MetricDerivative metric_derivative(const SampledCurve& c, double t,
                                   const Ladder& ladder = {});

// limsup over shrinking balls of sup d_Y(f(v), f(w)) / d_X(v, w); the limsup
// is realized as the max over the ladder tail.
LimitEstimate upper_dilatation(const std::function<Point(const Point&)>& f,
                               const DistanceOracle& dx,
                               const DistanceOracle& dy, const Point& u,
                               std::size_t dim, const Ladder& ladder = {},
                               std::uint64_t seed = 0,
                               int samples_per_rung = 32);

// Constant-speed curve on [0,1] with the same path and the same variation
// (original vertices are kept so no corner is cut).
SampledCurve reparametrize(const SampledCurve& c);

// ---------------------------------------------------------------------------
// Polyline optimization (shared by length_distance and the variational
// module's length-formula check).

struct PolylineConfig {
  int interior_nodes = 24;
  int restarts = 3;
  int sweeps = 40;
  double step0 = 0.6;          // initial coordinate search radius, relative to |y-x|
  std::uint64_t seed = 1;
  std::function<bool(const Point&)> domain;  // nullptr = everywhere
};

struct PolylineResult {
  bool feasible = false;
  double value = 0.0;
  std::vector<Point> nodes;  // includes endpoints
};

// Minimizes objective(nodes) over polylines from x to y with
// cfg.interior_nodes movable interior nodes, subject to the domain
// predicate (checked on nodes).  Coordinate-wise bracketed golden-section
// refinement with random restarts; deterministic given the seed.
PolylineResult minimize_polyline(
    const std::function<double(const std::vector<Point>&)>& objective,
    const Point& x, const Point& y, const PolylineConfig& cfg);

// Upper bound on the length distance d_l(x,y): minimal variation over
// domain-feasible polylines.
PolylineResult length_distance(const DistanceOracle& d, const Point& x,
                               const Point& y, const PolylineConfig& cfg);

}  // namespace dilatlab
