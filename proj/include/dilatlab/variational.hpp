#pragma once

#include <cstdint>
#include <vector>

#include "dilatlab/curves.hpp"
#include "dilatlab/dilation.hpp"
#include "dilatlab/ladder.hpp"
#include "dilatlab/metric.hpp"

namespace dilatlab {

// (1/eps) * variation of delta^x_eps compose c, plus membership in the
// admissible class: the dilated curve's discrete Lipschitz constant must not
// exceed twice its variation.
struct LengthFunctionalValue {
  double value = 0.0;
  bool admissible = false;
};
LengthFunctionalValue l_eps(const DilatationStructure& ds, const Point& x,
                            const SampledCurve& c, double eps);

// One candidate for the curve derivative, with the ladder of forward
// residuals (1/eps) d(c(t+eps), delta^{c(t)}_eps u).
struct CandidateTrace {
  Point u;
  LimitEstimate forward;
};

struct CurveDerivative {
  double t = 0.0;
  Point u;                   // winning candidate: c(t) advanced by cdot(t)
  LimitEstimate forward;
  LimitEstimate backward;    // residual against inv^{c(t)}(u)
  bool derivable = false;
  std::vector<CandidateTrace> candidates;  // every candidate examined
};

// Minimizes the forward residual over a chord-seeded candidate grid (or the
// supplied candidates), refines around the winner, and reports both one-sided
// residual ladders for the final candidate.
CurveDerivative curve_derivative(const DilatationStructure& ds,
                                 const SampledCurve& c, double t,
                                 const Ladder& ladder = {},
                                 const std::vector<Point>& candidates = {},
                                 double tol = 1e-5);

struct RnpReport {
  int probes = 0;
  int derivable = 0;
  double fraction = 0.0;
  std::vector<CurveDerivative> details;
};

// Fraction of probe times at which battery curves are derivable.
RnpReport rnp_probe(const DilatationStructure& ds,
                    const std::vector<SampledCurve>& battery,
                    int probes_per_curve, const Ladder& ladder = {},
                    bool keep_details = false);

struct TangentIntegral {
  double value = 0.0;
  bool complete = false;  // false when some node was not derivable
  int bad_nodes = 0;
};

// Composite trapezoid of t -> d^{c(t)}(c(t), cdot(t)) over the curve grid.
TangentIntegral tangent_length_integral(const DilatationStructure& ds,
                                        const SampledCurve& c,
                                        const Ladder& ladder = {});

struct LengthFormulaReport {
  double direct = 0.0;     // d(x, y)
  double integral = 0.0;   // infimized tangent length integral
  double gap = 0.0;        // relative gap
  PolylineResult polyline;
};

// Minimizes the tangent length integral over polylines from x to y and
// compares with d(x,y).  Throws std::logic_error unless rnp_fraction shows
// RNP evidence (>= 0.99).
LengthFormulaReport length_formula_check(const DilatationStructure& ds,
                                         const Point& x, const Point& y,
                                         const PolylineConfig& cfg,
                                         double rnp_fraction);

// phi_d(x, u) = limsup (1/eps) d(x, delta^x_eps u); the limsup is realized
// as the max over the ladder tail.
LimitEstimate phi_d(const DilatationStructure& ds_ref, const DistanceOracle& d,
                    const Point& x, const Point& u, const Ladder& ladder = {});

struct TemperedReport {
  double c_hat = 0.0;
  double C_hat = 0.0;
  bool tempered = false;
  int skipped = 0;  // zero-denominator pairs
};

// Extremes over region pairs and rungs of
// (1/eps) d(delta^x_eps u, delta^x_eps v) / d^x(u, v).
TemperedReport tempered_probe(const DilatationStructure& ds,
                              const DistanceOracle& d,
                              const std::vector<Point>& region,
                              const Ladder& ladder = {});

struct GammaReport {
  // per battery curve: the functional values down the scale sequence
  std::vector<std::vector<std::pair<double, double>>> values;
  std::vector<bool> admissible;
  int dropped = 0;
  // per curve: liminf slack along the designed approaching sequence
  std::vector<double> liminf_slacks;
  // per curve: recovery diagnostic via the constant sequence
  std::vector<double> recovery_residuals;
  // min over endpoint pairs of d^x(u,v) - limsup of rescaled distances
  double dsup_margin = 0.0;
  bool pass = false;
};

// Gamma-convergence probe: liminf inequality on designed approaching
// sequences (sin-bump perturbations with vanishing amplitude in the product
// metric D), constant-sequence recovery, and the (dsup) inequality on
// endpoint pairs.
GammaReport gamma_probe(const DilatationStructure& ds, const Point& x,
                        const std::vector<SampledCurve>& battery,
                        const std::vector<double>& eps_sequence,
                        double tol = 1e-3);

}  // namespace dilatlab
