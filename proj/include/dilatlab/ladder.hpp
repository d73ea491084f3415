#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace dilatlab {

// Geometric scale ladder eps_k = 2^{-k}, k = kmin..kmax.
struct Ladder {
  int kmin = 1;
  int kmax = 20;
  int tail = 5;

  std::vector<double> scales() const;
};

enum class Verdict { converged, oscillating, diverged, inconclusive };

std::string to_string(Verdict v);

// The universal output of every convergence check: a ladder of
// (scale, value) pairs with an extrapolated limit, a fitted decay rate,
// and an oscillation statistic over the ladder tail.
struct LimitEstimate {
  std::vector<std::pair<double, double>> ladder;  // (scale, value)
  double limit = 0.0;
  double rate = 0.0;          // fitted log-log slope of the residual decay
  double oscillation = 0.0;   // max - min of values over the tail
  Verdict verdict = Verdict::inconclusive;

  bool converged_to(double target, double tol) const {
    return verdict == Verdict::converged && std::abs(limit - target) <= tol;
  }
};

// Classifies a value ladder sampled at halving scales.
//
// Rules (tolerances pinned here, used project-wide):
//   - tail constant within 1e-6*(1+|last|)            -> converged, limit = last
//   - successive differences decay geometrically with
//     fitted rate >= 0.5                              -> converged, Richardson limit
//   - tail magnitudes grow without bound              -> diverged
//   - tail max-min >= 0.1*(1+|tail mean|)             -> oscillating
//   - otherwise                                       -> inconclusive
LimitEstimate fit_limit(const std::vector<std::pair<double, double>>& values,
                        int tail = 5);

}  // namespace dilatlab
