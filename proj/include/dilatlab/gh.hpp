#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dilatlab/metric.hpp"

namespace dilatlab {

// Finite relation between two pointed finite metric samples.
struct Correspondence {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

struct GhBreakdown {
  double dom_covering_radius = 0.0;
  double im_covering_radius = 0.0;
  double distortion = 0.0;
  bool base_pair_present = false;
};

struct GhResult {
  double mu = 0.0;  // +inf when the base pair is absent
  Correspondence relation;
  GhBreakdown breakdown;
  bool upper_bound_only = false;  // heuristic mode flags its result
};

// Admissibility of a relation: mu = max(covering radius of dom in s1,
// covering radius of im in s2, distortion over all pairs of related pairs,
// including pairs sharing a source), or +inf if the base pair is absent.
GhResult admissibility(const Correspondence& rho, const FiniteSample& s1,
                       const FiniteSample& s2);

enum class GhMode { exact, heuristic };

struct GhConfig {
  GhMode mode = GhMode::exact;
  std::size_t exact_cap = 16;      // exact mode requires |s1|*|s2| <= cap
  std::uint64_t seed = 0;          // heuristic annealing seed
  int anneal_steps = 10000;
  double temp_hi = 1.0;
  double temp_lo = 1e-3;
};

// Exact mode enumerates every relation containing the base pair
// (branch-and-bound on the partial distortion) and returns the minimizer.
// Heuristic mode searches unions of graphs of maps f: s1 -> s2 and
// g: s2 -> s1, both fixing the base pair, by greedy init + simulated
// annealing; the result is an upper bound and flagged as such.
// Throws std::length_error when exact mode exceeds the size cap.
GhResult gh_distance(const FiniteSample& s1, const FiniteSample& s2,
                     const GhConfig& cfg = {});

}  // namespace dilatlab
