#include "dilatlab/ladder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dilatlab {

std::vector<double> Ladder::scales() const {
  std::vector<double> out;
  for (int k = kmin; k <= kmax; ++k) out.push_back(std::pow(2.0, -k));
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::converged: return "converged";
    case Verdict::oscillating: return "oscillating";
    case Verdict::diverged: return "diverged";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

LimitEstimate fit_limit(const std::vector<std::pair<double, double>>& values,
                        int tail) {
  LimitEstimate est;
  est.ladder = values;
  const int n = static_cast<int>(values.size());
  if (n == 0) return est;
  const int t = std::min(tail, n);
  const int t0 = n - t;

  double vmax = -std::numeric_limits<double>::infinity();
  double vmin = std::numeric_limits<double>::infinity();
  double mean = 0.0;
  for (int i = t0; i < n; ++i) {
    vmax = std::max(vmax, values[i].second);
    vmin = std::min(vmin, values[i].second);
    mean += values[i].second;
  }
  mean /= t;
  const double last = values[n - 1].second;
  est.oscillation = vmax - vmin;
  est.limit = last;

  // constant tail
  if (est.oscillation <= 1e-6 * (1.0 + std::abs(last))) {
    est.verdict = Verdict::converged;
    est.limit = last;
    est.rate = 0.0;
    return est;
  }

  // geometric decay of successive differences over the tail
  if (n >= 3) {
    std::vector<double> diffs;
    for (int i = std::max(1, t0 - 1); i < n; ++i)
      diffs.push_back(values[i].second - values[i - 1].second);
    bool geometric = diffs.size() >= 2;
    double sum_log_ratio = 0.0;
    int ratios = 0;
    for (std::size_t i = 1; i < diffs.size(); ++i) {
      const double a = diffs[i - 1], b = diffs[i];
      if (std::abs(a) < 1e-15 * (1.0 + std::abs(last)) ||
          std::abs(b) < 1e-15 * (1.0 + std::abs(last))) {
        geometric = false;
        break;
      }
      const double r = b / a;
      if (!(r > 0.0 && r < 0.9)) {
        geometric = false;
        break;
      }
      sum_log_ratio += std::log2(r);
      ++ratios;
    }
    if (geometric && ratios > 0) {
      const double q = std::pow(2.0, sum_log_ratio / ratios);  // mean ratio
      const double p = -std::log2(q);                          // fitted rate
      if (p >= 0.5) {
        const double d_last = diffs.back();
        est.limit = last + d_last * q / (1.0 - q);
        est.rate = p;
        est.verdict = Verdict::converged;
        // re-derive the oscillation against the extrapolated limit
        est.oscillation = vmax - vmin;
        return est;
      }
    }
  }

  // modulated decay to zero: the tail is negligible against the head even
  // though successive differences are not cleanly geometric (e.g. a decaying
  // envelope times a bounded oscillation)
  if (t0 > 0) {
    double head_max = 0.0;
    for (int i = 0; i < t0; ++i)
      head_max = std::max(head_max, std::abs(values[i].second));
    double tail_max = std::max(std::abs(vmax), std::abs(vmin));
    if (head_max > 0.0 && tail_max <= 1e-3 * head_max) {
      // log-log slope of |value| against the rung index over the tail
      double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
      int pts = 0;
      for (int i = t0; i < n; ++i) {
        const double v = std::abs(values[i].second);
        if (v <= 0.0) continue;
        const double xi = static_cast<double>(i), yi = std::log2(v);
        sx += xi; sy += yi; sxx += xi * xi; sxy += xi * yi;
        ++pts;
      }
      est.verdict = Verdict::converged;
      est.limit = 0.0;
      est.rate = pts >= 2 ? -(pts * sxy - sx * sy) / (pts * sxx - sx * sx) : 1.0;
      return est;
    }
  }

  // divergence: tail magnitudes strictly growing and well above the head
  {
    bool growing = true;
    for (int i = t0 + 1; i < n; ++i)
      if (std::abs(values[i].second) <= std::abs(values[i - 1].second)) growing = false;
    const double head = std::abs(values[0].second);
    if (growing && std::abs(last) > 10.0 * (1.0 + head)) {
      est.verdict = Verdict::diverged;
      est.rate = 0.0;
      return est;
    }
  }

  if (est.oscillation >= 0.1 * (1.0 + std::abs(mean))) {
    est.verdict = Verdict::oscillating;
    est.limit = mean;
    return est;
  }

  est.verdict = Verdict::inconclusive;
  est.limit = mean;
  return est;
}

}  // namespace dilatlab
