#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dilatlab {

// A point of an ambient model space: finite real coordinates.
struct Point {
  std::vector<double> c;

  Point() = default;
  Point(std::initializer_list<double> init) : c(init) {}
  explicit Point(std::vector<double> coords) : c(std::move(coords)) {}

  std::size_t dim() const { return c.size(); }
  double operator[](std::size_t i) const { return c[i]; }
  double& operator[](std::size_t i) { return c[i]; }

  friend bool operator==(const Point& a, const Point& b) { return a.c == b.c; }
};

Point operator+(const Point& a, const Point& b);
Point operator-(const Point& a, const Point& b);
Point operator*(double s, const Point& a);

double norm_l2(const Point& a);
double norm_l1(const Point& a);
double norm_linf(const Point& a);

// Pure distance evaluation plus an optional scale: scaled(lambda) evaluates
// (1/lambda) d.
class DistanceOracle {
 public:
  DistanceOracle() = default;
  explicit DistanceOracle(std::function<double(const Point&, const Point&)> fn,
                          double lambda = 1.0)
      : fn_(std::move(fn)), lambda_(lambda) {}

  double operator()(const Point& a, const Point& b) const {
    return fn_(a, b) / lambda_;
  }

  double scale() const { return lambda_; }

  DistanceOracle rescaled(double lambda) const {
    if (!(lambda > 0.0)) throw std::invalid_argument("rescale factor must be > 0");
    return DistanceOracle(fn_, lambda_ * lambda);
  }

  bool valid() const { return static_cast<bool>(fn_); }

 private:
  std::function<double(const Point&, const Point&)> fn_;
  double lambda_ = 1.0;
};

DistanceOracle euclidean_oracle();

// Finite pointed metric sample with an eagerly cached distance matrix.
// All downstream checks read the cache, never the oracle.
class FiniteSample {
 public:
  FiniteSample() = default;
  FiniteSample(std::vector<Point> points, const DistanceOracle& oracle,
               std::optional<std::size_t> base = std::nullopt);
  // matrix-backed construction (points optional); matrix is row-major n x n
  FiniteSample(std::size_t n, std::vector<double> matrix,
               std::optional<std::size_t> base = std::nullopt);

  std::size_t size() const { return n_; }
  double dist(std::size_t i, std::size_t j) const { return m_[i * n_ + j]; }
  void set_dist(std::size_t i, std::size_t j, double v) {
    m_[i * n_ + j] = v;
    m_[j * n_ + i] = v;
  }
  void set_dist_asym(std::size_t i, std::size_t j, double v) { m_[i * n_ + j] = v; }

  const std::vector<Point>& points() const { return points_; }
  bool has_points() const { return !points_.empty(); }
  const Point& point(std::size_t i) const { return points_[i]; }
  // attach or replace coordinate metadata without touching the matrix
  void set_points(std::vector<Point> pts) {
    if (pts.size() != n_)
      throw std::invalid_argument("set_points: size mismatch");
    points_ = std::move(pts);
  }

  std::optional<std::size_t> base() const { return base_; }
  void set_base(std::size_t i);

  double diameter() const;

  // matrix-form text file: first line n, then n whitespace-separated rows,
  // optional trailing line "base <index>"
  std::string serialize() const;
  static FiniteSample deserialize(const std::string& text);
  void save(const std::string& path) const;
  static FiniteSample load(const std::string& path);

 private:
  std::size_t n_ = 0;
  std::vector<Point> points_;
  std::vector<double> m_;
  std::optional<std::size_t> base_;
};

enum class MetricAxiom { identity, symmetry, triangle };

std::string to_string(MetricAxiom a);

struct MetricViolation {
  MetricAxiom axiom;
  std::size_t i = 0, j = 0, k = 0;  // k unused for identity/symmetry
  double slack = 0.0;
};

struct MetricReport {
  bool pass = true;
  std::vector<MetricViolation> witnesses;
  std::size_t total_violations = 0;  // may exceed the witness cap
};

inline constexpr double kDefaultMetricTol = 1e-9;
inline constexpr std::size_t kWitnessCap = 32;

// Checks identity, symmetry and the triangle inequality on every pair /
// triple of the cached matrix.  Throws std::invalid_argument on a
// non-finite entry, naming it.
MetricReport verify_metric(const FiniteSample& sample,
                           double tol = kDefaultMetricTol,
                           std::size_t witness_cap = kWitnessCap);

struct NetReport {
  bool covered = false;
  std::size_t worst_point = 0;
  double covering_radius = 0.0;
};

// true iff every sample point lies within mu of some candidate point
NetReport mu_dense_net(const FiniteSample& sample,
                       const std::vector<std::size_t>& candidate, double mu);

}  // namespace dilatlab
