#include "dilatlab/metric.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

namespace dilatlab {

Point operator+(const Point& a, const Point& b) {
  Point r = a;
  for (std::size_t i = 0; i < r.dim(); ++i) r[i] += b[i];
  return r;
}

Point operator-(const Point& a, const Point& b) {
  Point r = a;
  for (std::size_t i = 0; i < r.dim(); ++i) r[i] -= b[i];
  return r;
}

Point operator*(double s, const Point& a) {
  Point r = a;
  for (std::size_t i = 0; i < r.dim(); ++i) r[i] *= s;
  return r;
}

double norm_l2(const Point& a) {
  double s = 0.0;
  for (double v : a.c) s += v * v;
  return std::sqrt(s);
}

double norm_l1(const Point& a) {
  double s = 0.0;
  for (double v : a.c) s += std::abs(v);
  return s;
}

double norm_linf(const Point& a) {
  double s = 0.0;
  for (double v : a.c) s = std::max(s, std::abs(v));
  return s;
}

DistanceOracle euclidean_oracle() {
  return DistanceOracle(
      [](const Point& a, const Point& b) { return norm_l2(a - b); });
}

FiniteSample::FiniteSample(std::vector<Point> points,
                           const DistanceOracle& oracle,
                           std::optional<std::size_t> base)
    : n_(points.size()), points_(std::move(points)), base_(base) {
  m_.assign(n_ * n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i; j < n_; ++j) {
      const double d = (i == j) ? 0.0 : oracle(points_[i], points_[j]);
      m_[i * n_ + j] = d;
      m_[j * n_ + i] = d;
    }
  if (base_ && *base_ >= n_) throw std::out_of_range("base index out of range");
}

FiniteSample::FiniteSample(std::size_t n, std::vector<double> matrix,
                           std::optional<std::size_t> base)
    : n_(n), m_(std::move(matrix)), base_(base) {
  if (m_.size() != n_ * n_) throw std::invalid_argument("matrix size mismatch");
  if (base_ && *base_ >= n_) throw std::out_of_range("base index out of range");
}

void FiniteSample::set_base(std::size_t i) {
  if (i >= n_) throw std::out_of_range("base index out of range");
  base_ = i;
}

double FiniteSample::diameter() const {
  double d = 0.0;
  for (double v : m_) d = std::max(d, v);
  return d;
}

std::string FiniteSample::serialize() const {
  std::ostringstream os;
  os.precision(17);
  os << n_ << "\n";
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      if (j) os << " ";
      os << m_[i * n_ + j];
    }
    os << "\n";
  }
  if (base_) os << "base " << *base_ << "\n";
  return os.str();
}

FiniteSample FiniteSample::deserialize(const std::string& text) {
  std::istringstream is(text);
  std::size_t n = 0;
  if (!(is >> n)) throw std::invalid_argument("sample file: missing size line");
  std::vector<double> m(n * n);
  for (std::size_t i = 0; i < n * n; ++i)
    if (!(is >> m[i])) throw std::invalid_argument("sample file: truncated matrix");
  std::optional<std::size_t> base;
  std::string word;
  if (is >> word) {
    if (word != "base") throw std::invalid_argument("sample file: unexpected token '" + word + "'");
    std::size_t b;
    if (!(is >> b)) throw std::invalid_argument("sample file: missing base index");
    base = b;
  }
  return FiniteSample(n, std::move(m), base);
}

void FiniteSample::save(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << serialize();
}

FiniteSample FiniteSample::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return deserialize(os.str());
}

std::string to_string(MetricAxiom a) {
  switch (a) {
    case MetricAxiom::identity: return "identity";
    case MetricAxiom::symmetry: return "symmetry";
    case MetricAxiom::triangle: return "triangle";
  }
  return "?";
}

namespace {

void add_witness(MetricReport& r, MetricViolation w, std::size_t cap) {
  r.pass = false;
  ++r.total_violations;
  if (r.witnesses.size() < cap) r.witnesses.push_back(w);
}

}  // namespace

MetricReport verify_metric(const FiniteSample& s, double tol,
                           std::size_t witness_cap) {
  if (s.size() == 0) throw std::invalid_argument("verify_metric: empty sample");
  if (tol < 0.0) throw std::invalid_argument("verify_metric: negative tolerance");
  const std::size_t n = s.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!std::isfinite(s.dist(i, j)))
        throw std::invalid_argument("verify_metric: non-finite matrix entry (" +
                                    std::to_string(i) + "," + std::to_string(j) + ")");

  MetricReport r;
  // identity: zero diagonal, positive off-diagonal
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(s.dist(i, i)) > tol)
      add_witness(r, {MetricAxiom::identity, i, i, 0, std::abs(s.dist(i, i))},
                  witness_cap);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (s.dist(i, j) <= tol || s.dist(i, j) < -tol)
        add_witness(r, {MetricAxiom::identity, i, j, 0, s.dist(i, j)}, witness_cap);
      const double asym = std::abs(s.dist(i, j) - s.dist(j, i));
      if (asym > tol)
        add_witness(r, {MetricAxiom::symmetry, i, j, 0, asym}, witness_cap);
    }
  // triangle: d(i,k) <= d(i,j) + d(j,k)
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        if (i == j || j == k || i == k) continue;
        const double slack = s.dist(i, k) - s.dist(i, j) - s.dist(j, k);
        if (slack > tol)
          add_witness(r, {MetricAxiom::triangle, i, j, k, slack}, witness_cap);
      }
  return r;
}

NetReport mu_dense_net(const FiniteSample& s,
                       const std::vector<std::size_t>& candidate, double mu) {
  if (candidate.empty())
    throw std::invalid_argument("mu_dense_net: empty candidate set");
  if (!(mu > 0.0)) throw std::invalid_argument("mu_dense_net: mu must be > 0");
  NetReport r;
  r.covering_radius = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c : candidate) best = std::min(best, s.dist(i, c));
    if (best > r.covering_radius) {
      r.covering_radius = best;
      r.worst_point = i;
    }
  }
  r.covered = r.covering_radius <= mu;
  return r;
}

}  // namespace dilatlab
