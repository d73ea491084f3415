#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "dilatlab/variational.hpp"

using namespace dilatlab;

namespace {

const Point kOrigin{0.0, 0.0};

SampledCurve segment(const Point& a, const Point& b, std::size_t nodes) {
  return SampledCurve::from_function(
      [a, b](double t) { return a + (t * (b - a)); }, nodes,
      euclidean_oracle());
}

}  // namespace

TEST_CASE("l_eps of a Euclidean curve is scale independent") {
  const DilatationStructure eu = make_structure("euclidean:k=2,norm=l2");
  const SampledCurve c = segment(Point{0, 0}, Point{3, 4}, 65);
  const LengthFunctionalValue v1 = l_eps(eu, kOrigin, c, 1.0);
  CHECK(v1.admissible);
  CHECK(v1.value == doctest::Approx(5.0).epsilon(1e-12));
  for (double eps : {0.5, 0.25, 0.0625}) {
    const LengthFunctionalValue v = l_eps(eu, kOrigin, c, eps);
    CHECK(v.value == doctest::Approx(v1.value).epsilon(1e-12));
  }
}

TEST_CASE("a sprint-then-wait curve is not admissible") {
  // all the motion happens in the first quarter: Lipschitz 4x the variation
  const SampledCurve c = SampledCurve::from_function(
      [](double t) { return Point{std::min(4.0 * t, 1.0), 0.0}; }, 129,
      euclidean_oracle());
  const DilatationStructure eu = make_structure("euclidean:k=2,norm=l2");
  const LengthFunctionalValue v = l_eps(eu, kOrigin, c, 0.5);
  CHECK_FALSE(v.admissible);
  CHECK(v.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("curve derivative of a straight line recovers the velocity") {
  const DilatationStructure eu = make_structure("euclidean:k=2,norm=l2");
  const SampledCurve c = segment(Point{0, 0}, Point{1, 2}, 129);
  const CurveDerivative cd = curve_derivative(eu, c, 0.3, Ladder{2, 12, 4});
  CHECK(cd.derivable);
  CHECK(cd.forward.converged_to(0.0, 1e-5));
  // winner is c(t) advanced by the velocity (1,2)
  const Point want = c.eval(0.3) + Point{1.0, 2.0};
  CHECK(norm_l2(cd.u - want) <= 1e-3);
  CHECK_FALSE(cd.candidates.empty());
}

TEST_CASE("the rotational structure defeats every derivative candidate") {
  const DilatationStructure rot = make_structure("rotational:theta=1.0");
  const SampledCurve c = segment(Point{0, 0}, Point{1, 0}, 129);
  const CurveDerivative cd = curve_derivative(rot, c, 0.5, Ladder{2, 12, 4});
  CHECK_FALSE(cd.derivable);
  // every examined candidate keeps a visibly oscillating residual
  double min_osc = 1e9;
  for (const CandidateTrace& tr : cd.candidates)
    min_osc = std::min(min_osc, tr.forward.oscillation);
  CHECK(min_osc >= 0.1);
}

TEST_CASE("rnp probe: full fraction on the plane, zero on the rotational space") {
  const std::vector<SampledCurve> battery = {
      segment(Point{0, 0}, Point{1, 0}, 65),
      segment(Point{0.2, -0.3}, Point{-0.4, 0.5}, 65)};
  const Ladder lad{2, 10, 3};
  const RnpReport eu =
      rnp_probe(make_structure("euclidean:k=2,norm=l2"), battery, 2, lad);
  CHECK(eu.probes == 4);
  CHECK(eu.fraction == doctest::Approx(1.0));
  const RnpReport rot = rnp_probe(make_structure("rotational:theta=1.0"),
                                  battery, 2, lad, true);
  CHECK(rot.fraction == doctest::Approx(0.0));
  CHECK(rot.details.size() == 4);
}

TEST_CASE("tangent length integral equals the variation on first order spaces") {
  const SampledCurve c = segment(Point{0, 0}, Point{3, 4}, 33);
  const Ladder lad{2, 10, 3};
  const TangentIntegral eu =
      tangent_length_integral(make_structure("euclidean:k=2,norm=l2"), c, lad);
  CHECK(eu.complete);
  CHECK(eu.value == doctest::Approx(5.0).epsilon(1e-4));
  // the quadratic correction dies at scale zero: same tangent integral
  const TangentIntegral qu = tangent_length_integral(
      make_structure("quadratic:eta=0.1,k=2"), c, lad);
  CHECK(qu.complete);
  CHECK(qu.value == doctest::Approx(5.0).epsilon(1e-3));
}

TEST_CASE("length formula check on the plane closes the gap") {
  const DilatationStructure eu = make_structure("euclidean:k=2,norm=l2");
  PolylineConfig cfg;
  cfg.interior_nodes = 4;
  cfg.restarts = 1;
  cfg.sweeps = 20;
  const LengthFormulaReport r =
      length_formula_check(eu, Point{0, 0}, Point{1, 1}, cfg, 1.0);
  CHECK(r.direct == doctest::Approx(std::sqrt(2.0)));
  CHECK(r.gap <= 0.01);
}

TEST_CASE("length formula check demands RNP evidence") {
  const DilatationStructure rot = make_structure("rotational:theta=1.0");
  PolylineConfig cfg;
  cfg.interior_nodes = 4;
  CHECK_THROWS_AS(
      length_formula_check(rot, Point{0, 0}, Point{1, 1}, cfg, 0.0),
      std::logic_error);
}

TEST_CASE("phi_d recovers the homogeneous norm") {
  const DilatationStructure eu = make_structure("euclidean:k=2,norm=l2");
  const Ladder lad{1, 10, 3};
  const LimitEstimate at_u =
      phi_d(eu, eu.d, kOrigin, Point{0.3, -0.4}, lad);
  CHECK(at_u.converged_to(0.5, 1e-9));
  const LimitEstimate at_x = phi_d(eu, eu.d, kOrigin, kOrigin, lad);
  CHECK(at_x.converged_to(0.0, 1e-12));
}

TEST_CASE("tempered probe brackets the distance ratio") {
  const DilatationStructure eu = make_structure("euclidean:k=2,norm=l2");
  const std::vector<Point> region = {kOrigin, Point{1, 0}, Point{0, 1},
                                     Point{-0.6, 0.8}};
  const Ladder lad{1, 8, 3};
  const TemperedReport self = tempered_probe(eu, eu.d, region, lad);
  CHECK(self.tempered);
  CHECK(self.c_hat == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(self.C_hat == doctest::Approx(1.0).epsilon(1e-9));

  // doubling the reference distance doubles both extremes
  const DistanceOracle doubled(
      [](const Point& a, const Point& b) { return 2.0 * norm_l2(a - b); });
  const TemperedReport twice = tempered_probe(eu, doubled, region, lad);
  CHECK(twice.tempered);
  CHECK(twice.c_hat == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(twice.C_hat == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("gamma probe passes on the plane") {
  const DilatationStructure eu = make_structure("euclidean:k=2,norm=l2");
  const std::vector<SampledCurve> battery = {
      segment(Point{0, 0}, Point{1, 0}, 49),
      SampledCurve::from_function(
          [](double t) {
            const double a = 0.5 * std::numbers::pi * t;
            return Point{std::cos(a), std::sin(a)};
          },
          49, euclidean_oracle())};
  const std::vector<double> eps_seq = {1.0, 0.5, 0.25, 0.125, 0.0625};
  const GammaReport r = gamma_probe(eu, kOrigin, battery, eps_seq);
  CHECK(r.pass);
  REQUIRE(r.liminf_slacks.size() == battery.size());
  for (double s : r.liminf_slacks) CHECK(s >= -1e-3);
  for (double res : r.recovery_residuals) CHECK(res <= 1e-6);
  CHECK(r.dsup_margin >= -1e-9);
}

TEST_CASE("gamma probe on a constant curve is exact") {
  const DilatationStructure eu = make_structure("euclidean:k=2,norm=l2");
  const std::vector<SampledCurve> battery = {
      SampledCurve::from_function(
          [](double) { return Point{0.4, 0.4}; }, 33, euclidean_oracle())};
  const GammaReport r =
      gamma_probe(eu, kOrigin, battery, {1.0, 0.5, 0.25, 0.125, 0.0625});
  CHECK(r.pass);
  // the functional vanishes along the whole sequence
  for (const auto& ladder : r.values)
    for (const auto& [eps, val] : ladder) CHECK(val <= 1e-9);
}
