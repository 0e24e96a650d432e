#include <doctest.h>

#include <cmath>

#include "squaremap/functional.hpp"
#include "squaremap/modulus.hpp"

using namespace squaremap;
using namespace squaremap::modulus;
using laurent::NormalizedMap;
using laurent::Pole;

namespace {

const geometry::Domain& one_square() {
  static const geometry::Domain d({geometry::AxisSquare{{0, 0}, 1.0}});
  return d;
}

NormalizedMap perturbed(Complex c) {
  return NormalizedMap::multipole({Pole{0.0, {0.05 * c}}});
}

// Shoelace area of f(dR) for f = z + c/z, computed by hand on a fine
// boundary grid; independent of the library's probe sampling.
double probe_area_oracle(Complex c, double r, double l, std::size_t per_side) {
  const Complex corners[4] = {{l, -r}, {l, r}, {-l, r}, {-l, -r}};
  double twice = 0.0;
  auto f = [&](Complex z) { return z + c / z; };
  for (int s = 0; s < 4; ++s) {
    const Complex a = corners[s], b = corners[(s + 1) % 4];
    for (std::size_t k = 0; k < per_side; ++k) {
      const Complex p = f(a + (b - a) * (double(k) / per_side));
      const Complex q = f(a + (b - a) * (double(k + 1) / per_side));
      twice += p.real() * q.imag() - q.real() * p.imag();
    }
  }
  return 0.5 * twice;
}

}  // namespace

TEST_CASE("probe geometry follows l = r^(2/3)") {
  RectangleProbe p{1000.0};
  CHECK(p.l() == doctest::Approx(100.0).epsilon(1e-14));
  CHECK(p.l_over_r() == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(p.r_over_l2() == doctest::Approx(0.1).epsilon(1e-14));
  double prev_a = 1e300, prev_b = 1e300;
  for (double r : {1e2, 1e3, 1e4, 1e5}) {
    RectangleProbe q{r};
    CHECK(q.l_over_r() < prev_a);
    CHECK(q.r_over_l2() < prev_b);
    if (r >= 1e3) {
      CHECK(q.l_over_r() <= 0.1 + 1e-15);
      CHECK(q.r_over_l2() <= 0.1 + 1e-15);
    }
    prev_a = q.l_over_r();
    prev_b = q.r_over_l2();
  }
}

TEST_CASE("probe must contain the domain") {
  const geometry::Domain far({geometry::AxisSquare{{30, 0}, 1.0}});
  CHECK_THROWS_AS(RectangleProbe{100.0}.require_contains(far), PreconditionError);
  CHECK_NOTHROW(RectangleProbe{100.0}.require_contains(one_square()));
}

TEST_CASE("identity probe area is exactly 4lr") {
  for (double r : {1e2, 1e3, 1e4}) {
    const RectangleProbe p{r};
    CHECK(area_of_probe_image(NormalizedMap::identity(), one_square(), p) ==
          doctest::Approx(p.area()).epsilon(1e-15));
    CHECK(probe_image_area(NormalizedMap::identity(), one_square(), p).minus_4lr == 0.0);
  }
}

TEST_CASE("probe area of z + c/z matches a hand-rolled shoelace") {
  const geometry::Domain disk({geometry::Disk{{0, 0}, 1.0}});
  for (double c : {1.0, -1.0}) {
    const auto f = NormalizedMap::multipole({Pole{0.0, {c}}});
    const RectangleProbe p{100.0};
    const double oracle = probe_area_oracle(c, p.r, p.l(), 200000) - p.area();
    const double got = probe_image_area(f, disk, p).minus_4lr;
    CHECK(got == doctest::Approx(oracle).epsilon(1e-5));
  }
}

TEST_CASE("rho is rejected off square domains") {
  const geometry::Domain disk({geometry::Disk{{0, 0}, 1.0}});
  CHECK_THROWS_AS(RhoMetric::build(NormalizedMap::identity(), disk, 1e-3), PreconditionError);
}

TEST_CASE("identity metric: rho = 1, every identity is exact") {
  const auto m = RhoMetric::build(NormalizedMap::identity(), one_square(), 1e-3);
  const RectangleProbe p{100.0};
  const auto rho2 = integrate_rho_squared(m, p);
  CHECK(rho2.minus_4lr == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(rho2.value - p.area()) <= 1e-9 * p.area());
  CHECK(integrate_one_minus_rho_squared(m, p).value == doctest::Approx(0.0));

  // Through the square and beside it.
  for (double x : {0.0, 0.25, 5.0}) {
    const auto li = line_integral(m, p, x);
    CHECK(li.value == doctest::Approx(2.0 * p.r).epsilon(1e-15));
    CHECK(li.minus_2r == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("sphere line integral is 2r") {
  const geometry::Domain none;
  const auto m = RhoMetric::build(NormalizedMap::identity(), none, 1e-3);
  CHECK(line_integral(m, RectangleProbe{100.0}, 3.0).value == 200.0);
}

TEST_CASE("rho^2 integral tracks 4lr + S for a perturbed square") {
  const auto f = perturbed(1.0);
  const double S = functional::functional_S(f, one_square(), 1e-3).S;
  const auto sw = sandwich_check(f, one_square(), std::vector<double>{1e2, 1e3}, 1e-3);
  REQUIRE(sw.probes.size() == 2);
  CHECK(std::abs(sw.S_functional - S) < 1e-12);
  CHECK(std::abs(sw.probes[1].consistency_residual) < std::abs(sw.probes[0].consistency_residual));
  for (const auto& pr : sw.probes) CHECK(pr.slack >= -sw.slack_tolerance);
}

TEST_CASE("line integrals dominate the endpoint bound") {
  const auto f = perturbed(1.0);
  const auto m = RhoMetric::build(f, one_square(), 1e-3);
  ProbeOptions opt;
  const auto cs = cauchy_schwarz_bound(m, RectangleProbe{100.0}, opt);
  CHECK(cs.endpoint_bound_holds);
  CHECK(cs.samples.size() == 65);
  for (const auto& s : cs.samples) CHECK(s.value >= s.lower_bound - 1e-9);
  CHECK(cs.fitted_C >= 0.0);
}

TEST_CASE("sandwich refuses non-injective maps") {
  const geometry::Domain small({geometry::AxisSquare{{0, 0}, 0.5}});
  const auto f = NormalizedMap::joukowski(+1, 1.0, 0.0);
  CHECK_THROWS_AS(sandwich_check(f, small, std::vector<double>{100.0}, 1e-3), PreconditionError);
}

TEST_CASE("equality probe: zero for the identity, positive for a perturbation") {
  const std::vector<double> rs{1e2, 1e3};
  for (double v : equality_probe(NormalizedMap::identity(), one_square(), rs, 1e-3))
    CHECK(v == doctest::Approx(0.0).epsilon(1e-12));
  for (double v : equality_probe(perturbed(1.0), one_square(), rs, 1e-3)) CHECK(v > 1e-6);
}

TEST_CASE("the pushforward identity: jacobian integral is the image area") {
  const auto f = perturbed(Complex(0.6, 0.8));
  const auto m = RhoMetric::build(f, one_square(), 1e-3);
  const RectangleProbe p{100.0};
  const double jac = integrate_jacobian(m, p).value;
  // Area of f(R minus the square) = area inside f(dR) minus A of the image square.
  const double outer = area_of_probe_image(f, one_square(), p);
  const double inner = functional::image_components(f, one_square(), 1e-4)[0].A;
  CHECK(jac == doctest::Approx(outer - inner).epsilon(1e-8));
}

TEST_CASE("log-log slope fit") {
  const std::vector<double> x{1, 10, 100, 1000};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, -1.0 / 3.0));
  CHECK(fit_loglog_slope(x, y) == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
  CHECK(std::isnan(fit_loglog_slope(std::vector<double>{1.0}, std::vector<double>{1.0})));
}
