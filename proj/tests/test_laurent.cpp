#include <doctest.h>

#include <cmath>
#include <random>

#include "squaremap/laurent.hpp"

using namespace squaremap;
using namespace squaremap::laurent;

namespace {

NormalizedMap z_plus_inv() { return NormalizedMap::joukowski(+1, 1.0, 0.0); }
NormalizedMap z_minus_inv() { return NormalizedMap::multipole({Pole{0.0, {-1.0}}}); }

// Random multipole map with poles in the unit disk and decaying coefficients,
// safely injective-irrelevant: only the algebra is exercised.
NormalizedMap random_multipole(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> count(1, 3);
  std::vector<Pole> poles;
  const int n = count(rng);
  for (int k = 0; k < n; ++k) {
    Pole p;
    p.location = {0.5 * u(rng), 0.5 * u(rng)};
    for (int m = 1; m <= 4; ++m) p.coefficients.push_back(Complex(u(rng), u(rng)) * (0.1 / m));
    poles.push_back(p);
  }
  return NormalizedMap::multipole(poles);
}

}  // namespace

TEST_CASE("evaluate examples") {
  CHECK(evaluate(NormalizedMap::identity(), {2, 1}) == Complex(2, 1));
  CHECK(evaluate(z_plus_inv(), 2.0) == Complex(2.5, 0.0));
  const Complex w = evaluate(z_minus_inv(), {0, 1});
  CHECK(std::abs(w - Complex(0, 2)) < 1e-15);
}

TEST_CASE("derivative examples") {
  CHECK(derivative(NormalizedMap::identity(), {0.3, 7}) == Complex(1, 0));
  CHECK(std::abs(derivative(z_plus_inv(), 2.0) - 0.75) < 1e-15);
  // The literal (1 - z^-4)^{1/2} is the diagonal reference.
  const auto diag = NormalizedMap::exterior_square(SquareOrientation::diagonal);
  CHECK(std::abs(derivative(diag, 2.0) - std::sqrt(1.0 - 1.0 / 16.0)) < 1e-14);
  const auto axis = NormalizedMap::exterior_square(SquareOrientation::axis);
  CHECK(std::abs(derivative(axis, 2.0) - std::sqrt(1.0 + 1.0 / 16.0)) < 1e-14);
}

TEST_CASE("a1 read-off") {
  CHECK(coefficient_a1(NormalizedMap::identity()).a1 == Complex(0, 0));
  CHECK(coefficient_a1(z_minus_inv()).a1 == Complex(-1, 0));
  CHECK(coefficient_a1(NormalizedMap::exterior_square()).a1 == Complex(0, 0));
  const auto c = coefficient_a1_checked(z_minus_inv());
  CHECK(c.alpha() == -1.0);
  CHECK(c.beta() == 0.0);
}

TEST_CASE("exterior square a1 is zero by contour quadrature too") {
  for (auto o : {SquareOrientation::axis, SquareOrientation::diagonal}) {
    const auto f = NormalizedMap::exterior_square(o);
    CHECK(std::abs(contour_a1(f, 3.0, 1024)) < 1e-9);
  }
}

TEST_CASE("exterior square derivative matches the closed form off the axes") {
  // Independent oracle: principal square root of 1 + z^-4 on |z| > 1.
  const auto f = NormalizedMap::exterior_square();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> r(1.05, 4.0), t(0.0, kTwoPi);
  for (int k = 0; k < 50; ++k) {
    const Complex z = std::polar(r(rng), t(rng));
    const Complex oracle = std::sqrt(1.0 + std::pow(z, -4));
    CHECK(std::abs(derivative(f, z) - oracle) < 1e-12);
  }
}

TEST_CASE("exterior square closes up and maps the circle onto a square") {
  const auto f = NormalizedMap::exterior_square();
  // The image of 1 and of i are edge midpoints; of e^{i pi/4} a corner.
  const Complex a = evaluate(f, std::polar(1.0, 0.0));
  const Complex b = evaluate(f, std::polar(1.0, kPi / 2));
  const Complex c = evaluate(f, std::polar(1.0, kPi / 4));
  CHECK(std::abs(a.imag()) < 1e-9);
  CHECK(std::abs(b.real()) < 1e-9);
  CHECK(std::abs(c.real() - a.real()) < 1e-6);
  CHECK(std::abs(c.imag() - b.imag()) < 1e-6);
  const Complex closing = evaluate(f, std::polar(1.0, kTwoPi - 1e-12)) - a;
  CHECK(std::abs(closing) < 1e-6);
}

TEST_CASE("compose examples") {
  std::mt19937_64 rng(5);
  const auto m = random_multipole(rng);
  const auto id_then = NormalizedMap::composition(NormalizedMap::identity(), m);
  CHECK(std::abs(coefficient_a1(id_then).a1 - coefficient_a1(m).a1) < 1e-15);

  const auto comp = NormalizedMap::composition(z_plus_inv(), NormalizedMap::inverse(z_minus_inv()));
  CHECK(std::abs(coefficient_a1(comp).a1 - 2.0) < 1e-15);
  CHECK(std::abs(contour_a1_converged(comp).value - 2.0) < 1e-9);

  const auto round_trip = NormalizedMap::composition(m, NormalizedMap::inverse(m));
  CHECK(std::abs(coefficient_a1(round_trip).a1) < 1e-15);
}

TEST_CASE("invert examples") {
  CHECK(invert(NormalizedMap::identity(), 5.0) == Complex(5, 0));
  CHECK(std::abs(invert(z_plus_inv(), 2.5) - 2.0) < 1e-13);
  const auto inv = NormalizedMap::inverse(z_minus_inv());
  CHECK(coefficient_a1(inv).a1 == Complex(1, 0));
  CHECK(std::abs(contour_a1_converged(inv).value - 1.0) < 1e-9);
}

TEST_CASE("inversion residual and failure") {
  const auto f = z_minus_inv();
  for (Complex w : {Complex(3, 1), Complex(-0.5, 4), Complex(0.1, -2.5)}) {
    const Complex z = invert(f, w, 1e-13);
    CHECK(std::abs(evaluate(f, z) - w) <= 1e-13 * std::max(1.0, std::abs(w)));
  }
  InvertOptions opt;
  opt.max_iterations = 1;
  std::mt19937_64 rng(2);
  CHECK_THROWS_AS(invert(random_multipole(rng), {0.01, 0.02}, 1e-15, opt), NumericError);
}

TEST_CASE("evaluation at a pole is refused") {
  CHECK_THROWS_AS(evaluate(z_minus_inv(), 0.0), PoleProximityError);
  CHECK_THROWS_AS(derivative(z_plus_inv(), 1e-12), PoleProximityError);
}

TEST_CASE("a1 additivity and negation over random maps") {
  std::mt19937_64 rng(1234);
  for (int k = 0; k < 100; ++k) {
    const auto f = random_multipole(rng);
    const auto g = random_multipole(rng);
    const Complex af = coefficient_a1(f).a1, ag = coefficient_a1(g).a1;
    CHECK(std::abs(coefficient_a1(NormalizedMap::composition(f, g)).a1 - (af + ag)) < 1e-8);
    CHECK(std::abs(coefficient_a1(NormalizedMap::inverse(f)).a1 + af) < 1e-8);
  }
}

TEST_CASE("derivative agrees with central differences") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> r(1.5, 5.0), t(0.0, kTwoPi);
  const std::vector<NormalizedMap> maps = {
      z_plus_inv(), z_minus_inv(), random_multipole(rng), NormalizedMap::exterior_square(),
      NormalizedMap::composition(z_plus_inv(), random_multipole(rng)),
      NormalizedMap::inverse(random_multipole(rng))};
  const double h = 1e-5;
  for (const auto& f : maps) {
    for (int k = 0; k < 100; ++k) {
      const Complex z = std::polar(r(rng), t(rng));
      const Complex fd = (evaluate(f, z + h) - evaluate(f, z - h)) / (2 * h);
      const Complex d = derivative(f, z);
      CHECK(std::abs(fd - d) <= 1e-6 * std::abs(d));
    }
  }
}

TEST_CASE("tail decays like C/|z|") {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 10; ++k) {
    const auto f = random_multipole(rng);
    const double R0 = 2.0 * (singular_radius(f) + 1.0);
    double C = 0.0;
    for (double R : {R0, 2 * R0, 4 * R0, 8 * R0})
      for (int j = 0; j < 16; ++j) {
        const Complex z = std::polar(R, kTwoPi * j / 16);
        C = std::max(C, std::abs(evaluate_tail(f, z)) * R);
      }
    // C bounded by the coefficient sum over the far region.
    double bound = 0.0;
    for (const auto& p : std::get<MultipoleMap>(f.node().value).poles)
      for (const auto& c : p.coefficients) bound += 2.0 * std::abs(c);
    CHECK(C <= bound);
  }
}

TEST_CASE("contour a1 is stable under radius doubling") {
  std::mt19937_64 rng(31);
  for (int k = 0; k < 20; ++k) {
    const auto f = random_multipole(rng);
    const double R = 2.0 * singular_radius(f);
    CHECK(std::abs(contour_a1(f, R) - contour_a1(f, 2 * R)) < 1e-8);
    CHECK(std::abs(contour_a1(f, R) - coefficient_a1(f).a1) < 1e-9);
  }
}

TEST_CASE("compose_checked rejects inner images that hit the outer domain") {
  const geometry::Domain disk({geometry::Disk{{0, 0}, 1.0}});
  const geometry::Domain slit({geometry::VerticalSlit{{0, 0}, 4.0}});
  // z - 1/z sends the disk exterior onto the slit exterior; any map defined
  // on the slit exterior may follow it.
  CHECK_NOTHROW(compose_checked(NormalizedMap::identity(), z_minus_inv(), disk, slit, 1e-3));
  const geometry::Domain big({geometry::Disk{{0, 0}, 3.0}});
  CHECK_THROWS_AS(compose_checked(NormalizedMap::identity(), z_minus_inv(), disk, big, 1e-3),
                  PreconditionError);
}

TEST_CASE("slit frames keep a1 equal to the first coefficient") {
  Pole p;
  p.location = {0.5, 0.0};
  p.frame = PoleFrame::vertical_slit;
  p.frame_scale = 0.5;
  p.coefficients = {{0.03, -0.01}, {0.01, 0.0}};
  const auto f = NormalizedMap::multipole({p});
  CHECK(coefficient_a1(f).a1 == p.coefficients[0]);
  CHECK(std::abs(contour_a1_converged(f).value - p.coefficients[0]) < 1e-9);
}
