#include <doctest.h>

#include <cmath>
#include <random>

#include "squaremap/functional.hpp"

using namespace squaremap;
using namespace squaremap::functional;
using laurent::NormalizedMap;
using laurent::Pole;

namespace {

const geometry::Domain& disk_exterior() {
  static const geometry::Domain d({geometry::Disk{{0, 0}, 1.0}});
  return d;
}

NormalizedMap z_plus_inv() { return NormalizedMap::joukowski(+1, 1.0, 0.0); }
NormalizedMap z_minus_inv() { return NormalizedMap::multipole({Pole{0.0, {-1.0}}}); }

// Oracle for images of the unit circle under z + c/z, written without the
// library: sample the circle on a fine grid and take extents and shoelace.
struct CircleImage {
  double V, A;
};
CircleImage circle_image(Complex c, std::size_t n = 200000) {
  double ymin = 1e300, ymax = -1e300, twice_area = 0.0;
  Complex prev = 1.0 + c;
  for (std::size_t k = 1; k <= n; ++k) {
    const Complex z = std::polar(1.0, kTwoPi * k / n);
    const Complex w = z + c / z;
    ymin = std::min(ymin, w.imag());
    ymax = std::max(ymax, w.imag());
    twice_area += prev.real() * w.imag() - w.real() * prev.imag();
    prev = w;
  }
  return {ymax - ymin, 0.5 * std::abs(twice_area)};
}

}  // namespace

TEST_CASE("identity images carry the exact source data") {
  const geometry::Domain d({geometry::AxisSquare{{0, 0}, 1.0}, geometry::Disk{{3, 0}, 0.5},
                            geometry::Point{{-3, 1}}, geometry::VerticalSlit{{0, 3}, 1.0}});
  const auto comps = image_components(NormalizedMap::identity(), d, 1e-3);
  REQUIRE(comps.size() == 4);
  CHECK(comps[0].A == 1.0);
  CHECK(comps[0].V == 1.0);
  CHECK(comps[1].A == doctest::Approx(kPi * 0.25).epsilon(1e-15));
  CHECK(comps[1].V == 1.0);
  CHECK(comps[2].A == 0.0);
  CHECK(comps[2].V == 0.0);
  CHECK(comps[3].A == 0.0);
  CHECK(comps[3].V == 1.0);
  CHECK(comps[0].square_defect == doctest::Approx(0.0));
}

TEST_CASE("Joukowski images of the disk are slits") {
  const auto h = image_components(z_plus_inv(), disk_exterior(), 1e-3);
  CHECK(h[0].A < 1e-6);
  CHECK(h[0].V < 1e-6);
  CHECK(h[0].H == doctest::Approx(4.0).epsilon(1e-6));
  const auto v = image_components(z_minus_inv(), disk_exterior(), 1e-3);
  CHECK(v[0].A < 1e-6);
  CHECK(v[0].V == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("S on the disk exterior against the closed-form oracles") {
  for (double c : {0.0, 1.0, -1.0, 0.3, -0.6}) {
    const auto o = circle_image(c);
    const double oracle = kTwoPi * c + o.V * o.V - o.A;
    const auto f = c == 0.0 ? NormalizedMap::identity()
                            : NormalizedMap::multipole({Pole{0.0, {Complex(c, 0)}}});
    const double S = functional_S(f, disk_exterior(), 1e-3).S;
    CHECK(std::abs(S - oracle) < 1e-3);
  }
  CHECK(std::abs(functional_S(NormalizedMap::identity(), disk_exterior(), 1e-3).S - (4 - kPi)) < 1e-3);
  CHECK(std::abs(functional_S(z_plus_inv(), disk_exterior(), 1e-3).S - kTwoPi) < 1e-3);
  CHECK(std::abs(functional_S(z_minus_inv(), disk_exterior(), 1e-3).S - (16 - kTwoPi)) < 1e-3);
}

TEST_CASE("S of the identity is exactly zero on square domains") {
  const geometry::Domain d({geometry::AxisSquare{{0, 0}, 1.0}, geometry::AxisSquare{{3, 1}, 0.5},
                            geometry::Point{{-2, -2}}});
  CHECK(functional_S(NormalizedMap::identity(), d, 1e-3).S == 0.0);
  CHECK(identity_S_exact(d) == 0.0);
}

TEST_CASE("S on the sphere is 2 pi Re a1") {
  const geometry::Domain none;
  const auto f = NormalizedMap::multipole({Pole{0.0, {Complex(0.25, 0.5)}}});
  CHECK(functional_S(f, none, 1e-3).S == doctest::Approx(kTwoPi * 0.25));
}

TEST_CASE("S recomputes exactly from its components") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  const geometry::Domain d({geometry::AxisSquare{{-1.5, 0}, 1.0}, geometry::Disk{{1.5, 0}, 0.5}});
  for (int k = 0; k < 10; ++k) {
    const auto f = NormalizedMap::multipole(
        {Pole{{-1.5, 0}, {Complex(u(rng), u(rng)), Complex(u(rng), u(rng))}},
         Pole{{1.5, 0}, {Complex(u(rng), u(rng))}}});
    const auto rep = functional_S(f, d, 1e-3, std::vector<double>{0.0, kPi});
    double s = kTwoPi * rep.a1.alpha();
    for (const auto& c : rep.components) s += c.V * c.V - c.A;
    CHECK(rep.S == s);
    REQUIRE(rep.L_values.size() == 2);
    CHECK(rep.L_values[0].second == -rep.L_values[1].second);
    for (const auto& c : rep.components) CHECK(c.A <= c.H * c.V + 1e-9);
  }
}

TEST_CASE("functional_L examples") {
  CHECK(functional_L(NormalizedMap::identity(), 1.234) == 0.0);
  CHECK(functional_L(z_minus_inv(), 0.0) == -1.0);
  CHECK(functional_L(z_minus_inv(), kPi) == doctest::Approx(1.0).epsilon(1e-15));
  // Unreduced angles.
  CHECK(functional_L(z_minus_inv(), 5 * kPi) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("L_{alpha + pi} = -L_alpha") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 200; ++k) {
    const Complex a1{u(rng), u(rng)};
    const double alpha = u(rng) * 10;
    CHECK(functional_L(a1, alpha + kPi) == doctest::Approx(-functional_L(a1, alpha)).epsilon(1e-12));
  }
}

TEST_CASE("check_injectivity examples") {
  const geometry::Domain squares({geometry::AxisSquare{{0, 0}, 1.0}, geometry::Point{{2, 2}}});
  CHECK(check_injectivity(NormalizedMap::identity(), squares, 1e-3).injective);
  CHECK(check_injectivity(NormalizedMap::identity(), disk_exterior(), 1e-3).injective);

  const geometry::Domain small({geometry::Disk{{0, 0}, 0.5}});
  const auto bad = check_injectivity(z_plus_inv(), small, 1e-3);
  CHECK_FALSE(bad.injective);
  CHECK_FALSE(bad.diagnostic.empty());

  const auto f = NormalizedMap::multipole({Pole{0.0, {0.01}}});
  CHECK(check_injectivity(f, disk_exterior(), 1e-3).injective);
}

TEST_CASE("image curves that cross each other are caught") {
  const geometry::Domain two({geometry::Disk{{-1.2, 0}, 1.0}, geometry::Disk{{1.2, 0}, 1.0}});
  // A large dipole on the left disk pushes its image across the right one.
  const auto f = NormalizedMap::multipole({Pole{{-1.2, 0}, {Complex(3.0, 0)}}});
  const auto r = check_injectivity(f, two, 1e-3);
  CHECK_FALSE(r.injective);
  CHECK(r.violation() > 0.0);
}

TEST_CASE("a too-coarse mesh asks for refinement") {
  const geometry::Domain d({geometry::Disk{{0, 0}, 1.0}});
  const auto f = NormalizedMap::multipole({Pole{0.0, {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 50.0}}});
  CHECK_THROWS_AS(check_injectivity(f, d, 0.1), MeshTooCoarseError);
}

TEST_CASE("square defect vanishes on squares and is the reported Hausdorff distance") {
  const auto sq = geometry::square_outline({0.3, -0.2}, 1.7, 100);
  const auto fit = best_square(sq);
  CHECK(fit.defect < 1e-9);
  CHECK(fit.side == doctest::Approx(1.7).epsilon(1e-9));
  // A circle's best axis square: the defect is the distance from the circle
  // to the square that balances corner and edge gaps.
  const auto circle = geometry::discretize_boundary(geometry::Disk{{0, 0}, 1.0}, 4000.0, 64);
  const auto cfit = best_square(circle.samples);
  // Oracle: for side s, the gap at the corners is s/sqrt2 - 1 and at edge
  // midpoints 1 - s/2; they balance at s = 2 / (1/sqrt2 + 1/2).
  const double s = 2.0 / (1.0 / std::sqrt(2.0) + 0.5);
  CHECK(cfit.defect == doctest::Approx(1.0 - 0.5 * s).epsilon(1e-4));
}

TEST_CASE("S converges under mesh refinement") {
  const auto f = NormalizedMap::multipole({Pole{0.0, {Complex(0.2, 0.1), Complex(0.0, 0.05)}}});
  const double s1 = functional_S(f, disk_exterior(), 4e-3).S;
  const double s2 = functional_S(f, disk_exterior(), 2e-3).S;
  const double s3 = functional_S(f, disk_exterior(), 1e-3).S;
  CHECK(std::abs(s3 - s2) < std::abs(s2 - s1));
  CHECK(std::abs(s2 - s1) / std::max(std::abs(s3 - s2), 1e-16) > 3.0);
}
