// The parallel paths must reproduce the serial reference bit for bit: every
// kernel writes per-item slots and reductions run in index order afterwards.
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "squaremap/functional.hpp"
#include "squaremap/kernels.hpp"
#include "squaremap/modulus.hpp"
#include "squaremap/uniformize.hpp"

using namespace squaremap;
using laurent::NormalizedMap;
using laurent::Pole;

namespace {

template <typename T>
bool same_bits(const std::vector<T>& a, const std::vector<T>& b) {
  return a.size() == b.size() &&
         (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(T)) == 0);
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

NormalizedMap sample_map() {
  return NormalizedMap::composition(
      NormalizedMap::multipole({Pole{{0.1, 0.0}, {Complex(0.05, 0.02), Complex(0.0, 0.01)}}}),
      NormalizedMap::exterior_square());
}

std::vector<Complex> ring_points(std::size_t n) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> r(1.2, 3.0), t(0.0, kTwoPi);
  std::vector<Complex> z(n);
  for (auto& v : z) v = std::polar(r(rng), t(rng));
  return z;
}

}  // namespace

TEST_CASE("point evaluation") {
  const auto z = ring_points(5000);
  const auto f = sample_map();
  CHECK(same_bits(kernels::evaluate_points(f, z, Exec::serial),
                  kernels::evaluate_points(f, z, Exec::parallel)));
  std::vector<Complex> a(z.size()), b(z.size());
  kernels::derivative_points(f, z, a, Exec::serial);
  kernels::derivative_points(f, z, b, Exec::parallel);
  CHECK(same_bits(a, b));
}

TEST_CASE("cell quadrature") {
  std::vector<kernels::Cell> cells;
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 40; ++j) cells.push_back({1.0 + i * 0.1, 1.1 + i * 0.1, j * 0.1, j * 0.1 + 0.1});
  const auto f = sample_map();
  auto integrand = [&](Complex z) { return std::norm(laurent::derivative(f, z)); };
  std::vector<double> a(cells.size()), b(cells.size());
  kernels::integrate_cells(integrand, cells, 5, a, Exec::serial);
  kernels::integrate_cells(integrand, cells, 5, b, Exec::parallel);
  CHECK(same_bits(a, b));
}

TEST_CASE("index fan-out") {
  std::vector<double> a(1000), b(1000);
  auto fn = [](std::size_t i) { return std::sin(0.1 * static_cast<double>(i)); };
  kernels::map_indices(fn, a, Exec::serial);
  kernels::map_indices(fn, b, Exec::parallel);
  CHECK(same_bits(a, b));
}

TEST_CASE("exceptions cross the parallel region") {
  CHECK_THROWS_AS(for_each_index(Exec::parallel, 100,
                                 [](std::size_t i) {
                                   if (i == 37) throw NumericError("boom");
                                 }),
                  NumericError);
}

TEST_CASE("image components and S") {
  const geometry::Domain d({geometry::Disk{{-2, 0}, 1.0}, geometry::AxisSquare{{2, 0}, 1.0}});
  const auto f = NormalizedMap::multipole({Pole{{-2, 0}, {Complex(0.1, 0.05)}},
                                           Pole{{2, 0}, {Complex(0.0, 0.02), Complex(0.01, 0)}}});
  functional::ImageOptions s, p;
  s.exec = Exec::serial;
  p.exec = Exec::parallel;
  const auto a = functional::functional_S(f, d, 1e-3, {}, s);
  const auto b = functional::functional_S(f, d, 1e-3, {}, p);
  CHECK(same_bits(a.S, b.S));
  for (std::size_t j = 0; j < a.components.size(); ++j) {
    CHECK(same_bits(a.components[j].curve.samples, b.components[j].curve.samples));
    CHECK(same_bits(a.components[j].square_defect, b.components[j].square_defect));
  }
}

TEST_CASE("modulus probes") {
  const geometry::Domain d({geometry::AxisSquare{{0, 0}, 1.0}});
  const auto f = NormalizedMap::multipole({Pole{0.0, {0.05}}});
  modulus::ProbeOptions s, p;
  s.exec = Exec::serial;
  p.exec = Exec::parallel;
  const modulus::RectangleProbe probe{1000.0};
  const auto m = modulus::RhoMetric::build(f, d, 1e-3);
  CHECK(same_bits(modulus::integrate_rho_squared(m, probe, s).minus_4lr,
                  modulus::integrate_rho_squared(m, probe, p).minus_4lr));
  CHECK(same_bits(modulus::cauchy_schwarz_bound(m, probe, s).bound_minus_4lr,
                  modulus::cauchy_schwarz_bound(m, probe, p).bound_minus_4lr));
  CHECK(same_bits(modulus::probe_image_area(f, d, probe, s).minus_4lr,
                  modulus::probe_image_area(f, d, probe, p).minus_4lr));
}

TEST_CASE("property suite samples") {
  const geometry::Domain d({geometry::AxisSquare{{0, 0}, 1.0}});
  uniformize::PropertyOptions s, p;
  s.exec = Exec::serial;
  p.exec = Exec::parallel;
  const auto a = uniformize::verify_extremal(d, 24, 0.1, 4, s);
  const auto b = uniformize::verify_extremal(d, 24, 0.1, 4, p);
  CHECK(same_bits(a.values, b.values));
  CHECK(same_bits(a.norms, b.norms));
  CHECK(a.rejected == b.rejected);
}
