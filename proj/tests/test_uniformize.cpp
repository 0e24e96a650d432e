#include <doctest.h>

#include <cmath>

#include "squaremap/uniformize.hpp"

using namespace squaremap;
using namespace squaremap::uniformize;
using laurent::NormalizedMap;

namespace {

OptimizerConfig quick(std::size_t evals = 1500, std::size_t restarts = 3) {
  OptimizerConfig c;
  c.max_evaluations = evals;
  c.restarts = restarts;
  return c;
}

bool traces_equal(const std::vector<TraceRow>& a, const std::vector<TraceRow>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& x = a[i];
    const auto& y = b[i];
    const bool defect_same =
        (std::isnan(x.max_defect) && std::isnan(y.max_defect)) || x.max_defect == y.max_defect;
    if (x.iter != y.iter || x.restart != y.restart || x.S != y.S || x.penalty != y.penalty ||
        x.feasible != y.feasible || !defect_same)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("config validation") {
  OptimizerConfig c;
  CHECK_NOTHROW(c.validate());
  c.objective_tolerance = 0.0;
  CHECK_THROWS_AS(c.validate(), SpecError);
  c = OptimizerConfig{};
  c.mesh = -1.0;
  CHECK_THROWS_AS(c.validate(), SpecError);
  c = OptimizerConfig{};
  c.penalty_weight = 0.0;
  CHECK_THROWS_AS(c.validate(), SpecError);
}

TEST_CASE("competitor family parametrization") {
  const geometry::Domain d({geometry::AxisSquare{{0, 0}, 1.0}, geometry::Point{{3, 0}},
                            geometry::VerticalSlit{{-3, 0}, 2.0}});
  const CompetitorFamily fam(d, 4);
  // Points carry no pole.
  CHECK(fam.dimension() == 2 * 4 * 2);
  CHECK(fam.order_of(0) == 1);
  CHECK(fam.order_of(7) == 4);
  CHECK(fam.order_of(8) == 1);

  std::vector<double> x(fam.dimension(), 0.0);
  CHECK(std::holds_alternative<laurent::IdentityMap>(fam.map(x).node().value));
  CHECK(fam.coefficient_norm_inf(x) == 0.0);

  x[2] = 1.0;   // Re c_2 of the square anchor
  x[9] = -1.0;  // Im c_1 of the slit anchor
  const auto poles = fam.poles(x);
  REQUIRE(poles.size() == 2);
  const auto rho = fam.scales();
  CHECK(rho[0] == 0.5);
  CHECK(rho[1] == 0.5);  // slit frame scale = length / 4
  CHECK(poles[0].coefficients[1] == Complex(std::pow(0.5, 3), 0));
  CHECK(poles[1].coefficients[0] == Complex(0, -std::pow(0.5, 2)));
  CHECK(poles[1].frame == laurent::PoleFrame::vertical_slit);
  CHECK(fam.coefficient_norm_inf(x) == 0.25);
}

TEST_CASE("identity recovery on a square domain") {
  const geometry::Domain d({geometry::AxisSquare{{0, 0}, 1.0}});
  const auto r = minimize_S(d, quick());
  CHECK(r.coefficient_norm_inf <= 1e-3);
  CHECK(r.objective <= 1e-6);
  CHECK(r.penalty_dominance);
  CHECK(r.converged);
  for (std::size_t k = 1; k < r.restart_coefficient_norms.size(); ++k)
    CHECK(r.restart_coefficient_norms[k] <= r.restart_coefficient_norms[k - 1]);
  CHECK(r.restart_coefficient_norms.back() <= quick().defect_tolerance);
}

TEST_CASE("restarts are deterministic for a fixed seed") {
  const geometry::Domain d({geometry::Disk{{0, 0}, 1.0}});
  const auto cfg = quick(400, 2);
  const auto a = minimize_S(d, cfg);
  const auto b = minimize_S(d, cfg);
  CHECK(traces_equal(a.trace, b.trace));
  CHECK(a.parameters == b.parameters);
  auto other = cfg;
  other.seed = 2;
  CHECK_FALSE(minimize_S(d, other).parameters == a.parameters);
}

TEST_CASE("the disk optimizer improves on the identity and keeps dominance") {
  const geometry::Domain d({geometry::Disk{{0, 0}, 1.0}});
  const auto r = minimize_S(d, quick(1500, 2));
  CHECK(r.objective < 4 - kPi);
  CHECK(r.report.injectivity.injective);
  CHECK(r.penalty_dominance);
  REQUIRE_FALSE(r.trace.empty());
  CHECK(r.trace.back().iter == r.trace.size());
  // The trace records raw objectives; every feasible row is at least the best.
  for (const auto& row : r.trace)
    if (row.feasible) CHECK(row.S >= r.objective);
  CHECK_FALSE(r.status.empty());
}

TEST_CASE("two disks: S drops below the identity value") {
  const geometry::Domain d({geometry::Disk{{-2.5, 0}, 1.0}, geometry::Disk{{2.5, 0}, 1.0}});
  auto cfg = quick(1500, 2);
  cfg.order = 4;
  const auto r = minimize_S(d, cfg);
  CHECK(r.objective < 2 * (4 - kPi));
  CHECK(r.square_defects.size() == 2);
}

TEST_CASE("slit domains: the identity minimizes L_0") {
  const geometry::Domain d({geometry::VerticalSlit{{0, 0}, 2.0}});
  const auto r = minimize_L(d, 0.0, quick());
  CHECK(std::abs(r.objective) <= 1e-9);
  CHECK(r.coefficient_norm_inf <= 1e-3);
}

TEST_CASE("L duality on the returned map") {
  const geometry::Domain d({geometry::Disk{{0, 0}, 1.0}});
  const auto r = minimize_L(d, kPi, quick(800, 2));
  CHECK(r.objective < 0.0);
  CHECK(functional::functional_L(r.map, 0.0) == doctest::Approx(-r.objective).epsilon(1e-8));
  CHECK(r.transverse_extents.size() == 1);
}

TEST_CASE("optimizer preconditions") {
  CHECK_THROWS_AS(minimize_S(geometry::Domain{}, quick()), PreconditionError);
  CHECK_THROWS_AS(minimize_S(geometry::Domain({geometry::Point{{0, 0}}}), quick()),
                  PreconditionError);
}

TEST_CASE("verify_extremal: amplitude 0 gives the identity every time") {
  const geometry::Domain d({geometry::AxisSquare{{0, 0}, 1.0}});
  const auto r = verify_extremal(d, 20, 0.0, 1);
  CHECK(r.samples == 20);
  CHECK(r.rejected == 0);
  for (double v : r.values) CHECK(v == 0.0);
  CHECK(r.violations == 0);
}

TEST_CASE("verify_extremal on a small run") {
  const geometry::Domain d({geometry::AxisSquare{{0, 0}, 1.0}});
  const auto r = verify_extremal(d, 40, 0.1, 3);
  CHECK(r.violations == 0);
  CHECK(r.min >= -1e-4);
  CHECK(r.correlation > 0.0);
  CHECK(r.values.size() == 40);
  CHECK(r.norms.size() == 40);
}

TEST_CASE("property suites reject the wrong domains and exhausting amplitudes") {
  const geometry::Domain disk({geometry::Disk{{0, 0}, 1.0}});
  CHECK_THROWS_AS(verify_extremal(disk, 10, 0.1, 1), PreconditionError);
  CHECK_THROWS_AS(slit_positivity(disk, 10, 0.1, 1), PreconditionError);
  const geometry::Domain close({geometry::AxisSquare{{0, 0}, 1.0}, geometry::AxisSquare{{1.05, 0}, 1.0}});
  CHECK_THROWS_AS(verify_extremal(close, 10, 50.0, 1), NumericError);
}

TEST_CASE("slit positivity with the composite competitor") {
  const geometry::Domain d({geometry::VerticalSlit{{0, 0}, 4.0}});
  const auto r = slit_positivity(d, 30, 0.1, 5);
  CHECK(r.violations == 0);
  REQUIRE(r.composite_a1.has_value());
  CHECK(std::abs(r.composite_a1->real() - 2.0) <= 1e-8);
  REQUIRE(r.composite_contour_a1.has_value());
  CHECK(std::abs(r.composite_contour_a1->real() - 2.0) <= 1e-8);

  const geometry::Domain other({geometry::VerticalSlit{{0, 0}, 1.0}});
  CHECK_FALSE(slit_positivity(other, 5, 0.1, 5).composite_a1.has_value());
}

TEST_CASE("pearson") {
  const std::vector<double> a{1, 2, 3, 4}, b{2, 4, 6, 8}, c{4, 3, 2, 1};
  CHECK(pearson(a, b) == doctest::Approx(1.0));
  CHECK(pearson(a, c) == doctest::Approx(-1.0));
}
