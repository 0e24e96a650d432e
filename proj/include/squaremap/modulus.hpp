#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "squaremap/functional.hpp"
#include "squaremap/geometry.hpp"
#include "squaremap/laurent.hpp"
#include "squaremap/parallel.hpp"

namespace squaremap::modulus {

/// The rectangle R = [-l, l] x [-r, r] with l = r^exponent.
struct RectangleProbe {
  double r = 100.0;
  double exponent = 2.0 / 3.0;
  /// Boundary sample spacing as a fraction of l.
  double grid_h = 1e-3;
  /// Number of vertical lines l_x sampled for the pointwise length check.
  std::size_t x_samples = 65;

  double l() const { return std::pow(r, exponent); }
  double l_over_r() const { return l() / r; }
  double r_over_l2() const { return r / (l() * l()); }
  double area() const { return 4.0 * l() * r; }

  /// Throws PreconditionError unless every component lies in the open rectangle.
  void require_contains(const geometry::Domain& domain) const;
};

struct ProbeOptions {
  double exponent = 2.0 / 3.0;
  /// Relative sample spacing on the probe boundary (fraction of l).
  double mesh = 1e-3;
  std::size_t min_per_side = 64;
  /// Absolute tolerance for the 2-D quadratures; split 50/25/25 between
  /// interior cells, cells touching a square and far-field cells.
  double area_tolerance = 1e-8;
  /// Absolute tolerance of each line integral.
  double line_tolerance = 1e-10;
  std::size_t x_samples = 65;
  Exec exec = Exec::parallel;

  RectangleProbe probe(double r) const { return {r, exponent, mesh, x_samples}; }
};

struct ProbeArea {
  double value = 0.0;
  /// value - 4lr, accumulated from f(z) - z so the large part cancels exactly.
  double minus_4lr = 0.0;
};

ProbeArea probe_image_area(const laurent::NormalizedMap& f, const geometry::Domain& domain,
                           const RectangleProbe& probe, const ProbeOptions& options = {});

/// Shoelace area enclosed by f(dR).
double area_of_probe_image(const laurent::NormalizedMap& f, const geometry::Domain& domain,
                           const RectangleProbe& probe, const ProbeOptions& options = {});

/// The transboundary metric: |f'| on the domain, V_j / l_j on square S_j,
/// and (by convention) zero weight on point components.
struct RhoMetric {
  laurent::NormalizedMap map;
  geometry::Domain domain;
  /// V_j of the image components, index-aligned with the domain.
  std::vector<double> V;

  /// Builds the metric, measuring V_j from the image at `mesh`. Throws
  /// PreconditionError unless the domain is a square domain.
  static RhoMetric build(const laurent::NormalizedMap& f, const geometry::Domain& domain,
                         double mesh);
  static RhoMetric build(const laurent::NormalizedMap& f, const geometry::Domain& domain,
                         std::vector<double> V);
};

struct AreaIntegral {
  /// Integral over R (for rho^2: the full value; 4lr is large, see below).
  double value = 0.0;
  /// value - 4lr, computed without cancellation.
  double minus_4lr = 0.0;
  double error = 0.0;
  std::size_t cells = 0;
  bool converged = true;
};

/// \int_R rho^2 = \int_{R cap Omega} |f'|^2 + sum_j V_j^2.
AreaIntegral integrate_rho_squared(const RhoMetric& metric, const RectangleProbe& probe,
                                   const ProbeOptions& options = {});

/// \int_{R cap Omega} |f'|^2, the area of f(R cap Omega).
AreaIntegral integrate_jacobian(const RhoMetric& metric, const RectangleProbe& probe,
                                const ProbeOptions& options = {});

/// \int_R (1 - rho)^2.
AreaIntegral integrate_one_minus_rho_squared(const RhoMetric& metric,
                                             const RectangleProbe& probe,
                                             const ProbeOptions& options = {});

struct LineIntegral {
  double x = 0.0;
  /// \int_{l_x} rho |dz|.
  double value = 0.0;
  /// value - 2r, without cancellation.
  double minus_2r = 0.0;
  /// |Im(f(x + ir) - f(x - ir))|.
  double lower_bound = 0.0;
  double lower_bound_minus_2r = 0.0;
};

LineIntegral line_integral(const RhoMetric& metric, const RectangleProbe& probe, double x,
                           const ProbeOptions& options = {});

struct CauchySchwarz {
  /// (1/2r) \int_{-l}^{l} (\int_{l_x} rho)^2 dx and the same minus 4lr.
  double bound = 0.0;
  double bound_minus_4lr = 0.0;
  /// Pointwise checks at the x_samples equispaced lines.
  std::vector<LineIntegral> samples;
  double line_min_minus_2r = 0.0;
  /// Smallest C >= 0 with value >= 2r - C / r at every sampled line.
  double fitted_C = 0.0;
  /// Every sampled line integral dominates its endpoint bound.
  bool endpoint_bound_holds = true;
};

CauchySchwarz cauchy_schwarz_bound(const RhoMetric& metric, const RectangleProbe& probe,
                                   const ProbeOptions& options = {});

struct ProbeReport {
  double r = 0.0, l = 0.0;
  double l_over_r = 0.0, r_over_l2 = 0.0;
  double A_of_r = 0.0;
  double A_minus_4lr = 0.0;
  double rho_sq_integral = 0.0;
  double rho_sq_minus_4lr = 0.0;
  /// Cauchy-Schwarz lower bound (1/2r) \int (\int rho)^2.
  double lower_bound = 0.0;
  double lower_bound_minus_4lr = 0.0;
  /// rho_sq_integral - lower_bound.
  double slack = 0.0;
  /// rho_sq_minus_4lr - S(f): the deviation from the central identity.
  double consistency_residual = 0.0;
  double line_integral_min_minus_2r = 0.0;
  double fitted_C = 0.0;
  double equality_probe_value = 0.0;
  double quadrature_error = 0.0;
};

struct SandwichResult {
  std::vector<ProbeReport> probes;
  double S_functional = 0.0;
  Complex a1;
  /// Log-log slopes of |A - 4lr - 2 pi Re a1| and |consistency_residual| in r.
  double fitted_exponent_area = 0.0;
  double fitted_exponent_consistency = 0.0;
  /// Largest negative slack seen (0 if none).
  double worst_slack = 0.0;
  double slack_tolerance = 0.0;
};

/// Both sides of the modulus sandwich for every r. Requires a square domain
/// and an injective map; throws PreconditionError otherwise.
SandwichResult sandwich_check(const laurent::NormalizedMap& f, const geometry::Domain& domain,
                              std::span<const double> r_schedule, double mesh,
                              const ProbeOptions& options = {});

/// \int_R (1 - rho)^2 for every r.
std::vector<double> equality_probe(const laurent::NormalizedMap& f,
                                   const geometry::Domain& domain,
                                   std::span<const double> r_schedule, double mesh,
                                   const ProbeOptions& options = {});

struct AreaRow {
  double r = 0.0, l = 0.0;
  double A = 0.0;
  double A_minus_4lr = 0.0;
  /// A - 4lr - 2 pi Re a1.
  double residual = 0.0;
};

struct AreaAsymptotics {
  Complex a1;
  double limit = 0.0;  // 2 pi Re a1
  std::vector<AreaRow> rows;
  double fitted_exponent = 0.0;
};

AreaAsymptotics area_asymptotics(const laurent::NormalizedMap& f,
                                 const geometry::Domain& domain,
                                 std::span<const double> r_schedule,
                                 const ProbeOptions& options = {});

/// Least-squares slope of log|y| against log x (NaN when fewer than two
/// usable points).
double fit_loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace squaremap::modulus
