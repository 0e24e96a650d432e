#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "squaremap/geometry.hpp"
#include "squaremap/laurent.hpp"
#include "squaremap/parallel.hpp"

namespace squaremap::functional {

/// Slits parallel to l_alpha = { i e^{i alpha/2} t }; alpha = 0 is vertical.
struct SlitSpec {
  double alpha = 0.0;
  Complex direction() const { return Complex(0, 1) * std::polar(1.0, 0.5 * alpha); }
  /// Unit normal to the slit direction.
  Complex transverse() const { return direction() * Complex(0, -1); }
};

struct ImageOptions {
  /// Hausdorff-to-best-square fit; the most expensive diagnostic.
  bool compute_defect = true;
  std::size_t min_samples = 64;
  Exec exec = Exec::parallel;
};

struct ImageComponent {
  std::size_t j = 0;  // 0-based index into the domain
  geometry::BoundaryCurve curve;
  double A = 0.0;
  double V = 0.0;
  double H = 0.0;
  double square_defect = 0.0;
  /// Signed shoelace area before taking the absolute value.
  double signed_area = 0.0;
  /// Source slit length (0 unless the source component is a slit).
  double slit_length = 0.0;
};

/// Source samples of every component, reusable across many maps.
struct BoundarySources {
  double mesh = 0.0;
  std::size_t min_samples = 0;
  std::vector<geometry::BoundaryCurve> curves;
  /// Offset evaluation points (see geometry::evaluation_points).
  std::vector<std::vector<Complex>> points;
  std::vector<double> slit_lengths;
};

BoundarySources prepare_sources(const geometry::Domain& domain, double mesh,
                                std::size_t min_samples = 64);

/// Image of every boundary component. Identity maps report exact source data.
std::vector<ImageComponent> image_components(const laurent::NormalizedMap& f,
                                             const geometry::Domain& domain, double mesh,
                                             const ImageOptions& options = {});
std::vector<ImageComponent> image_components(const laurent::NormalizedMap& f,
                                             const geometry::Domain& domain,
                                             const BoundarySources& sources,
                                             const ImageOptions& options = {});

/// Best-fit axis square of a closed curve.
struct SquareFit {
  Complex center;
  double side = 0.0;
  double defect = 0.0;  // symmetric Hausdorff distance
};

/// Minimizes the Hausdorff distance to an axis square over (center, side):
/// seeded at (centroid, (H + V) / 2), refined by coordinate descent.
SquareFit best_square(std::span<const Complex> curve, double tolerance = 1e-9);

struct InjectivityReport {
  bool injective = true;
  std::size_t self_intersections = 0;
  std::size_t cross_intersections = 0;
  std::size_t orientation_failures = 0;
  /// Length of image curves lying inside another image curve.
  double nested_length = 0.0;
  /// First violated condition, empty when injective.
  std::string diagnostic;

  /// Violation measure used as the optimizer penalty base.
  double violation() const {
    return static_cast<double>(self_intersections + cross_intersections +
                               orientation_failures) +
           nested_length;
  }
};

struct InjectivityOptions {
  /// Image spacing may exceed the source spacing by at most this factor
  /// before the mesh is declared too coarse.
  double max_stretch = 50.0;
  std::size_t intersection_cap = 100000;
};

/// Checks (a) simplicity, (b) pairwise disjointness and non-nesting and (c)
/// positive orientation (winding once about its interior) of image curves.
/// Throws MeshTooCoarseError when adjacent image samples are too far apart.
InjectivityReport assess_injectivity(std::span<const ImageComponent> images,
                                     const InjectivityOptions& options = {});

InjectivityReport check_injectivity(const laurent::NormalizedMap& f,
                                    const geometry::Domain& domain, double mesh,
                                    const InjectivityOptions& options = {});

struct FunctionalReport {
  laurent::Coefficient a1;
  std::vector<ImageComponent> components;
  double S = 0.0;
  std::vector<std::pair<double, double>> L_values;  // (alpha, L_alpha)
  InjectivityReport injectivity;
};

/// 2 pi Re(a1) + sum_j (V_j^2 - A_j) folded in index order.
double assemble_S(Complex a1, std::span<const ImageComponent> components);

FunctionalReport functional_S(const laurent::NormalizedMap& f, const geometry::Domain& domain,
                              double mesh, std::span<const double> alphas = {},
                              const ImageOptions& options = {});

/// Re(e^{i alpha} a1), alpha reduced mod 2 pi.
double functional_L(const laurent::NormalizedMap& f, double alpha);
double functional_L(Complex a1, double alpha);

/// S(identity) = sum_j (V_j^2 - A_j) from the exact source descriptors.
double identity_S_exact(const geometry::Domain& domain);

}  // namespace squaremap::functional
