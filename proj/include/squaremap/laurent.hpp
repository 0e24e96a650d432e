#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "squaremap/core.hpp"
#include "squaremap/geometry.hpp"

namespace squaremap::laurent {

/// Local coordinate a pole's Laurent terms are written in.
///  - plain: zeta = z - p.
///  - vertical_slit / horizontal_slit: zeta = J^{-1}(z - p), where J is the
///    Joukowski map zeta -+ s^2/zeta of |zeta| > s onto the complement of a
///    slit of half-length 2s through p. This keeps terms analytic off a slit
///    that passes through the anchor.
enum class PoleFrame { plain, vertical_slit, horizontal_slit };

struct Pole {
  Complex location;
  /// c_1..c_M: the term is sum_m c_m / zeta^m.
  std::vector<Complex> coefficients;
  PoleFrame frame = PoleFrame::plain;
  /// Joukowski scale s of the slit frame (unused for plain poles).
  double frame_scale = 0.0;
};

/// axis: f' = (1 + z^-4)^{1/2}, image is an axis-parallel square.
/// diagonal: f' = (1 - z^-4)^{1/2}, same square turned by 45 degrees.
enum class SquareOrientation { axis, diagonal };

struct MapNode;

/// A conformal map normalized at infinity, f(z) = z + a1/z + ...
/// Immutable value type; copies share the underlying expression tree.
class NormalizedMap {
 public:
  NormalizedMap();  // identity

  static NormalizedMap identity();
  static NormalizedMap multipole(std::vector<Pole> poles);
  /// z + sign * scale^2 / (z - center); sign +1 flattens |z - c| = s onto a
  /// horizontal slit, sign -1 onto a vertical slit.
  static NormalizedMap joukowski(int sign, double scale, Complex center);
  static NormalizedMap exterior_square(SquareOrientation o = SquareOrientation::axis);
  static NormalizedMap composition(NormalizedMap outer, NormalizedMap inner);
  static NormalizedMap inverse(NormalizedMap forward);

  const MapNode& node() const { return *node_; }
  std::string describe() const;

 private:
  explicit NormalizedMap(std::shared_ptr<const MapNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const MapNode> node_;
};

struct IdentityMap {};
struct MultipoleMap {
  std::vector<Pole> poles;
};
struct JoukowskiMap {
  int sign = 1;
  double scale = 1.0;
  Complex center;
};
struct ExteriorSquareMap {
  SquareOrientation orientation = SquareOrientation::axis;
};
struct CompositionMap {
  NormalizedMap outer;
  NormalizedMap inner;
};
struct InverseMap {
  NormalizedMap forward;
};

struct MapNode {
  std::variant<IdentityMap, MultipoleMap, JoukowskiMap, ExteriorSquareMap,
               CompositionMap, InverseMap>
      value;
};

struct EvalOptions {
  /// Evaluation within this distance of a pole is refused.
  double guard_radius = 1e-9;
};

Complex evaluate(const NormalizedMap& f, Complex z, const EvalOptions& opt = {});

/// f(z) - z, evaluated from the representation without forming f(z) first,
/// so it keeps full relative accuracy far from the poles.
Complex evaluate_tail(const NormalizedMap& f, Complex z, const EvalOptions& opt = {});

/// Analytic derivative (chain rule for compositions, 1/f'(f^{-1}) for inverses).
Complex derivative(const NormalizedMap& f, Complex z, const EvalOptions& opt = {});

struct Coefficient {
  Complex a1;
  double alpha() const { return a1.real(); }
  double beta() const { return a1.imag(); }
};

/// Read off a1 from the representation: sum of first-order pole coefficients,
/// sums over compositions, negation for inverses.
Coefficient coefficient_a1(const NormalizedMap& f);

/// (1/2 pi i) \oint_{|z|=radius} (f(z) - z) dz by the trapezoid rule.
Complex contour_a1(const NormalizedMap& f, double radius, std::size_t nodes = 512);

/// Radius of a disk about 0 outside of which f is analytic and the Laurent
/// tail converges (conservative).
double singular_radius(const NormalizedMap& f);

struct QuadratureA1 {
  Complex value;
  double radius;
  /// |value(2R) - value(R)| at the accepted radius.
  double doubling_change;
};

/// Contour-quadrature a1 with radius doubling until two successive radii
/// agree within `tolerance`; throws NumericError after `max_doublings`.
QuadratureA1 contour_a1_converged(const NormalizedMap& f, double tolerance = 1e-10,
                                  int max_doublings = 8);

/// Analytic a1 cross-checked against the contour value; throws NumericError
/// if they disagree by more than `tolerance`.
Coefficient coefficient_a1_checked(const NormalizedMap& f, double tolerance = 1e-9);

struct InvertOptions {
  int max_iterations = 50;
  double derivative_guard = 1e-12;
  EvalOptions eval{};
};

/// Newton solve of f(z) = w with |f(z) - w| <= tolerance. The seed is w
/// (near-identity at infinity) unless the representation offers a better
/// one: the closed-form Joukowski branch, or stage-wise inversion of a
/// composition. Throws NumericError on non-convergence.
Complex invert(const NormalizedMap& f, Complex w, double tolerance = 1e-13,
               const InvertOptions& opt = {});

/// Composition outer(inner(z)), after checking on boundary samples of
/// `inner_domain` that inner maps them outside every component of
/// `outer_domain`. Throws PreconditionError on a containment failure.
NormalizedMap compose_checked(const NormalizedMap& outer, const NormalizedMap& inner,
                              const geometry::Domain& inner_domain,
                              const geometry::Domain& outer_domain, double mesh);

/// Closed-form inverse branch of zeta + sigma s^2 / zeta, valid off the slit.
Complex joukowski_inverse_branch(Complex v, int sign, double scale);

}  // namespace squaremap::laurent
