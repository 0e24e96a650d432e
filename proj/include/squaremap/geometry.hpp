#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "squaremap/core.hpp"

namespace squaremap::geometry {

// ---------------------------------------------------------------------------
// Compact complementary components. Each is an exact shape descriptor; only
// image quantities are ever discretized.

struct Point {
  Complex location;
};

struct Disk {
  Complex center;
  double radius = 1.0;
};

struct AxisSquare {
  Complex center;
  double side = 1.0;
};

struct AxisRectangle {
  Complex center;
  double width = 1.0;
  double height = 1.0;
};

struct VerticalSlit {
  Complex center;
  double length = 1.0;
};

struct HorizontalSlit {
  Complex center;
  double length = 1.0;
};

/// Simple closed polygon; vertex order is free, orientation is normalized
/// when discretized.
struct Polygon {
  std::vector<Complex> vertices;
};

using Component = std::variant<Point, Disk, AxisSquare, AxisRectangle,
                               VerticalSlit, HorizontalSlit, Polygon>;

struct Box {
  double xmin, xmax, ymin, ymax;
  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  Complex center() const { return {0.5 * (xmin + xmax), 0.5 * (ymin + ymax)}; }
};

std::string shape_name(const Component& c);

/// Throws GeometryError when a descriptor violates its invariants
/// (negative sizes, polygons with < 3 vertices or self-intersections).
void validate(const Component& c);

/// Zero-size squares, rectangles and slits are points; the test is exact.
bool is_point_like(const Component& c);
bool is_square_like(const Component& c);
bool is_vertical_slit_like(const Component& c);

Box bounding_box(const Component& c);
Complex centroid(const Component& c);

/// Radius of the smallest disk about `centroid(c)` containing the component.
double circumradius(const Component& c);

/// Exact source-side measures.
double exact_area(const Component& c);
double exact_vertical_variation(const Component& c);
double exact_horizontal_variation(const Component& c);

/// Side length l_j of a square-like component (0 for points).
std::optional<double> square_side(const Component& c);

/// Closed-set membership.
bool contains(const Component& c, Complex z);

/// Euclidean distance between two components regarded as closed sets
/// (0 when they intersect or one contains the other).
double distance(const Component& a, const Component& b);

// ---------------------------------------------------------------------------

/// A finitely connected domain, given by its compact complementary
/// components. n = 0 is the whole sphere.
class Domain {
 public:
  Domain() = default;
  /// Validates every component and pairwise disjointness of closures;
  /// throws GeometryError naming the offending (1-based) indices.
  explicit Domain(std::vector<Component> components);

  std::span<const Component> components() const { return components_; }
  std::size_t size() const { return components_.size(); }
  bool empty() const { return components_.empty(); }
  const Component& operator[](std::size_t j) const { return components_[j]; }

  /// Every component is an axis square or a point.
  bool is_square_domain() const;
  /// Every component is a vertical slit or a point.
  bool is_vertical_slit_domain() const;

  /// Bounding box of all components; nullopt when n = 0.
  std::optional<Box> bounding_box() const;

 private:
  std::vector<Component> components_;
};

// ---------------------------------------------------------------------------

enum class Orientation { positive, negative };

/// Sentinel parent index for the boundary of a probe rectangle.
inline constexpr int kProbeParent = -1;

struct BoundaryCurve {
  /// Closed: the last sample connects back to the first.
  std::vector<Complex> samples;
  Orientation orientation = Orientation::positive;
  int parent_index = kProbeParent;
  /// Declared bound on consecutive source-sample spacing.
  double mesh = 0.0;
  /// For two-sided (slit) curves: outward unit normal per sample, telling
  /// which side of the slit the sample sits on. Empty otherwise.
  std::vector<Complex> side_normals;

  bool is_point() const { return samples.size() == 1; }
  bool is_two_sided() const { return !side_normals.empty(); }
};

/// Positively oriented sampling of the component boundary with arc-length
/// spacing <= 1/samples_per_unit. Corners of polygonal shapes are always
/// samples, so extremal coordinates are exact.
BoundaryCurve discretize_boundary(const Component& c, double samples_per_unit,
                                  std::size_t min_samples, int parent_index = 0);

/// Relative outward offset applied by evaluation_points.
inline constexpr double kSideNudge = 1e-9;

/// Points at which a map is evaluated to trace the image of `curve`: every
/// sample pushed by kSideNudge * scale along its outward normal (the side
/// normal for slits). Images of slits then stay thin simple loops instead of
/// a doubly traced segment, and branch-cut maps see the correct side.
/// Single-sample (point) curves are returned unchanged.
std::vector<Complex> evaluation_points(const BoundaryCurve& curve);

/// Boundary of the axis rectangle [-half_width, half_width] x
/// [-half_height, half_height], counterclockwise from the lower-right corner,
/// spacing <= `spacing` with at least `min_per_side` segments per side.
BoundaryCurve rectangle_boundary(double half_width, double half_height,
                                 double spacing, std::size_t min_per_side);

double vertical_variation(std::span<const Complex> samples);
double horizontal_variation(std::span<const Complex> samples);
inline double vertical_variation(const BoundaryCurve& c) {
  return vertical_variation(c.samples);
}
inline double horizontal_variation(const BoundaryCurve& c) {
  return horizontal_variation(c.samples);
}

/// Extent of the samples along the unit direction `normal`.
double extent_along(std::span<const Complex> samples, Complex normal);

/// Signed shoelace sum (1/2) sum (x_k y_{k+1} - x_{k+1} y_k), compensated.
double signed_area(std::span<const Complex> samples);

/// |signed area|. Throws GeometryError when a non-degenerate curve is found
/// to self-intersect.
double enclosed_area(const BoundaryCurve& curve);

double polyline_length(std::span<const Complex> samples, bool closed = true);

/// Area centroid of a closed polygon (falls back to the vertex mean for
/// degenerate polygons).
Complex polygon_centroid(std::span<const Complex> samples);

/// Winding number of the closed polyline about z (z not on the polyline).
int winding_number(std::span<const Complex> samples, Complex z);

double point_segment_distance(Complex p, Complex a, Complex b);
bool segments_intersect(Complex a, Complex b, Complex c, Complex d);
double segment_segment_distance(Complex a, Complex b, Complex c, Complex d);

double max_adjacent_spacing(std::span<const Complex> samples);

// ---------------------------------------------------------------------------

/// Uniform-grid index over the segments of one or more closed polylines;
/// used for intersection sweeps and nearest-distance queries.
class SegmentIndex {
 public:
  struct SegmentRef {
    std::size_t curve;
    std::size_t index;  // segment index = index of its first vertex
  };

  /// `cell_size` <= 0 picks twice the mean segment length, which suits
  /// intersection sweeps; distance queries from far away prefer coarser cells.
  explicit SegmentIndex(std::vector<std::span<const Complex>> curves, double cell_size = 0.0);

  /// Number of intersecting non-adjacent segment pairs within one curve.
  /// Counting stops at `cap`.
  std::size_t self_intersections(std::size_t curve,
                                 std::size_t cap = 1'000'000) const;
  /// Number of intersecting segment pairs between two distinct curves.
  std::size_t cross_intersections(std::size_t a, std::size_t b,
                                  std::size_t cap = 1'000'000) const;
  /// Distance from z to the nearest segment of `curve`.
  double distance_to_curve(std::size_t curve, Complex z) const;

  std::span<const Complex> curve(std::size_t i) const { return curves_[i]; }

 private:
  std::pair<Complex, Complex> segment(const SegmentRef& s) const;
  std::size_t cell_of(double x, double y) const;
  void cell_range(Complex a, Complex b, long& i0, long& i1, long& j0,
                  long& j1) const;

  std::vector<std::span<const Complex>> curves_;
  // Occupied cells: cell_ids_[g] owns refs_[offsets_[g] .. offsets_[g + 1]).
  std::vector<std::size_t> cell_ids_;
  std::vector<std::size_t> offsets_;
  std::vector<SegmentRef> refs_;
  std::vector<std::pair<long, long>> lower_;
  Box box_{};
  double cell_size_ = 1.0;
  long nx_ = 1, ny_ = 1;
};

/// Symmetric Hausdorff distance between two closed polylines.
double hausdorff_distance(std::span<const Complex> a,
                          std::span<const Complex> b);

/// Axis-aligned square boundary samples, counterclockwise.
std::vector<Complex> square_outline(Complex center, double side,
                                    std::size_t per_side);

}  // namespace squaremap::geometry
