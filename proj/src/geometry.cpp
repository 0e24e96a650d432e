#include "squaremap/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "squaremap/quadrature.hpp"

namespace squaremap::geometry {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double cross(Complex a, Complex b) {
  return a.real() * b.imag() - a.imag() * b.real();
}

// Orientation of c relative to the directed line a->b: +1 left, -1 right.
int orientation(Complex a, Complex b, Complex c) {
  const double v = cross(b - a, c - a);
  if (v > 0) return 1;
  if (v < 0) return -1;
  return 0;
}

bool on_segment(Complex a, Complex b, Complex p) {
  return std::min(a.real(), b.real()) <= p.real() &&
         p.real() <= std::max(a.real(), b.real()) &&
         std::min(a.imag(), b.imag()) <= p.imag() &&
         p.imag() <= std::max(a.imag(), b.imag());
}

bool finite(Complex z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

// Corners of an axis rectangle, counterclockwise from the lower-left.
std::vector<Complex> rect_corners(Complex c, double w, double h) {
  const double hw = 0.5 * w, hh = 0.5 * h;
  return {c + Complex(-hw, -hh), c + Complex(hw, -hh), c + Complex(hw, hh),
          c + Complex(-hw, hh)};
}

// Closed-set region used for exact distance computations: a disk, or a
// polygon given by 1 (point), 2 (segment) or >= 3 (filled) vertices.
struct Region {
  bool disk = false;
  Complex center;
  double radius = 0.0;
  std::vector<Complex> poly;
};

Region region_of(const Component& c) {
  return std::visit(
      overloaded{
          [](const Point& p) { return Region{false, {}, 0.0, {p.location}}; },
          [](const Disk& d) { return Region{true, d.center, d.radius, {}}; },
          [](const AxisSquare& s) {
            if (s.side == 0.0) return Region{false, {}, 0.0, {s.center}};
            return Region{false, {}, 0.0, rect_corners(s.center, s.side, s.side)};
          },
          [](const AxisRectangle& r) {
            const double hw = 0.5 * r.width, hh = 0.5 * r.height;
            if (r.width == 0.0 && r.height == 0.0)
              return Region{false, {}, 0.0, {r.center}};
            if (r.width == 0.0)
              return Region{false, {}, 0.0,
                            {r.center - Complex(0, hh), r.center + Complex(0, hh)}};
            if (r.height == 0.0)
              return Region{false, {}, 0.0, {r.center - hw, r.center + hw}};
            return Region{false, {}, 0.0, rect_corners(r.center, r.width, r.height)};
          },
          [](const VerticalSlit& s) {
            const Complex h(0, 0.5 * s.length);
            if (s.length == 0.0) return Region{false, {}, 0.0, {s.center}};
            return Region{false, {}, 0.0, {s.center - h, s.center + h}};
          },
          [](const HorizontalSlit& s) {
            const double h = 0.5 * s.length;
            if (s.length == 0.0) return Region{false, {}, 0.0, {s.center}};
            return Region{false, {}, 0.0, {s.center - h, s.center + h}};
          },
          [](const Polygon& p) { return Region{false, {}, 0.0, p.vertices}; },
      },
      c);
}

bool in_polygon(std::span<const Complex> poly, Complex z) {
  for (std::size_t i = 0; i < poly.size(); ++i) {
    if (point_segment_distance(z, poly[i], poly[(i + 1) % poly.size()]) == 0.0)
      return true;
  }
  return winding_number(poly, z) != 0;
}

double point_region_distance(Complex z, const Region& r) {
  if (r.disk) return std::max(0.0, std::abs(z - r.center) - r.radius);
  if (r.poly.size() == 1) return std::abs(z - r.poly[0]);
  if (r.poly.size() == 2) return point_segment_distance(z, r.poly[0], r.poly[1]);
  if (in_polygon(r.poly, z)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < r.poly.size(); ++i)
    best = std::min(best, point_segment_distance(z, r.poly[i],
                                                 r.poly[(i + 1) % r.poly.size()]));
  return best;
}

std::vector<std::pair<Complex, Complex>> edges_of(const Region& r) {
  std::vector<std::pair<Complex, Complex>> e;
  if (r.poly.size() == 1) {
    e.emplace_back(r.poly[0], r.poly[0]);
  } else if (r.poly.size() == 2) {
    e.emplace_back(r.poly[0], r.poly[1]);
  } else {
    for (std::size_t i = 0; i < r.poly.size(); ++i)
      e.emplace_back(r.poly[i], r.poly[(i + 1) % r.poly.size()]);
  }
  return e;
}

double region_distance(const Region& a, const Region& b) {
  if (a.disk && b.disk)
    return std::max(0.0, std::abs(a.center - b.center) - a.radius - b.radius);
  if (a.disk) return std::max(0.0, point_region_distance(a.center, b) - a.radius);
  if (b.disk) return std::max(0.0, point_region_distance(b.center, a) - b.radius);
  if (a.poly.size() >= 3 && in_polygon(a.poly, b.poly[0])) return 0.0;
  if (b.poly.size() >= 3 && in_polygon(b.poly, a.poly[0])) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [p, q] : edges_of(a))
    for (const auto& [s, t] : edges_of(b))
      best = std::min(best, segment_segment_distance(p, q, s, t));
  return best;
}

bool polygon_is_simple(std::span<const Complex> v) {
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]))
        return false;
    }
  }
  return true;
}

void append_edge(std::vector<Complex>& out, Complex a, Complex b,
                 double samples_per_unit) {
  const auto k = static_cast<std::size_t>(
      std::max(1.0, std::ceil(std::abs(b - a) * samples_per_unit)));
  for (std::size_t t = 0; t < k; ++t)
    out.push_back(a + (b - a) * (static_cast<double>(t) / static_cast<double>(k)));
}

std::vector<Complex> sample_polygon(std::span<const Complex> corners,
                                    double samples_per_unit,
                                    std::size_t min_samples) {
  double perimeter = polyline_length(corners, true);
  double spu = samples_per_unit;
  // Raise density until the total reaches min_samples.
  if (perimeter * spu < static_cast<double>(min_samples))
    spu = static_cast<double>(min_samples) / perimeter;
  std::vector<Complex> out;
  for (std::size_t i = 0; i < corners.size(); ++i)
    append_edge(out, corners[i], corners[(i + 1) % corners.size()], spu);
  return out;
}

BoundaryCurve two_sided(Complex from, Complex to, double samples_per_unit,
                        std::size_t min_samples, int parent) {
  // The first pass runs along the side whose outward normal is the
  // direction rotated clockwise; that keeps the thin curve counterclockwise.
  const Complex dir = (to - from) / std::abs(to - from);
  const Complex first_side = dir * Complex(0, -1);
  const double len = std::abs(to - from);
  const auto k = static_cast<std::size_t>(std::max(
      {1.0, std::ceil(len * samples_per_unit),
       std::ceil(0.5 * static_cast<double>(min_samples))}));
  BoundaryCurve curve;
  curve.parent_index = parent;
  curve.mesh = len / static_cast<double>(k);
  for (std::size_t i = 0; i <= k; ++i) {
    curve.samples.push_back(from + (to - from) * (static_cast<double>(i) /
                                                  static_cast<double>(k)));
    curve.side_normals.push_back(i == 0 ? -dir : (i == k ? dir : first_side));
  }
  for (std::size_t i = 1; i < k; ++i) {
    curve.samples.push_back(to + (from - to) * (static_cast<double>(i) /
                                                static_cast<double>(k)));
    curve.side_normals.push_back(-first_side);
  }
  return curve;
}

}  // namespace

std::string shape_name(const Component& c) {
  return std::visit(overloaded{
                        [](const Point&) { return std::string("point"); },
                        [](const Disk&) { return std::string("disk"); },
                        [](const AxisSquare&) { return std::string("axis_square"); },
                        [](const AxisRectangle&) { return std::string("axis_rectangle"); },
                        [](const VerticalSlit&) { return std::string("vertical_slit"); },
                        [](const HorizontalSlit&) { return std::string("horizontal_slit"); },
                        [](const Polygon&) { return std::string("polygon"); },
                    },
                    c);
}

void validate(const Component& c) {
  auto require = [&](bool ok, const std::string& msg) {
    if (!ok) throw GeometryError(shape_name(c) + ": " + msg);
  };
  std::visit(
      overloaded{
          [&](const Point& p) { require(finite(p.location), "non-finite location"); },
          [&](const Disk& d) {
            require(finite(d.center), "non-finite center");
            require(std::isfinite(d.radius) && d.radius > 0.0, "radius must be positive");
          },
          [&](const AxisSquare& s) {
            require(finite(s.center), "non-finite center");
            require(std::isfinite(s.side) && s.side >= 0.0, "side must be nonnegative");
          },
          [&](const AxisRectangle& r) {
            require(finite(r.center), "non-finite center");
            require(std::isfinite(r.width) && r.width >= 0.0 &&
                        std::isfinite(r.height) && r.height >= 0.0,
                    "width and height must be nonnegative");
          },
          [&](const VerticalSlit& s) {
            require(finite(s.center), "non-finite center");
            require(std::isfinite(s.length) && s.length >= 0.0, "length must be nonnegative");
          },
          [&](const HorizontalSlit& s) {
            require(finite(s.center), "non-finite center");
            require(std::isfinite(s.length) && s.length >= 0.0, "length must be nonnegative");
          },
          [&](const Polygon& p) {
            require(p.vertices.size() >= 3, "needs at least 3 vertices");
            for (Complex v : p.vertices) require(finite(v), "non-finite vertex");
            require(polygon_is_simple(p.vertices), "vertex list self-intersects");
            require(signed_area(p.vertices) != 0.0, "zero enclosed area");
          },
      },
      c);
}

bool is_point_like(const Component& c) {
  return std::visit(overloaded{
                        [](const Point&) { return true; },
                        [](const Disk&) { return false; },
                        [](const AxisSquare& s) { return s.side == 0.0; },
                        [](const AxisRectangle& r) { return r.width == 0.0 && r.height == 0.0; },
                        [](const VerticalSlit& s) { return s.length == 0.0; },
                        [](const HorizontalSlit& s) { return s.length == 0.0; },
                        [](const Polygon&) { return false; },
                    },
                    c);
}

bool is_square_like(const Component& c) {
  if (is_point_like(c)) return true;
  if (std::holds_alternative<AxisSquare>(c)) return true;
  if (const auto* r = std::get_if<AxisRectangle>(&c)) return r->width == r->height;
  return false;
}

bool is_vertical_slit_like(const Component& c) {
  if (is_point_like(c)) return true;
  if (std::holds_alternative<VerticalSlit>(c)) return true;
  if (const auto* r = std::get_if<AxisRectangle>(&c)) return r->width == 0.0;
  return false;
}

Box bounding_box(const Component& c) {
  const Region r = region_of(c);
  if (r.disk)
    return {r.center.real() - r.radius, r.center.real() + r.radius,
            r.center.imag() - r.radius, r.center.imag() + r.radius};
  Box b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
        std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (Complex v : r.poly) {
    b.xmin = std::min(b.xmin, v.real());
    b.xmax = std::max(b.xmax, v.real());
    b.ymin = std::min(b.ymin, v.imag());
    b.ymax = std::max(b.ymax, v.imag());
  }
  return b;
}

Complex centroid(const Component& c) {
  if (const auto* p = std::get_if<Polygon>(&c)) return polygon_centroid(p->vertices);
  return bounding_box(c).center();
}

double circumradius(const Component& c) {
  const Region r = region_of(c);
  if (r.disk) return r.radius;
  const Complex m = centroid(c);
  double best = 0.0;
  for (Complex v : r.poly) best = std::max(best, std::abs(v - m));
  return best;
}

double exact_area(const Component& c) {
  return std::visit(overloaded{
                        [](const Point&) { return 0.0; },
                        [](const Disk& d) { return kPi * d.radius * d.radius; },
                        [](const AxisSquare& s) { return s.side * s.side; },
                        [](const AxisRectangle& r) { return r.width * r.height; },
                        [](const VerticalSlit&) { return 0.0; },
                        [](const HorizontalSlit&) { return 0.0; },
                        [](const Polygon& p) { return std::abs(signed_area(p.vertices)); },
                    },
                    c);
}

double exact_vertical_variation(const Component& c) {
  return bounding_box(c).height();
}

double exact_horizontal_variation(const Component& c) {
  return bounding_box(c).width();
}

std::optional<double> square_side(const Component& c) {
  if (!is_square_like(c)) return std::nullopt;
  if (is_point_like(c)) return 0.0;
  return bounding_box(c).width();
}

bool contains(const Component& c, Complex z) {
  return point_region_distance(z, region_of(c)) == 0.0;
}

double distance(const Component& a, const Component& b) {
  return region_distance(region_of(a), region_of(b));
}

// ---------------------------------------------------------------------------

Domain::Domain(std::vector<Component> components)
    : components_(std::move(components)) {
  for (std::size_t j = 0; j < components_.size(); ++j) {
    try {
      validate(components_[j]);
    } catch (const GeometryError& e) {
      throw GeometryError("component " + std::to_string(j + 1) + ": " + e.what());
    }
  }
  std::vector<Box> boxes;
  for (const auto& c : components_) boxes.push_back(geometry::bounding_box(c));
  for (std::size_t i = 0; i < components_.size(); ++i) {
    for (std::size_t j = i + 1; j < components_.size(); ++j) {
      const Box& a = boxes[i];
      const Box& b = boxes[j];
      const bool apart = a.xmax < b.xmin || b.xmax < a.xmin || a.ymax < b.ymin ||
                         b.ymax < a.ymin;
      if (apart) continue;
      if (geometry::distance(components_[i], components_[j]) <= 0.0) {
        std::ostringstream msg;
        msg << "components " << i + 1 << " and " << j + 1
            << " overlap or touch (closures must be disjoint)";
        throw GeometryError(msg.str());
      }
    }
  }
}

bool Domain::is_square_domain() const {
  return std::all_of(components_.begin(), components_.end(), is_square_like);
}

bool Domain::is_vertical_slit_domain() const {
  return std::all_of(components_.begin(), components_.end(), is_vertical_slit_like);
}

std::optional<Box> Domain::bounding_box() const {
  if (components_.empty()) return std::nullopt;
  Box b = geometry::bounding_box(components_.front());
  for (const auto& c : components_) {
    const Box x = geometry::bounding_box(c);
    b.xmin = std::min(b.xmin, x.xmin);
    b.xmax = std::max(b.xmax, x.xmax);
    b.ymin = std::min(b.ymin, x.ymin);
    b.ymax = std::max(b.ymax, x.ymax);
  }
  return b;
}

// ---------------------------------------------------------------------------

BoundaryCurve discretize_boundary(const Component& c, double samples_per_unit,
                                  std::size_t min_samples, int parent_index) {
  if (!(samples_per_unit > 0.0)) throw GeometryError("samples_per_unit must be positive");
  validate(c);
  min_samples = std::max<std::size_t>(min_samples, 3);
  BoundaryCurve curve;
  curve.parent_index = parent_index;
  curve.mesh = 1.0 / samples_per_unit;

  if (is_point_like(c)) {
    curve.samples = {centroid(c)};
    curve.mesh = 0.0;
    return curve;
  }
  if (const auto* d = std::get_if<Disk>(&c)) {
    const auto n = std::max<std::size_t>(
        min_samples,
        static_cast<std::size_t>(std::ceil(kTwoPi * d->radius * samples_per_unit)));
    curve.samples.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double t = kTwoPi * static_cast<double>(k) / static_cast<double>(n);
      curve.samples.push_back(d->center + d->radius * Complex(std::cos(t), std::sin(t)));
    }
    curve.mesh = kTwoPi * d->radius / static_cast<double>(n);
    return curve;
  }
  if (is_vertical_slit_like(c)) {
    const Box b = bounding_box(c);
    const double x = b.center().real();
    auto out = two_sided({x, b.ymin}, {x, b.ymax}, samples_per_unit, min_samples,
                         parent_index);
    return out;
  }
  const bool horizontal_slit =
      std::holds_alternative<HorizontalSlit>(c) ||
      (std::holds_alternative<AxisRectangle>(c) && std::get<AxisRectangle>(c).height == 0.0);
  if (horizontal_slit) {
    const Box b = bounding_box(c);
    const double y = b.center().imag();
    return two_sided({b.xmin, y}, {b.xmax, y}, samples_per_unit, min_samples,
                     parent_index);
  }
  std::vector<Complex> corners;
  if (const auto* p = std::get_if<Polygon>(&c)) {
    corners = p->vertices;
    if (signed_area(corners) < 0.0) std::reverse(corners.begin(), corners.end());
  } else {
    corners = region_of(c).poly;
  }
  curve.samples = sample_polygon(corners, samples_per_unit, min_samples);
  curve.mesh = max_adjacent_spacing(curve.samples);
  return curve;
}

BoundaryCurve rectangle_boundary(double half_width, double half_height,
                                 double spacing, std::size_t min_per_side) {
  const std::vector<Complex> corners = {{half_width, -half_height},
                                        {half_width, half_height},
                                        {-half_width, half_height},
                                        {-half_width, -half_height}};
  BoundaryCurve curve;
  curve.parent_index = kProbeParent;
  for (std::size_t i = 0; i < 4; ++i) {
    const Complex a = corners[i], b = corners[(i + 1) % 4];
    const auto k = std::max<std::size_t>(
        min_per_side, static_cast<std::size_t>(std::ceil(std::abs(b - a) / spacing)));
    for (std::size_t t = 0; t < k; ++t)
      curve.samples.push_back(a + (b - a) * (static_cast<double>(t) / static_cast<double>(k)));
  }
  curve.mesh = max_adjacent_spacing(curve.samples);
  return curve;
}

std::vector<Complex> evaluation_points(const BoundaryCurve& curve) {
  const std::size_t n = curve.samples.size();
  if (n < 3 && !curve.is_two_sided()) return curve.samples;
  const double scale = std::max(1.0, std::max(horizontal_variation(curve.samples),
                                              vertical_variation(curve.samples)));
  const double h = kSideNudge * scale;
  std::vector<Complex> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    Complex normal;
    if (curve.is_two_sided()) {
      normal = curve.side_normals[k];
    } else {
      // Counterclockwise curve: outward is the chord direction turned clockwise.
      const Complex chord = curve.samples[(k + 1) % n] - curve.samples[(k + n - 1) % n];
      normal = chord * Complex(0, -1) / std::abs(chord);
    }
    out[k] = curve.samples[k] + h * normal;
  }
  return out;
}

double vertical_variation(std::span<const Complex> samples) {
  if (samples.empty()) return 0.0;
  auto [lo, hi] = std::minmax_element(samples.begin(), samples.end(),
                                      [](Complex a, Complex b) { return a.imag() < b.imag(); });
  return hi->imag() - lo->imag();
}

double horizontal_variation(std::span<const Complex> samples) {
  if (samples.empty()) return 0.0;
  auto [lo, hi] = std::minmax_element(samples.begin(), samples.end(),
                                      [](Complex a, Complex b) { return a.real() < b.real(); });
  return hi->real() - lo->real();
}

double extent_along(std::span<const Complex> samples, Complex normal) {
  if (samples.empty()) return 0.0;
  const Complex u = normal / std::abs(normal);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (Complex z : samples) {
    const double p = z.real() * u.real() + z.imag() * u.imag();
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  }
  return hi - lo;
}

double signed_area(std::span<const Complex> samples) {
  const std::size_t n = samples.size();
  if (n < 3) return 0.0;
  const Complex origin = samples[0];
  quad::CompensatedSum sum;
  for (std::size_t k = 0; k < n; ++k) {
    const Complex a = samples[k] - origin;
    const Complex b = samples[(k + 1) % n] - origin;
    sum.add(a.real() * b.imag());
    sum.add(-b.real() * a.imag());
  }
  return 0.5 * sum.value();
}

double enclosed_area(const BoundaryCurve& curve) {
  if (curve.is_point()) return 0.0;
  if (!curve.is_two_sided()) {
    SegmentIndex index({curve.samples});
    if (index.self_intersections(0, 1) > 0)
      throw GeometryError("enclosed_area: curve is not simple");
  }
  return std::abs(signed_area(curve.samples));
}

double polyline_length(std::span<const Complex> samples, bool closed) {
  double len = 0.0;
  const std::size_t n = samples.size();
  if (n < 2) return 0.0;
  // sqrt(norm) rather than abs: hypot's overflow care costs 3x here and the
  // curves live at unit scale.
  for (std::size_t k = 0; k + 1 < n; ++k) len += std::sqrt(std::norm(samples[k + 1] - samples[k]));
  if (closed) len += std::sqrt(std::norm(samples[0] - samples[n - 1]));
  return len;
}

Complex polygon_centroid(std::span<const Complex> samples) {
  const std::size_t n = samples.size();
  Complex mean{};
  for (Complex z : samples) mean += z;
  if (n == 0) return mean;
  mean /= static_cast<double>(n);
  const double a = signed_area(samples);
  if (n < 3 || std::abs(a) < 1e-300) return mean;
  double cx = 0.0, cy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Complex p = samples[k] - mean;
    const Complex q = samples[(k + 1) % n] - mean;
    const double w = cross(p, q);
    cx += (p.real() + q.real()) * w;
    cy += (p.imag() + q.imag()) * w;
  }
  return mean + Complex(cx, cy) / (6.0 * a);
}

int winding_number(std::span<const Complex> samples, Complex z) {
  int wn = 0;
  const std::size_t n = samples.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Complex a = samples[k];
    const Complex b = samples[(k + 1) % n];
    if (a.imag() <= z.imag()) {
      if (b.imag() > z.imag() && cross(b - a, z - a) > 0) ++wn;
    } else {
      if (b.imag() <= z.imag() && cross(b - a, z - a) < 0) --wn;
    }
  }
  return wn;
}

double point_segment_distance(Complex p, Complex a, Complex b) {
  const Complex ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(p - a);
  double t = ((p - a).real() * ab.real() + (p - a).imag() * ab.imag()) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(p - (a + t * ab));
}

bool segments_intersect(Complex a, Complex b, Complex c, Complex d) {
  const int o1 = orientation(a, b, c);
  const int o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a);
  const int o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

double segment_segment_distance(Complex a, Complex b, Complex c, Complex d) {
  if (segments_intersect(a, b, c, d)) return 0.0;
  return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d),
                   point_segment_distance(c, a, b), point_segment_distance(d, a, b)});
}

double max_adjacent_spacing(std::span<const Complex> samples) {
  const std::size_t n = samples.size();
  double m = 0.0;
  if (n < 2) return 0.0;
  for (std::size_t k = 0; k < n; ++k) m = std::max(m, std::norm(samples[(k + 1) % n] - samples[k]));
  m = std::sqrt(m);
  return m;
}

std::vector<Complex> square_outline(Complex center, double side, std::size_t per_side) {
  std::vector<Complex> out;
  const auto corners = rect_corners(center, side, side);
  per_side = std::max<std::size_t>(per_side, 1);
  for (std::size_t i = 0; i < 4; ++i) {
    const Complex a = corners[i], b = corners[(i + 1) % 4];
    for (std::size_t t = 0; t < per_side; ++t)
      out.push_back(a + (b - a) * (static_cast<double>(t) / static_cast<double>(per_side)));
  }
  return out;
}

double hausdorff_distance(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  SegmentIndex index({a, b});
  double h = 0.0;
  for (Complex z : a) h = std::max(h, index.distance_to_curve(1, z));
  for (Complex z : b) h = std::max(h, index.distance_to_curve(0, z));
  return h;
}

}  // namespace squaremap::geometry
