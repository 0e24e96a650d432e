#include "squaremap/functional.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "squaremap/kernels.hpp"
#include "squaremap/quadrature.hpp"

namespace squaremap::functional {
namespace {

using geometry::BoundaryCurve;

constexpr double kAreaClamp = 1e-12;

bool is_identity(const laurent::NormalizedMap& f) {
  return std::holds_alternative<laurent::IdentityMap>(f.node().value);
}

// Distance from w to the boundary of the axis square (center c, half side h).
double square_boundary_distance(Complex w, Complex c, double h) {
  const double dx = std::abs(w.real() - c.real()), dy = std::abs(w.imag() - c.imag());
  if (dx <= h && dy <= h) return h - std::max(dx, dy);
  return std::hypot(std::max(dx - h, 0.0), std::max(dy - h, 0.0));
}

struct Box {
  double xmin, xmax, ymin, ymax;
  bool contains(Complex z) const {
    return z.real() >= xmin && z.real() <= xmax && z.imag() >= ymin && z.imag() <= ymax;
  }
};

Box box_of(std::span<const Complex> c) {
  Box b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
        std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (Complex z : c) {
    b.xmin = std::min(b.xmin, z.real());
    b.xmax = std::max(b.xmax, z.real());
    b.ymin = std::min(b.ymin, z.imag());
    b.ymax = std::max(b.ymax, z.imag());
  }
  return b;
}

// Length of curve a lying inside curve b, from up to 256 segment midpoints.
double inside_length(std::span<const Complex> a, std::span<const Complex> b, const Box& bb) {
  if (b.size() < 3 || a.empty()) return 0.0;
  if (a.size() == 1)
    return bb.contains(a[0]) && geometry::winding_number(b, a[0]) != 0 ? 1.0 : 0.0;
  const std::size_t n = a.size();
  const std::size_t stride = std::max<std::size_t>(1, n / 256);
  double inside = 0.0, total = 0.0;
  for (std::size_t k = 0; k < n; k += stride) {
    const Complex p = a[k], q = a[(k + 1) % n];
    const double len = std::sqrt(std::norm(q - p));
    total += len;
    const Complex mid = 0.5 * (p + q);
    if (bb.contains(mid) && geometry::winding_number(b, mid) != 0) inside += len;
  }
  if (total == 0.0) return 0.0;
  return geometry::polyline_length(a, true) * inside / total;
}

// Sufficient test for a simple, positively oriented closed polygon: every
// edge turns counterclockwise about c and the ray from c to the right is
// crossed exactly once, so the winding about c is 1 and the curve is
// star-shaped with respect to c.
bool star_simple(std::span<const Complex> w, Complex c) {
  const std::size_t n = w.size();
  if (n < 3) return false;
  std::size_t crossings = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const Complex a = w[k] - c, b = w[(k + 1) % n] - c;
    if (a.real() * b.imag() - a.imag() * b.real() <= 0.0) return false;
    if (a.imag() < 0.0 && b.imag() >= 0.0) {
      // Upward crossing of the horizontal line through c; keep those right of c.
      const double t = -a.imag() / (b.imag() - a.imag());
      if (a.real() + t * (b.real() - a.real()) > 0.0) ++crossings;
    }
  }
  return crossings == 1;
}

bool disjoint(const Box& a, const Box& b) {
  return a.xmax < b.xmin || b.xmax < a.xmin || a.ymax < b.ymin || b.ymax < a.ymin;
}

}  // namespace

BoundarySources prepare_sources(const geometry::Domain& domain, double mesh,
                                std::size_t min_samples) {
  if (!(mesh > 0.0)) throw SpecError("mesh must be positive");
  BoundarySources src;
  src.mesh = mesh;
  src.min_samples = min_samples;
  for (std::size_t j = 0; j < domain.size(); ++j) {
    BoundaryCurve c = geometry::discretize_boundary(domain[j], 1.0 / mesh, min_samples,
                                                    static_cast<int>(j));
    src.points.push_back(geometry::evaluation_points(c));
    src.slit_lengths.push_back(c.is_two_sided() ? 0.5 * geometry::polyline_length(c.samples)
                                                : 0.0);
    src.curves.push_back(std::move(c));
  }
  return src;
}

std::vector<ImageComponent> image_components(const laurent::NormalizedMap& f,
                                             const geometry::Domain& domain, double mesh,
                                             const ImageOptions& options) {
  return image_components(f, domain, prepare_sources(domain, mesh, options.min_samples),
                          options);
}

std::vector<ImageComponent> image_components(const laurent::NormalizedMap& f,
                                             const geometry::Domain& domain,
                                             const BoundarySources& sources,
                                             const ImageOptions& options) {
  if (sources.curves.size() != domain.size())
    throw SpecError("boundary sources were prepared for a different domain");
  const bool identity = is_identity(f);
  std::vector<ImageComponent> out;
  out.reserve(domain.size());
  for (std::size_t j = 0; j < domain.size(); ++j) {
    const auto& comp = domain[j];
    const BoundaryCurve& source = sources.curves[j];
    const auto& points = sources.points[j];
    ImageComponent ic;
    ic.j = j;
    ic.curve.parent_index = source.parent_index;
    ic.curve.mesh = source.mesh;
    ic.curve.orientation = source.orientation;
    ic.slit_length = sources.slit_lengths[j];
    if (identity) {
      // Exact source data; the stored curve is the offset loop so that the
      // injectivity sweep sees a simple curve even for slits.
      ic.curve.samples = points;
      ic.A = geometry::exact_area(comp);
      ic.V = geometry::exact_vertical_variation(comp);
      ic.H = geometry::exact_horizontal_variation(comp);
      ic.signed_area = ic.A;
      if (options.compute_defect && !geometry::is_point_like(comp))
        ic.square_defect =
            geometry::is_square_like(comp) ? 0.0 : best_square(source.samples).defect;
      out.push_back(std::move(ic));
      continue;
    }
    ic.curve.samples = kernels::evaluate_points(f, points, options.exec);
    const auto& w = ic.curve.samples;
    ic.signed_area = w.size() >= 3 ? geometry::signed_area(w) : 0.0;
    ic.A = std::abs(ic.signed_area);
    if (ic.A < kAreaClamp) ic.A = 0.0;
    ic.V = geometry::vertical_variation(w);
    ic.H = geometry::horizontal_variation(w);
    if (options.compute_defect && w.size() > 1) ic.square_defect = best_square(w).defect;
    out.push_back(std::move(ic));
  }
  return out;
}

SquareFit best_square(std::span<const Complex> curve, double tolerance) {
  SquareFit fit;
  if (curve.empty()) return fit;
  const double H = geometry::horizontal_variation(curve);
  const double V = geometry::vertical_variation(curve);
  const double scale = std::max({H, V, 1e-300});
  fit.center = geometry::polygon_centroid(curve);
  fit.side = 0.5 * (H + V);
  if (curve.size() < 3 || scale <= 1e-300) {
    double d = 0.0;
    for (Complex z : curve) d = std::max(d, std::abs(z - fit.center));
    fit.defect = d;
    return fit;
  }
  std::array<double, 3> x{fit.center.real(), fit.center.imag(), fit.side};
  double step = 0.25 * scale;
  double best = 0.0;
  int evals = 0;
  // Coarse pass on a decimated curve, then the full curve from there.
  auto descend = [&](std::span<const Complex> pts, std::size_t per_side, double stop) {
    geometry::SegmentIndex index({pts}, scale / 64.0);
    // Returns early (with a value >= cutoff) once the trial cannot win.
    auto objective = [&](const std::array<double, 3>& y, double cutoff) {
      const Complex c(y[0], y[1]);
      const double side = std::max(y[2], 0.0);
      ++evals;
      double d = 0.0;
      for (Complex z : pts) d = std::max(d, square_boundary_distance(z, c, 0.5 * side));
      if (d >= cutoff) return d;
      for (Complex q : geometry::square_outline(c, side, per_side)) {
        d = std::max(d, index.distance_to_curve(0, q));
        if (d >= cutoff) return d;
      }
      return d;
    };
    best = objective(x, std::numeric_limits<double>::infinity());
    while (step > stop && evals < 4000) {
      bool improved = false;
      for (std::size_t p = 0; p < 3; ++p) {
        for (double sgn : {1.0, -1.0}) {
          auto y = x;
          y[p] += sgn * step;
          const double v = objective(y, best);
          if (v < best) {
            best = v;
            x = y;
            improved = true;
            break;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
  };
  const std::size_t stride = std::max<std::size_t>(1, curve.size() / 512);
  if (stride > 1) {
    std::vector<Complex> coarse;
    for (std::size_t k = 0; k < curve.size(); k += stride) coarse.push_back(curve[k]);
    descend(coarse, 64, 1e-3 * scale);
    step *= 4.0;
  }
  descend(curve, 256, tolerance * std::max(1.0, scale));
  fit.center = {x[0], x[1]};
  fit.side = std::max(x[2], 0.0);
  fit.defect = best;
  return fit;
}

InjectivityReport assess_injectivity(std::span<const ImageComponent> images,
                                     const InjectivityOptions& options) {
  InjectivityReport rep;
  auto note = [&](const std::string& s) {
    if (rep.diagnostic.empty()) rep.diagnostic = s;
  };
  for (const auto& ic : images) {
    if (ic.curve.samples.size() < 2 || ic.curve.mesh <= 0.0) continue;
    const double spacing = geometry::max_adjacent_spacing(ic.curve.samples);
    // Slit endpoints are square-root branch points of any map that opens the
    // slit, so spacing there grows like sqrt(mesh * length).
    double bound = options.max_stretch * ic.curve.mesh;
    if (ic.slit_length > 0.0)
      bound = std::max(bound, options.max_stretch * std::sqrt(ic.curve.mesh * ic.slit_length));
    if (spacing > bound) {
      std::ostringstream os;
      os << "image curve " << ic.j + 1 << ": adjacent samples " << spacing
         << " apart exceed " << options.max_stretch << " x source mesh " << ic.curve.mesh
         << "; refine the mesh";
      throw MeshTooCoarseError(os.str());
    }
  }
  std::vector<std::span<const Complex>> spans;
  spans.reserve(images.size());
  for (const auto& ic : images) spans.emplace_back(ic.curve.samples);
  std::vector<Box> boxes;
  for (const auto& s : spans) boxes.push_back(box_of(s));

  // Fast path, exact when it applies: star-shaped simple curves in pairwise
  // disjoint boxes cannot cross, nest or be misoriented.
  bool easy = true;
  for (std::size_t i = 0; i < images.size() && easy; ++i) {
    if (spans[i].size() != 1) easy = star_simple(spans[i], geometry::polygon_centroid(spans[i]));
    for (std::size_t j = 0; j < i && easy; ++j) easy = disjoint(boxes[i], boxes[j]);
  }
  if (easy) return rep;

  geometry::SegmentIndex index(spans);

  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::size_t k = index.self_intersections(i, options.intersection_cap);
    if (k > 0) {
      rep.self_intersections += k;
      note("image curve " + std::to_string(images[i].j + 1) + " is not simple (" +
           std::to_string(k) + " crossings)");
    }
  }
  for (std::size_t i = 0; i < images.size(); ++i) {
    for (std::size_t j = i + 1; j < images.size(); ++j) {
      const std::size_t k = index.cross_intersections(i, j, options.intersection_cap);
      if (k > 0) {
        rep.cross_intersections += k;
        note("image curves " + std::to_string(images[i].j + 1) + " and " +
             std::to_string(images[j].j + 1) + " intersect");
      }
    }
  }
  for (std::size_t i = 0; i < images.size(); ++i) {
    for (std::size_t j = 0; j < images.size(); ++j) {
      if (i == j) continue;
      const double len = inside_length(spans[i], spans[j], boxes[j]);
      if (len > 0.0) {
        rep.nested_length += len;
        note("image curve " + std::to_string(images[i].j + 1) + " lies inside image curve " +
             std::to_string(images[j].j + 1));
      }
    }
  }
  for (const auto& ic : images) {
    if (ic.curve.samples.size() < 3) continue;
    const double perim = geometry::polyline_length(ic.curve.samples, true);
    if (ic.signed_area < -1e-12 * std::max(1.0, perim * perim)) {
      ++rep.orientation_failures;
      note("image curve " + std::to_string(ic.j + 1) +
           " is traversed with winding -1 about its interior");
    }
  }
  rep.injective = rep.diagnostic.empty();
  return rep;
}

InjectivityReport check_injectivity(const laurent::NormalizedMap& f,
                                    const geometry::Domain& domain, double mesh,
                                    const InjectivityOptions& options) {
  ImageOptions io;
  io.compute_defect = false;
  const auto images = image_components(f, domain, mesh, io);
  return assess_injectivity(images, options);
}

double assemble_S(Complex a1, std::span<const ImageComponent> components) {
  double s = kTwoPi * a1.real();
  for (const auto& c : components) s += c.V * c.V - c.A;
  return s;
}

FunctionalReport functional_S(const laurent::NormalizedMap& f, const geometry::Domain& domain,
                              double mesh, std::span<const double> alphas,
                              const ImageOptions& options) {
  FunctionalReport rep;
  rep.a1 = laurent::coefficient_a1(f);
  rep.components = image_components(f, domain, mesh, options);
  rep.S = assemble_S(rep.a1.a1, rep.components);
  for (double a : alphas) rep.L_values.emplace_back(a, functional_L(rep.a1.a1, a));
  rep.injectivity = assess_injectivity(rep.components);
  return rep;
}

double functional_L(Complex a1, double alpha) {
  const double a = reduce_angle(alpha);
  // Half-turns are folded out so that L_{alpha + pi} = -L_alpha holds to
  // the bit whenever the reduced angles differ by exactly pi.
  if (a >= kPi) return -functional_L(a1, a - kPi);
  return a1.real() * std::cos(a) - a1.imag() * std::sin(a);
}

double functional_L(const laurent::NormalizedMap& f, double alpha) {
  return functional_L(laurent::coefficient_a1(f).a1, alpha);
}

double identity_S_exact(const geometry::Domain& domain) {
  double s = 0.0;
  for (const auto& c : domain.components()) {
    const double v = geometry::exact_vertical_variation(c);
    s += v * v - geometry::exact_area(c);
  }
  return s;
}

}  // namespace squaremap::functional
