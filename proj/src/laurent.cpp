#include "squaremap/laurent.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "squaremap/quadrature.hpp"

namespace squaremap::laurent {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

int frame_sign(PoleFrame f) { return f == PoleFrame::horizontal_slit ? 1 : -1; }

// ---------------------------------------------------------------------------
// exterior square: f(z) = z + sum_k b_k z^{1-4k},
// b_k = binom(1/2, k) eps^k / (1 - 4k), eps = +1 (axis) or -1 (diagonal).

constexpr int kSquareTerms = 40;
constexpr double kSeriesRadius = 1.5;

const std::array<double, kSquareTerms + 1>& square_coefficients(SquareOrientation o) {
  static const auto make = [](double eps) {
    std::array<double, kSquareTerms + 1> b{};
    double binom = 1.0;
    double epsk = 1.0;
    for (int k = 1; k <= kSquareTerms; ++k) {
      binom *= (0.5 - (k - 1)) / k;
      epsk *= eps;
      b[k] = binom * epsk / (1.0 - 4.0 * k);
    }
    return b;
  };
  static const auto axis = make(1.0);
  static const auto diag = make(-1.0);
  return o == SquareOrientation::axis ? axis : diag;
}

double square_eps(SquareOrientation o) { return o == SquareOrientation::axis ? 1.0 : -1.0; }

Complex square_derivative(SquareOrientation o, Complex z) {
  const Complex u = 1.0 / (z * z * z * z);
  return std::sqrt(1.0 + square_eps(o) * u);
}

Complex square_series_tail(SquareOrientation o, Complex z) {
  const auto& b = square_coefficients(o);
  const Complex u = 1.0 / (z * z * z * z);
  // Truncate once |b_k u^k| is negligible; |u| <= 1/1.5^4 on the series region.
  Complex acc = 0.0;
  for (int k = kSquareTerms; k >= 1; --k) acc = (acc + b[k]) * u;
  return z * acc;
}

Complex square_tail(SquareOrientation o, Complex z) {
  double r = std::abs(z);
  if (r < 1.0 - 1e-12)
    throw NumericError("exterior_square evaluated inside the unit disk");
  if (r < 1.0) {
    z /= r;
    r = 1.0;
  }
  if (r >= kSeriesRadius) return square_series_tail(o, z);
  // Radial path from an anchor on |z| = 1.5 where the series is accurate.
  const Complex anchor = z * (kSeriesRadius / r);
  const Complex dz = z - anchor;
  quad::AdaptiveOptions opt;
  opt.abs_tol = 1e-15;
  opt.rel_tol = 1e-14;
  const auto res = quad::integrate_complex(
      [&](double t) { return (square_derivative(o, anchor + t * dz) - 1.0) * dz; }, 0.0,
      1.0, opt);
  if (!res.converged && res.error > 1e-10)
    throw NumericError("exterior_square path quadrature did not converge");
  return square_series_tail(o, anchor) + res.value;
}

// ---------------------------------------------------------------------------

void check_guard(Complex d, const EvalOptions& opt, const char* what) {
  if (std::norm(d) < opt.guard_radius * opt.guard_radius) {
    std::ostringstream os;
    os << "evaluation within guard radius " << opt.guard_radius << " of a " << what;
    throw PoleProximityError(os.str());
  }
}

// Local coordinate and its z-derivative for a pole.
std::pair<Complex, Complex> pole_coordinate(const Pole& p, Complex z, const EvalOptions& opt) {
  const Complex v = z - p.location;
  check_guard(v, opt, "pole");
  if (p.frame == PoleFrame::plain) return {v, 1.0};
  const int sigma = frame_sign(p.frame);
  const double s2 = p.frame_scale * p.frame_scale;
  const Complex zeta = joukowski_inverse_branch(v, sigma, p.frame_scale);
  return {zeta, 1.0 / (1.0 - sigma * s2 / (zeta * zeta))};
}

Complex multipole_tail(const MultipoleMap& m, Complex z, const EvalOptions& opt) {
  Complex total = 0.0;
  for (const Pole& p : m.poles) {
    if (p.coefficients.empty()) continue;
    const Complex u = 1.0 / pole_coordinate(p, z, opt).first;
    Complex acc = 0.0;
    for (std::size_t k = p.coefficients.size(); k-- > 0;) acc = (acc + p.coefficients[k]) * u;
    total += acc;
  }
  return total;
}

Complex multipole_derivative(const MultipoleMap& m, Complex z, const EvalOptions& opt) {
  Complex total = 1.0;
  for (const Pole& p : m.poles) {
    if (p.coefficients.empty()) continue;
    const auto [zeta, dzeta] = pole_coordinate(p, z, opt);
    const Complex u = 1.0 / zeta;
    // d/dzeta sum c_m u^m = -sum m c_m u^{m+1}
    Complex acc = 0.0;
    for (std::size_t k = p.coefficients.size(); k-- > 0;)
      acc = (acc + static_cast<double>(k + 1) * p.coefficients[k]) * u;
    total -= acc * u * dzeta;
  }
  return total;
}

Complex tail(const NormalizedMap& f, Complex z, const EvalOptions& opt);

double inverse_tolerance(Complex w) { return 1e-14 * std::max(1.0, std::abs(w)); }

Complex tail(const NormalizedMap& f, Complex z, const EvalOptions& opt) {
  return std::visit(
      overloaded{
          [](const IdentityMap&) { return Complex(0.0); },
          [&](const MultipoleMap& m) { return multipole_tail(m, z, opt); },
          [&](const JoukowskiMap& j) {
            check_guard(z - j.center, opt, "Joukowski pole");
            return j.sign * j.scale * j.scale / (z - j.center);
          },
          [&](const ExteriorSquareMap& e) { return square_tail(e.orientation, z); },
          [&](const CompositionMap& c) {
            const Complex t_in = tail(c.inner, z, opt);
            return t_in + tail(c.outer, z + t_in, opt);
          },
          [&](const InverseMap& inv) {
            InvertOptions io;
            io.eval = opt;
            const Complex zs = invert(inv.forward, z, inverse_tolerance(z), io);
            // z* - w = -(f(z*) - z*) + (f(z*) - w); the first part is computed
            // without cancellation.
            const Complex t = tail(inv.forward, zs, opt);
            const Complex residual = (zs + t) - z;
            return -t + residual;
          },
      },
      f.node().value);
}

Complex newton(const NormalizedMap& f, Complex w, Complex seed, double tol,
               const InvertOptions& opt) {
  Complex z = seed;
  Complex r;
  try {
    r = evaluate(f, z, opt.eval) - w;
  } catch (const NumericError&) {
    z = w;
    r = evaluate(f, z, opt.eval) - w;
  }
  for (int it = 0; it < opt.max_iterations; ++it) {
    if (std::abs(r) <= tol) return z;
    const Complex d = derivative(f, z, opt.eval);
    if (std::abs(d) < opt.derivative_guard)
      throw NumericError("Newton inversion: derivative below guard");
    const Complex step = r / d;
    double lambda = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 40; ++halving, lambda *= 0.5) {
      const Complex zn = z - lambda * step;
      Complex rn;
      try {
        rn = evaluate(f, zn, opt.eval) - w;
      } catch (const NumericError&) {
        continue;
      }
      if (std::abs(rn) < std::abs(r)) {
        z = zn;
        r = rn;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // Stalled at the rounding floor of f just above the requested tolerance.
      if (std::abs(r) <= 1e3 * tol) return z;
      throw NumericError("Newton inversion: no descent step");
    }
  }
  if (std::abs(r) <= tol) return z;
  std::ostringstream os;
  os << "Newton inversion did not converge in " << opt.max_iterations
     << " iterations (residual " << std::abs(r) << ")";
  throw NumericError(os.str());
}

std::string describe_node(const NormalizedMap& f) {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const IdentityMap&) { os << "identity"; },
                 [&](const MultipoleMap& m) {
                   os << "multipole[" << m.poles.size() << " poles]";
                 },
                 [&](const JoukowskiMap& j) {
                   os << "z" << (j.sign > 0 ? "+" : "-") << j.scale * j.scale << "/(z-"
                      << j.center << ")";
                 },
                 [&](const ExteriorSquareMap& e) {
                   os << "exterior_square("
                      << (e.orientation == SquareOrientation::axis ? "axis" : "diagonal")
                      << ")";
                 },
                 [&](const CompositionMap& c) {
                   os << "(" << describe_node(c.outer) << ")o(" << describe_node(c.inner)
                      << ")";
                 },
                 [&](const InverseMap& i) { os << "inverse(" << describe_node(i.forward) << ")"; },
             },
             f.node().value);
  return os.str();
}

// Strictly inside: a point on the closed boundary (up to rounding) does not count.
bool deep_inside(const geometry::Component& c, Complex w) {
  if (!geometry::contains(c, w)) return false;
  const double h = 1e-8 * std::max(1.0, std::abs(w));
  for (int k = 0; k < 8; ++k)
    if (!geometry::contains(c, w + std::polar(h, kTwoPi * k / 8.0))) return false;
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------

NormalizedMap::NormalizedMap() : node_(std::make_shared<const MapNode>(MapNode{IdentityMap{}})) {}

NormalizedMap NormalizedMap::identity() { return NormalizedMap(); }

NormalizedMap NormalizedMap::multipole(std::vector<Pole> poles) {
  for (const Pole& p : poles) {
    if (p.frame != PoleFrame::plain && !(p.frame_scale > 0.0))
      throw SpecError("slit-frame pole needs a positive frame scale");
  }
  return NormalizedMap(std::make_shared<const MapNode>(MapNode{MultipoleMap{std::move(poles)}}));
}

NormalizedMap NormalizedMap::joukowski(int sign, double scale, Complex center) {
  if (sign != 1 && sign != -1) throw SpecError("joukowski sign must be +1 or -1");
  if (!(scale > 0.0)) throw SpecError("joukowski scale must be positive");
  return NormalizedMap(
      std::make_shared<const MapNode>(MapNode{JoukowskiMap{sign, scale, center}}));
}

NormalizedMap NormalizedMap::exterior_square(SquareOrientation o) {
  return NormalizedMap(std::make_shared<const MapNode>(MapNode{ExteriorSquareMap{o}}));
}

NormalizedMap NormalizedMap::composition(NormalizedMap outer, NormalizedMap inner) {
  return NormalizedMap(std::make_shared<const MapNode>(
      MapNode{CompositionMap{std::move(outer), std::move(inner)}}));
}

NormalizedMap NormalizedMap::inverse(NormalizedMap forward) {
  return NormalizedMap(
      std::make_shared<const MapNode>(MapNode{InverseMap{std::move(forward)}}));
}

std::string NormalizedMap::describe() const { return describe_node(*this); }

Complex joukowski_inverse_branch(Complex v, int sign, double scale) {
  if (v == Complex(0.0)) throw PoleProximityError("Joukowski inverse at the slit center");
  const double c = 4.0 * sign * scale * scale;
  // v * sqrt(1 - c / v^2) is analytic off the slit and ~ v at infinity.
  return 0.5 * (v + v * std::sqrt(1.0 - c / (v * v)));
}

Complex evaluate_tail(const NormalizedMap& f, Complex z, const EvalOptions& opt) {
  return tail(f, z, opt);
}

Complex evaluate(const NormalizedMap& f, Complex z, const EvalOptions& opt) {
  if (std::holds_alternative<IdentityMap>(f.node().value)) return z;
  return z + tail(f, z, opt);
}

Complex derivative(const NormalizedMap& f, Complex z, const EvalOptions& opt) {
  return std::visit(
      overloaded{
          [](const IdentityMap&) { return Complex(1.0); },
          [&](const MultipoleMap& m) { return multipole_derivative(m, z, opt); },
          [&](const JoukowskiMap& j) {
            const Complex d = z - j.center;
            check_guard(d, opt, "Joukowski pole");
            return 1.0 - j.sign * j.scale * j.scale / (d * d);
          },
          [&](const ExteriorSquareMap& e) {
            double r = std::abs(z);
            if (r < 1.0 - 1e-12)
              throw NumericError("exterior_square evaluated inside the unit disk");
            return square_derivative(e.orientation, r < 1.0 ? z / r : z);
          },
          [&](const CompositionMap& c) {
            return derivative(c.outer, evaluate(c.inner, z, opt), opt) *
                   derivative(c.inner, z, opt);
          },
          [&](const InverseMap& inv) {
            InvertOptions io;
            io.eval = opt;
            const Complex zs = invert(inv.forward, z, inverse_tolerance(z), io);
            return 1.0 / derivative(inv.forward, zs, opt);
          },
      },
      f.node().value);
}

Coefficient coefficient_a1(const NormalizedMap& f) {
  return std::visit(
      overloaded{
          [](const IdentityMap&) { return Coefficient{0.0}; },
          [](const MultipoleMap& m) {
            Complex a = 0.0;
            for (const Pole& p : m.poles)
              if (!p.coefficients.empty()) a += p.coefficients.front();
            return Coefficient{a};
          },
          [](const JoukowskiMap& j) {
            return Coefficient{Complex(j.sign * j.scale * j.scale, 0.0)};
          },
          [](const ExteriorSquareMap&) { return Coefficient{0.0}; },
          [](const CompositionMap& c) {
            return Coefficient{coefficient_a1(c.outer).a1 + coefficient_a1(c.inner).a1};
          },
          [](const InverseMap& i) { return Coefficient{-coefficient_a1(i.forward).a1}; },
      },
      f.node().value);
}

double singular_radius(const NormalizedMap& f) {
  return std::visit(
      overloaded{
          [](const IdentityMap&) { return 0.0; },
          [](const MultipoleMap& m) {
            double r = 0.0;
            for (const Pole& p : m.poles) {
              const double reach = p.frame == PoleFrame::plain ? 0.0 : 2.0 * p.frame_scale;
              r = std::max(r, std::abs(p.location) + reach);
            }
            return r;
          },
          [](const JoukowskiMap& j) { return std::abs(j.center) + 2.0 * j.scale; },
          [](const ExteriorSquareMap&) { return 1.0; },
          [](const CompositionMap& c) {
            return singular_radius(c.inner) + singular_radius(c.outer) + 1.0;
          },
          [](const InverseMap& i) { return 2.0 * singular_radius(i.forward) + 1.0; },
      },
      f.node().value);
}

Complex contour_a1(const NormalizedMap& f, double radius, std::size_t nodes) {
  // a1 = (1/2 pi i) \oint (f - z) dz; with z = R e^{i t}, dz = i z dt, so the
  // trapezoid sum is the mean of (f(z_k) - z_k) z_k.
  Complex sum = 0.0;
  for (std::size_t k = 0; k < nodes; ++k) {
    const double t = kTwoPi * static_cast<double>(k) / static_cast<double>(nodes);
    const Complex z = std::polar(radius, t);
    sum += tail(f, z, EvalOptions{}) * z;
  }
  return sum / static_cast<double>(nodes);
}

QuadratureA1 contour_a1_converged(const NormalizedMap& f, double tolerance,
                                  int max_doublings) {
  double radius = 2.0 * (singular_radius(f) + 1.0);
  Complex v = contour_a1(f, radius);
  for (int d = 0; d < max_doublings; ++d) {
    const Complex v2 = contour_a1(f, 2.0 * radius);
    const double change = std::abs(v2 - v);
    if (change <= tolerance) return {v, radius, change};
    radius *= 2.0;
    v = v2;
  }
  throw NumericError("contour a1 did not stabilize under radius doubling");
}

Coefficient coefficient_a1_checked(const NormalizedMap& f, double tolerance) {
  const Coefficient analytic = coefficient_a1(f);
  const QuadratureA1 q = contour_a1_converged(f, 0.1 * tolerance);
  if (std::abs(q.value - analytic.a1) > tolerance) {
    std::ostringstream os;
    os << "analytic a1 " << analytic.a1 << " disagrees with contour value " << q.value;
    throw NumericError(os.str());
  }
  return analytic;
}

Complex invert(const NormalizedMap& f, Complex w, double tolerance, const InvertOptions& opt) {
  return std::visit(
      overloaded{
          [&](const IdentityMap&) { return w; },
          [&](const JoukowskiMap& j) {
            Complex seed = w;
            try {
              seed = j.center + joukowski_inverse_branch(w - j.center, j.sign, j.scale);
            } catch (const NumericError&) {
            }
            return newton(f, w, seed, tolerance, opt);
          },
          [&](const CompositionMap& c) {
            Complex seed = w;
            try {
              seed = invert(c.inner, invert(c.outer, w, tolerance, opt), tolerance, opt);
            } catch (const NumericError&) {
            }
            return newton(f, w, seed, tolerance, opt);
          },
          [&](const InverseMap& i) { return evaluate(i.forward, w, opt.eval); },
          [&](const auto&) { return newton(f, w, w, tolerance, opt); },
      },
      f.node().value);
}

NormalizedMap compose_checked(const NormalizedMap& outer, const NormalizedMap& inner,
                              const geometry::Domain& inner_domain,
                              const geometry::Domain& outer_domain, double mesh) {
  if (!(mesh > 0.0)) throw SpecError("compose: mesh must be positive");
  for (std::size_t j = 0; j < inner_domain.size(); ++j) {
    const auto curve = geometry::discretize_boundary(inner_domain[j], 1.0 / mesh, 64,
                                                     static_cast<int>(j));
    for (Complex z : geometry::evaluation_points(curve)) {
      const Complex w = evaluate(inner, z);
      for (std::size_t k = 0; k < outer_domain.size(); ++k) {
        if (deep_inside(outer_domain[k], w)) {
          std::ostringstream os;
          os << "compose: inner image of boundary " << j + 1 << " enters outer component "
             << k + 1 << " at " << w;
          throw PreconditionError(os.str());
        }
      }
    }
  }
  return NormalizedMap::composition(outer, inner);
}

}  // namespace squaremap::laurent
