#include "squaremap/modulus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "squaremap/kernels.hpp"
#include "squaremap/quadrature.hpp"

namespace squaremap::modulus {
namespace {

using laurent::NormalizedMap;

bool is_identity(const NormalizedMap& f) {
  return std::holds_alternative<laurent::IdentityMap>(f.node().value);
}

struct SquareBox {
  double x0, x1, y0, y1;
  double side;
  std::size_t j;
};

// Squares with positive side; points carry no weight in either integral.
std::vector<SquareBox> squares_of(const geometry::Domain& d) {
  std::vector<SquareBox> out;
  for (std::size_t j = 0; j < d.size(); ++j) {
    const auto side = geometry::square_side(d[j]);
    if (!side || *side <= 0.0) continue;
    const auto b = geometry::bounding_box(d[j]);
    out.push_back({b.xmin, b.xmax, b.ymin, b.ymax, *side, j});
  }
  return out;
}

// Cluster box containing every component, never degenerate.
geometry::Box cluster_box(const geometry::Domain& d) {
  auto b = d.bounding_box();
  if (!b) return {-0.5, 0.5, -0.5, 0.5};
  geometry::Box box = *b;
  const double pad = 0.5 * std::max(box.width(), box.height()) + 0.5;
  return {box.xmin - pad, box.xmax + pad, box.ymin - pad, box.ymax + pad};
}

// Breakpoints on [-half, half]: component edges, a uniform split of the
// cluster interval, and geometric grading outwards (the integrands decay
// like |z|^-2).
std::vector<double> breakpoints(double half, double lo, double hi,
                                const std::vector<double>& edges) {
  std::vector<double> b{-half, half};
  lo = std::max(lo, -half);
  hi = std::min(hi, half);
  const double width = hi - lo;
  for (int k = 0; k <= 4; ++k) b.push_back(lo + width * k / 4.0);
  for (double e : edges) b.push_back(e);
  const double g = std::max(0.5 * width, 0.5);
  for (double step = g; hi + step < half; step *= 2.0) b.push_back(hi + step);
  for (double step = g; lo - step > -half; step *= 2.0) b.push_back(lo - step);
  std::vector<double> out;
  for (double v : b)
    if (v >= -half && v <= half) out.push_back(v);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

enum class CellClass { interior = 0, boundary = 1, tail = 2 };

struct WorkCell {
  kernels::Cell cell;
  double tol;
  int depth;
};

// \int_{R cap Omega} g(f'(z)) dA over aligned cells, skipping square interiors.
AreaIntegral integrate_omega(const NormalizedMap& f, const geometry::Domain& domain,
                             const RectangleProbe& probe, const ProbeOptions& opt,
                             const std::function<double(Complex)>& g) {
  const double l = probe.l(), r = probe.r;
  const auto squares = squares_of(domain);
  const auto box = cluster_box(domain);
  std::vector<double> xe, ye;
  for (const auto& s : squares) {
    xe.insert(xe.end(), {s.x0, s.x1});
    ye.insert(ye.end(), {s.y0, s.y1});
  }
  const auto xb = breakpoints(l, box.xmin, box.xmax, xe);
  const auto yb = breakpoints(r, box.ymin, box.ymax, ye);
  const Complex mid = box.center();
  const double far = 4.0 * std::max(box.width(), box.height());

  std::array<std::vector<kernels::Cell>, 3> by_class;
  for (std::size_t i = 0; i + 1 < xb.size(); ++i) {
    for (std::size_t k = 0; k + 1 < yb.size(); ++k) {
      const kernels::Cell c{xb[i], xb[i + 1], yb[k], yb[k + 1]};
      const double cx = 0.5 * (c.x0 + c.x1), cy = 0.5 * (c.y0 + c.y1);
      bool inside = false, touches = false;
      for (const auto& s : squares) {
        if (cx > s.x0 && cx < s.x1 && cy > s.y0 && cy < s.y1) inside = true;
        if (c.x0 <= s.x1 && c.x1 >= s.x0 && c.y0 <= s.y1 && c.y1 >= s.y0) touches = true;
      }
      if (inside) continue;
      const double dx = std::max({c.x0 - mid.real(), 0.0, mid.real() - c.x1});
      const double dy = std::max({c.y0 - mid.imag(), 0.0, mid.imag() - c.y1});
      const CellClass cls = touches ? CellClass::boundary
                            : std::hypot(dx, dy) > far ? CellClass::tail
                                                       : CellClass::interior;
      by_class[static_cast<int>(cls)].push_back(c);
    }
  }

  const std::array<double, 3> budget{0.5 * opt.area_tolerance, 0.25 * opt.area_tolerance,
                                     0.25 * opt.area_tolerance};
  std::vector<WorkCell> work;
  for (int c = 0; c < 3; ++c) {
    double total = 0.0;
    for (const auto& cell : by_class[c]) total += cell.area();
    for (const auto& cell : by_class[c])
      work.push_back({cell, budget[c] * cell.area() / total, 0});
  }

  auto integrand = [&](Complex z) { return g(laurent::derivative(f, z)); };
  constexpr std::size_t kLow = 7, kHigh = 11;
  constexpr int kMaxDepth = 12;
  AreaIntegral out;
  quad::CompensatedSum sum, err;
  while (!work.empty()) {
    std::vector<kernels::Cell> cells;
    cells.reserve(work.size());
    for (const auto& w : work) cells.push_back(w.cell);
    std::vector<double> lo(cells.size()), hi(cells.size());
    kernels::integrate_cells(integrand, cells, kLow, lo, opt.exec);
    kernels::integrate_cells(integrand, cells, kHigh, hi, opt.exec);
    std::vector<WorkCell> next;
    for (std::size_t i = 0; i < work.size(); ++i) {
      const double e = std::abs(hi[i] - lo[i]);
      const WorkCell& w = work[i];
      if (e <= w.tol || w.depth >= kMaxDepth) {
        if (e > w.tol) out.converged = false;
        sum.add(hi[i]);
        err.add(e);
        ++out.cells;
        continue;
      }
      const auto& c = w.cell;
      const double xm = 0.5 * (c.x0 + c.x1), ym = 0.5 * (c.y0 + c.y1);
      for (const auto& child : {kernels::Cell{c.x0, xm, c.y0, ym}, kernels::Cell{xm, c.x1, c.y0, ym},
                                kernels::Cell{c.x0, xm, ym, c.y1}, kernels::Cell{xm, c.x1, ym, c.y1}})
        next.push_back({child, 0.25 * w.tol, w.depth + 1});
    }
    work = std::move(next);
  }
  out.value = sum.value();
  out.error = err.value();
  if (!out.converged && out.error > 100.0 * opt.area_tolerance)
    throw NumericError("2-D quadrature over the probe rectangle did not converge");
  return out;
}

double sum_side_squares(const geometry::Domain& d) {
  double s = 0.0;
  for (const auto& sq : squares_of(d)) s += sq.side * sq.side;
  return s;
}

}  // namespace

void RectangleProbe::require_contains(const geometry::Domain& domain) const {
  const auto b = domain.bounding_box();
  if (!b) return;
  const double hl = l();
  if (!(b->xmin > -hl && b->xmax < hl && b->ymin > -r && b->ymax < r)) {
    std::ostringstream os;
    os << "probe rectangle [-" << hl << ", " << hl << "] x [-" << r << ", " << r
       << "] does not contain every component in its interior";
    throw PreconditionError(os.str());
  }
}

ProbeArea probe_image_area(const NormalizedMap& f, const geometry::Domain& domain,
                           const RectangleProbe& probe, const ProbeOptions& options) {
  probe.require_contains(domain);
  const double l = probe.l();
  const auto curve =
      geometry::rectangle_boundary(l, probe.r, options.mesh * l, options.min_per_side);
  const auto& z = curve.samples;
  ProbeArea a;
  a.minus_4lr = geometry::signed_area(z) - probe.area();
  if (!is_identity(f)) {
    std::vector<Complex> t(z.size());
    for_each_index(options.exec, z.size(),
                   [&](std::size_t k) { t[k] = laurent::evaluate_tail(f, z[k]); });
    // Shoelace of z + t minus shoelace of z, expanded term by term.
    quad::CompensatedSum d;
    const std::size_t n = z.size();
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t k1 = (k + 1) % n;
      d.add(0.5 * (std::conj(z[k]) * t[k1]).imag());
      d.add(0.5 * (std::conj(t[k]) * z[k1]).imag());
      d.add(0.5 * (std::conj(t[k]) * t[k1]).imag());
    }
    a.minus_4lr += d.value();
  }
  a.value = probe.area() + a.minus_4lr;
  return a;
}

double area_of_probe_image(const NormalizedMap& f, const geometry::Domain& domain,
                           const RectangleProbe& probe, const ProbeOptions& options) {
  return probe_image_area(f, domain, probe, options).value;
}

RhoMetric RhoMetric::build(const NormalizedMap& f, const geometry::Domain& domain, double mesh) {
  if (!domain.is_square_domain())
    throw PreconditionError(
        "the transboundary metric is defined for square domains (squares and points) only");
  functional::ImageOptions io;
  io.compute_defect = false;
  std::vector<double> V;
  for (const auto& c : functional::image_components(f, domain, mesh, io)) V.push_back(c.V);
  return build(f, domain, std::move(V));
}

RhoMetric RhoMetric::build(const NormalizedMap& f, const geometry::Domain& domain,
                           std::vector<double> V) {
  if (!domain.is_square_domain())
    throw PreconditionError(
        "the transboundary metric is defined for square domains (squares and points) only");
  if (V.size() != domain.size()) throw SpecError("rho metric: one V_j per component expected");
  return RhoMetric{f, domain, std::move(V)};
}

AreaIntegral integrate_jacobian(const RhoMetric& m, const RectangleProbe& probe,
                                const ProbeOptions& options) {
  probe.require_contains(m.domain);
  AreaIntegral a;
  if (!is_identity(m.map)) {
    a = integrate_omega(m.map, m.domain, probe, options, [](Complex d) {
      const Complex e = d - 1.0;
      return 2.0 * e.real() + std::norm(e);
    });
  }
  const double excess = a.value;
  a.minus_4lr = excess - sum_side_squares(m.domain);
  a.value = probe.area() + a.minus_4lr;
  return a;
}

AreaIntegral integrate_rho_squared(const RhoMetric& m, const RectangleProbe& probe,
                                   const ProbeOptions& options) {
  AreaIntegral a = integrate_jacobian(m, probe, options);
  double v2 = 0.0;
  for (const auto& sq : squares_of(m.domain)) v2 += m.V[sq.j] * m.V[sq.j];
  a.minus_4lr += v2;
  a.value = probe.area() + a.minus_4lr;
  return a;
}

AreaIntegral integrate_one_minus_rho_squared(const RhoMetric& m, const RectangleProbe& probe,
                                             const ProbeOptions& options) {
  probe.require_contains(m.domain);
  AreaIntegral a;
  if (!is_identity(m.map)) {
    a = integrate_omega(m.map, m.domain, probe, options, [](Complex d) {
      const double t = 1.0 - std::abs(d);
      return t * t;
    });
  }
  for (const auto& sq : squares_of(m.domain)) {
    const double t = sq.side - m.V[sq.j];
    a.value += t * t;
  }
  a.minus_4lr = a.value - probe.area();
  return a;
}

LineIntegral line_integral(const RhoMetric& m, const RectangleProbe& probe, double x,
                           const ProbeOptions& options) {
  const double l = probe.l(), r = probe.r;
  if (std::abs(x) > l) throw SpecError("line_integral: |x| must not exceed l");
  const auto squares = squares_of(m.domain);
  const auto box = cluster_box(m.domain);
  std::vector<double> edges;
  std::vector<const SquareBox*> crossed;
  for (const auto& s : squares) {
    if (x >= s.x0 && x <= s.x1) {
      crossed.push_back(&s);
      edges.insert(edges.end(), {s.y0, s.y1});
    }
  }
  const auto tb = breakpoints(r, box.ymin, box.ymax, edges);
  LineIntegral li;
  li.x = x;
  quad::CompensatedSum excess;
  if (!is_identity(m.map)) {
    quad::AdaptiveOptions ao;
    ao.abs_tol = options.line_tolerance / static_cast<double>(tb.size());
    ao.rel_tol = 1e-13;
    for (std::size_t i = 0; i + 1 < tb.size(); ++i) {
      const double tm = 0.5 * (tb[i] + tb[i + 1]);
      bool inside = false;
      for (const auto* s : crossed)
        if (tm > s->y0 && tm < s->y1) inside = true;
      if (inside) continue;
      const auto res = quad::integrate(
          [&](double t) { return std::abs(laurent::derivative(m.map, Complex(x, t))) - 1.0; },
          tb[i], tb[i + 1], ao);
      excess.add(res.value);
    }
  }
  for (const auto* s : crossed) {
    excess.add(-s->side);
    excess.add(m.V[s->j]);
  }
  li.minus_2r = excess.value();
  li.value = 2.0 * r + li.minus_2r;
  const Complex top = laurent::evaluate_tail(m.map, Complex(x, r));
  const Complex bottom = laurent::evaluate_tail(m.map, Complex(x, -r));
  li.lower_bound_minus_2r = (top - bottom).imag();
  li.lower_bound = std::abs(2.0 * r + li.lower_bound_minus_2r);
  return li;
}

CauchySchwarz cauchy_schwarz_bound(const RhoMetric& m, const RectangleProbe& probe,
                                   const ProbeOptions& options) {
  probe.require_contains(m.domain);
  const double l = probe.l(), r = probe.r;
  const auto squares = squares_of(m.domain);
  const auto box = cluster_box(m.domain);
  std::vector<double> edges;
  for (const auto& s : squares) edges.insert(edges.end(), {s.x0, s.x1});
  const auto xb = breakpoints(l, box.xmin, box.xmax, edges);
  const auto& rule = quad::gauss_legendre(10);

  std::vector<double> nodes, weights;
  for (std::size_t i = 0; i + 1 < xb.size(); ++i) {
    const double h = 0.5 * (xb[i + 1] - xb[i]), c = 0.5 * (xb[i + 1] + xb[i]);
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      nodes.push_back(c + h * rule.nodes[k]);
      weights.push_back(h * rule.weights[k]);
    }
  }
  std::vector<double> delta(nodes.size());
  kernels::map_indices(
      [&](std::size_t i) { return line_integral(m, probe, nodes[i], options).minus_2r; }, delta,
      options.exec);
  // (L^2 - 4r^2) = delta (4r + delta), so the 4lr part never enters the sum.
  quad::CompensatedSum s;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    s.add(weights[i] * delta[i] * (4.0 * r + delta[i]));
  CauchySchwarz cs;
  cs.bound_minus_4lr = s.value() / (2.0 * r);
  cs.bound = probe.area() + cs.bound_minus_4lr;

  const std::size_t n = std::max<std::size_t>(options.x_samples, 2);
  cs.samples.resize(n);
  std::vector<double> dummy(n);
  kernels::map_indices(
      [&](std::size_t i) {
        const double x = -l + 2.0 * l * static_cast<double>(i) / static_cast<double>(n - 1);
        cs.samples[i] = line_integral(m, probe, std::clamp(x, -l, l), options);
        return 0.0;
      },
      dummy, options.exec);
  cs.line_min_minus_2r = std::numeric_limits<double>::infinity();
  for (const auto& li : cs.samples) {
    cs.line_min_minus_2r = std::min(cs.line_min_minus_2r, li.minus_2r);
    cs.fitted_C = std::max(cs.fitted_C, -li.minus_2r * r);
    if (li.minus_2r < li.lower_bound_minus_2r - 10.0 * options.line_tolerance)
      cs.endpoint_bound_holds = false;
  }
  return cs;
}

SandwichResult sandwich_check(const NormalizedMap& f, const geometry::Domain& domain,
                              std::span<const double> r_schedule, double mesh,
                              const ProbeOptions& options) {
  if (!domain.is_square_domain())
    throw PreconditionError("sandwich_check requires a square domain");
  functional::ImageOptions io;
  io.compute_defect = false;
  const auto fr = functional::functional_S(f, domain, mesh, {}, io);
  if (!fr.injectivity.injective)
    throw PreconditionError("sandwich_check refused: map is not injective (" +
                            fr.injectivity.diagnostic + ")");
  std::vector<double> V;
  for (const auto& c : fr.components) V.push_back(c.V);
  const RhoMetric metric = RhoMetric::build(f, domain, V);

  SandwichResult res;
  res.S_functional = fr.S;
  res.a1 = fr.a1.a1;
  std::vector<double> rs, area_res, cons_res;
  for (double r : r_schedule) {
    const RectangleProbe probe = options.probe(r);
    ProbeReport p;
    p.r = r;
    p.l = probe.l();
    p.l_over_r = probe.l_over_r();
    p.r_over_l2 = probe.r_over_l2();
    const auto area = probe_image_area(f, domain, probe, options);
    p.A_of_r = area.value;
    p.A_minus_4lr = area.minus_4lr;
    const auto rho = integrate_rho_squared(metric, probe, options);
    p.rho_sq_integral = rho.value;
    p.rho_sq_minus_4lr = rho.minus_4lr;
    p.quadrature_error = rho.error;
    const auto cs = cauchy_schwarz_bound(metric, probe, options);
    p.lower_bound = cs.bound;
    p.lower_bound_minus_4lr = cs.bound_minus_4lr;
    p.slack = rho.minus_4lr - cs.bound_minus_4lr;
    p.consistency_residual = rho.minus_4lr - fr.S;
    p.line_integral_min_minus_2r = cs.line_min_minus_2r;
    p.fitted_C = cs.fitted_C;
    p.equality_probe_value = integrate_one_minus_rho_squared(metric, probe, options).value;
    const double tol = 10.0 * (options.area_tolerance + 4.0 * p.l * options.line_tolerance) +
                       rho.error;
    res.slack_tolerance = std::max(res.slack_tolerance, tol);
    res.worst_slack = std::min(res.worst_slack, p.slack);
    rs.push_back(r);
    area_res.push_back(p.A_minus_4lr - kTwoPi * fr.a1.alpha());
    cons_res.push_back(p.consistency_residual);
    res.probes.push_back(p);
  }
  res.fitted_exponent_area = fit_loglog_slope(rs, area_res);
  res.fitted_exponent_consistency = fit_loglog_slope(rs, cons_res);
  return res;
}

std::vector<double> equality_probe(const NormalizedMap& f, const geometry::Domain& domain,
                                   std::span<const double> r_schedule, double mesh,
                                   const ProbeOptions& options) {
  if (!domain.is_square_domain())
    throw PreconditionError("equality_probe requires a square domain");
  if (!functional::check_injectivity(f, domain, mesh).injective)
    throw PreconditionError("equality_probe refused: map is not injective");
  const RhoMetric metric = RhoMetric::build(f, domain, mesh);
  std::vector<double> out;
  for (double r : r_schedule)
    out.push_back(integrate_one_minus_rho_squared(metric, options.probe(r), options).value);
  return out;
}

AreaAsymptotics area_asymptotics(const NormalizedMap& f, const geometry::Domain& domain,
                                 std::span<const double> r_schedule,
                                 const ProbeOptions& options) {
  AreaAsymptotics out;
  out.a1 = laurent::coefficient_a1(f).a1;
  out.limit = kTwoPi * out.a1.real();
  std::vector<double> rs, res;
  for (double r : r_schedule) {
    const RectangleProbe probe = options.probe(r);
    AreaRow row;
    row.r = r;
    row.l = probe.l();
    const auto area = probe_image_area(f, domain, probe, options);
    row.A = area.value;
    row.A_minus_4lr = area.minus_4lr;
    row.residual = row.A_minus_4lr - out.limit;
    rs.push_back(r);
    res.push_back(row.residual);
    out.rows.push_back(row);
  }
  out.fitted_exponent = fit_loglog_slope(rs, res);
  return out;
}

double fit_loglog_slope(std::span<const double> x, std::span<const double> y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
    if (!(x[i] > 0.0) || !(std::abs(y[i]) > 0.0) || !std::isfinite(y[i])) continue;
    const double lx = std::log(x[i]), ly = std::log(std::abs(y[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace squaremap::modulus
