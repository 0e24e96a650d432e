#include "squaremap/uniformize.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "squaremap/core.hpp"
#include "squaremap/nelder_mead.hpp"

namespace squaremap::uniformize {

namespace {

using functional::ImageComponent;
using laurent::NormalizedMap;
using laurent::PoleFrame;

constexpr double kHuge = 1e300;

// Uniform sample of the closed unit disk.
Complex unit_disk_sample(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = std::sqrt(u(rng));
  const double t = kTwoPi * u(rng);
  return std::polar(r, t);
}

struct EvalInfo {
  double raw = 0.0;
  double penalty = 0.0;
  bool feasible = false;
};

enum class Objective { S, L };

struct Problem {
  const geometry::Domain* domain;
  const CompetitorFamily* family;
  Objective kind;
  double alpha = 0.0;
  double mesh;
  bool maximize;
  functional::BoundarySources sources;
};

// Raw objective and injectivity of the competitor at x. A mesh that is too
// coarse for the image (a wildly stretched map) counts as infeasible.
EvalInfo evaluate(const Problem& p, std::span<const double> x, double weight) {
  EvalInfo info;
  try {
    const NormalizedMap f = p.family->map(x);
    functional::ImageOptions io;
    io.compute_defect = false;
    const auto comps = functional::image_components(f, *p.domain, p.sources, io);
    const Complex a1 = laurent::coefficient_a1(f).a1;
    info.raw = p.kind == Objective::S ? functional::assemble_S(a1, comps)
                                      : functional::functional_L(a1, p.alpha);
    if (p.maximize) info.raw = -info.raw;
    const auto inj = functional::assess_injectivity(comps);
    info.feasible = inj.injective;
    // The unit offset keeps every infeasible point at least `weight` above
    // its raw value, however small the violation measure is.
    if (!info.feasible) info.penalty = weight * (1.0 + inj.violation());
  } catch (const NumericError&) {
    info.raw = 0.0;
    info.penalty = kHuge;
    info.feasible = false;
  }
  if (!std::isfinite(info.raw)) {
    info.raw = 0.0;
    info.penalty = kHuge;
    info.feasible = false;
  }
  return info;
}

// Minimizes phi on [lo, hi] by a 9-point grid followed by golden-section
// refinement of the best grid cell; returns the best t seen. Ties go to the
// t closest to `prefer`, so flat directions collapse toward it.
double line_search(const std::function<double(double)>& phi, double lo, double hi,
                   double prefer, double current) {
  double best_t = current, best_v = phi(current);
  auto consider = [&](double t, double v) {
    if (v < best_v || (v == best_v && std::abs(t - prefer) < std::abs(best_t - prefer))) {
      best_v = v;
      best_t = t;
    }
  };
  constexpr int kGrid = 8;
  const double h = (hi - lo) / kGrid;
  for (int i = 0; i <= kGrid; ++i) {
    const double t = lo + h * i;
    consider(t, phi(t));
  }
  double a = std::max(lo, best_t - h), b = std::min(hi, best_t + h);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = phi(c), fd = phi(d);
  consider(c, fc);
  consider(d, fd);
  for (int it = 0; it < 14; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = phi(c);
      consider(c, fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = phi(d);
      consider(d, fd);
    }
  }
  return best_t;
}

struct Diagnostics {
  functional::FunctionalReport report;
  std::vector<double> square_defects;
  std::vector<double> transverse;
  double max_defect = 0.0;
};

Diagnostics diagnose(const Problem& p, std::span<const double> x) {
  Diagnostics d;
  const NormalizedMap f = p.family->map(x);
  std::vector<double> alphas;
  if (p.kind == Objective::L) alphas.push_back(p.alpha);
  d.report = functional::functional_S(f, *p.domain, p.mesh, alphas);
  const functional::SlitSpec slit{p.alpha};
  for (std::size_t j = 0; j < d.report.components.size(); ++j) {
    const auto& c = d.report.components[j];
    if (geometry::is_point_like((*p.domain)[j])) {
      d.square_defects.push_back(0.0);
      d.transverse.push_back(0.0);
      continue;
    }
    d.square_defects.push_back(c.square_defect);
    d.transverse.push_back(geometry::extent_along(c.curve.samples, slit.transverse()));
  }
  const auto& v = p.kind == Objective::S ? d.square_defects : d.transverse;
  for (double e : v) d.max_defect = std::max(d.max_defect, e);
  return d;
}

UniformizeResult optimize(const Problem& p, const OptimizerConfig& cfg) {
  cfg.validate();
  const std::size_t n = p.family->dimension();
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  UniformizeResult res;
  double weight = cfg.penalty_weight;
  std::map<std::vector<double>, EvalInfo> seen;

  bool have_feasible = false;
  std::vector<double> best_x(n, 0.0);
  double best_raw = std::numeric_limits<double>::infinity();
  double worst_infeasible_floor = std::numeric_limits<double>::infinity();

  double defect_of_best = std::numeric_limits<double>::infinity();
  std::vector<double> defect_x;
  auto refresh_defect = [&] {
    if (!have_feasible) return;
    if (defect_x == best_x) return;
    defect_of_best = diagnose(p, best_x).max_defect;
    defect_x = best_x;
  };

  auto objective = [&](std::span<const double> x) {
    std::vector<double> key(x.begin(), x.end());
    auto it = seen.find(key);
    if (it == seen.end()) {
      it = seen.emplace(std::move(key), evaluate(p, x, weight)).first;
    }
    const EvalInfo& info = it->second;
    if (info.feasible) {
      if (info.raw < best_raw) {
        best_raw = info.raw;
        best_x.assign(x.begin(), x.end());
        have_feasible = true;
      }
    } else {
      worst_infeasible_floor = std::min(worst_infeasible_floor, info.raw + info.penalty);
    }
    return info.raw + info.penalty;
  };

  // Line searches through the best point: the ray to the identity, then
  // each tail (orders >= m) scaled toward zero, then every coordinate. The simplex
  // method stalls on kinks (S is only piecewise smooth, a cone at the
  // identity on square domains); these moves do not.
  auto polish = [&](std::vector<double> x, std::span<const double> steps) {
    std::size_t evals = 0;
    auto value = [&](const std::vector<double>& y) {
      ++evals;
      return objective(y);
    };
    // Scales every coordinate of order >= m by t.
    auto tail = [&](const std::vector<double>& base, std::size_t m) {
      return [&, m](double t) {
        std::vector<double> y = base;
        for (std::size_t i = 0; i < n; ++i)
          if (p.family->order_of(i) >= m) y[i] *= t;
        return value(y);
      };
    };
    for (std::size_t m = 1; m <= p.family->order(); ++m) {
      const double t = line_search(tail(x, m), 0.0, 1.25, 0.0, 1.0);
      for (std::size_t i = 0; i < n; ++i)
        if (p.family->order_of(i) >= m) x[i] *= t;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double h = steps[i];
      const double x_i = x[i];
      auto phi = [&](double t) {
        std::vector<double> y = x;
        y[i] = t;
        return value(y);
      };
      x[i] = line_search(phi, x_i - h, x_i + h, 0.0, x_i);
    }
    // Ties were broken toward the identity; keep that point even when it
    // only matches the best objective.
    const EvalInfo& info = seen.at(x);
    if (info.feasible && info.raw <= best_raw) {
      best_raw = info.raw;
      best_x = x;
    }
    return evals;
  };

  // The identity is always a competitor. On slit domains it sits on the
  // boundary of the injective set, and a random first simplex may never
  // find a feasible point without it.
  std::vector<double> start(n, 0.0);
  objective(start);
  res.evaluations += 1;
  double previous_best = std::numeric_limits<double>::infinity();
  bool stagnated = false;
  std::size_t global_iter = 0;

  for (std::size_t k = 0; k < cfg.restarts; ++k) {
    const double shrink = std::ldexp(1.0, -static_cast<int>(k));
    // Every restart, the first included, starts from a seeded random point
    // near the best-so-far (the identity at first). The family is centred
    // on the identity, so later steps and kicks never exceed a multiple of
    // the best point's distance from it: near-identity minimizers (square
    // domains) then contract geometrically.
    std::vector<double> x0 = have_feasible ? best_x : start;
    double radius = std::numeric_limits<double>::infinity();
    if (have_feasible && k > 0) {
      double d = 0.0;
      for (double v : best_x) d = std::max(d, std::abs(v));
      radius = std::max(d, 1e-12);
    }
    const double kick = std::min(cfg.restart_kick * shrink, 0.5 * radius);
    for (double& v : x0) v += kick * gauss(rng);
    std::vector<double> steps(n);
    for (std::size_t i = 0; i < n; ++i)
      steps[i] = std::min(cfg.initial_step * shrink, 2.0 * radius) /
                 std::pow(static_cast<double>(p.family->order_of(i)), cfg.step_decay);

    optim::NelderMeadOptions nm;
    nm.max_evaluations = cfg.max_evaluations;
    nm.f_tolerance = 1e-3 * cfg.objective_tolerance;
    nm.x_tolerance = 1e-10;
    std::size_t local_iter = 0;
    auto on_iter = [&](std::size_t, std::span<const double> xb, double) {
      ++global_iter;
      ++local_iter;
      if (local_iter % cfg.defect_every == 1) refresh_defect();
      const auto& info = seen.at(std::vector<double>(xb.begin(), xb.end()));
      TraceRow row;
      row.iter = global_iter;
      row.restart = k;
      row.S = p.maximize ? -info.raw : info.raw;
      row.penalty = info.penalty;
      row.feasible = info.feasible;
      row.max_defect = have_feasible ? defect_of_best : std::numeric_limits<double>::quiet_NaN();
      res.trace.push_back(row);
    };
    const auto out = optim::nelder_mead(objective, x0, steps, nm, on_iter);
    res.evaluations += out.evaluations;
    if (have_feasible) res.evaluations += polish(best_x, steps);
    refresh_defect();

    res.restart_objectives.push_back(p.maximize ? -best_raw : best_raw);
    res.restart_coefficient_norms.push_back(
        have_feasible ? p.family->coefficient_norm_inf(best_x)
                      : std::numeric_limits<double>::quiet_NaN());

    const auto& end_info = seen.at(out.x);
    if (!end_info.feasible && cfg.auto_double_penalty) {
      weight *= 2.0;
      // Re-score every cached infeasible point under the new weight.
      for (auto& [key, info] : seen)
        if (!info.feasible && info.penalty < kHuge) info.penalty *= 2.0;
    }
    stagnated = k > 0 && std::abs(previous_best - best_raw) <= cfg.objective_tolerance;
    previous_best = best_raw;
  }
  if (!have_feasible)
    throw NumericError("optimizer found no injective competitor; refine the mesh or "
                       "reduce the initial step");

  const Diagnostics d = diagnose(p, best_x);
  res.map = p.family->map(best_x);
  res.parameters = best_x;
  res.poles = p.family->poles(best_x);
  res.objective = p.maximize ? -best_raw : best_raw;
  res.report = d.report;
  res.square_defects = d.square_defects;
  res.transverse_extents = d.transverse;
  res.coefficient_norm_inf = p.family->coefficient_norm_inf(best_x);
  res.final_penalty_weight = weight;
  res.penalty_dominance = worst_infeasible_floor >= best_raw;

  const bool geometric = d.max_defect <= cfg.defect_tolerance;
  res.converged = stagnated && geometric && d.report.injectivity.injective;
  std::ostringstream os;
  if (res.converged) {
    os << "converged";
  } else {
    os << "not converged:";
    if (!stagnated) os << " objective still moving after " << cfg.restarts << " restarts;";
    if (!geometric)
      os << " max " << (p.kind == Objective::S ? "square defect " : "transverse extent ")
         << d.max_defect << " > " << cfg.defect_tolerance << ";";
    if (!d.report.injectivity.injective) os << " " << d.report.injectivity.diagnostic << ";";
  }
  if (!res.penalty_dominance) os << " penalty weight too small (infeasible point scored below best)";
  res.status = os.str();
  return res;
}

void require(bool ok, const char* what) {
  if (!ok) throw SpecError(std::string("optimizer config: ") + what);
}

// Distance from the anchor to the component boundary. An order-m term moves
// the boundary by about m |c_m| / rho^(m+1), so c_m = x rho^(m+1) puts all
// orders on one footing; the circumradius would overweight high orders by
// (circumradius / inradius)^(m+1) on squares.
double anchor_scale(const geometry::Component& c, Complex anchor) {
  using namespace geometry;
  if (const auto* d = std::get_if<Disk>(&c)) return d->radius;
  if (const auto* s = std::get_if<AxisSquare>(&c)) return 0.5 * s->side;
  if (const auto* r = std::get_if<AxisRectangle>(&c)) return 0.5 * std::min(r->width, r->height);
  if (const auto* p = std::get_if<Polygon>(&c)) {
    double best = std::numeric_limits<double>::infinity();
    const auto& v = p->vertices;
    for (std::size_t k = 0; k < v.size(); ++k)
      best = std::min(best, point_segment_distance(anchor, v[k], v[(k + 1) % v.size()]));
    return best > 0.0 ? best : circumradius(c);
  }
  return circumradius(c);
}

}  // namespace

void OptimizerConfig::validate() const {
  require(order >= 1, "order must be at least 1");
  require(restarts >= 1, "restarts must be at least 1");
  require(initial_step > 0.0, "initial_step must be positive");
  require(restart_kick >= 0.0, "restart_kick must be non-negative");
  require(step_decay >= 0.0, "step_decay must be non-negative");
  require(max_evaluations >= 1, "max_evaluations must be positive");
  require(penalty_weight > 0.0, "penalty_weight must be positive");
  require(mesh > 0.0, "mesh must be positive");
  require(objective_tolerance > 0.0, "objective_tolerance must be positive");
  require(defect_tolerance > 0.0, "defect_tolerance must be positive");
  require(defect_every >= 1, "defect_every must be positive");
}

CompetitorFamily::CompetitorFamily(const geometry::Domain& domain, std::size_t order)
    : order_(order) {
  if (order == 0) throw SpecError("competitor order must be at least 1");
  for (const auto& c : domain.components()) {
    if (geometry::is_point_like(c)) continue;
    Anchor a;
    a.location = geometry::centroid(c);
    a.frame = PoleFrame::plain;
    a.frame_scale = 0.0;
    a.rho = anchor_scale(c, a.location);
    if (const auto* v = std::get_if<geometry::VerticalSlit>(&c)) {
      a.frame = PoleFrame::vertical_slit;
      a.frame_scale = v->length / 4.0;
      a.rho = a.frame_scale;
    } else if (const auto* h = std::get_if<geometry::HorizontalSlit>(&c)) {
      a.frame = PoleFrame::horizontal_slit;
      a.frame_scale = h->length / 4.0;
      a.rho = a.frame_scale;
    }
    anchors_.push_back(a);
  }
}

std::vector<laurent::Pole> CompetitorFamily::poles(std::span<const double> x) const {
  if (x.size() != dimension()) throw SpecError("competitor parameter vector has wrong size");
  std::vector<laurent::Pole> out;
  out.reserve(anchors_.size());
  for (std::size_t k = 0; k < anchors_.size(); ++k) {
    const Anchor& a = anchors_[k];
    laurent::Pole pole;
    pole.location = a.location;
    pole.frame = a.frame;
    pole.frame_scale = a.frame_scale;
    double scale = a.rho;
    for (std::size_t m = 1; m <= order_; ++m) {
      scale *= a.rho;
      const std::size_t base = 2 * (k * order_ + (m - 1));
      pole.coefficients.emplace_back(x[base] * scale, x[base + 1] * scale);
    }
    out.push_back(std::move(pole));
  }
  return out;
}

NormalizedMap CompetitorFamily::map(std::span<const double> x) const {
  if (std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; }))
    return NormalizedMap::identity();
  return NormalizedMap::multipole(poles(x));
}

std::vector<double> CompetitorFamily::scales() const {
  std::vector<double> out;
  for (const auto& a : anchors_) out.push_back(a.rho);
  return out;
}

double CompetitorFamily::coefficient_norm_inf(std::span<const double> x) const {
  double m = 0.0;
  for (const auto& p : poles(x))
    for (const auto& c : p.coefficients) m = std::max(m, std::abs(c));
  return m;
}

UniformizeResult minimize_S(const geometry::Domain& domain, const OptimizerConfig& config) {
  if (domain.empty()) throw PreconditionError("minimize_S needs at least one component");
  const CompetitorFamily family(domain, config.order);
  if (family.dimension() == 0)
    throw PreconditionError("every component is a point; there is nothing to optimize");
  const Problem p{&domain, &family, Objective::S, 0.0, config.mesh, config.maximize,
                  functional::prepare_sources(domain, config.mesh)};
  return optimize(p, config);
}

UniformizeResult minimize_L(const geometry::Domain& domain, double alpha,
                            const OptimizerConfig& config) {
  if (domain.empty()) throw PreconditionError("minimize_L needs at least one component");
  const CompetitorFamily family(domain, config.order);
  if (family.dimension() == 0)
    throw PreconditionError("every component is a point; there is nothing to optimize");
  const Problem p{&domain, &family, Objective::L, reduce_angle(alpha), config.mesh, false,
                  functional::prepare_sources(domain, config.mesh)};
  return optimize(p, config);
}

double pearson(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = std::min(a.size(), b.size());
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sab / std::sqrt(saa * sbb);
}

namespace {

struct Sample {
  std::vector<double> x;
  double norm = 0.0;
  double value = 0.0;
  bool injective = false;
};

// Shared driver of the two property suites. Samples are drawn serially from
// one generator and evaluated in batches, so the accepted set does not
// depend on the thread count.
PropertyReport run_property(const geometry::Domain& domain, Objective kind,
                            std::size_t sample_count, double amplitude, std::uint64_t seed,
                            const PropertyOptions& options) {
  if (sample_count == 0) throw SpecError("sample_count must be positive");
  if (!(amplitude >= 0.0)) throw SpecError("amplitude must be non-negative");
  if (!(options.tolerance > 0.0)) throw SpecError("tolerance must be positive");
  const CompetitorFamily family(domain, options.order);
  const std::size_t n = family.dimension();
  const std::size_t per_anchor = 2 * options.order;
  const std::size_t anchors = family.scales().size();
  const auto sources = functional::prepare_sources(domain, options.mesh);

  PropertyReport rep;
  rep.tolerance = options.tolerance;
  std::mt19937_64 rng(seed);
  const auto cap = static_cast<std::size_t>(options.rejection_cap * static_cast<double>(sample_count));

  while (rep.values.size() < sample_count) {
    std::vector<Sample> batch(sample_count - rep.values.size());
    for (auto& s : batch) {
      s.x.assign(n, 0.0);
      for (std::size_t k = 0; k < anchors; ++k) {
        for (std::size_t m = 1; m <= options.order; ++m) {
          // Scaled units: |c_m| <= amplitude rho^(m+1) / m^2, which stays
          // below `amplitude` for components of circumradius <= 1.
          const Complex u = unit_disk_sample(rng) * (amplitude / static_cast<double>(m * m));
          const std::size_t base = k * per_anchor + 2 * (m - 1);
          s.x[base] = u.real();
          s.x[base + 1] = u.imag();
        }
      }
    }
    for_each_index(options.exec, batch.size(), [&](std::size_t i) {
      Sample& s = batch[i];
      try {
        const NormalizedMap f = family.map(s.x);
        functional::ImageOptions io;
        io.compute_defect = false;
        io.exec = Exec::serial;  // the batch is the parallel axis
        const auto comps = functional::image_components(f, domain, sources, io);
        const Complex a1 = laurent::coefficient_a1(f).a1;
        s.injective = functional::assess_injectivity(comps).injective;
        s.value = kind == Objective::S ? functional::assemble_S(a1, comps) : a1.real();
        double nn = 0.0;
        for (const auto& p : family.poles(s.x))
          for (const auto& c : p.coefficients) nn += std::norm(c);
        s.norm = std::sqrt(nn);
      } catch (const NumericError&) {
        s.injective = false;
      }
    });
    for (auto& s : batch) {
      if (!s.injective) {
        ++rep.rejected;
        continue;
      }
      rep.values.push_back(s.value);
      rep.norms.push_back(s.norm);
    }
    if (rep.rejected > cap) {
      std::ostringstream os;
      os << rep.rejected << " of " << rep.rejected + rep.values.size()
         << " samples were not injective at amplitude " << amplitude
         << "; lower the amplitude or refine the mesh";
      throw NumericError(os.str());
    }
  }

  rep.samples = rep.values.size();
  rep.min = *std::min_element(rep.values.begin(), rep.values.end());
  rep.max = *std::max_element(rep.values.begin(), rep.values.end());
  double sum = 0.0;
  for (double v : rep.values) {
    sum += v;
    if (v < -options.tolerance) ++rep.violations;
  }
  rep.mean = sum / static_cast<double>(rep.samples);
  rep.correlation = pearson(rep.values, rep.norms);
  return rep;
}

}  // namespace

PropertyReport verify_extremal(const geometry::Domain& domain, std::size_t sample_count,
                               double amplitude, std::uint64_t seed,
                               const PropertyOptions& options) {
  if (!domain.is_square_domain())
    throw PreconditionError("verify_extremal requires a square domain");
  return run_property(domain, Objective::S, sample_count, amplitude, seed, options);
}

PropertyReport slit_positivity(const geometry::Domain& domain, std::size_t sample_count,
                               double amplitude, std::uint64_t seed,
                               const PropertyOptions& options) {
  if (!domain.is_vertical_slit_domain())
    throw PreconditionError("slit_positivity requires a vertical slit domain");
  PropertyReport rep = run_property(domain, Objective::L, sample_count, amplitude, seed, options);

  // The slit [-2i, 2i]: open it to the unit circle, then flatten that onto
  // the horizontal slit [-2, 2].
  if (domain.size() == 1) {
    if (const auto* v = std::get_if<geometry::VerticalSlit>(&domain[0])) {
      if (v->center == Complex(0.0, 0.0) && v->length == 4.0) {
        const geometry::Domain disk({geometry::Disk{{0.0, 0.0}, 1.0}});
        const NormalizedMap open = NormalizedMap::inverse(NormalizedMap::joukowski(-1, 1.0, {}));
        const NormalizedMap flat = NormalizedMap::joukowski(+1, 1.0, {});
        const NormalizedMap g = laurent::compose_checked(flat, open, domain, disk, options.mesh);
        rep.composite_a1 = laurent::coefficient_a1(g).a1;
        rep.composite_contour_a1 = laurent::contour_a1_converged(g).value;
      }
    }
  }
  return rep;
}

}  // namespace squaremap::uniformize
