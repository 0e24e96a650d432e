#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "squaremap/functional.hpp"
#include "squaremap/geometry.hpp"
#include "squaremap/laurent.hpp"
#include "squaremap/parallel.hpp"

namespace squaremap::uniformize {

struct OptimizerConfig {
  /// Truncation order of every pole.
  std::size_t order = 8;
  std::size_t restarts = 5;
  /// Simplex edge of the first restart, in scaled coefficient units.
  double initial_step = 0.1;
  /// Order-m coordinates get initial_step / m^step_decay.
  double step_decay = 1.0;
  /// Random kick applied to the restart seed; halves every restart.
  double restart_kick = 0.02;
  std::size_t max_evaluations = 12000;  // per restart
  double penalty_weight = 1e3;
  /// Double the weight after a restart that ends at an infeasible point.
  bool auto_double_penalty = true;
  double mesh = 1e-3;
  /// Objective stagnation between restarts.
  double objective_tolerance = 1e-7;
  /// Geometric acceptance: square defect (minimize_S) or transverse slit
  /// extent (minimize_L).
  double defect_tolerance = 5e-2;
  /// The max_defect trace column is refreshed every this many iterations.
  std::size_t defect_every = 250;
  std::uint64_t seed = 1;
  /// Exploratory: maximize S instead (no correctness claim).
  bool maximize = false;

  /// Throws SpecError on non-positive tolerances or sizes.
  void validate() const;
};

/// Linear parametrization of the competitor family: one pole per
/// non-point component at its centroid (slit frame on slits), with
/// c_m = (x_re + i x_im) * rho^(m+1) where rho is the distance from the
/// anchor to the component boundary (the Joukowski scale for slits).
class CompetitorFamily {
 public:
  CompetitorFamily(const geometry::Domain& domain, std::size_t order);

  std::size_t dimension() const { return 2 * order_ * anchors_.size(); }
  /// Laurent order m (1-based) of parameter i.
  std::size_t order_of(std::size_t i) const { return (i / 2) % order_ + 1; }
  std::size_t order() const { return order_; }
  laurent::NormalizedMap map(std::span<const double> x) const;
  /// The c_{k,m} of the map for the parameter vector x.
  std::vector<laurent::Pole> poles(std::span<const double> x) const;
  /// The scale rho of every anchor, in parameter order.
  std::vector<double> scales() const;
  /// max |c_{k,m}|.
  double coefficient_norm_inf(std::span<const double> x) const;

 private:
  struct Anchor {
    Complex location;
    laurent::PoleFrame frame;
    double frame_scale;
    double rho;
  };
  std::vector<Anchor> anchors_;
  std::size_t order_;
};

struct TraceRow {
  std::size_t iter = 0;
  std::size_t restart = 0;
  /// Raw objective (S or L_alpha) at the best simplex vertex.
  double S = 0.0;
  /// Penalty added at that vertex (0 when feasible).
  double penalty = 0.0;
  bool feasible = true;
  /// Largest square defect (or slit extent) of the best feasible point so far.
  double max_defect = 0.0;
};

struct UniformizeResult {
  laurent::NormalizedMap map;
  std::vector<double> parameters;
  std::vector<laurent::Pole> poles;
  /// S_min for minimize_S, L_min for minimize_L.
  double objective = 0.0;
  functional::FunctionalReport report;
  std::vector<double> square_defects;
  /// For minimize_L: image extents transverse to the slit direction.
  std::vector<double> transverse_extents;
  std::vector<TraceRow> trace;
  /// Best-so-far max |c| at the end of each restart.
  std::vector<double> restart_coefficient_norms;
  std::vector<double> restart_objectives;
  double coefficient_norm_inf = 0.0;
  std::size_t evaluations = 0;
  double final_penalty_weight = 0.0;
  /// No infeasible evaluation scored below the best feasible objective.
  bool penalty_dominance = true;
  bool converged = false;
  std::string status;
};

/// Minimizes S over the competitor family (maximizes with config.maximize).
UniformizeResult minimize_S(const geometry::Domain& domain, const OptimizerConfig& config);

/// Minimizes L_alpha = Re(e^{i alpha} a1) over the competitor family.
UniformizeResult minimize_L(const geometry::Domain& domain, double alpha,
                            const OptimizerConfig& config);

struct PropertyOptions {
  double mesh = 1e-3;
  double tolerance = 1e-4;
  /// Give up once rejections exceed this multiple of sample_count.
  double rejection_cap = 20.0;
  std::size_t order = 8;
  Exec exec = Exec::parallel;
};

struct PropertyReport {
  std::size_t samples = 0;
  std::size_t rejected = 0;
  std::size_t violations = 0;
  double tolerance = 0.0;
  double min = 0.0, mean = 0.0, max = 0.0;
  /// Pearson correlation between the objective and the perturbation norm.
  double correlation = 0.0;
  std::vector<double> values;
  std::vector<double> norms;
  /// slit_positivity on the slit [-2i, 2i]: a1 of the composite competitor.
  std::optional<Complex> composite_a1;
  std::optional<Complex> composite_contour_a1;
};

/// Random injective perturbations of the identity on a square domain; the
/// objective is S, which must not fall below -tolerance.
PropertyReport verify_extremal(const geometry::Domain& domain, std::size_t sample_count,
                               double amplitude, std::uint64_t seed,
                               const PropertyOptions& options = {});

/// Same with objective Re(a1) on a vertical-slit domain.
PropertyReport slit_positivity(const geometry::Domain& domain, std::size_t sample_count,
                               double amplitude, std::uint64_t seed,
                               const PropertyOptions& options = {});

double pearson(std::span<const double> a, std::span<const double> b);

}  // namespace squaremap::uniformize
