#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace squaremap::optim {

struct NelderMeadOptions {
  std::size_t max_evaluations = 20000;
  /// Stop when the spread of simplex values falls below this...
  double f_tolerance = 1e-12;
  /// ...and the simplex diameter below this.
  double x_tolerance = 1e-9;
  /// Dimension-dependent coefficients (Gao & Han); classic ones otherwise.
  bool adaptive = true;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evaluations = 0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Called once per iteration with the iteration count and the best vertex.
using IterationCallback =
    std::function<void(std::size_t iteration, std::span<const double> best, double value)>;

/// Minimizes `f` from a simplex x0 + steps[i] e_i.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::vector<double> x0, std::span<const double> steps,
                             const NelderMeadOptions& options = {},
                             const IterationCallback& on_iteration = {});

}  // namespace squaremap::optim
