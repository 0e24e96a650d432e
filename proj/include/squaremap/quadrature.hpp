#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "squaremap/core.hpp"

namespace squaremap::quad {

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached per n; thread-safe after first construction.
const GaussLegendre& gauss_legendre(std::size_t n);

struct AdaptiveOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  int max_depth = 40;
  std::size_t max_intervals = 20000;
};

template <typename T>
struct AdaptiveResult {
  T value{};
  double error = 0.0;
  std::size_t intervals = 0;
  bool converged = true;
};

/// Globally adaptive Gauss-Kronrod (7/15) integration of a real integrand.
AdaptiveResult<double> integrate(const std::function<double(double)>& f,
                                 double a, double b,
                                 const AdaptiveOptions& options = {});

/// Same rule for complex-valued integrands; the error estimate uses the
/// modulus of the Gauss/Kronrod difference.
AdaptiveResult<Complex> integrate_complex(
    const std::function<Complex(double)>& f, double a, double b,
    const AdaptiveOptions& options = {});

/// Integrates over consecutive break intervals [breaks[i], breaks[i+1]],
/// splitting the absolute tolerance evenly.
AdaptiveResult<double> integrate_piecewise(
    const std::function<double(double)>& f, std::span<const double> breaks,
    const AdaptiveOptions& options = {});

/// Neumaier-compensated summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double compensated_sum(std::span<const double> values);

}  // namespace squaremap::quad
