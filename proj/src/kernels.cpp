#include "squaremap/kernels.hpp"

#include <cstdlib>
#include <string>

#include "squaremap/quadrature.hpp"

namespace squaremap {

int configure_threads_from_env() {
#if defined(_OPENMP)
  if (const char* v = std::getenv(kThreadsEnv)) {
    try {
      const int n = std::stoi(v);
      if (n > 0) omp_set_num_threads(n);
    } catch (const std::exception&) {
      throw SpecError(std::string(kThreadsEnv) + " must be a positive integer");
    }
  }
  return omp_get_max_threads();
#else
  return 1;
#endif
}

int max_threads() {
#if defined(_OPENMP)
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace kernels {

void evaluate_points(const laurent::NormalizedMap& f, std::span<const Complex> in,
                     std::span<Complex> out, Exec exec) {
  for_each_index(exec, in.size(), [&](std::size_t k) { out[k] = laurent::evaluate(f, in[k]); });
}

std::vector<Complex> evaluate_points(const laurent::NormalizedMap& f,
                                     std::span<const Complex> in, Exec exec) {
  std::vector<Complex> out(in.size());
  evaluate_points(f, in, out, exec);
  return out;
}

void derivative_points(const laurent::NormalizedMap& f, std::span<const Complex> in,
                       std::span<Complex> out, Exec exec) {
  for_each_index(exec, in.size(),
                 [&](std::size_t k) { out[k] = laurent::derivative(f, in[k]); });
}

void integrate_cells(const std::function<double(Complex)>& integrand,
                     std::span<const Cell> cells, std::size_t order, std::span<double> out,
                     Exec exec) {
  const auto& rule = quad::gauss_legendre(order);
  for_each_index(exec, cells.size(), [&](std::size_t i) {
    const Cell& c = cells[i];
    const double hx = 0.5 * (c.x1 - c.x0), hy = 0.5 * (c.y1 - c.y0);
    const double mx = 0.5 * (c.x1 + c.x0), my = 0.5 * (c.y1 + c.y0);
    double acc = 0.0;
    for (std::size_t a = 0; a < order; ++a) {
      double row = 0.0;
      const double x = mx + hx * rule.nodes[a];
      for (std::size_t b = 0; b < order; ++b)
        row += rule.weights[b] * integrand(Complex(x, my + hy * rule.nodes[b]));
      acc += rule.weights[a] * row;
    }
    out[i] = acc * hx * hy;
  });
}

void map_indices(const std::function<double(std::size_t)>& fn, std::span<double> out,
                 Exec exec) {
  for_each_index(exec, out.size(), [&](std::size_t i) { out[i] = fn(i); });
}

}  // namespace kernels
}  // namespace squaremap
