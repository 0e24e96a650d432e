#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "squaremap/core.hpp"
#include "squaremap/laurent.hpp"
#include "squaremap/parallel.hpp"

namespace squaremap::kernels {

/// out[k] = f(in[k]).
void evaluate_points(const laurent::NormalizedMap& f, std::span<const Complex> in,
                     std::span<Complex> out, Exec exec = Exec::parallel);

std::vector<Complex> evaluate_points(const laurent::NormalizedMap& f,
                                     std::span<const Complex> in,
                                     Exec exec = Exec::parallel);

/// out[k] = f'(in[k]).
void derivative_points(const laurent::NormalizedMap& f, std::span<const Complex> in,
                       std::span<Complex> out, Exec exec = Exec::parallel);

/// An axis-aligned cell [x0, x1] x [y0, y1].
struct Cell {
  double x0, x1, y0, y1;
  double area() const { return (x1 - x0) * (y1 - y0); }
};

/// Tensor Gauss-Legendre rule of `order` points per axis applied to every
/// cell; out[i] is the integral over cells[i].
void integrate_cells(const std::function<double(Complex)>& integrand,
                     std::span<const Cell> cells, std::size_t order,
                     std::span<double> out, Exec exec = Exec::parallel);

/// out[i] = fn(i) for i < out.size(); generic per-item fan-out for batches
/// whose results are reduced afterwards in index order.
void map_indices(const std::function<double(std::size_t)>& fn, std::span<double> out,
                 Exec exec = Exec::parallel);

}  // namespace squaremap::kernels
