#include "squaremap/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "squaremap/core.hpp"

namespace squaremap::optim {

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::vector<double> x0, std::span<const double> steps,
                             const NelderMeadOptions& options,
                             const IterationCallback& on_iteration) {
  const std::size_t n = x0.size();
  if (steps.size() != n) throw SpecError("nelder_mead: one step per coordinate expected");
  NelderMeadResult res;
  if (n == 0) {
    res.value = f(x0);
    res.evaluations = 1;
    res.converged = true;
    return res;
  }
  const double dn = static_cast<double>(n);
  const double alpha = 1.0;
  const double beta = options.adaptive ? 1.0 + 2.0 / dn : 2.0;   // expansion
  const double gamma = options.adaptive ? 0.75 - 0.5 / dn : 0.5;  // contraction
  const double delta = options.adaptive ? 1.0 - 1.0 / dn : 0.5;   // shrink

  std::vector<std::vector<double>> simplex(n + 1, x0);
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += steps[i];
  auto eval = [&](const std::vector<double>& x) {
    ++res.evaluations;
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };
  for (std::size_t i = 0; i <= n; ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);
  auto point = [&](double t, std::vector<double>& out, const std::vector<double>& worst) {
    for (std::size_t k = 0; k < n; ++k) out[k] = centroid[k] + t * (worst[k] - centroid[k]);
  };

  while (res.evaluations < options.max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    // Stable sort keeps ties in vertex order, so runs are reproducible.
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];
    ++res.iterations;
    if (on_iteration) on_iteration(res.iterations, simplex[best], values[best]);

    double diameter = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      double d = 0.0;
      for (std::size_t k = 0; k < n; ++k) d = std::max(d, std::abs(simplex[i][k] - simplex[best][k]));
      diameter = std::max(diameter, d);
    }
    if (std::abs(values[worst] - values[best]) <= options.f_tolerance &&
        diameter <= options.x_tolerance) {
      res.converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k] / dn;
    }
    point(-alpha, trial, simplex[worst]);
    const double fr = eval(trial);
    if (fr < values[best]) {
      point(-alpha * beta, trial2, simplex[worst]);
      const double fe = eval(trial2);
      if (fe < fr) {
        simplex[worst] = trial2;
        values[worst] = fe;
      } else {
        simplex[worst] = trial;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = trial;
      values[worst] = fr;
      continue;
    }
    // Outside or inside contraction.
    const bool outside = fr < values[worst];
    point(outside ? -alpha * gamma : gamma, trial2, simplex[worst]);
    const double fc = eval(trial2);
    if (fc < (outside ? fr : values[worst])) {
      simplex[worst] = trial2;
      values[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t k = 0; k < n; ++k)
        simplex[i][k] = simplex[best][k] + delta * (simplex[i][k] - simplex[best][k]);
      values[i] = eval(simplex[i]);
    }
  }
  const auto it = std::min_element(values.begin(), values.end());
  res.x = simplex[static_cast<std::size_t>(it - values.begin())];
  res.value = *it;
  return res;
}

}  // namespace squaremap::optim
