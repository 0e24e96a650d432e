#include "squaremap/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <queue>

namespace squaremap::quad {
namespace {

// QUADPACK qk15 abscissae and weights.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename T>
struct Segment {
  double a, b;
  T value;
  double error;
  int depth;
  bool operator<(const Segment& o) const { return error < o.error; }
};

double magnitude(double x) { return std::abs(x); }
double magnitude(const Complex& x) { return std::abs(x); }

template <typename T, typename F>
Segment<T> kronrod15(const F& f, double a, double b, int depth) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const T fc = f(center);
  T gauss = fc * kWg[3];
  T kronrod = fc * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const T f1 = f(center - dx);
    const T f2 = f(center + dx);
    kronrod += (f1 + f2) * kWgk[j];
    if (j % 2 == 1) gauss += (f1 + f2) * kWg[j / 2];
  }
  return {a, b, kronrod * half, magnitude((kronrod - gauss) * half), depth};
}

template <typename T, typename F>
AdaptiveResult<T> adaptive(const F& f, double a, double b,
                           const AdaptiveOptions& opt) {
  AdaptiveResult<T> out;
  if (a == b) return out;
  std::priority_queue<Segment<T>> heap;
  heap.push(kronrod15<T>(f, a, b, 0));
  T total = heap.top().value;
  double error = heap.top().error;
  while (!heap.empty()) {
    const double tol = std::max(opt.abs_tol, opt.rel_tol * magnitude(total));
    if (error <= tol) break;
    if (heap.size() >= opt.max_intervals) {
      out.converged = false;
      break;
    }
    Segment<T> worst = heap.top();
    if (worst.depth >= opt.max_depth) {
      out.converged = false;
      break;
    }
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    auto left = kronrod15<T>(f, worst.a, mid, worst.depth + 1);
    auto right = kronrod15<T>(f, mid, worst.b, worst.depth + 1);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum from the leaves to shed accumulated update rounding.
  T sum{};
  double err = 0.0;
  out.intervals = heap.size();
  while (!heap.empty()) {
    sum += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  out.value = sum;
  out.error = err;
  return out;
}

GaussLegendre build_rule(std::size_t n) {
  GaussLegendre rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x = std::cos(kPi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      const double pn = (n == 1) ? x : p1;
      const double pnm1 = (n == 1) ? 1.0 : p0;
      dp = static_cast<double>(n) * (x * pn - pnm1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  std::reverse(rule.nodes.begin(), rule.nodes.end());
  std::reverse(rule.weights.begin(), rule.weights.end());
  return rule;
}

}  // namespace

const GaussLegendre& gauss_legendre(std::size_t n) {
  static std::mutex guard;
  static std::map<std::size_t, GaussLegendre> cache;
  std::lock_guard<std::mutex> lock(guard);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
  return it->second;
}

AdaptiveResult<double> integrate(const std::function<double(double)>& f,
                                 double a, double b,
                                 const AdaptiveOptions& options) {
  return adaptive<double>(f, a, b, options);
}

AdaptiveResult<Complex> integrate_complex(
    const std::function<Complex(double)>& f, double a, double b,
    const AdaptiveOptions& options) {
  return adaptive<Complex>(f, a, b, options);
}

AdaptiveResult<double> integrate_piecewise(
    const std::function<double(double)>& f, std::span<const double> breaks,
    const AdaptiveOptions& options) {
  AdaptiveResult<double> out;
  if (breaks.size() < 2) return out;
  AdaptiveOptions local = options;
  local.abs_tol = options.abs_tol / static_cast<double>(breaks.size() - 1);
  CompensatedSum sum;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    auto piece = adaptive<double>(f, breaks[i], breaks[i + 1], local);
    sum.add(piece.value);
    out.error += piece.error;
    out.intervals += piece.intervals;
    out.converged = out.converged && piece.converged;
  }
  out.value = sum.value();
  return out;
}

double compensated_sum(std::span<const double> values) {
  CompensatedSum sum;
  for (double v : values) sum.add(v);
  return sum.value();
}

}  // namespace squaremap::quad
