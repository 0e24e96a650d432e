#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "squaremap/geometry.hpp"

namespace squaremap::geometry {
namespace {

// n closed edges, or one degenerate edge for a single-point curve.
std::size_t segment_count(std::span<const Complex> c) { return c.size(); }

}  // namespace

SegmentIndex::SegmentIndex(std::vector<std::span<const Complex>> curves, double cell_size)
    : curves_(std::move(curves)) {
  box_ = {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  double total_len = 0.0;
  std::size_t total_segments = 0;
  for (const auto& c : curves_) {
    for (Complex z : c) {
      box_.xmin = std::min(box_.xmin, z.real());
      box_.xmax = std::max(box_.xmax, z.real());
      box_.ymin = std::min(box_.ymin, z.imag());
      box_.ymax = std::max(box_.ymax, z.imag());
    }
    total_len += polyline_length(c, true);
    total_segments += segment_count(c);
  }
  if (total_segments == 0) {
    box_ = {0, 0, 0, 0};
    return;
  }
  const double extent = std::max(box_.width(), box_.height());
  const double mean_len = total_len / static_cast<double>(total_segments);
  cell_size_ = std::max({2.0 * mean_len, extent / 4096.0, 1e-300});
  if (cell_size > 0.0) cell_size_ = std::max(cell_size, extent / 4096.0);
  if (extent == 0.0) cell_size_ = 1.0;
  nx_ = static_cast<long>(std::floor(box_.width() / cell_size_)) + 1;
  ny_ = static_cast<long>(std::floor(box_.height() / cell_size_)) + 1;

  // Sort (cell, global segment number) packed into one word; segments are
  // numbered curve by curve, so each cell lists them in curve/index order.
  std::vector<std::size_t> first(curves_.size() + 1, 0);
  for (std::size_t ci = 0; ci < curves_.size(); ++ci)
    first[ci + 1] = first[ci] + segment_count(curves_[ci]);
  constexpr int kShift = 36;
  std::vector<std::uint64_t> keys;
  keys.reserve(2 * total_segments);
  std::vector<std::pair<long, long>> corner(total_segments);
  for (std::size_t ci = 0; ci < curves_.size(); ++ci) {
    const std::size_t n = segment_count(curves_[ci]);
    for (std::size_t k = 0; k < n; ++k) {
      auto [a, b] = segment({ci, k});
      long i0, i1, j0, j1;
      cell_range(a, b, i0, i1, j0, j1);
      const std::uint64_t g = first[ci] + k;
      corner[g] = {i0, j0};
      for (long j = j0; j <= j1; ++j)
        for (long i = i0; i <= i1; ++i)
          keys.push_back((static_cast<std::uint64_t>(j * nx_ + i) << kShift) | g);
    }
  }
  std::sort(keys.begin(), keys.end());
  // Only occupied cells are stored, as sorted ids with offsets into one flat
  // array, so long thin curves do not allocate a dense grid.
  refs_.reserve(keys.size());
  lower_.reserve(keys.size());
  const std::uint64_t mask = (std::uint64_t{1} << kShift) - 1;
  for (const std::uint64_t key : keys) {
    const auto cell = static_cast<std::size_t>(key >> kShift);
    const auto g = static_cast<std::size_t>(key & mask);
    std::size_t ci = 0;
    if (curves_.size() > 1)
      ci = static_cast<std::size_t>(std::upper_bound(first.begin(), first.end(), g) -
                                    first.begin() - 1);
    if (cell_ids_.empty() || cell_ids_.back() != cell) {
      cell_ids_.push_back(cell);
      offsets_.push_back(refs_.size());
    }
    refs_.push_back({ci, g - first[ci]});
    lower_.push_back(corner[g]);
  }
  offsets_.push_back(refs_.size());
}

std::pair<Complex, Complex> SegmentIndex::segment(const SegmentRef& s) const {
  const auto& c = curves_[s.curve];
  if (c.size() == 1) return {c[0], c[0]};
  return {c[s.index], c[(s.index + 1) % c.size()]};
}

void SegmentIndex::cell_range(Complex a, Complex b, long& i0, long& i1, long& j0,
                              long& j1) const {
  auto ix = [&](double x) {
    return std::clamp(static_cast<long>(std::floor((x - box_.xmin) / cell_size_)), 0L, nx_ - 1);
  };
  auto iy = [&](double y) {
    return std::clamp(static_cast<long>(std::floor((y - box_.ymin) / cell_size_)), 0L, ny_ - 1);
  };
  i0 = ix(std::min(a.real(), b.real()));
  i1 = ix(std::max(a.real(), b.real()));
  j0 = iy(std::min(a.imag(), b.imag()));
  j1 = iy(std::max(a.imag(), b.imag()));
}

std::size_t SegmentIndex::cell_of(double x, double y) const {
  const long i = std::clamp(static_cast<long>(std::floor((x - box_.xmin) / cell_size_)), 0L, nx_ - 1);
  const long j = std::clamp(static_cast<long>(std::floor((y - box_.ymin) / cell_size_)), 0L, ny_ - 1);
  return static_cast<std::size_t>(j * nx_ + i);
}

namespace {

bool adjacent(std::size_t p, std::size_t q, std::size_t n) {
  if (p == q) return true;
  const std::size_t lo = std::min(p, q), hi = std::max(p, q);
  return hi == lo + 1 || (lo == 0 && hi == n - 1);
}

}  // namespace

std::size_t SegmentIndex::self_intersections(std::size_t curve, std::size_t cap) const {
  const std::size_t n = curves_[curve].size();
  if (n < 4) return 0;
  std::size_t count = 0;
  for (std::size_t g = 0; g < cell_ids_.size(); ++g) {
    const std::span<const SegmentRef> bucket(refs_.data() + offsets_[g], offsets_[g + 1] - offsets_[g]);
    const auto* low = lower_.data() + offsets_[g];
    const std::size_t cell = cell_ids_[g];
    const long ci = static_cast<long>(cell % static_cast<std::size_t>(nx_));
    const long cj = static_cast<long>(cell / static_cast<std::size_t>(nx_));
    for (std::size_t x = 0; x < bucket.size(); ++x) {
      if (bucket[x].curve != curve) continue;
      for (std::size_t y = x + 1; y < bucket.size(); ++y) {
        if (bucket[y].curve != curve) continue;
        if (adjacent(bucket[x].index, bucket[y].index, n)) continue;
        // Count each pair once: in the first cell their ranges share.
        const long ri = std::max(low[x].first, low[y].first);
        const long rj = std::max(low[x].second, low[y].second);
        if (ri != ci || rj != cj) continue;
        auto [a, b] = segment(bucket[x]);
        auto [c, d] = segment(bucket[y]);
        if (segments_intersect(a, b, c, d) && ++count >= cap) return count;
      }
    }
  }
  return count;
}

std::size_t SegmentIndex::cross_intersections(std::size_t ca, std::size_t cb,
                                              std::size_t cap) const {
  std::size_t count = 0;
  for (std::size_t g = 0; g < cell_ids_.size(); ++g) {
    const std::span<const SegmentRef> bucket(refs_.data() + offsets_[g], offsets_[g + 1] - offsets_[g]);
    const auto* low = lower_.data() + offsets_[g];
    const std::size_t cell = cell_ids_[g];
    const long ci = static_cast<long>(cell % static_cast<std::size_t>(nx_));
    const long cj = static_cast<long>(cell / static_cast<std::size_t>(nx_));
    for (std::size_t x = 0; x < bucket.size(); ++x) {
      if (bucket[x].curve != ca) continue;
      for (std::size_t y = 0; y < bucket.size(); ++y) {
        if (bucket[y].curve != cb) continue;
        const long ri = std::max(low[x].first, low[y].first);
        const long rj = std::max(low[x].second, low[y].second);
        if (ri != ci || rj != cj) continue;
        auto [a, b] = segment(bucket[x]);
        auto [c, d] = segment(bucket[y]);
        if (segments_intersect(a, b, c, d) && ++count >= cap) return count;
      }
    }
  }
  return count;
}

double SegmentIndex::distance_to_curve(std::size_t curve, Complex z) const {
  const auto& c = curves_[curve];
  if (c.empty()) return std::numeric_limits<double>::infinity();
  double best = std::numeric_limits<double>::infinity();
  auto brute = [&] {
    const std::size_t n = segment_count(c);
    for (std::size_t k = 0; k < n; ++k) {
      auto [a, b] = segment({curve, k});
      best = std::min(best, point_segment_distance(z, a, b));
    }
    return best;
  };
  if (cell_ids_.empty()) return brute();
  const std::size_t home = cell_of(z.real(), z.imag());
  const long hi = static_cast<long>(home % static_cast<std::size_t>(nx_));
  const long hj = static_cast<long>(home / static_cast<std::size_t>(nx_));
  // Distance from z to the grid box; rings are measured from the clamped cell.
  const double dx = std::max({box_.xmin - z.real(), 0.0, z.real() - box_.xmax});
  const double dy = std::max({box_.ymin - z.imag(), 0.0, z.imag() - box_.ymax});
  const double outside = std::hypot(dx, dy);
  const long max_ring = std::max(nx_, ny_);
  auto scan_cell = [&](long i, long j) {
    if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return;
    const auto id = static_cast<std::size_t>(j * nx_ + i);
    auto it = std::lower_bound(cell_ids_.begin(), cell_ids_.end(), id);
    if (it == cell_ids_.end() || *it != id) return;
    const auto g = static_cast<std::size_t>(it - cell_ids_.begin());
    for (std::size_t e = offsets_[g]; e < offsets_[g + 1]; ++e) {
      const SegmentRef& s = refs_[e];
      if (s.curve != curve) continue;
      auto [a, b] = segment(s);
      best = std::min(best, point_segment_distance(z, a, b));
    }
  };
  for (long r = 0; r <= max_ring; ++r) {
    if (r > 96) return brute();
    if (r == 0) {
      scan_cell(hi, hj);
    } else {
      for (long i = hi - r; i <= hi + r; ++i) {
        scan_cell(i, hj - r);
        scan_cell(i, hj + r);
      }
      for (long j = hj - r + 1; j <= hj + r - 1; ++j) {
        scan_cell(hi - r, j);
        scan_cell(hi + r, j);
      }
    }
    // Anything in ring r+1 or beyond is at least r cells away.
    if (best <= std::hypot(outside, static_cast<double>(r) * cell_size_)) return best;
  }
  return best;
}

}  // namespace squaremap::geometry
