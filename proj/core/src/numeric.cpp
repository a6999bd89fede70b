#include "anisocap/numeric.hpp"

#include <cmath>
#include <numbers>

namespace anisocap {

namespace {

double pairwise_sum_rec(const double* data, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += data[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum_rec(data, half) + pairwise_sum_rec(data + half, n - half);
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
  return pairwise_sum_rec(values.data(), values.size());
}

double pairwise_sum(std::size_t n, const std::function<double(std::size_t)>& f) {
  std::vector<double> vals(n);
  for (std::size_t i = 0; i < n; ++i) vals[i] = f(i);
  return pairwise_sum(vals);
}

std::vector<Vec3> fibonacci_sphere(std::size_t count) {
  std::vector<Vec3> pts;
  pts.reserve(count + 2);
  const double ga = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(count);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = ga * static_cast<double>(i);
    pts.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
  }
  pts.emplace_back(0.0, 0.0, 1.0);
  pts.emplace_back(0.0, 0.0, -1.0);
  return pts;
}

double convergence_order(std::span<const double> h, std::span<const double> err) {
  const std::size_t n = std::min(h.size(), err.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(h[i]);
    const double y = std::log(std::max(err[i], 1e-300));
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  const double d = static_cast<double>(n) * sxx - sx * sx;
  return (static_cast<double>(n) * sxy - sx * sy) / d;
}

}  // namespace anisocap
