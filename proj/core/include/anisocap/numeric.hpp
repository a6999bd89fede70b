#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace anisocap {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Deterministic pairwise summation. Reductions throughout the library go
/// through this so that results are reproducible independent of evaluation
/// order elsewhere.
double pairwise_sum(std::span<const double> values);

inline double pairwise_sum(const std::vector<double>& values) {
  return pairwise_sum(std::span<const double>(values.data(), values.size()));
}

/// Sums f(i) for i in [0, n) with a deterministic pairwise reduction.
double pairwise_sum(std::size_t n, const std::function<double(std::size_t)>& f);

/// Deterministic Fibonacci lattice on the unit sphere. The two poles are
/// appended so extremal values along E3 are always sampled.
std::vector<Vec3> fibonacci_sphere(std::size_t count);

/// Projector onto the plane orthogonal to the unit vector z.
inline Mat3 tangent_projector(const Vec3& z) {
  return Mat3::Identity() - z * z.transpose();
}

/// Least-squares slope of log(err) against log(h): the observed convergence
/// order of a refinement ladder.
double convergence_order(std::span<const double> h, std::span<const double> err);

}  // namespace anisocap
