#include "anisocap/numeric.hpp"

#include <doctest.h>

#include <random>

using namespace anisocap;

TEST_SUITE_BEGIN("numeric");

TEST_CASE("pairwise sum is deterministic and accurate") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<double> xs(100001);
  long double exact = 0.0L;
  for (auto& x : xs) {
    x = uni(rng);
    exact += x;
  }
  const double s1 = pairwise_sum(xs);
  const double s2 = pairwise_sum(xs);
  CHECK(s1 == s2);
  CHECK(std::abs(s1 - static_cast<double>(exact)) < 1e-10);
}

TEST_CASE("fibonacci lattice covers the sphere with unit vectors and poles") {
  const auto pts = fibonacci_sphere(2000);
  CHECK(pts.size() >= 2000);
  for (const auto& p : pts) CHECK(std::abs(p.norm() - 1.0) < 1e-12);
  bool north = false, south = false;
  for (const auto& p : pts) {
    if ((p - Vec3::UnitZ()).norm() < 1e-12) north = true;
    if ((p + Vec3::UnitZ()).norm() < 1e-12) south = true;
  }
  CHECK(north);
  CHECK(south);
}

TEST_CASE("tangent projector annihilates the normal") {
  const Vec3 z = Vec3(0.3, -0.4, 0.8).normalized();
  const Mat3 P = tangent_projector(z);
  CHECK((P * z).norm() < 1e-14);
  CHECK((P * P - P).norm() < 1e-14);
}

TEST_CASE("convergence order recovers a quadratic rate") {
  const std::vector<double> h = {0.1, 0.05, 0.025};
  const std::vector<double> err = {1e-2, 2.5e-3, 6.25e-4};
  CHECK(convergence_order(h, err) == doctest::Approx(2.0));
}

TEST_SUITE_END();
