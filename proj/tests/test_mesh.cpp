#include "anisocap/generators.hpp"
#include "anisocap/geometry.hpp"

#include <doctest.h>

#include <cstdio>
#include <numbers>
#include <random>

using namespace anisocap;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_SUITE_BEGIN("mesh");

TEST_CASE("hemisphere volume and wetted area") {
  const auto iso = Anisotropy::isotropic();
  const auto cfg = make_config(iso, 0.0);
  const auto mesh = build_truncated_wulff(iso, cfg, 24);
  CHECK(enclosed_volume(mesh) == doctest::Approx(2.0 * kPi / 3.0).epsilon(2e-3));
  CHECK(wetted_area(mesh) == doctest::Approx(kPi).epsilon(2e-3));
  CHECK(wetted_area(mesh) > 0.0);  // loops counterclockwise from +E3
}

TEST_CASE("spherical cap volume, contact parameter 0.5") {
  const auto iso = Anisotropy::isotropic();
  const auto cfg = make_config(iso, 0.5);
  const auto mesh = build_truncated_wulff(iso, cfg, 24);
  // cap of height 1 + omega0: V = pi (2/3 + omega0 - omega0^3/3) = pi * 1.125
  CHECK(enclosed_volume(mesh) == doctest::Approx(kPi * 1.125).epsilon(2e-3));
  const double r = std::sqrt(0.75);
  for (const auto& loop : mesh.boundary_loops)
    for (int v : loop) {
      CHECK(mesh.vertices[v].z() == 0.0);
      CHECK(mesh.vertices[v].head<2>().norm() == doctest::Approx(r).epsilon(1e-10));
    }
}

TEST_CASE("volume is invariant under tangential resampling of a flat patch") {
  const auto iso = Anisotropy::isotropic();
  const auto cfg = make_config(iso, 0.5);
  CapillaryMesh mesh = build_flat_capillary_patch(iso, cfg, 1.0, 10);
  const double v0 = enclosed_volume(mesh);
  const Vec3 nu = capillary_plane_normal(iso, 0.5);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    if (mesh.is_boundary[v]) continue;
    Vec3 d(uni(rng), uni(rng), uni(rng));
    d -= d.dot(nu) * nu;  // slide within the plane: the surface is unchanged
    mesh.vertices[v] += 0.02 * d;
  }
  mesh.finalize();
  CHECK(std::abs(enclosed_volume(mesh) - v0) < 1e-6);
}

TEST_CASE("uniform refinement quadruples faces and keeps the boundary planar") {
  const auto iso = Anisotropy::isotropic();
  const auto cfg = make_config(iso, 0.3);
  const auto mesh = build_truncated_wulff(iso, cfg, 8);
  const auto fine = refine_uniform(mesh);
  CHECK(fine.face_count() == 4 * mesh.face_count());
  for (int v = 0; v < fine.vertex_count(); ++v)
    if (fine.is_contact[v]) CHECK(fine.vertices[v].z() == 0.0);
  fine.validate();
}

TEST_CASE("truncation boundary vertices are classified and pinned above the plane") {
  const auto iso = Anisotropy::isotropic();
  const auto cfg = make_config(iso, 0.5);
  const auto mesh = build_flat_capillary_patch(iso, cfg, 1.0, 6);
  int contact = 0, truncation = 0;
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    if (!mesh.is_boundary[v]) continue;
    if (mesh.is_contact[v]) {
      ++contact;
      CHECK(mesh.vertices[v].z() == 0.0);
    } else {
      ++truncation;
      CHECK(mesh.vertices[v].z() > 0.0);
    }
  }
  CHECK(contact > 0);
  CHECK(truncation > 0);
}

TEST_CASE("OFF and OBJ round trips") {
  const auto iso = Anisotropy::isotropic();
  const auto cfg = make_config(iso, 0.5);
  const auto mesh = build_truncated_wulff(iso, cfg, 6);
  for (const char* path : {"roundtrip_test.off", "roundtrip_test.obj"}) {
    write_mesh(mesh, path);
    const auto back = read_mesh(path);
    REQUIRE(back.vertex_count() == mesh.vertex_count());
    REQUIRE(back.face_count() == mesh.face_count());
    double worst = 0.0;
    for (int v = 0; v < mesh.vertex_count(); ++v)
      worst = std::max(worst, (back.vertices[v] - mesh.vertices[v]).norm());
    CHECK(worst < 1e-9);
    CHECK(back.boundary_loops.size() == mesh.boundary_loops.size());
    std::remove(path);
  }
}

TEST_CASE("structural validation rejects broken meshes") {
  CapillaryMesh bad;
  bad.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(1, 1, 1)};
  bad.triangles = {{0, 1, 2}, {0, 1, 3}};  // inconsistent orientation across the shared edge
  CHECK_THROWS_AS(bad.finalize(), MeshError);

  CapillaryMesh sunk;
  sunk.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0.5, 1, -0.5)};
  sunk.triangles = {{0, 1, 2}};
  CHECK_THROWS_AS(sunk.finalize(), MeshError);
}

TEST_SUITE_END();
