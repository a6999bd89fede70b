#include "anisocap/generators.hpp"
#include "anisocap/variational.hpp"

#include <doctest.h>

#include <map>
#include <numbers>
#include <random>

using namespace anisocap;

namespace {

constexpr double kPi = std::numbers::pi;

// closed unit sphere by repeated 1:4 subdivision of the octahedron
CapillaryMesh unit_icosphere(int levels) {
  CapillaryMesh m;
  m.vertices = {Vec3(1, 0, 0),  Vec3(-1, 0, 0), Vec3(0, 1, 0),
                Vec3(0, -1, 0), Vec3(0, 0, 1),  Vec3(0, 0, -1)};
  m.triangles = {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4},
                 {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
  for (int l = 0; l < levels; ++l) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      const int idx = static_cast<int>(m.vertices.size());
      m.vertices.push_back((m.vertices[a] + m.vertices[b]).normalized());
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    for (const auto& t : m.triangles) {
      const int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({t[1], bc, ab});
      next.push_back({t[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    m.triangles = std::move(next);
  }
  // lift off the plane so the closed mesh respects the half-space convention
  for (auto& v : m.vertices) v.z() += 2.0;
  m.finalize();
  return m;
}

}  // namespace

TEST_SUITE_BEGIN("variational");

TEST_CASE("hemisphere energies") {
  const auto iso = Anisotropy::isotropic();
  {
    const auto cfg = make_config(iso, 0.0);
    const auto mesh = build_truncated_wulff(iso, cfg, 24);
    const auto e = energy(mesh, iso, cfg);
    CHECK(e.total == doctest::Approx(2.0 * kPi).epsilon(2e-3));
    CHECK(e.wetting_term == 0.0);
  }
  {
    // hemisphere of the unit sphere, evaluated with a nonzero wetting weight
    const auto cfg = make_config(iso, 0.5);
    const auto mesh = build_truncated_wulff(iso, make_config(iso, 0.0), 24);
    const auto e = energy(mesh, iso, cfg);
    CHECK(e.area_term == doctest::Approx(2.0 * kPi).epsilon(2e-3));
    CHECK(e.wetting_term == doctest::Approx(0.5 * kPi).epsilon(2e-3));
    CHECK(e.total == e.area_term + e.wetting_term);
  }
}

TEST_CASE("energy gradient matches directional finite differences") {
  const auto ell = Anisotropy::ellipsoidal(Vec3(4, 1, 1).asDiagonal().toDenseMatrix());
  const auto cfg = make_config(ell, 0.3, 4000);
  const auto mesh = build_truncated_wulff(ell, cfg, 8);
  const auto st = compute_state(mesh, ell, cfg);
  const auto var = first_variation(mesh, ell, cfg, st);

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<Vec3> delta(mesh.vertex_count());
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    delta[v] = Vec3(uni(rng), uni(rng), uni(rng));
    if (mesh.is_contact[v]) delta[v].z() = 0.0;  // admissible: slide in the plane
    if (mesh.is_boundary[v] && !mesh.is_contact[v]) delta[v].setZero();
  }
  auto energy_at = [&](double t) {
    CapillaryMesh moved = mesh;
    moved.reference_normals.clear();
    for (int v = 0; v < moved.vertex_count(); ++v) moved.vertices[v] += t * delta[v];
    moved.finalize();
    return energy(moved, ell, cfg);
  };
  const double t = 1e-5;
  const double dE = (energy_at(t).total - energy_at(-t).total) / (2.0 * t);
  const double dV = (energy_at(t).volume - energy_at(-t).volume) / (2.0 * t);
  double gE = 0.0, gV = 0.0;
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    gE += var.gradient[v].dot(delta[v]);
    gV += var.volume_gradient[v].dot(delta[v]);
  }
  CHECK(dE == doctest::Approx(gE).epsilon(1e-6));
  CHECK(dV == doctest::Approx(gV).epsilon(1e-6));
}

TEST_CASE("interior density of the first variation recovers H_F") {
  // sphere of radius 1.1 with free boundary: H_F = 2/1.1
  const auto iso = Anisotropy::isotropic();
  const auto cfg = make_config(iso, 0.0);
  CapillaryMesh mesh = build_truncated_wulff(iso, cfg, 16);
  for (auto& x : mesh.vertices) x *= 1.1;
  mesh.reference_normals.clear();
  mesh.finalize();
  const auto st = compute_state(mesh, iso, cfg);
  const auto var = first_variation(mesh, iso, cfg, st);
  double mean = 0.0, area = 0.0;
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    if (mesh.is_boundary[v]) continue;
    mean += var.normal_density[v] * st.vertex_area[v];
    area += st.vertex_area[v];
  }
  CHECK(mean / area == doctest::Approx(2.0 / 1.1).epsilon(2e-2));
}

TEST_CASE("boundary gradient of the free-boundary sphere vanishes under refinement") {
  const auto iso = Anisotropy::isotropic();
  const auto cfg = make_config(iso, 0.0);
  auto boundary_norm = [&](int res) {
    CapillaryMesh mesh = build_truncated_wulff(iso, cfg, res);
    for (auto& x : mesh.vertices) x *= 1.1;
    mesh.reference_normals.clear();
    mesh.finalize();
    const auto st = compute_state(mesh, iso, cfg);
    const auto var = first_variation(mesh, iso, cfg, st);
    double worst = 0.0;
    for (int v = 0; v < mesh.vertex_count(); ++v)
      if (mesh.is_contact[v])
        worst = std::max(worst, var.gradient[v].norm() / st.boundary_mass[v]);
    return worst;
  };
  const double coarse = boundary_norm(12);
  const double fine = boundary_norm(24);
  CHECK(fine < 0.6 * coarse);  // first-order decay
  CHECK(fine < 0.08);
}

TEST_CASE("flat patch: interior gradient density is zero") {
  const auto iso = Anisotropy::isotropic();
  const auto cfg = make_config(iso, 0.5);
  const auto mesh = build_flat_capillary_patch(iso, cfg, 1.0, 8);
  const auto st = compute_state(mesh, iso, cfg);
  const auto var = first_variation(mesh, iso, cfg, st);
  for (int v = 0; v < mesh.vertex_count(); ++v)
    if (!mesh.is_boundary[v]) CHECK(std::abs(var.normal_density[v]) < 1e-12);
}

TEST_CASE("Minkowski residual on Wulff caps with exact normals") {
  const auto iso = Anisotropy::isotropic();
  const auto cfg = make_config(iso, 0.5);
  const auto coarse = build_truncated_wulff(iso, cfg, 10);
  const auto fine = build_truncated_wulff(iso, cfg, 20);
  const auto rc = minkowski_residual(compute_state(coarse, iso, cfg), coarse, iso, cfg);
  const auto rf = minkowski_residual(compute_state(fine, iso, cfg), fine, iso, cfg);
  CHECK(rc.guaranteed);
  CHECK(std::abs(rf.normalized) < std::abs(rc.normalized));
  CHECK(std::abs(rf.normalized) < 3e-2);
}

TEST_CASE("closed sphere: pointwise Minkowski identity") {
  const auto iso = Anisotropy::isotropic();
  const auto cfg = make_config(iso, 0.0);
  CapillaryMesh sphere = unit_icosphere(5);
  // recentring at the origin so <x, nu> = 1 in the continuum
  Vec3 c = Vec3::Zero();
  for (const auto& x : sphere.vertices) c += x;
  c /= sphere.vertex_count();
  const auto st = compute_state(sphere, iso, cfg);
  double raw = 0.0, area = 0.0;
  for (int v = 0; v < sphere.vertex_count(); ++v) {
    raw += (2.0 * st.F_nu[v] - st.HF[v] * (sphere.vertices[v] - c).dot(st.normal[v])) *
           st.vertex_area[v];
    area += st.vertex_area[v];
  }
  CHECK(std::abs(raw / area) < 1e-2);
}

TEST_CASE("Robin coefficient closed forms agree and tighten under refinement") {
  const auto ell = Anisotropy::ellipsoidal(Vec3(4, 1, 1).asDiagonal().toDenseMatrix());
  const auto cfg = make_config(ell, -0.4, 4000);
  const auto coarse = build_truncated_wulff(ell, cfg, 10);
  const auto fine = build_truncated_wulff(ell, cfg, 20);
  const auto qc = boundary_qF(compute_state(coarse, ell, cfg), coarse);
  const auto qf = boundary_qF(compute_state(fine, ell, cfg), fine);
  CHECK(qf.max_discrepancy < qc.max_discrepancy);
  CHECK(qf.max_discrepancy < 5e-2);
  CHECK(qf.vertices.size() == qf.qF.size());
}

TEST_SUITE_END();
