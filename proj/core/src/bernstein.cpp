#include "anisocap/bernstein.hpp"

#include <cmath>

namespace anisocap {

std::vector<double> psi_field(const GeometricState& state, const HalfSpaceConfig& config,
                              double slack) {
  std::vector<double> psi(state.normal.size());
  for (std::size_t v = 0; v < state.normal.size(); ++v) {
    psi[v] = state.F_nu[v] + config.omega0 * config.EF.dot(state.normal[v]);
    if (psi[v] < config.C1 - slack || psi[v] > config.C2 + slack)
      throw std::logic_error("psi escapes the gauge bounds [C1, C2]: inconsistent config");
  }
  return psi;
}

std::vector<double> log_cutoff(const CapillaryMesh& mesh, double r1, double r2) {
  if (!(0.0 < r1 && r1 < r2)) throw std::invalid_argument("need 0 < r1 < r2");
  std::vector<double> f(mesh.vertex_count());
  const double denom = std::log(r2 / r1);
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    const double r = mesh.vertices[v].norm();
    if (r <= r1)
      f[v] = 1.0;
    else if (r >= r2)
      f[v] = 0.0;
    else
      f[v] = std::log(r2 / r) / denom;
  }
  return f;
}

GrowthReport probe(const CapillaryMesh& mesh, const Anisotropy& aniso,
                   const HalfSpaceConfig& config, const std::vector<double>& radii, double r1,
                   double r2) {
  double extent = 0.0;
  for (const auto& x : mesh.vertices) extent = std::max(extent, x.norm());
  for (double r : radii)
    if (r > extent * (1.0 + 1e-12))
      throw std::invalid_argument("probe radius exceeds the sampled extent");
  if (r2 > extent * (1.0 + 1e-12))
    throw std::invalid_argument("cutoff outer radius exceeds the sampled extent");

  const GeometricState st = compute_state(mesh, aniso, config);
  const std::vector<double> f = log_cutoff(mesh, r1, r2);

  GrowthReport rep;
  rep.radii = radii;
  rep.r1 = r1;
  rep.r2 = r2;
  for (double r : radii) {
    std::vector<double> contrib;
    for (std::size_t fi = 0; fi < mesh.triangles.size(); ++fi) {
      const auto& t = mesh.triangles[fi];
      const Vec3 centroid =
          (mesh.vertices[t[0]] + mesh.vertices[t[1]] + mesh.vertices[t[2]]) / 3.0;
      if (centroid.norm() <= r) contrib.push_back(st.face_area[fi]);
    }
    rep.growth_ratio.push_back(pairwise_sum(contrib) / (r * r));
    rep.C = std::max(rep.C, rep.growth_ratio.back());
  }

  std::vector<double> flat_contrib(mesh.vertex_count());
  for (int v = 0; v < mesh.vertex_count(); ++v)
    flat_contrib[v] = st.vertex_area[v] * f[v] * f[v] * st.tr_hF2[v];
  rep.flatness_integral = pairwise_sum(flat_contrib);

  std::vector<double> dir_contrib(mesh.triangles.size());
  for (std::size_t fi = 0; fi < mesh.triangles.size(); ++fi) {
    const auto& t = mesh.triangles[fi];
    const double A = st.face_area[fi];
    const Vec3& n = st.face_normal[fi];
    Vec3 grad = Vec3::Zero();
    for (int p = 0; p < 3; ++p) {
      const Vec3& b = mesh.vertices[t[(p + 1) % 3]];
      const Vec3& c = mesh.vertices[t[(p + 2) % 3]];
      grad += f[t[p]] * n.cross(c - b) / (2.0 * A);
    }
    dir_contrib[fi] = A * grad.squaredNorm();
  }
  rep.dirichlet = pairwise_sum(dir_contrib);
  rep.rhs_bound = config.C2 * config.C2 / config.C1 * config.Lambda * rep.dirichlet;
  return rep;
}

}  // namespace anisocap
