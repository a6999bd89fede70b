#include "anisocap/variational.hpp"

namespace anisocap {

EnergyBreakdown energy(const CapillaryMesh& mesh, const Anisotropy& aniso,
                       const HalfSpaceConfig& config) {
  std::vector<double> contrib(mesh.triangles.size());
  for (std::size_t f = 0; f < mesh.triangles.size(); ++f) {
    const auto& t = mesh.triangles[f];
    const Vec3 av = 0.5 * (mesh.vertices[t[1]] - mesh.vertices[t[0]])
                              .cross(mesh.vertices[t[2]] - mesh.vertices[t[0]]);
    // F is one-homogeneous, so F(area vector) = area * F(normal)
    contrib[f] = aniso.value(av);
  }
  EnergyBreakdown e;
  e.area_term = pairwise_sum(contrib);
  e.wetted = wetted_area(mesh);
  e.wetting_term = config.omega0 * e.wetted;
  e.total = e.area_term + e.wetting_term;
  e.volume = enclosed_volume(mesh);
  return e;
}

VariationField first_variation(const CapillaryMesh& mesh, const Anisotropy& aniso,
                               const HalfSpaceConfig& config, const GeometricState& state) {
  const int nv = mesh.vertex_count();
  VariationField out;
  out.gradient.assign(nv, Vec3::Zero());
  out.volume_gradient.assign(nv, Vec3::Zero());

  for (const auto& t : mesh.triangles) {
    const Vec3& a = mesh.vertices[t[0]];
    const Vec3& b = mesh.vertices[t[1]];
    const Vec3& c = mesh.vertices[t[2]];
    const Vec3 av = 0.5 * (b - a).cross(c - a);
    const Vec3 phi = aniso.ambient_gradient(av);  // = Phi(face normal), 0-homogeneous
    out.gradient[t[0]] += 0.5 * (b - c).cross(phi);
    out.gradient[t[1]] += 0.5 * (c - a).cross(phi);
    out.gradient[t[2]] += 0.5 * (a - b).cross(phi);
    out.volume_gradient[t[0]] += b.cross(c) / 6.0;
    out.volume_gradient[t[1]] += c.cross(a) / 6.0;
    out.volume_gradient[t[2]] += a.cross(b) / 6.0;
  }
  // wetting term: gradient of omega0 * (signed planar area of the loops)
  for (const auto& loop : mesh.boundary_loops) {
    const int n = static_cast<int>(loop.size());
    for (int i = 0; i < n; ++i) {
      const Vec3& prev = mesh.vertices[loop[(i + n - 1) % n]];
      const Vec3& next = mesh.vertices[loop[(i + 1) % n]];
      out.gradient[loop[i]] += 0.5 * config.omega0 * (next - prev).cross(Vec3::UnitZ());
    }
  }
  for (int v = 0; v < nv; ++v) {
    if (!mesh.is_boundary[v]) continue;
    if (mesh.is_contact[v]) {
      out.gradient[v].z() = 0.0;
      out.volume_gradient[v].z() = 0.0;
    } else {
      out.gradient[v].setZero();
      out.volume_gradient[v].setZero();
    }
  }
  out.normal_density.assign(nv, 0.0);
  for (int v = 0; v < nv; ++v)
    if (state.vertex_area[v] > 0.0)
      out.normal_density[v] = out.gradient[v].dot(state.normal[v]) / state.vertex_area[v];
  return out;
}

MinkowskiReport minkowski_residual(const GeometricState& state, const CapillaryMesh& mesh,
                                   const Anisotropy& aniso, const HalfSpaceConfig& config,
                                   double tol_b) {
  const int nv = mesh.vertex_count();
  std::vector<double> contrib(nv);
  for (int v = 0; v < nv; ++v) {
    const double psi = state.F_nu[v] + config.omega0 * config.EF.dot(state.normal[v]);
    contrib[v] =
        state.vertex_area[v] *
        (2.0 * psi - state.HF[v] * mesh.vertices[v].dot(state.normal[v]));
  }
  MinkowskiReport rep;
  rep.raw = pairwise_sum(contrib);
  rep.normalized = rep.raw / state.total_area();
  // The precondition concerns the underlying surface, so exact generator
  // normals are preferred over discrete ones when the mesh carries them.
  const bool exact = mesh.reference_normals.size() == mesh.vertices.size();
  for (int v = 0; v < nv; ++v) {
    if (!mesh.is_contact[v]) continue;
    const double r = exact ? -aniso.wulff_point(mesh.reference_normals[v]).z() - config.omega0
                           : state.capillary_residual[v];
    rep.capillary_residual = std::max(rep.capillary_residual, std::abs(r));
  }
  rep.guaranteed = rep.capillary_residual <= tol_b;
  return rep;
}

BoundaryQF boundary_qF(const GeometricState& state, const CapillaryMesh& mesh) {
  BoundaryQF out;
  for (const auto& loop : mesh.boundary_loops)
    for (int v : loop) {
      if (!mesh.is_contact[v]) continue;
      out.vertices.push_back(v);
      out.qF.push_back(state.qF[v]);
      out.qF_alt.push_back(state.qF_alt[v]);
      out.max_discrepancy =
          std::max(out.max_discrepancy, std::abs(state.qF[v] - state.qF_alt[v]));
    }
  return out;
}

}  // namespace anisocap
