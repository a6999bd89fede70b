#include "anisocap/flow.hpp"

#include <cmath>
#include <map>

namespace anisocap {

namespace {

/// Normals and lumped areas only: enough for gradients and diagnostics,
/// much cheaper than the full quadric-fit state the flow does not need.
GeometricState light_state(const CapillaryMesh& mesh) {
  const int nv = mesh.vertex_count();
  GeometricState st;
  st.normal.assign(nv, Vec3::Zero());
  st.vertex_area.assign(nv, 0.0);
  for (const auto& t : mesh.triangles) {
    const Vec3 av = 0.5 * (mesh.vertices[t[1]] - mesh.vertices[t[0]])
                              .cross(mesh.vertices[t[2]] - mesh.vertices[t[0]]);
    const double A = av.norm();
    for (int k = 0; k < 3; ++k) {
      st.normal[t[k]] += av;  // area-weighted; adequate for flow directions
      st.vertex_area[t[k]] += A / 3.0;
    }
  }
  for (int v = 0; v < nv; ++v) st.normal[v].normalize();
  return st;
}

struct Gradients {
  GeometricState st;
  VariationField var;
  double c = 0.0;  // Lagrange multiplier of the volume constraint
};

Gradients gradients(const CapillaryMesh& mesh, const Anisotropy& aniso,
                    const HalfSpaceConfig& config) {
  Gradients g;
  g.st = light_state(mesh);
  g.var = first_variation(mesh, aniso, config, g.st);
  double num = 0.0, den = 0.0;
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    num += g.var.gradient[v].dot(g.var.volume_gradient[v]);
    den += g.var.volume_gradient[v].squaredNorm();
  }
  g.c = den > 0.0 ? num / den : 0.0;
  return g;
}

StationarityDiagnostics diagnostics_from(const CapillaryMesh& mesh, const Gradients& g) {
  StationarityDiagnostics d;
  double mass = 0.0, mean = 0.0;
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    if (mesh.is_boundary[v]) continue;
    const double dv = g.var.volume_gradient[v].dot(g.st.normal[v]);
    if (dv <= 0.0) continue;
    mean += g.var.gradient[v].dot(g.st.normal[v]) / dv * g.st.vertex_area[v];
    mass += g.st.vertex_area[v];
  }
  if (mass > 0.0) mean /= mass;
  d.mean_HF = mean;
  // residual density of the constrained gradient: avoids dividing by the
  // (possibly tiny) per-vertex volume density and vanishes exactly at the
  // discrete constrained minimizer
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    if (mesh.is_boundary[v]) continue;
    const Vec3 r = g.var.gradient[v] - g.c * g.var.volume_gradient[v];
    d.camc = std::max(d.camc, std::abs(r.dot(g.st.normal[v])) /
                                  std::max(g.st.vertex_area[v], 1e-30));
  }
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    if (!mesh.is_contact[v]) continue;
    const Vec3 r = g.var.gradient[v] - g.c * g.var.volume_gradient[v];
    d.boundary = std::max(d.boundary, r.norm() / std::max(g.st.vertex_area[v], 1e-30));
  }
  return d;
}

bool positions_valid(const CapillaryMesh& mesh, const std::vector<Vec3>& pos) {
  const double d2 = mesh.bbox_diameter() * mesh.bbox_diameter();
  for (int v = 0; v < mesh.vertex_count(); ++v)
    if (!mesh.is_boundary[v] && !(pos[v].z() > 0.0)) return false;
  for (const auto& t : mesh.triangles) {
    const double A = 0.5 * (pos[t[1]] - pos[t[0]]).cross(pos[t[2]] - pos[t[0]]).norm();
    if (A < 1e-13 * d2) return false;
  }
  return true;
}

double energy_at(const CapillaryMesh& mesh, const std::vector<Vec3>& pos,
                 const Anisotropy& aniso, const HalfSpaceConfig& config) {
  std::vector<double> contrib(mesh.triangles.size());
  for (std::size_t f = 0; f < mesh.triangles.size(); ++f) {
    const auto& t = mesh.triangles[f];
    contrib[f] = aniso.value(0.5 * (pos[t[1]] - pos[t[0]]).cross(pos[t[2]] - pos[t[0]]));
  }
  double e = pairwise_sum(contrib);
  std::vector<double> shoelace;
  for (const auto& loop : mesh.boundary_loops) {
    const std::size_t nl = loop.size();
    for (std::size_t i = 0; i < nl; ++i) {
      const Vec3& a = pos[loop[i]];
      const Vec3& b = pos[loop[(i + 1) % nl]];
      shoelace.push_back(0.5 * (a.x() * b.y() - a.y() * b.x()));
    }
  }
  return e + config.omega0 * pairwise_sum(shoelace);
}

double volume_at(const CapillaryMesh& mesh, const std::vector<Vec3>& pos) {
  std::vector<double> contrib(mesh.triangles.size());
  for (std::size_t f = 0; f < mesh.triangles.size(); ++f) {
    const auto& t = mesh.triangles[f];
    contrib[f] = pos[t[0]].dot(pos[t[1]].cross(pos[t[2]])) / 6.0;
  }
  return pairwise_sum(contrib);
}

/// Newton re-projection of the volume along a normal offset field.
void project_volume(const CapillaryMesh& mesh, std::vector<Vec3>& pos,
                    const GeometricState& st, double target) {
  std::vector<Vec3> Z(mesh.vertex_count(), Vec3::Zero());
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    if (mesh.is_boundary[v] && !mesh.is_contact[v]) continue;
    Z[v] = st.normal[v];
    if (mesh.is_contact[v]) Z[v].z() = 0.0;
  }
  for (int it = 0; it < 3; ++it) {
    const double V = volume_at(mesh, pos);
    // dV/dtau along Z from the exact volume gradient at the current positions
    double dV = 0.0;
    std::vector<Vec3> gv(mesh.vertex_count(), Vec3::Zero());
    for (const auto& t : mesh.triangles) {
      gv[t[0]] += pos[t[1]].cross(pos[t[2]]) / 6.0;
      gv[t[1]] += pos[t[2]].cross(pos[t[0]]) / 6.0;
      gv[t[2]] += pos[t[0]].cross(pos[t[1]]) / 6.0;
    }
    for (int v = 0; v < mesh.vertex_count(); ++v) dV += gv[v].dot(Z[v]);
    if (std::abs(dV) < 1e-14) return;
    const double tau = (target - V) / dV;
    for (int v = 0; v < mesh.vertex_count(); ++v) pos[v] += tau * Z[v];
  }
}

std::vector<Vec3> smoothing_field(const CapillaryMesh& mesh, const GeometricState& st) {
  const int nv = mesh.vertex_count();
  std::vector<Vec3> acc(nv, Vec3::Zero());
  std::vector<int> deg(nv, 0);
  for (const auto& t : mesh.triangles)
    for (int k = 0; k < 3; ++k) {
      acc[t[k]] += mesh.vertices[t[(k + 1) % 3]] + mesh.vertices[t[(k + 2) % 3]];
      deg[t[k]] += 2;
    }
  std::vector<Vec3> delta(nv, Vec3::Zero());
  for (int v = 0; v < nv; ++v) {
    if (mesh.is_boundary[v] || deg[v] == 0) continue;  // boundary handled below
    const Vec3 umbrella = acc[v] / deg[v] - mesh.vertices[v];
    delta[v] = tangent_projector(st.normal[v]) * umbrella;
  }
  // redistribute contact vertices along the contact curve: without this the
  // descent direction can bunch them into degenerate triangles that stall the
  // line search; motion is restricted to the curve tangent so the curve itself
  // is not displaced
  for (const auto& loop : mesh.boundary_loops) {
    const int n = static_cast<int>(loop.size());
    for (int i = 0; i < n; ++i) {
      const int v = loop[i];
      if (!mesh.is_contact[v]) continue;
      const int vp = loop[(i + n - 1) % n], vn = loop[(i + 1) % n];
      if (!mesh.is_contact[vp] || !mesh.is_contact[vn]) continue;
      const Vec3 umbrella = 0.5 * (mesh.vertices[vp] + mesh.vertices[vn]) - mesh.vertices[v];
      Vec3 tan = mesh.vertices[vn] - mesh.vertices[vp];
      tan.z() = 0.0;
      const double len = tan.norm();
      if (len < 1e-30) continue;
      tan /= len;
      delta[v] = umbrella.dot(tan) * tan;
    }
  }
  return delta;
}

/// Connectivity descent: flip interior edges whenever the flip strictly
/// decreases the discrete surface energy. Slivers produced by the vertex
/// motion are exactly the configurations such flips remove, so this keeps the
/// triangulation usable without ever increasing the energy.
bool flip_pass(CapillaryMesh& mesh, const Anisotropy& aniso) {
  const double scale = mesh.bbox_diameter() * mesh.bbox_diameter();
  bool changed_any = false;
  for (int round = 0; round < 3; ++round) {
    std::map<std::pair<int, int>, std::vector<int>> e2f;
    for (int f = 0; f < static_cast<int>(mesh.triangles.size()); ++f) {
      const auto& t = mesh.triangles[f];
      for (int k = 0; k < 3; ++k) e2f[std::minmax(t[k], t[(k + 1) % 3])].push_back(f);
    }
    std::vector<char> touched(mesh.triangles.size(), 0);
    bool changed = false;
    for (auto& [key, fs] : e2f) {
      if (fs.size() != 2) continue;
      const int f0 = fs[0], f1 = fs[1];
      if (touched[f0] || touched[f1]) continue;
      // orient so that t0 traverses the shared edge as a -> b
      auto& t0 = mesh.triangles[f0];
      auto& t1 = mesh.triangles[f1];
      int a = -1, b = -1, c = -1;
      for (int k = 0; k < 3; ++k) {
        const int p = t0[k], q = t0[(k + 1) % 3];
        if (std::min(p, q) == key.first && std::max(p, q) == key.second) {
          a = p;
          b = q;
          c = t0[(k + 2) % 3];
        }
      }
      int d = -1;
      for (int k = 0; k < 3; ++k)
        if (t1[k] != a && t1[k] != b) d = t1[k];
      if (a < 0 || d < 0 || c == d) continue;
      if (e2f.count(std::minmax(c, d))) continue;  // flip would duplicate an edge
      const auto av = [&](int p, int q, int r) {
        return Vec3(0.5 * (mesh.vertices[q] - mesh.vertices[p])
                              .cross(mesh.vertices[r] - mesh.vertices[p]));
      };
      const Vec3 n0 = av(a, b, c), n1 = av(b, a, d);
      const Vec3 m0 = av(a, d, c), m1 = av(d, b, c);
      if (m0.norm() < 1e-12 * scale || m1.norm() < 1e-12 * scale) continue;
      const Vec3 ref = n0 + n1;
      if (m0.dot(ref) <= 0.0 || m1.dot(ref) <= 0.0) continue;  // fold
      // a flip displaces the enclosed volume by the tet (a,b,c,d); restrict to
      // near-coplanar quads (slivers) so the volume ledger stays intact
      const double tet_vol =
          std::abs((mesh.vertices[d] - mesh.vertices[a])
                       .dot((mesh.vertices[b] - mesh.vertices[a])
                                .cross(mesh.vertices[c] - mesh.vertices[a]))) /
          6.0;
      if (tet_vol > 1e-10 * scale * std::sqrt(scale)) continue;
      const double before = aniso.value(n0) + aniso.value(n1);
      const double after = aniso.value(m0) + aniso.value(m1);
      if (after >= before - 1e-14 * scale) continue;
      t0 = {a, d, c};
      t1 = {d, b, c};
      touched[f0] = touched[f1] = 1;
      e2f[std::minmax(c, d)] = {f0, f1};
      changed = changed_any = true;
    }
    if (!changed) break;
  }
  if (changed_any) {
    mesh.reference_normals.clear();
    mesh.finalize();
  }
  return changed_any;
}

/// Mesh maintenance decoupled from the descent step: tangential umbrella
/// relaxation at fixed strength with its own backtracking, accepted only when
/// the energy does not increase and the volume stays on budget.
bool relax_pass(CapillaryMesh& mesh, const Anisotropy& aniso, const HalfSpaceConfig& config,
                const FlowConfig& flowcfg) {
  const GeometricState st = light_state(mesh);
  const std::vector<Vec3> delta = smoothing_field(mesh, st);
  const double E0 = energy_at(mesh, mesh.vertices, aniso, config);
  const double V0 = volume_at(mesh, mesh.vertices);
  for (double lam : {0.5, 0.25, 0.1, 0.04, 0.01}) {
    std::vector<Vec3> pos(mesh.vertex_count());
    for (int v = 0; v < mesh.vertex_count(); ++v) pos[v] = mesh.vertices[v] + lam * delta[v];
    project_volume(mesh, pos, st, V0);
    if (positions_valid(mesh, pos) &&
        std::abs(volume_at(mesh, pos) - V0) <= flowcfg.volume_tol * std::abs(V0) &&
        energy_at(mesh, pos, aniso, config) <= E0) {
      mesh.vertices = std::move(pos);
      mesh.reference_normals.clear();
      return true;
    }
  }
  return false;
}

}  // namespace

CapillaryMesh flow_step(const CapillaryMesh& mesh, const Anisotropy& aniso,
                        const HalfSpaceConfig& config, const FlowConfig& flowcfg,
                        double& step_io) {
  const Gradients g = gradients(mesh, aniso, config);
  const double E0 = energy_at(mesh, mesh.vertices, aniso, config);
  const double V0 = volume_at(mesh, mesh.vertices);

  std::vector<Vec3> dir(mesh.vertex_count(), Vec3::Zero());
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    if (mesh.is_boundary[v] && !mesh.is_contact[v]) continue;
    dir[v] = -(g.var.gradient[v] - g.c * g.var.volume_gradient[v]) /
             std::max(g.st.vertex_area[v], 1e-30);
    // interior vertices descend along the normal only: the tangential
    // component is a reparametrization that degrades triangle quality (the
    // smoothing term owns the tangential distribution instead)
    if (!mesh.is_boundary[v]) dir[v] = dir[v].dot(g.st.normal[v]) * g.st.normal[v];
  }
  const std::vector<Vec3> smooth = smoothing_field(mesh, g.st);

  double t = step_io;
  for (unsigned halv = 0; halv <= flowcfg.max_halvings; ++halv) {
    std::vector<Vec3> pos(mesh.vertex_count());
    for (int v = 0; v < mesh.vertex_count(); ++v)
      pos[v] = mesh.vertices[v] + t * (dir[v] + flowcfg.smoothing * smooth[v]);
    project_volume(mesh, pos, g.st, V0);
    if (positions_valid(mesh, pos) &&
        std::abs(volume_at(mesh, pos) - V0) <= flowcfg.volume_tol * std::abs(V0) &&
        energy_at(mesh, pos, aniso, config) <= E0) {
      CapillaryMesh out = mesh;
      out.vertices = std::move(pos);
      out.reference_normals.clear();
      step_io = std::min(t * 1.2, 8.0 * flowcfg.step);
      return out;
    }
    t *= 0.5;
  }
  throw std::runtime_error("flow step underflow: no descent after max halvings");
}

StationarityDiagnostics stationarity_diagnostics(const CapillaryMesh& mesh,
                                                 const Anisotropy& aniso,
                                                 const HalfSpaceConfig& config) {
  return diagnostics_from(mesh, gradients(mesh, aniso, config));
}

FlowTrace run_flow(const CapillaryMesh& mesh, const Anisotropy& aniso,
                   const HalfSpaceConfig& config, const FlowConfig& flowcfg) {
  FlowTrace trace;
  CapillaryMesh cur = mesh;
  double step = flowcfg.step;
  for (int it = 0; it < flowcfg.max_steps; ++it) {
    const auto diag = stationarity_diagnostics(cur, aniso, config);
    FlowStepRecord rec;
    rec.step = it;
    rec.energy = energy_at(cur, cur.vertices, aniso, config);
    rec.volume = volume_at(cur, cur.vertices);
    rec.camc = diag.camc;
    rec.boundary_residual = diag.boundary;
    rec.step_size = step;
    if (flowcfg.fit_every > 0 && it % flowcfg.fit_every == 0) {
      const WulffFit fit = fit_truncated_wulff(cur, aniso, config);
      rec.hausdorff = fit.max_distance / cur.bbox_diameter();
    }
    trace.records.push_back(rec);
    if (diag.camc <= flowcfg.camc_target) {
      trace.converged = true;
      break;
    }
    cur = flow_step(cur, aniso, config, flowcfg, step);
    bool repaired = flip_pass(cur, aniso);
    if (it % 25 == 24) repaired = relax_pass(cur, aniso, config, flowcfg) || repaired;
    if (repaired) step = std::max(step, flowcfg.step * 0.01);
  }
  trace.final_mesh = cur;
  trace.final_camc = stationarity_diagnostics(cur, aniso, config).camc;
  trace.fit = fit_truncated_wulff(cur, aniso, config);
  trace.final_hausdorff = trace.fit.max_distance / cur.bbox_diameter();
  return trace;
}

WulffFit fit_truncated_wulff(const CapillaryMesh& mesh, const Anisotropy& aniso,
                             const HalfSpaceConfig& config) {
  // dual gauge F*(y) = sup <y, z> / F(z): unit level set is the Wulff shape
  std::function<double(const Vec3&)> dual;
  switch (aniso.family()) {
    case AnisotropyFamily::Isotropic:
      dual = [](const Vec3& y) { return y.norm(); };
      break;
    case AnisotropyFamily::Ellipsoidal: {
      const Mat3 Qi = aniso.Q().inverse();
      dual = [Qi](const Vec3& y) { return std::sqrt(y.dot(Qi * y)); };
      break;
    }
    default: {
      const auto pts = fibonacci_sphere(4000);
      const Anisotropy an = aniso;
      std::vector<std::pair<Vec3, double>> table;
      table.reserve(pts.size());
      for (const Vec3& z : pts) table.emplace_back(z, an.value(z));
      dual = [table = std::move(table)](const Vec3& y) {
        double best = 0.0;
        for (const auto& [z, F] : table) best = std::max(best, y.dot(z) / F);
        return best;
      };
    }
  }

  Vec3 bc = Vec3::Zero();
  int nb = 0;
  for (int v = 0; v < mesh.vertex_count(); ++v)
    if (mesh.is_contact[v]) {
      bc += mesh.vertices[v];
      ++nb;
    }
  if (nb > 0) bc /= nb;

  Eigen::Vector3d p(bc.x(), bc.y(), 1.0);  // (tx, ty, s)
  auto residuals = [&](const Eigen::Vector3d& q, Eigen::VectorXd& r) {
    const Vec3 c(q(0), q(1), q(2) * config.omega0);
    r.resize(mesh.vertex_count());
    for (int v = 0; v < mesh.vertex_count(); ++v)
      r(v) = dual((mesh.vertices[v] - c) / q(2)) - 1.0;
  };
  Eigen::VectorXd r0, rp, rm;
  for (int it = 0; it < 25; ++it) {
    residuals(p, r0);
    Eigen::MatrixXd J(r0.size(), 3);
    const double h = 1e-6;
    for (int j = 0; j < 3; ++j) {
      Eigen::Vector3d q = p;
      q(j) += h;
      residuals(q, rp);
      q(j) -= 2 * h;
      residuals(q, rm);
      J.col(j) = (rp - rm) / (2 * h);
    }
    const Eigen::Vector3d delta =
        (J.transpose() * J + 1e-12 * Eigen::Matrix3d::Identity())
            .ldlt()
            .solve(-J.transpose() * r0);
    p += delta;
    if (delta.norm() < 1e-12) break;
  }

  WulffFit fit;
  fit.scale = p(2);
  fit.center = Vec3(p(0), p(1), p(2) * config.omega0);
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    const Vec3 y = (mesh.vertices[v] - fit.center) / fit.scale;
    const double lambda = dual(y);
    if (lambda > 1e-12)
      fit.max_distance =
          std::max(fit.max_distance, fit.scale * y.norm() * std::abs(1.0 - 1.0 / lambda));
  }
  return fit;
}

}  // namespace anisocap
