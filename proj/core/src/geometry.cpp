#include "anisocap/geometry.hpp"

#include <Eigen/QR>

#include <cmath>
#include <numbers>
#include <set>

namespace anisocap {

namespace {

constexpr double kPi = std::numbers::pi;

Vec3 sphere_dir(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

/// Polar angle at which the Wulff point crosses the cut plane, for a fixed
/// azimuth. Phi3 + omega0 changes sign between the poles for admissible
/// omega0; bisection to near machine precision.
double cut_angle(const Anisotropy& aniso, double omega0, double phi) {
  auto height = [&](double th) {
    return aniso.wulff_point(sphere_dir(th, phi)).z() + omega0;
  };
  double lo = 0.0, hi = kPi;
  if (!(height(lo) > 0.0 && height(hi) < 0.0))
    throw AdmissibilityError("truncation plane does not cut the Wulff shape");
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (height(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

CapillaryMesh build_truncated_wulff(const Anisotropy& aniso, const HalfSpaceConfig& config,
                                    int resolution) {
  if (resolution < 2) throw std::invalid_argument("resolution must be >= 2");
  const int R = resolution;
  CapillaryMesh mesh;
  std::vector<std::vector<int>> rings(R + 1);

  auto push_vertex = [&](double theta, double phi) {
    const Vec3 z = sphere_dir(theta, phi);
    mesh.vertices.push_back(Vec3(0, 0, config.omega0) + aniso.wulff_point(z));
    mesh.reference_normals.push_back(z);
    return static_cast<int>(mesh.vertices.size()) - 1;
  };

  rings[0].push_back(push_vertex(0.0, 0.0));
  for (int j = 1; j <= R; ++j) {
    const int n = 6 * j;
    for (int k = 0; k < n; ++k) {
      const double phi = 2.0 * kPi * k / n;
      const double theta = cut_angle(aniso, config.omega0, phi) * j / R;
      rings[j].push_back(push_vertex(theta, phi));
    }
  }
  for (int v : rings[R]) mesh.vertices[v].z() = 0.0;  // boundary sits on the plane exactly

  for (int k = 0; k < 6; ++k)
    mesh.triangles.push_back({rings[0][0], rings[1][k], rings[1][(k + 1) % 6]});
  for (int j = 2; j <= R; ++j) {
    const auto& a = rings[j - 1];
    const auto& b = rings[j];
    const int n0 = static_cast<int>(a.size()), n1 = static_cast<int>(b.size());
    int i0 = 0, i1 = 0;
    while (i0 < n0 || i1 < n1) {
      if (i1 < n1 && (i0 >= n0 || static_cast<long>(i1) * n0 <= static_cast<long>(i0) * n1)) {
        mesh.triangles.push_back({a[i0 % n0], b[i1 % n1], b[(i1 + 1) % n1]});
        ++i1;
      } else {
        mesh.triangles.push_back({a[i0 % n0], b[i1 % n1], a[(i0 + 1) % n0]});
        ++i0;
      }
    }
  }
  mesh.finalize();
  return mesh;
}

double wulff_capillary_residual(const CapillaryMesh& mesh, const Anisotropy& aniso,
                                const HalfSpaceConfig& config) {
  if (mesh.reference_normals.size() != mesh.vertices.size())
    throw std::invalid_argument("mesh carries no exact generator normals");
  double worst = 0.0;
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    if (!mesh.is_boundary[v]) continue;
    const Vec3 nuF = aniso.wulff_point(mesh.reference_normals[v]);
    worst = std::max(worst, std::abs(-nuF.z() - config.omega0));
  }
  return worst;
}

double wulff_stationarity_residual(const CapillaryMesh& mesh, const Anisotropy& aniso,
                                   const HalfSpaceConfig& config) {
  if (mesh.reference_normals.size() != mesh.vertices.size())
    throw std::invalid_argument("mesh carries no exact generator normals");
  double worst = 0.0;
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    const Vec3 z = mesh.reference_normals[v];
    const auto d = aniso.eval_with_derivatives(z);
    if (!mesh.is_boundary[v]) {
      // Weingarten map of the Wulff shape: dnu/dx = A_F^{-1} on the tangent
      // plane, so h_F has unit trace density n on the tangent plane.
      const Mat3 inv = (d.AF + z * z.transpose()).inverse() - z * z.transpose();
      const double HF = (d.AF * inv).trace();
      worst = std::max(worst, std::abs(HF - 2.0));
    } else {
      const Vec3 nuF = aniso.wulff_point(z);
      const Vec3 tangent = z.cross(Vec3::UnitZ()).normalized();
      Vec3 mu = tangent.cross(z);
      if (mu.z() > 0.0) mu = -mu;  // the outward conormal exits the half-space
      const Vec3 muF = d.F * mu - nuF.dot(mu) * z;
      const Vec3 nubar = z.z() * mu - mu.z() * z;
      const Vec3 r = muF + config.omega0 * nubar;
      worst = std::max(worst, std::hypot(r.x(), r.y()) / d.F);
    }
  }
  return worst;
}

GeometricState compute_state(const CapillaryMesh& mesh, const Anisotropy& aniso,
                             const HalfSpaceConfig& config) {
  const int nv = mesh.vertex_count();
  const int nf = mesh.face_count();
  GeometricState st;
  st.face_normal.resize(nf);
  st.face_area.resize(nf);
  st.normal.assign(nv, Vec3::Zero());
  st.vertex_area.assign(nv, 0.0);

  std::vector<std::vector<int>> v2f(nv);
  std::vector<std::set<int>> one_ring(nv);
  for (int f = 0; f < nf; ++f) {
    const auto& t = mesh.triangles[f];
    const Vec3 a = mesh.vertices[t[0]], b = mesh.vertices[t[1]], c = mesh.vertices[t[2]];
    const Vec3 av = 0.5 * (b - a).cross(c - a);
    st.face_area[f] = av.norm();
    st.face_normal[f] = av / st.face_area[f];
    for (int k = 0; k < 3; ++k) {
      v2f[t[k]].push_back(f);
      one_ring[t[k]].insert(t[(k + 1) % 3]);
      one_ring[t[k]].insert(t[(k + 2) % 3]);
      st.vertex_area[t[k]] += st.face_area[f] / 3.0;
    }
  }

  // angle-weighted vertex normals
  for (int v = 0; v < nv; ++v) {
    Vec3 acc = Vec3::Zero();
    for (int f : v2f[v]) {
      const auto& t = mesh.triangles[f];
      int k = 0;
      while (t[k] != v) ++k;
      const Vec3 e1 = (mesh.vertices[t[(k + 1) % 3]] - mesh.vertices[v]).normalized();
      const Vec3 e2 = (mesh.vertices[t[(k + 2) % 3]] - mesh.vertices[v]).normalized();
      acc += std::acos(std::clamp(e1.dot(e2), -1.0, 1.0)) * st.face_normal[f];
    }
    st.normal[v] = acc.normalized();
  }

  // two-ring quadric fit of the shape operator
  st.shape.assign(nv, Mat3::Zero());
  st.mean_curvature.assign(nv, 0.0);
  st.shape_F.assign(nv, Mat3::Zero());
  st.HF.assign(nv, 0.0);
  st.tr_hF2.assign(nv, 0.0);
  st.tr_AF_h2.assign(nv, 0.0);
  st.F_nu.assign(nv, 0.0);
  for (int v = 0; v < nv; ++v) {
    Vec3 nu = st.normal[v];
    std::set<int> nbrs = one_ring[v];
    for (int w : one_ring[v]) nbrs.insert(one_ring[w].begin(), one_ring[w].end());
    nbrs.erase(v);
    // one-sided (boundary) two-rings are too small for the cubic fit below;
    // widen to the three-ring so the Hessian stays second-order accurate there
    if (nbrs.size() < 12) {
      const std::set<int> cur = nbrs;
      for (int w : cur) nbrs.insert(one_ring[w].begin(), one_ring[w].end());
      nbrs.erase(v);
    }

    double rbar = 0.0;
    for (int w : nbrs) rbar += (mesh.vertices[w] - mesh.vertices[v]).norm();
    rbar /= static_cast<double>(nbrs.size());

    const int rows = static_cast<int>(nbrs.size());
    const int cols = rows >= 12 ? 9 : 5;

    Vec3 e1, e2;
    Eigen::VectorXd c;
    // Angle-weighted normals carry an O(h) tilt on one-sided (boundary)
    // stencils. The linear coefficients of the graph fit measure exactly that
    // tilt, so fit once, rotate the frame onto the fitted surface normal, and
    // fit again in the corrected frame.
    for (int pass = 0; pass < 2; ++pass) {
      e1 = nu.cross(std::abs(nu.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX()).normalized();
      e2 = nu.cross(e1);
      Eigen::MatrixXd A(rows, cols);
      Eigen::VectorXd rhs(rows);
      int row = 0;
      for (int w : nbrs) {
        const Vec3 d = (mesh.vertices[w] - mesh.vertices[v]) / rbar;
        const double u = d.dot(e1), t = d.dot(e2);
        A(row, 0) = u;
        A(row, 1) = t;
        A(row, 2) = 0.5 * u * u;
        A(row, 3) = u * t;
        A(row, 4) = 0.5 * t * t;
        if (cols == 9) {
          A(row, 5) = u * u * u / 6.0;
          A(row, 6) = 0.5 * u * u * t;
          A(row, 7) = 0.5 * u * t * t;
          A(row, 8) = t * t * t / 6.0;
        }
        rhs(row) = d.dot(nu);
        ++row;
      }
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
      if (cols == 9 && qr.rank() < 9) {
        c = A.leftCols(5).colPivHouseholderQr().solve(rhs);
      } else {
        c = qr.solve(rhs);
      }
      // exactly planar neighborhoods solve to pure roundoff: snap so that flat
      // surfaces report an exactly vanishing normal tilt and shape operator
      for (int k = 0; k < 5; ++k)
        if (std::abs(c(k)) < 1e-10) c(k) = 0.0;
      if (pass == 0) nu = (nu - c(0) * e1 - c(1) * e2).normalized();
    }
    st.normal[v] = nu;
    const Eigen::Vector2d grad(c(0), c(1));
    Eigen::Matrix2d hess;
    hess << c(2), c(3), c(3), c(4);
    hess /= rbar;  // undo the coordinate scaling (second derivatives only)

    const double W = std::sqrt(1.0 + grad.squaredNorm());
    const Eigen::Matrix2d G = Eigen::Matrix2d::Identity() + grad * grad.transpose();
    const Eigen::Matrix2d II = -hess / W;
    const Eigen::Matrix2d Ginv = G.inverse();
    Eigen::Matrix<double, 3, 2> T;
    T.col(0) = e1 + grad(0) * nu;
    T.col(1) = e2 + grad(1) * nu;
    Mat3 M = T * (Ginv * II * Ginv) * T.transpose();
    M = 0.5 * (M + M.transpose()).eval();

    const auto der = aniso.eval_with_derivatives(nu);
    st.shape[v] = M;
    st.mean_curvature[v] = M.trace();
    st.shape_F[v] = der.AF * M;
    st.HF[v] = st.shape_F[v].trace();
    st.tr_hF2[v] = (st.shape_F[v] * st.shape_F[v]).trace();
    st.tr_AF_h2[v] = (der.AF * M * M).trace();
    st.F_nu[v] = der.F;
  }

  // boundary frames and the Robin coefficient
  st.conormal.assign(nv, Vec3::Zero());
  st.nu_bar.assign(nv, Vec3::Zero());
  st.nu_F.assign(nv, Vec3::Zero());
  st.mu_F.assign(nv, Vec3::Zero());
  st.capillary_residual.assign(nv, 0.0);
  st.qF.assign(nv, 0.0);
  st.qF_alt.assign(nv, 0.0);
  st.boundary_mass.assign(nv, 0.0);
  st.qF_discrepancy = 0.0;
  for (const auto& loop : mesh.boundary_loops) {
    const int n = static_cast<int>(loop.size());
    for (int i = 0; i < n; ++i) {
      const int v = loop[i];
      if (!mesh.is_contact[v]) continue;
      const Vec3& prev = mesh.vertices[loop[(i + n - 1) % n]];
      const Vec3& next = mesh.vertices[loop[(i + 1) % n]];
      const Vec3& x = mesh.vertices[v];
      const Vec3 nu = st.normal[v];
      const Vec3 e = (next - prev).normalized();
      Vec3 mu = (tangent_projector(nu) * e.cross(nu)).normalized();
      if (std::abs(mu.z()) < 1e-6)
        throw TransversalityError("contact line not transversal at vertex " + std::to_string(v));

      st.boundary_mass[v] = 0.5 * ((next - x).norm() + (x - prev).norm());
      st.conormal[v] = mu;
      st.nu_bar[v] = nu.z() * mu - mu.z() * nu;
      st.nu_F[v] = aniso.anisotropic_normal(nu);
      st.mu_F[v] = st.F_nu[v] * mu - st.nu_F[v].dot(mu) * nu;
      st.capillary_residual[v] = -st.nu_F[v].z() - config.omega0;

      const double hFmumu = mu.dot(st.shape_F[v] * mu);
      st.qF[v] = -(nu.z() / mu.z()) * hFmumu;
      st.qF_alt[v] =
          (config.omega0 / mu.z() + st.nu_F[v].dot(mu)) * hFmumu / st.F_nu[v];
      st.qF_discrepancy = std::max(st.qF_discrepancy, std::abs(st.qF[v] - st.qF_alt[v]));
    }
  }
  return st;
}

double boundary_principal_residual(const CapillaryMesh& mesh, const GeometricState& state) {
  double worst = 0.0;
  for (const auto& loop : mesh.boundary_loops) {
    const int n = static_cast<int>(loop.size());
    for (int i = 0; i < n; ++i) {
      const int v = loop[i];
      if (!mesh.is_contact[v]) continue;
      const Vec3& prev = mesh.vertices[loop[(i + n - 1) % n]];
      const Vec3& next = mesh.vertices[loop[(i + 1) % n]];
      const Vec3 nu = state.normal[v];
      const Vec3 e = (tangent_projector(nu) * (next - prev)).normalized();
      worst = std::max(worst, std::abs(e.dot(state.shape_F[v] * state.conormal[v])));
    }
  }
  return worst;
}

}  // namespace anisocap
