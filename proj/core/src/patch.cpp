#include "anisocap/patch.hpp"

#include <cmath>

namespace anisocap {

namespace {

// the decayed result type forces Eigen expressions to evaluate before the
// operand temporaries go out of scope
template <typename F>
auto stencil_d1(const F& f, double t, double h, int order) -> std::decay_t<decltype(f(t))> {
  using R = std::decay_t<decltype(f(t))>;
  switch (order) {
    case 2:
      return R((f(t + h) - f(t - h)) / (2.0 * h));
    case 4:
      return R((-f(t + 2 * h) + 8.0 * f(t + h) - 8.0 * f(t - h) + f(t - 2 * h)) / (12.0 * h));
    default:
      return R((f(t + 3 * h) - 9.0 * f(t + 2 * h) + 45.0 * f(t + h) - 45.0 * f(t - h) +
                9.0 * f(t - 2 * h) - f(t - 3 * h)) /
               (60.0 * h));
  }
}

template <typename F>
auto stencil_d2(const F& f, double t, double h, int order) -> std::decay_t<decltype(f(t))> {
  using R = std::decay_t<decltype(f(t))>;
  switch (order) {
    case 2:
      return R((f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h));
    case 4:
      return R((-f(t + 2 * h) + 16.0 * f(t + h) - 30.0 * f(t) + 16.0 * f(t - h) -
                f(t - 2 * h)) /
               (12.0 * h * h));
    default:
      return R((2.0 * f(t + 3 * h) - 27.0 * f(t + 2 * h) + 270.0 * f(t + h) - 490.0 * f(t) +
                270.0 * f(t - h) - 27.0 * f(t - 2 * h) + 2.0 * f(t - 3 * h)) /
               (180.0 * h * h));
  }
}

}  // namespace

PatchCalculus::PatchCalculus(const ParametricPatch& patch, const Anisotropy& aniso,
                             const HalfSpaceConfig& config, int order, double step)
    : patch_(patch), aniso_(aniso), config_(config), order_(order), step_(step) {
  if (order != 2 && order != 4 && order != 6)
    throw std::invalid_argument("stencil order must be 2, 4 or 6");
  if (!(step > 0.0)) throw std::invalid_argument("stencil step must be positive");
}

void PatchCalculus::check_domain(double u) const {
  const double L = patch_.u1 - patch_.u0;
  const double m = patch_.margin * L;
  if (u < patch_.u0 - m || u > patch_.u1 + m)
    throw StencilError("stencil leaves the extended chart domain at u = " + std::to_string(u));
}

double PatchCalculus::d1(const std::function<double(double)>& f, double t) const {
  return stencil_d1(f, t, step_, order_);
}

double PatchCalculus::d2(const std::function<double(double)>& f, double t) const {
  return stencil_d2(f, t, step_, order_);
}

PatchCalculus::Frame PatchCalculus::frame(double u, double v) const {
  const int w = order_ / 2;
  check_domain(u - w * step_);
  check_domain(u + w * step_);
  const auto& c = patch_.chart;
  auto cu = [&](double t) { return c(t, v); };
  auto cv = [&](double t) { return c(u, t); };

  Frame fr;
  fr.x = c(u, v);
  fr.xu = stencil_d1(cu, u, step_, order_);
  fr.xv = stencil_d1(cv, v, step_, order_);
  const Vec3 xuu = stencil_d2(cu, u, step_, order_);
  const Vec3 xvv = stencil_d2(cv, v, step_, order_);
  auto dv_of = [&](double uu) {
    auto cc = [&](double t) { return c(uu, t); };
    return stencil_d1(cc, v, step_, order_);
  };
  const Vec3 xuv = stencil_d1(dv_of, u, step_, order_);

  const Vec3 cross = fr.xu.cross(fr.xv);
  const double cn = cross.norm();
  if (cn < 1e-14) throw StencilError("chart fails to be an immersion at a grid node");
  fr.nu = patch_.orient_sign * cross / cn;

  fr.g << fr.xu.dot(fr.xu), fr.xu.dot(fr.xv), fr.xu.dot(fr.xv), fr.xv.dot(fr.xv);
  fr.ginv = fr.g.inverse();
  fr.sqrt_g = std::sqrt(fr.g.determinant());

  Eigen::Matrix2d II;  // h(x_i, x_j) = <grad_{x_i} nu, x_j> = -<x_ij, nu>
  II << -xuu.dot(fr.nu), -xuv.dot(fr.nu), -xuv.dot(fr.nu), -xvv.dot(fr.nu);
  Eigen::Matrix<double, 3, 2> T;
  T.col(0) = fr.xu;
  T.col(1) = fr.xv;
  Mat3 M = T * (fr.ginv * II * fr.ginv) * T.transpose();
  fr.shape = 0.5 * (M + M.transpose()).eval();
  fr.H = fr.shape.trace();

  const Mat3 AF = aniso_.ambient_hessian(fr.nu);
  fr.shape_F = AF * fr.shape;
  fr.HF = fr.shape_F.trace();
  fr.tr_hF2 = (fr.shape_F * fr.shape_F).trace();
  fr.tr_AF_h2 = (AF * fr.shape * fr.shape).trace();
  fr.F = aniso_.value(fr.nu);
  fr.psi = fr.F + config_.omega0 * config_.EF.dot(fr.nu);
  return fr;
}

Vec3 PatchCalculus::surface_gradient(const ScalarField& f, double u, double v) const {
  auto fu = [&](double t) { return f(t, v); };
  auto fv = [&](double t) { return f(u, t); };
  const Eigen::Vector2d df(stencil_d1(fu, u, step_, order_), stencil_d1(fv, v, step_, order_));
  const Frame fr = frame(u, v);
  const Eigen::Vector2d up = fr.ginv * df;
  return up(0) * fr.xu + up(1) * fr.xv;
}

double PatchCalculus::divergence(const VectorField& X, double u, double v) const {
  auto comp = [&](double uu, double vv) -> Eigen::Vector2d {
    const Frame fr = frame(uu, vv);
    const Eigen::Vector2d lower(X(uu, vv).dot(fr.xu), X(uu, vv).dot(fr.xv));
    return fr.sqrt_g * (fr.ginv * lower);
  };
  auto su = [&](double t) { return comp(t, v)(0); };
  auto sv = [&](double t) { return comp(u, t)(1); };
  const double div = stencil_d1(su, u, step_, order_) + stencil_d1(sv, v, step_, order_);
  return div / frame(u, v).sqrt_g;
}

double PatchCalculus::jacobi(const ScalarField& f, double u, double v) const {
  auto Y = [&](double uu, double vv) {
    const Frame fr = frame(uu, vv);
    return Vec3(aniso_.ambient_hessian(fr.nu) * surface_gradient(f, uu, vv));
  };
  const Frame fr = frame(u, v);
  return divergence(Y, u, v) + fr.tr_AF_h2 * f(u, v);
}

PatchCalculus::BoundaryFrame PatchCalculus::boundary_frame(double v) const {
  if (!patch_.contact_at_u1)
    throw std::invalid_argument("patch declares no contact row at u = u1");
  const double u = patch_.u1;
  const Frame fr = frame(u, v);
  // outward conormal: the component of x_u orthogonal to the contact tangent
  Vec3 mu = fr.xu - (fr.xu.dot(fr.xv) / fr.xv.squaredNorm()) * fr.xv;
  mu.normalize();
  if (std::abs(mu.z()) < 1e-6)
    throw TransversalityError("contact line not transversal on the parametric boundary");
  BoundaryFrame bf;
  bf.mu = mu;
  bf.qF = -(fr.nu.z() / mu.z()) * mu.dot(fr.shape_F * mu);
  bf.capillary_residual = -aniso_.anisotropic_normal(fr.nu).z() - config_.omega0;
  return bf;
}

GeometricState parametric_state(const ParametricPatch& patch, const Anisotropy& aniso,
                                const HalfSpaceConfig& config, int order, int grid_u,
                                int grid_v) {
  const PatchCalculus calc(patch, aniso, config, order, (patch.u1 - patch.u0) / grid_u);
  GeometricState st;
  const int n = grid_u * grid_v;
  st.normal.resize(n);
  st.shape.resize(n);
  st.mean_curvature.resize(n);
  st.shape_F.resize(n);
  st.HF.resize(n);
  st.tr_hF2.resize(n);
  st.tr_AF_h2.resize(n);
  st.F_nu.resize(n);
  st.vertex_area.assign(n, 0.0);
  st.conormal.assign(n, Vec3::Zero());
  st.nu_bar.assign(n, Vec3::Zero());
  st.nu_F.assign(n, Vec3::Zero());
  st.mu_F.assign(n, Vec3::Zero());
  st.capillary_residual.assign(n, 0.0);
  st.qF.assign(n, 0.0);
  st.qF_alt.assign(n, 0.0);
  st.boundary_mass.assign(n, 0.0);

  const double du = (patch.u1 - patch.u0) / (grid_u - 1);
  const double dv = (patch.v1 - patch.v0) / (patch.periodic_v ? grid_v : grid_v - 1);
  for (int i = 0; i < grid_u; ++i) {
    const double u = patch.u0 + i * du;
    for (int j = 0; j < grid_v; ++j) {
      const double v = patch.v0 + j * dv;
      const auto fr = calc.frame(u, v);
      const int idx = i * grid_v + j;
      st.normal[idx] = fr.nu;
      st.shape[idx] = fr.shape;
      st.mean_curvature[idx] = fr.H;
      st.shape_F[idx] = fr.shape_F;
      st.HF[idx] = fr.HF;
      st.tr_hF2[idx] = fr.tr_hF2;
      st.tr_AF_h2[idx] = fr.tr_AF_h2;
      st.F_nu[idx] = fr.F;
      st.vertex_area[idx] = fr.sqrt_g * du * dv;
      if (patch.contact_at_u1 && i == grid_u - 1) {
        const auto bf = calc.boundary_frame(v);
        st.conormal[idx] = bf.mu;
        st.nu_F[idx] = aniso.anisotropic_normal(fr.nu);
        st.mu_F[idx] = fr.F * bf.mu - st.nu_F[idx].dot(bf.mu) * fr.nu;
        st.nu_bar[idx] = fr.nu.z() * bf.mu - bf.mu.z() * fr.nu;
        st.capillary_residual[idx] = bf.capillary_residual;
        st.qF[idx] = bf.qF;
        st.boundary_mass[idx] = fr.xv.norm() * dv;
      }
    }
  }
  st.face_normal.clear();
  st.face_area.clear();
  return st;
}

JacobiResiduals jacobi_identity_residuals(const ParametricPatch& patch, const Anisotropy& aniso,
                                          const HalfSpaceConfig& config, int order, int grid,
                                          int probe) {
  const double L = patch.u1 - patch.u0;
  const PatchCalculus calc(patch, aniso, config, order, L / grid);

  auto field_F = [&](double u, double v) { return calc.frame(u, v).F; };
  auto field_EF = [&](double u, double v) { return config.EF.dot(calc.frame(u, v).nu); };
  auto field_xnu = [&](double u, double v) {
    const auto fr = calc.frame(u, v);
    return fr.x.dot(fr.nu);
  };
  auto field_HF = [&](double u, double v) { return calc.frame(u, v).HF; };

  JacobiResiduals res;
  for (int i = 1; i <= probe; ++i) {
    const double u = patch.u0 + L * (0.08 + 0.84 * (i - 1) / std::max(1, probe - 1));
    for (int j = 0; j < probe; ++j) {
      const double v = patch.v0 + (patch.v1 - patch.v0) * (j + 0.5) / probe;
      const auto fr = calc.frame(u, v);
      const Vec3 gHF = calc.surface_gradient(field_HF, u, v);
      const Vec3 DF = aniso.eval_with_derivatives(fr.nu).DF;

      res.r_F = std::max(res.r_F, std::abs(calc.jacobi(field_F, u, v) - gHF.dot(DF) - fr.tr_hF2));
      res.r_EF =
          std::max(res.r_EF, std::abs(calc.jacobi(field_EF, u, v) - config.EF.dot(gHF)));
      res.r_x =
          std::max(res.r_x, std::abs(calc.jacobi(field_xnu, u, v) - fr.x.dot(gHF) - fr.HF));
    }
  }
  return res;
}

BoundaryResiduals boundary_identity_residuals(const ParametricPatch& patch,
                                              const Anisotropy& aniso,
                                              const HalfSpaceConfig& config, int order, int grid,
                                              int probe, double capillary_tol) {
  if (!patch.contact_at_u1)
    throw std::invalid_argument("patch declares no contact row at u = u1");
  const double L = patch.u1 - patch.u0;
  const PatchCalculus calc(patch, aniso, config, order, L / grid);

  auto field_xnu = [&](double u, double v) {
    const auto fr = calc.frame(u, v);
    return fr.x.dot(fr.nu);
  };
  auto field_psi = [&](double u, double v) { return calc.frame(u, v).psi; };

  BoundaryResiduals res;
  for (int j = 0; j < probe; ++j) {
    const double v = patch.v0 + (patch.v1 - patch.v0) * (j + 0.5) / probe;
    const auto bf = calc.boundary_frame(v);
    if (std::abs(bf.capillary_residual) > capillary_tol)
      throw std::invalid_argument("patch violates the capillary condition on the contact row");
    const double u = patch.u1;
    const auto fr = calc.frame(u, v);
    const Mat3 AF = aniso.ambient_hessian(fr.nu);

    const double lhs_x = bf.mu.dot(AF * calc.surface_gradient(field_xnu, u, v));
    res.r_x = std::max(res.r_x, std::abs(lhs_x - bf.qF * fr.x.dot(fr.nu)));
    const double lhs_psi = bf.mu.dot(AF * calc.surface_gradient(field_psi, u, v));
    res.r_psi = std::max(res.r_psi, std::abs(lhs_psi - bf.qF * fr.psi));
  }
  return res;
}

}  // namespace anisocap
