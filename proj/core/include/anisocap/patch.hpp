#pragma once

#include "anisocap/anisotropy.hpp"
#include "anisocap/geometry.hpp"

#include <functional>

namespace anisocap {

class StencilError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Smooth chart (u, v) -> R^3 on a parameter rectangle, analytically
/// extendable by `margin` beyond the rectangle so that centered stencils can
/// be evaluated anywhere in it, including on the contact row u = u1.
struct ParametricPatch {
  std::function<Vec3(double, double)> chart;
  double u0 = 0.0, u1 = 1.0;
  double v0 = 0.0, v1 = 2.0 * 3.14159265358979323846;
  bool periodic_v = true;
  bool contact_at_u1 = false;  // u = u1 row lies on the plane {x3 = 0}
  double margin = 0.05;        // fraction of the u-extent the chart extends
  double orient_sign = 1.0;    // +1 when xu x xv already points outward
};

using ScalarField = std::function<double(double, double)>;
using VectorField = std::function<Vec3(double, double)>;

/// High-order finite-difference calculus on a parametric patch. All
/// derivatives are centered stencils of the requested order applied to the
/// chart (or to derived pointwise fields) with a fixed parameter step.
class PatchCalculus {
 public:
  PatchCalculus(const ParametricPatch& patch, const Anisotropy& aniso,
                const HalfSpaceConfig& config, int order, double step);

  struct Frame {
    Vec3 x, xu, xv;
    Vec3 nu;                 // outward unit normal
    Eigen::Matrix2d g, ginv; // first fundamental form and inverse
    double sqrt_g = 0.0;
    Mat3 shape;              // ambient symmetric form of h
    Mat3 shape_F;            // A_F(nu) * shape
    double H = 0.0, HF = 0.0, tr_hF2 = 0.0, tr_AF_h2 = 0.0;
    double F = 0.0;          // F(nu)
    double psi = 0.0;        // F(nu) + omega0 <E^F, nu>
  };
  Frame frame(double u, double v) const;

  /// Ambient surface gradient of a scalar field given in chart coordinates.
  Vec3 surface_gradient(const ScalarField& f, double u, double v) const;

  /// Surface divergence of an ambient vector field along the patch.
  double divergence(const VectorField& X, double u, double v) const;

  /// J_F f = div(A_F grad f) + tr(A_F h^2) f.
  double jacobi(const ScalarField& f, double u, double v) const;

  /// Boundary frame on the contact row u = u1.
  struct BoundaryFrame {
    Vec3 mu;      // outward unit conormal
    double qF = 0.0;
    double capillary_residual = 0.0;  // <nu_F, -E3> - omega0
  };
  BoundaryFrame boundary_frame(double v) const;

  const ParametricPatch& patch() const { return patch_; }
  int order() const { return order_; }
  double step() const { return step_; }

  // centered stencil derivatives of an arbitrary 1D sample function
  double d1(const std::function<double(double)>& f, double t) const;
  double d2(const std::function<double(double)>& f, double t) const;

 private:
  void check_domain(double u) const;

  ParametricPatch patch_;
  const Anisotropy aniso_;
  HalfSpaceConfig config_;
  int order_;
  double step_;
};

/// Full pointwise state on an nu x nv grid of the parameter rectangle,
/// row-major with u varying slowest. Boundary fields are populated on the
/// contact row when the patch declares one.
GeometricState parametric_state(const ParametricPatch& patch, const Anisotropy& aniso,
                                const HalfSpaceConfig& config, int order, int grid_u,
                                int grid_v);

/// Residuals of the three pointwise F-Jacobi identities
///   J_F F(nu)        = <grad H_F, DF(nu)> + tr(h_F^2)
///   J_F <E^F, nu>    = <E^F, grad H_F>
///   J_F <x, nu>      = <x, grad H_F> + H_F
/// evaluated with stencil step 1/grid on a probe subgrid. Returns the max
/// absolute residual of each identity.
struct JacobiResiduals {
  double r_F = 0.0;
  double r_EF = 0.0;
  double r_x = 0.0;
  double max() const { return std::max({r_F, r_EF, r_x}); }
};
JacobiResiduals jacobi_identity_residuals(const ParametricPatch& patch, const Anisotropy& aniso,
                                          const HalfSpaceConfig& config, int order, int grid,
                                          int probe = 24);

/// Residuals of the two boundary identities on the contact line
///   <A_F grad <x, nu>, mu> = q_F <x, nu>
///   <A_F grad psi, mu>     = q_F psi,     psi = F(nu) + omega0 <E^F, nu>
/// Throws when the patch does not satisfy the capillary condition to
/// `capillary_tol` along the contact row.
struct BoundaryResiduals {
  double r_x = 0.0;
  double r_psi = 0.0;
  double max() const { return std::max(r_x, r_psi); }
};
BoundaryResiduals boundary_identity_residuals(const ParametricPatch& patch,
                                              const Anisotropy& aniso,
                                              const HalfSpaceConfig& config, int order, int grid,
                                              int probe = 48, double capillary_tol = 1e-8);

}  // namespace anisocap
