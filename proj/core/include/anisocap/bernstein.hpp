#pragma once

#include "anisocap/geometry.hpp"

namespace anisocap {

/// psi = F(nu) + omega0 <E^F, nu> per vertex. Throws std::logic_error when a
/// value escapes [C1, C2] beyond a small sampling slack: that indicates an
/// inconsistent configuration, not a property of the surface.
std::vector<double> psi_field(const GeometricState& state, const HalfSpaceConfig& config,
                              double slack = 1e-6);

/// f = 1 inside |x| <= r1, ln(r2/|x|)/ln(r2/r1) on the annulus, 0 outside.
std::vector<double> log_cutoff(const CapillaryMesh& mesh, double r1, double r2);

struct GrowthReport {
  std::vector<double> radii;
  std::vector<double> growth_ratio;  // Area(Sigma cap B_r) / r^2
  double C = 0.0;                    // sup of the ratios
  double flatness_integral = 0.0;    // int f^2 tr(h_F^2) dA
  double dirichlet = 0.0;            // int |grad f|^2 dA (piecewise linear)
  double rhs_bound = 0.0;            // C2^2 C1^{-1} Lambda * dirichlet
  double r1 = 0.0, r2 = 0.0;
};

/// Desk-scale check of the stability-inequality chain with a logarithmic
/// cutoff supported in the annulus (r1, r2). All radii must stay within the
/// sampled extent of the mesh.
GrowthReport probe(const CapillaryMesh& mesh, const Anisotropy& aniso,
                   const HalfSpaceConfig& config, const std::vector<double>& radii, double r1,
                   double r2);

}  // namespace anisocap
