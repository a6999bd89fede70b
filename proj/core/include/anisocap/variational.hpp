#pragma once

#include "anisocap/geometry.hpp"

namespace anisocap {

/// The capillary energy split into its two terms, with the conserved volume
/// alongside.
struct EnergyBreakdown {
  double area_term = 0.0;     // integral of F at the normal
  double wetting_term = 0.0;  // omega0 * wetted signed area
  double total = 0.0;         // area_term + wetting_term
  double volume = 0.0;
  double wetted = 0.0;        // signed planar area enclosed by the boundary
};

EnergyBreakdown energy(const CapillaryMesh& mesh, const Anisotropy& aniso,
                       const HalfSpaceConfig& config);

/// Exact gradient of the discrete energy with respect to vertex positions.
/// Contact vertices are constrained to the plane (zero E3-component);
/// truncation-boundary vertices are pinned (zero gradient). The same
/// constraints apply to the volume gradient.
struct VariationField {
  std::vector<Vec3> gradient;        // dE/dx per vertex
  std::vector<Vec3> volume_gradient; // dV/dx per vertex
  std::vector<double> normal_density;  // <dE/dx, nu> / vertex area
};

VariationField first_variation(const CapillaryMesh& mesh, const Anisotropy& aniso,
                               const HalfSpaceConfig& config, const GeometricState& state);

/// Integral of 2(F(nu) + omega0 <E^F, nu>) - H_F <x, nu> by vertex-lumped
/// quadrature: the anisotropic Minkowski-type integral, near zero on
/// capillary surfaces.
struct MinkowskiReport {
  double raw = 0.0;
  double normalized = 0.0;  // raw / total area
  double capillary_residual = 0.0;
  bool guaranteed = true;   // false when the capillary residual exceeds tol
};
MinkowskiReport minkowski_residual(const GeometricState& state, const CapillaryMesh& mesh,
                                   const Anisotropy& aniso, const HalfSpaceConfig& config,
                                   double tol_b = 1e-6);

/// The Robin coefficient along the contact line: both closed forms and their
/// worst-case discrepancy (a consistency diagnostic).
struct BoundaryQF {
  std::vector<int> vertices;
  std::vector<double> qF;
  std::vector<double> qF_alt;
  double max_discrepancy = 0.0;
};
BoundaryQF boundary_qF(const GeometricState& state, const CapillaryMesh& mesh);

}  // namespace anisocap
