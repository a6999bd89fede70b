#pragma once

#include "anisocap/patch.hpp"
#include "anisocap/variational.hpp"

namespace anisocap {

enum class ConstraintMode { MeanZero, Unconstrained };

/// Second-variation quadratic form over per-vertex scalar normal speeds,
///   Q(f, f) = int <A_F grad f, grad f> - tr(A_F h^2) f^2 dA - bdry q_F f^2 ds
/// with a lumped mass form M(f, f) = int f^2 dA. Piecewise-linear elements;
/// truncation-boundary vertices are eliminated (Dirichlet), mirroring
/// compactly supported speeds on samples of unbounded surfaces.
struct StabilityForm {
  Eigen::MatrixXd Q;
  Eigen::VectorXd M;            // lumped (diagonal) mass
  std::vector<int> dof_to_vertex;
  std::vector<int> vertex_to_dof;  // -1 for eliminated vertices
  int n_vertices = 0;

  double apply(const std::vector<double>& f) const;  // f over all vertices
};

StabilityForm assemble(const CapillaryMesh& mesh, const GeometricState& state,
                       const Anisotropy& aniso, const HalfSpaceConfig& config);

struct StabilityReport {
  std::vector<double> eigenvalues;              // ascending
  std::vector<std::vector<double>> eigenfields; // per-vertex, zero at eliminated dofs
  std::vector<double> residuals;                // ||Q v - lambda M v|| / ||v|| (projected)
  ConstraintMode mode = ConstraintMode::MeanZero;
  bool stable = true;                           // lambda_min >= -band
  double band = 0.05;
};

/// Lowest k eigenpairs of Q f = lambda M f. In MeanZero mode the M-weighted
/// constant is projected out (Householder deflation) before a dense
/// symmetric solve.
StabilityReport spectrum(const StabilityForm& form, int k, ConstraintMode mode,
                         double band = 0.05);

/// phi = 2 (F(nu) + omega0 <E^F, nu>) - H_F <x, nu>, the Minkowski-derived
/// test function, together with its integral (vanishing on capillary
/// surfaces).
struct TestFunctionReport {
  std::vector<double> phi;
  double integral = 0.0;
  double integral_normalized = 0.0;  // / total area
};
TestFunctionReport minkowski_test_function(const GeometricState& state,
                                           const CapillaryMesh& mesh,
                                           const HalfSpaceConfig& config);

/// int (F(nu) + omega0 <E^F, nu>) (2 tr(h_F^2) - H_F^2) dA: nonnegative up
/// to discretization, zero exactly on anisotropically umbilical surfaces.
double rigidity_gap(const GeometricState& state, const CapillaryMesh& mesh,
                    const HalfSpaceConfig& config);

/// Richardson-extrapolated second difference of the energy along the family
/// x + t Y with Y = f nu in the interior and f nu - (nu3/mu3) f mu at
/// contact vertices, compared against Q(f, f). Requires an anisotropic
/// capillary minimal configuration (|H_F density| <= minimal_tol).
struct SecondVariationCheck {
  double quadratic_form = 0.0;   // Q(f, f)
  double fd_value = 0.0;         // extrapolated E''(0)
  double relative_discrepancy = 0.0;
};
SecondVariationCheck second_variation_fd_check(const CapillaryMesh& mesh, const Anisotropy& aniso,
                                               const HalfSpaceConfig& config,
                                               const std::vector<double>& f,
                                               const std::vector<double>& steps,
                                               double minimal_tol = 1e-6);

}  // namespace anisocap
