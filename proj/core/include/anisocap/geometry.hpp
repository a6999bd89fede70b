#pragma once

#include "anisocap/anisotropy.hpp"
#include "anisocap/mesh.hpp"

namespace anisocap {

class TransversalityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Pointwise geometric state of a capillary mesh. Shape operators are
/// stored as symmetric ambient 3x3 forms annihilating the (fitted) normal;
/// anisotropic quantities use A_F evaluated at the vertex normal.
struct GeometricState {
  // per-vertex
  std::vector<Vec3> normal;             // angle-weighted unit normal
  std::vector<Mat3> shape;              // h, from a two-ring quadric fit
  std::vector<double> mean_curvature;   // H = tr h
  std::vector<Mat3> shape_F;            // h_F = A_F o h
  std::vector<double> HF;               // tr h_F
  std::vector<double> tr_hF2;           // tr(h_F^2)
  std::vector<double> tr_AF_h2;         // tr(A_F h^2)
  std::vector<double> F_nu;             // F(nu)
  std::vector<double> vertex_area;      // lumped (1/3 of incident faces)

  // per-face
  std::vector<Vec3> face_normal;
  std::vector<double> face_area;

  // per-boundary-vertex (zero elsewhere)
  std::vector<Vec3> conormal;           // mu, outward unit, tangent to Sigma
  std::vector<Vec3> nu_bar;             // unit normal of the contact line in the plane
  std::vector<Vec3> nu_F;               // anisotropic normal Phi(nu)
  std::vector<Vec3> mu_F;               // F(nu) mu - <nu_F, mu> nu
  std::vector<double> capillary_residual;  // <nu_F, -E3> - omega0
  std::vector<double> qF;               // -(nu3/mu3) h_F(mu, mu)
  std::vector<double> qF_alt;           // equivalent closed form, diagnostic
  std::vector<double> boundary_mass;    // half the adjacent contact-edge length

  double qF_discrepancy = 0.0;          // max |qF - qF_alt|

  double total_area() const { return pairwise_sum(face_area); }
};

/// Samples the truncated Wulff (Winterbottom) shape: the unit Wulff shape
/// centered at omega0*E3, cut by the plane {x3 = 0}. `resolution` is the
/// number of concentric rings; the mesh has 6*resolution^2 faces. The exact
/// sphere parameters are stored in `reference_normals`.
CapillaryMesh build_truncated_wulff(const Anisotropy& aniso, const HalfSpaceConfig& config,
                                    int resolution);

/// Computes the full discrete geometric state. Throws TransversalityError
/// when |<mu, E3>| < 1e-6 at a boundary vertex.
GeometricState compute_state(const CapillaryMesh& mesh, const Anisotropy& aniso,
                             const HalfSpaceConfig& config);

/// Max over boundary vertices of |h_F(e, mu)| with e the unit contact-line
/// tangent: the anisotropic-principal-direction residual of the boundary.
double boundary_principal_residual(const CapillaryMesh& mesh, const GeometricState& state);

/// Stationarity of a generated Wulff cap, measured through the exact
/// first-variation densities: the interior density H_F - n evaluated via the
/// closed-form Weingarten map of the Wulff shape, and the in-plane part of
/// mu_F + omega0*nu_bar along the boundary, both from the stored exact
/// normals. Requires `reference_normals`. Returns the sup of both residuals
/// relative to the mesh scale.
double wulff_stationarity_residual(const CapillaryMesh& mesh, const Anisotropy& aniso,
                                   const HalfSpaceConfig& config);

/// Max capillary residual |<Phi(z), -E3> - omega0| over boundary vertices
/// using the exact generator normals z.
double wulff_capillary_residual(const CapillaryMesh& mesh, const Anisotropy& aniso,
                                const HalfSpaceConfig& config);

}  // namespace anisocap
