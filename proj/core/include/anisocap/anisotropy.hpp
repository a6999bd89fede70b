#pragma once

#include "anisocap/numeric.hpp"

#include <optional>
#include <stdexcept>
#include <string>

namespace anisocap {

/// Error thrown when an integrand or contact parameter fails the
/// admissibility requirements.
class AdmissibilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class AnisotropyFamily { Isotropic, Ellipsoidal, PerturbedSphere };

/// A positive surface-tension integrand F on the unit sphere, together with
/// its one-homogeneous ambient extension. Three analytic families are
/// supported:
///
///   isotropic        F(z) = 1
///   ellipsoidal      F(z) = sqrt(z^T Q z), Q symmetric positive definite
///   perturbed sphere F(z) = 1 + eps * (z1^4 + z2^4 + z3^4)
///
/// All derivatives are closed-form. Admissibility (A_F positive definite on
/// every tangent plane) is certified at construction by dense sphere
/// sampling.
class Anisotropy {
 public:
  static Anisotropy isotropic();
  static Anisotropy ellipsoidal(const Mat3& Q);
  static Anisotropy perturbed_sphere(double eps);

  /// Parses {"family":"isotropic"} | {"family":"ellipsoidal","Q":[[...]]} |
  /// {"family":"perturbed-sphere","eps":...}.
  static Anisotropy from_json(const std::string& text);
  std::string to_json() const;

  AnisotropyFamily family() const { return family_; }
  const Mat3& Q() const { return Q_; }
  double eps() const { return eps_; }

  /// Value of the one-homogeneous extension at any nonzero x.
  double value(const Vec3& x) const;
  /// Ambient gradient of the extension; on the sphere this equals Phi(z).
  Vec3 ambient_gradient(const Vec3& x) const;
  /// Ambient Hessian of the extension; restricted to the tangent plane at a
  /// unit vector z this is A_F(z), and it annihilates z.
  Mat3 ambient_hessian(const Vec3& x) const;

  /// F, the sphere gradient DF, and A_F at a unit vector z.
  /// Throws std::invalid_argument unless |z| = 1 within 1e-10.
  struct Derivatives {
    double F;
    Vec3 DF;   // tangent to the sphere at z
    Mat3 AF;   // symmetric, AF * z = 0
  };
  Derivatives eval_with_derivatives(const Vec3& z) const;

  /// Wulff map Phi(z) = F(z) z + DF(z).
  Vec3 wulff_point(const Vec3& z) const;

  /// Anisotropic normal nu_F = Phi(nu).
  Vec3 anisotropic_normal(const Vec3& nu) const;

 private:
  Anisotropy() = default;
  void certify(std::size_t samples) const;

  AnisotropyFamily family_ = AnisotropyFamily::Isotropic;
  Mat3 Q_ = Mat3::Identity();
  double eps_ = 0.0;
};

/// Half-space contact data: the contact parameter omega0, the constant
/// vector E^F_3, and the gauge bounds C1 <= F(z) + omega0 <E^F, z> <= C2
/// together with the largest tangent eigenvalue Lambda of A_F, all obtained
/// from a deterministic Fibonacci sphere lattice.
struct HalfSpaceConfig {
  double omega0 = 0.0;
  Vec3 EF = Vec3::UnitZ();
  double C1 = 1.0;
  double C2 = 1.0;
  double Lambda = 1.0;
  std::size_t sphere_samples = 0;

  std::string to_json() const;
};

/// Builds a HalfSpaceConfig. Throws AdmissibilityError when omega0 lies
/// outside the open interval (-F(E3), F(-E3)).
HalfSpaceConfig make_config(const Anisotropy& aniso, double omega0,
                            std::size_t sphere_samples = 20000);

/// Finite-difference cross-check of DF and A_F against sphere-only
/// evaluations of F.
struct DerivativeReport {
  bool pass = true;
  double worst_DF_error = 0.0;
  double worst_AF_error = 0.0;
  Vec3 worst_point = Vec3::UnitZ();
};
DerivativeReport validate_derivatives(const Anisotropy& aniso, double tol,
                                      std::size_t samples = 1000,
                                      double step = 1e-4);

}  // namespace anisocap
