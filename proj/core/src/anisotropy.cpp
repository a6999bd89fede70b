#include "anisocap/anisotropy.hpp"

#include "json.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace anisocap {

using nlohmann::json;

namespace {

void require_unit(const Vec3& z, double tol = 1e-10) {
  if (std::abs(z.norm() - 1.0) > tol)
    throw std::invalid_argument("expected a unit vector, |z| = " + std::to_string(z.norm()));
}

double quartic(const Vec3& x) {
  return std::pow(x.x(), 4) + std::pow(x.y(), 4) + std::pow(x.z(), 4);
}

Vec3 quartic_grad(const Vec3& x) {
  return 4.0 * Vec3(std::pow(x.x(), 3), std::pow(x.y(), 3), std::pow(x.z(), 3));
}

Mat3 quartic_hess(const Vec3& x) {
  return 12.0 * Vec3(x.x() * x.x(), x.y() * x.y(), x.z() * x.z()).asDiagonal().toDenseMatrix();
}

}  // namespace

Anisotropy Anisotropy::isotropic() {
  Anisotropy a;
  a.family_ = AnisotropyFamily::Isotropic;
  return a;
}

Anisotropy Anisotropy::ellipsoidal(const Mat3& Q) {
  Anisotropy a;
  a.family_ = AnisotropyFamily::Ellipsoidal;
  a.Q_ = 0.5 * (Q + Q.transpose());
  Eigen::SelfAdjointEigenSolver<Mat3> es(a.Q_);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw AdmissibilityError("ellipsoidal anisotropy requires a positive definite Q");
  return a;
}

Anisotropy Anisotropy::perturbed_sphere(double eps) {
  Anisotropy a;
  a.family_ = AnisotropyFamily::PerturbedSphere;
  a.eps_ = eps;
  a.certify(4000);
  return a;
}

void Anisotropy::certify(std::size_t samples) const {
  for (const Vec3& z : fibonacci_sphere(samples)) {
    if (value(z) <= 0.0)
      throw AdmissibilityError("integrand is not positive on the sphere");
    const Mat3 AF = ambient_hessian(z);
    // tangent eigenvalues of AF: the z-eigenvalue is ~0, the other two must
    // be strictly positive.
    Eigen::SelfAdjointEigenSolver<Mat3> es(AF + z * z.transpose());
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw AdmissibilityError("A_F loses positive definiteness; eps too large");
  }
}

double Anisotropy::value(const Vec3& x) const {
  const double r = x.norm();
  switch (family_) {
    case AnisotropyFamily::Isotropic:
      return r;
    case AnisotropyFamily::Ellipsoidal:
      return std::sqrt(x.dot(Q_ * x));
    case AnisotropyFamily::PerturbedSphere:
      return r + eps_ * quartic(x) / (r * r * r);
  }
  return r;
}

Vec3 Anisotropy::ambient_gradient(const Vec3& x) const {
  const double r = x.norm();
  switch (family_) {
    case AnisotropyFamily::Isotropic:
      return x / r;
    case AnisotropyFamily::Ellipsoidal:
      return Q_ * x / std::sqrt(x.dot(Q_ * x));
    case AnisotropyFamily::PerturbedSphere: {
      const double r2 = r * r;
      const double P = quartic(x);
      return x / r + eps_ * (quartic_grad(x) / (r * r2) - 3.0 * P * x / (r2 * r2 * r));
    }
  }
  return x / r;
}

Mat3 Anisotropy::ambient_hessian(const Vec3& x) const {
  const double r = x.norm();
  switch (family_) {
    case AnisotropyFamily::Isotropic:
      return (Mat3::Identity() - x * x.transpose() / (r * r)) / r;
    case AnisotropyFamily::Ellipsoidal: {
      const double F = std::sqrt(x.dot(Q_ * x));
      const Vec3 Qx = Q_ * x;
      return Q_ / F - Qx * Qx.transpose() / (F * F * F);
    }
    case AnisotropyFamily::PerturbedSphere: {
      const double r2 = r * r, r3 = r2 * r, r5 = r3 * r2, r7 = r5 * r2;
      const double P = quartic(x);
      const Vec3 G = quartic_grad(x);
      Mat3 H = (Mat3::Identity() / r - x * x.transpose() / r3);
      H += eps_ * (quartic_hess(x) / r3 - 3.0 * (G * x.transpose() + x * G.transpose()) / r5 -
                   3.0 * P * Mat3::Identity() / r5 + 15.0 * P * x * x.transpose() / r7);
      return H;
    }
  }
  return Mat3::Identity();
}

Anisotropy::Derivatives Anisotropy::eval_with_derivatives(const Vec3& z) const {
  require_unit(z);
  Derivatives d;
  d.F = value(z);
  const Vec3 grad = ambient_gradient(z);
  d.DF = grad - d.F * z;  // tangential part: grad = DF + F z on the sphere
  d.AF = ambient_hessian(z);
  return d;
}

Vec3 Anisotropy::wulff_point(const Vec3& z) const {
  require_unit(z);
  return ambient_gradient(z);
}

Vec3 Anisotropy::anisotropic_normal(const Vec3& nu) const {
  require_unit(nu);
  return ambient_gradient(nu);
}

Anisotropy Anisotropy::from_json(const std::string& text) {
  const json j = json::parse(text);
  const std::string family = j.at("family").get<std::string>();
  if (family == "isotropic") return isotropic();
  if (family == "ellipsoidal") {
    Mat3 Q;
    const auto rows = j.at("Q");
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) Q(r, c) = rows.at(r).at(c).get<double>();
    return ellipsoidal(Q);
  }
  if (family == "perturbed-sphere") return perturbed_sphere(j.at("eps").get<double>());
  throw std::invalid_argument("unknown anisotropy family: " + family);
}

std::string Anisotropy::to_json() const {
  json j;
  switch (family_) {
    case AnisotropyFamily::Isotropic:
      j["family"] = "isotropic";
      break;
    case AnisotropyFamily::Ellipsoidal: {
      j["family"] = "ellipsoidal";
      json rows = json::array();
      for (int r = 0; r < 3; ++r) rows.push_back({Q_(r, 0), Q_(r, 1), Q_(r, 2)});
      j["Q"] = rows;
      break;
    }
    case AnisotropyFamily::PerturbedSphere:
      j["family"] = "perturbed-sphere";
      j["eps"] = eps_;
      break;
  }
  return j.dump();
}

std::string HalfSpaceConfig::to_json() const {
  json j;
  j["omega0"] = omega0;
  j["EF"] = {EF.x(), EF.y(), EF.z()};
  j["C1"] = C1;
  j["C2"] = C2;
  j["Lambda"] = Lambda;
  j["sphere_samples"] = sphere_samples;
  return j.dump();
}

HalfSpaceConfig make_config(const Anisotropy& aniso, double omega0, std::size_t sphere_samples) {
  if (sphere_samples < 1000)
    throw std::invalid_argument("make_config requires at least 1000 sphere samples");
  const Vec3 E3 = Vec3::UnitZ();
  const double lo = -aniso.value(E3);
  const double hi = aniso.value(-E3);
  if (!(omega0 > lo && omega0 < hi)) {
    std::ostringstream os;
    os << "omega0 = " << omega0 << " outside the admissible interval (" << lo << ", " << hi << ")";
    throw AdmissibilityError(os.str());
  }

  HalfSpaceConfig cfg;
  cfg.omega0 = omega0;
  cfg.sphere_samples = sphere_samples;
  if (omega0 < 0.0)
    cfg.EF = aniso.wulff_point(E3) / aniso.value(E3);
  else
    cfg.EF = -aniso.wulff_point(-E3) / aniso.value(-E3);

  double c1 = std::numeric_limits<double>::infinity();
  double c2 = -c1;
  double lambda = 0.0;
  for (const Vec3& z : fibonacci_sphere(sphere_samples)) {
    const double v = aniso.value(z) + omega0 * cfg.EF.dot(z);
    c1 = std::min(c1, v);
    c2 = std::max(c2, v);
    Eigen::SelfAdjointEigenSolver<Mat3> es(aniso.ambient_hessian(z));
    lambda = std::max(lambda, es.eigenvalues().maxCoeff());
  }
  cfg.C1 = c1;
  cfg.C2 = c2;
  cfg.Lambda = lambda;
  if (cfg.C1 <= 0.0)
    throw AdmissibilityError("gauge F + omega0 <E^F, z> is not strictly positive");
  return cfg;
}

DerivativeReport validate_derivatives(const Anisotropy& aniso, double tol, std::size_t samples,
                                      double step) {
  DerivativeReport rep;
  const auto pts = fibonacci_sphere(samples);
  for (const Vec3& z : pts) {
    // local tangent frame
    Vec3 t1 = z.cross(std::abs(z.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX()).normalized();
    Vec3 t2 = z.cross(t1);

    const auto d = aniso.eval_with_derivatives(z);
    const double F0 = aniso.value(z);

    auto geo = [&](const Vec3& e, double s) {
      return aniso.value(std::cos(s) * z + std::sin(s) * e);
    };
    // great-circle first differences give <DF, e>
    for (const Vec3& e : {t1, t2}) {
      const double fd = (geo(e, step) - geo(e, -step)) / (2.0 * step);
      rep.worst_DF_error = std::max(rep.worst_DF_error, std::abs(fd - d.DF.dot(e)));
      if (std::abs(fd - d.DF.dot(e)) == rep.worst_DF_error) rep.worst_point = z;
    }
    // great-circle second differences give A_F(e, e) - F
    auto af_fd = [&](const Vec3& e) {
      return (geo(e, step) - 2.0 * F0 + geo(e, -step)) / (step * step) + F0;
    };
    const Vec3 tm = (t1 + t2).normalized();
    const double a11 = af_fd(t1), a22 = af_fd(t2), amm = af_fd(tm);
    const double a12 = amm - 0.5 * (a11 + a22);
    const double e11 = std::abs(a11 - t1.dot(d.AF * t1));
    const double e22 = std::abs(a22 - t2.dot(d.AF * t2));
    const double e12 = std::abs(a12 - t1.dot(d.AF * t2));
    const double worst = std::max({e11, e22, e12});
    if (worst > rep.worst_AF_error) {
      rep.worst_AF_error = worst;
      rep.worst_point = z;
    }
  }
  rep.pass = rep.worst_DF_error <= tol && rep.worst_AF_error <= tol;
  return rep;
}

}  // namespace anisocap
