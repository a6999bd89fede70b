#include "anisocap/anisotropy.hpp"

#include <doctest.h>

using namespace anisocap;

TEST_SUITE_BEGIN("anisotropy");

TEST_CASE("isotropic integrand is the round metric") {
  const auto iso = Anisotropy::isotropic();
  const Vec3 z = Vec3(0.2, -0.7, 0.5).normalized();
  const auto d = iso.eval_with_derivatives(z);
  CHECK(d.F == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(d.DF.norm() < 1e-14);
  CHECK((d.AF - tangent_projector(z)).norm() < 1e-12);
  CHECK((iso.wulff_point(z) - z).norm() < 1e-14);
  CHECK((iso.anisotropic_normal(z) - z).norm() < 1e-14);
}

TEST_CASE("ellipsoidal closed forms at the axes") {
  const auto ell = Anisotropy::ellipsoidal(Vec3(4, 1, 1).asDiagonal().toDenseMatrix());

  // frozen oracle: central finite differences of F on the sphere (step 1e-4)
  // reproduce these tangent eigenvalues to 1e-6
  auto tangent_eigs = [](const Mat3& AF) {
    Eigen::SelfAdjointEigenSolver<Mat3> es(AF);
    return std::pair{es.eigenvalues()(1), es.eigenvalues()(2)};  // smallest is the annihilated normal
  };

  const auto d1 = ell.eval_with_derivatives(Vec3::UnitX());
  CHECK(d1.F == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(d1.DF.norm() < 1e-12);
  auto [a1, b1] = tangent_eigs(d1.AF);
  CHECK(a1 == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(b1 == doctest::Approx(0.5).epsilon(1e-10));

  const auto d2 = ell.eval_with_derivatives(Vec3::UnitY());
  CHECK(d2.F == doctest::Approx(1.0).epsilon(1e-12));
  auto [a2, b2] = tangent_eigs(d2.AF);
  CHECK(a2 == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(b2 == doctest::Approx(4.0).epsilon(1e-10));

  CHECK((ell.wulff_point(Vec3::UnitX()) - Vec3(2, 0, 0)).norm() < 1e-12);
  CHECK((ell.wulff_point(Vec3::UnitY()) - Vec3(0, 1, 0)).norm() < 1e-12);
  CHECK((ell.anisotropic_normal(Vec3::UnitZ()) - Vec3(0, 0, 1)).norm() < 1e-12);
  // nu_F = Q nu / sqrt(nu^T Q nu); the Euler relation <nu_F, nu> = F pins the
  // normalization, and the point lies on the Wulff ellipsoid y^T Q^{-1} y = 1
  const Vec3 diag = (Vec3::UnitX() + Vec3::UnitY()).normalized();
  const Vec3 nuF = ell.anisotropic_normal(diag);
  CHECK((nuF - Vec3(4, 1, 0) / std::sqrt(5.0)).norm() < 1e-12);
  CHECK(nuF.dot(diag) == doctest::Approx(ell.value(diag)).epsilon(1e-12));
}

TEST_CASE("Wulff points lie on the dual ellipsoid") {
  const Mat3 Q = Vec3(4, 1, 1).asDiagonal();
  const auto ell = Anisotropy::ellipsoidal(Q);
  for (const Vec3& z : fibonacci_sphere(200)) {
    const Vec3 y = ell.wulff_point(z);
    CHECK(y.dot(Q.inverse() * y) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("homogeneity and the Euler relation") {
  const auto fam = {Anisotropy::isotropic(),
                    Anisotropy::ellipsoidal(Vec3(4, 1, 1).asDiagonal().toDenseMatrix()),
                    Anisotropy::perturbed_sphere(0.05)};
  for (const auto& an : fam) {
    for (const Vec3& z : fibonacci_sphere(300)) {
      CHECK(an.value(2.5 * z) == doctest::Approx(2.5 * an.value(z)).epsilon(1e-12));
      CHECK(an.wulff_point(z).dot(z) == doctest::Approx(an.value(z)).epsilon(1e-12));
      const auto d = an.eval_with_derivatives(z);
      CHECK((d.AF - d.AF.transpose()).norm() < 1e-12);
      CHECK((d.AF * z).norm() < 1e-10);
      CHECK(std::abs(d.DF.dot(z)) < 1e-10);
    }
  }
}

TEST_CASE("admissibility certificate: A_F positive definite on tangent planes") {
  const auto pert = Anisotropy::perturbed_sphere(0.05);
  for (const Vec3& z : fibonacci_sphere(500)) {
    const Mat3 AF = pert.eval_with_derivatives(z).AF;
    Eigen::SelfAdjointEigenSolver<Mat3> es(AF);
    CHECK(es.eigenvalues()(1) > 0.0);  // both tangent eigenvalues positive
    CHECK(es.eigenvalues()(2) > 0.0);
  }
}

TEST_CASE("derivative cross-check against sphere-only finite differences") {
  CHECK(validate_derivatives(Anisotropy::isotropic(), 1e-7).pass);
  CHECK(validate_derivatives(Anisotropy::ellipsoidal(Vec3(4, 1, 1).asDiagonal().toDenseMatrix()),
                             1e-6)
            .pass);
  CHECK(validate_derivatives(Anisotropy::perturbed_sphere(0.05), 1e-6).pass);
}

TEST_CASE("half-space configs: frozen gauge bounds") {
  const auto iso = Anisotropy::isotropic();
  {
    const auto cfg = make_config(iso, 0.5);
    CHECK((cfg.EF - Vec3::UnitZ()).norm() < 1e-12);
    CHECK(cfg.C1 == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(cfg.C2 == doctest::Approx(1.5).epsilon(1e-10));
    CHECK(cfg.Lambda == doctest::Approx(1.0).epsilon(1e-10));
  }
  {
    const auto cfg = make_config(iso, -0.4);
    CHECK((cfg.EF - Vec3::UnitZ()).norm() < 1e-12);
    CHECK(cfg.C1 == doctest::Approx(0.6).epsilon(1e-10));
    CHECK(cfg.C2 == doctest::Approx(1.4).epsilon(1e-10));
  }
  {
    const auto ell = Anisotropy::ellipsoidal(Vec3(4, 1, 1).asDiagonal().toDenseMatrix());
    const auto cfg = make_config(ell, 0.0);
    CHECK(cfg.C1 == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(cfg.C2 == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(cfg.Lambda == doctest::Approx(4.0).epsilon(1e-3));
    CHECK(std::abs(cfg.EF.dot(Vec3::UnitZ()) - 1.0) < 1e-12);
    CHECK(cfg.C1 > 0.0);
  }
}

TEST_CASE("config determinism for a fixed sample count") {
  const auto ell = Anisotropy::ellipsoidal(Vec3(4, 1, 1).asDiagonal().toDenseMatrix());
  const auto a = make_config(ell, 0.3, 5000);
  const auto b = make_config(ell, 0.3, 5000);
  CHECK(a.C1 == b.C1);
  CHECK(a.C2 == b.C2);
  CHECK(a.Lambda == b.Lambda);
}

TEST_CASE("rejection of inadmissible inputs") {
  CHECK_THROWS_AS((void)make_config(Anisotropy::isotropic(), 1.5), AdmissibilityError);
  CHECK_THROWS_AS((void)make_config(Anisotropy::isotropic(), -1.0), AdmissibilityError);
  CHECK_THROWS(
      (void)Anisotropy::ellipsoidal(Vec3(-1, 1, 1).asDiagonal().toDenseMatrix()));
  CHECK_THROWS((void)Anisotropy::perturbed_sphere(5.0));  // A_F loses definiteness
  CHECK_THROWS((void)Anisotropy::isotropic().eval_with_derivatives(Vec3(1, 1, 0)));
}

TEST_CASE("JSON round trip preserves the family and parameters") {
  const auto ell = Anisotropy::ellipsoidal(Vec3(4, 1, 1).asDiagonal().toDenseMatrix());
  const auto back = Anisotropy::from_json(ell.to_json());
  CHECK(back.family() == AnisotropyFamily::Ellipsoidal);
  CHECK((back.Q() - ell.Q()).norm() < 1e-14);
  const auto pert = Anisotropy::from_json(Anisotropy::perturbed_sphere(0.07).to_json());
  CHECK(pert.eps() == doctest::Approx(0.07));
}

TEST_SUITE_END();
