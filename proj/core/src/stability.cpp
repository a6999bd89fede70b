#include "anisocap/stability.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdint>

namespace anisocap {

double StabilityForm::apply(const std::vector<double>& f) const {
  Eigen::VectorXd x(dof_to_vertex.size());
  for (std::size_t d = 0; d < dof_to_vertex.size(); ++d) x(d) = f[dof_to_vertex[d]];
  return x.dot(Q * x);
}

StabilityForm assemble(const CapillaryMesh& mesh, const GeometricState& state,
                       const Anisotropy& aniso, const HalfSpaceConfig& config) {
  (void)config;
  const int nv = mesh.vertex_count();
  StabilityForm form;
  form.n_vertices = nv;
  form.vertex_to_dof.assign(nv, -1);
  for (int v = 0; v < nv; ++v) {
    if (mesh.is_boundary[v] && !mesh.is_contact[v]) continue;  // Dirichlet at truncation
    form.vertex_to_dof[v] = static_cast<int>(form.dof_to_vertex.size());
    form.dof_to_vertex.push_back(v);
  }
  const int n = static_cast<int>(form.dof_to_vertex.size());
  form.Q = Eigen::MatrixXd::Zero(n, n);
  form.M = Eigen::VectorXd::Zero(n);

  for (std::size_t fidx = 0; fidx < mesh.triangles.size(); ++fidx) {
    const auto& t = mesh.triangles[fidx];
    const double A = state.face_area[fidx];
    const Vec3& nrm = state.face_normal[fidx];
    const Mat3 AF = aniso.ambient_hessian(nrm);
    Vec3 grad[3];
    for (int p = 0; p < 3; ++p) {
      const Vec3& b = mesh.vertices[t[(p + 1) % 3]];
      const Vec3& c = mesh.vertices[t[(p + 2) % 3]];
      grad[p] = nrm.cross(c - b) / (2.0 * A);
    }
    for (int p = 0; p < 3; ++p) {
      const int dp = form.vertex_to_dof[t[p]];
      if (dp < 0) continue;
      for (int q = 0; q < 3; ++q) {
        const int dq = form.vertex_to_dof[t[q]];
        if (dq < 0) continue;
        form.Q(dp, dq) += A * grad[p].dot(AF * grad[q]);
      }
    }
  }
  for (int d = 0; d < n; ++d) {
    const int v = form.dof_to_vertex[d];
    form.Q(d, d) -= state.tr_AF_h2[v] * state.vertex_area[v];
    form.M(d) = state.vertex_area[v];
  }
  // Robin term on contact edges, trapezoid rule
  for (const auto& loop : mesh.boundary_loops) {
    const int nl = static_cast<int>(loop.size());
    for (int i = 0; i < nl; ++i) {
      const int a = loop[i], b = loop[(i + 1) % nl];
      if (!mesh.is_contact[a] || !mesh.is_contact[b]) continue;
      const double L = (mesh.vertices[b] - mesh.vertices[a]).norm();
      const int da = form.vertex_to_dof[a], db = form.vertex_to_dof[b];
      if (da >= 0) form.Q(da, da) -= 0.5 * L * state.qF[a];
      if (db >= 0) form.Q(db, db) -= 0.5 * L * state.qF[b];
    }
  }
  form.Q = 0.5 * (form.Q + form.Q.transpose()).eval();
  if (!form.Q.allFinite()) throw std::runtime_error("non-finite stability form entries");
  return form;
}

namespace {

struct EigPairs {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // matching columns
};

/// Lowest-k eigenpairs of a dense symmetric matrix. Small problems take the
/// full dense solver; larger ones use shift-invert Lanczos with full
/// reorthogonalization on a Cholesky factorization of A + sigma I, verified
/// by explicit residuals before returning.
EigPairs smallest_eigs(const Eigen::Ref<const Eigen::MatrixXd>& A, int k) {
  const int n = static_cast<int>(A.rows());
  const int kk = std::min(k, n);
  if (n <= 1200) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    if (es.info() != Eigen::Success) throw std::runtime_error("dense eigensolver failed");
    return {es.eigenvalues().head(kk), es.eigenvectors().leftCols(kk)};
  }

  double sigma = 1.0;
  Eigen::LLT<Eigen::MatrixXd> llt;
  for (;;) {
    llt.compute(A + sigma * Eigen::MatrixXd::Identity(n, n));
    if (llt.info() == Eigen::Success) break;
    sigma *= 4.0;
    if (sigma > 1e9)
      throw std::runtime_error("stability form could not be shifted to positive definite");
  }

  const int maxit = std::min(n - 1, 400);
  Eigen::MatrixXd V(n, maxit + 1);
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(maxit);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(maxit);
  {
    // deterministic start vector
    Eigen::VectorXd v0(n);
    std::uint64_t state = 0x9e3779b97f4a7c15ULL;
    for (int i = 0; i < n; ++i) {
      state = state * 6364136223846793005ULL + 1442695040888963407ULL;
      v0(i) = static_cast<double>(state >> 11) / 9007199254740992.0 - 0.5;
    }
    V.col(0) = v0.normalized();
  }

  EigPairs out;
  for (int j = 0; j < maxit; ++j) {
    Eigen::VectorXd w = llt.solve(V.col(j));
    alpha(j) = V.col(j).dot(w);
    for (int pass = 0; pass < 2; ++pass)
      w -= V.leftCols(j + 1) * (V.leftCols(j + 1).transpose() * w).eval();
    beta(j) = w.norm();
    const bool breakdown = beta(j) < 1e-13;
    if (!breakdown) V.col(j + 1) = w / beta(j);

    if (breakdown || (j + 1) % 10 == 0 || j + 1 == maxit) {
      const int m = j + 1;
      Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
      for (int i = 0; i < m; ++i) {
        T(i, i) = alpha(i);
        if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta(i);
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
      // largest Ritz values of the inverse operator = smallest of A
      const int avail = std::min(kk, m);
      Eigen::VectorXd vals(avail);
      Eigen::MatrixXd vecs(n, avail);
      bool converged = m >= kk + 2 || breakdown;
      for (int i = 0; i < avail; ++i) {
        const int col = m - 1 - i;
        const double theta = es.eigenvalues()(col);
        vals(i) = 1.0 / theta - sigma;
        vecs.col(i) = V.leftCols(m) * es.eigenvectors().col(col);
        vecs.col(i).normalize();
        const double resid = (A * vecs.col(i) - vals(i) * vecs.col(i)).norm();
        if (resid > 1e-10 * std::max(1.0, std::abs(vals(i)))) converged = false;
      }
      if (converged || breakdown || j + 1 == maxit) {
        if (!converged && !breakdown)
          throw std::runtime_error("Lanczos eigensolver did not converge");
        // reorder ascending
        out.values = vals;
        out.vectors = vecs;
        for (int i = 0; i + 1 < avail; ++i)
          for (int l = 0; l + 1 < avail - i; ++l)
            if (out.values(l) > out.values(l + 1)) {
              std::swap(out.values(l), out.values(l + 1));
              out.vectors.col(l).swap(out.vectors.col(l + 1));
            }
        return out;
      }
    }
  }
  throw std::runtime_error("Lanczos eigensolver did not converge");
}

}  // namespace

StabilityReport spectrum(const StabilityForm& form, int k, ConstraintMode mode, double band) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  const int n = static_cast<int>(form.dof_to_vertex.size());
  const Eigen::VectorXd s = form.M.cwiseSqrt();
  const Eigen::VectorXd si = s.cwiseInverse();
  Eigen::MatrixXd B = si.asDiagonal() * form.Q * si.asDiagonal();
  B = 0.5 * (B + B.transpose()).eval();

  StabilityReport rep;
  rep.mode = mode;
  rep.band = band;

  Eigen::MatrixXd vecs;  // columns: y with f = M^{-1/2} y
  Eigen::VectorXd vals;
  if (mode == ConstraintMode::Unconstrained) {
    EigPairs p = smallest_eigs(B, k);
    vals = p.values;
    vecs = p.vectors;
  } else {
    // deflate the M-weighted constant: Householder H maps u to -e1, applied
    // as rank-one updates (C = H B H)
    Eigen::VectorXd u = s / s.norm();
    Eigen::VectorXd w = u;
    w(0) -= (u(0) >= 0.0 ? -1.0 : 1.0);  // avoids cancellation
    w.normalize();
    const Eigen::VectorXd q = B * w;
    const double a = w.dot(q);
    B.noalias() -= 2.0 * w * q.transpose();
    B.noalias() -= 2.0 * q * w.transpose();
    B.noalias() += 4.0 * a * w * w.transpose();
    B = 0.5 * (B + B.transpose()).eval();
    EigPairs p = smallest_eigs(B.bottomRightCorner(n - 1, n - 1), k);
    vals = p.values;
    Eigen::MatrixXd lifted = Eigen::MatrixXd::Zero(n, p.vectors.cols());
    lifted.bottomRows(n - 1) = p.vectors;
    vecs = lifted - 2.0 * w * (w.transpose() * lifted).eval();
    // restore B for the residual checks below
    // (Q and M are still the authoritative operators; nothing else uses B)
  }

  const int kk = std::min<int>(k, static_cast<int>(vals.size()));
  for (int i = 0; i < kk; ++i) {
    const double lambda = vals(i);
    const Eigen::VectorXd y = vecs.col(i);
    const Eigen::VectorXd v = si.asDiagonal() * y;
    Eigen::VectorXd r = form.Q * v - lambda * form.M.asDiagonal() * v;
    if (mode == ConstraintMode::MeanZero) {
      // remove the Lagrange-multiplier component along M * 1
      r -= (r.sum() / form.M.sum()) * form.M;
    }
    rep.eigenvalues.push_back(lambda);
    rep.residuals.push_back(r.norm() / v.norm());
    std::vector<double> field(form.n_vertices, 0.0);
    for (int d = 0; d < n; ++d) field[form.dof_to_vertex[d]] = v(d);
    rep.eigenfields.push_back(std::move(field));
  }
  rep.stable = rep.eigenvalues.empty() || rep.eigenvalues.front() >= -band;
  return rep;
}

TestFunctionReport minkowski_test_function(const GeometricState& state,
                                           const CapillaryMesh& mesh,
                                           const HalfSpaceConfig& config) {
  const int nv = mesh.vertex_count();
  TestFunctionReport rep;
  rep.phi.resize(nv);
  std::vector<double> contrib(nv);
  for (int v = 0; v < nv; ++v) {
    const double psi = state.F_nu[v] + config.omega0 * config.EF.dot(state.normal[v]);
    rep.phi[v] = 2.0 * psi - state.HF[v] * mesh.vertices[v].dot(state.normal[v]);
    contrib[v] = state.vertex_area[v] * rep.phi[v];
  }
  rep.integral = pairwise_sum(contrib);
  rep.integral_normalized = rep.integral / state.total_area();
  return rep;
}

double rigidity_gap(const GeometricState& state, const CapillaryMesh& mesh,
                    const HalfSpaceConfig& config) {
  const int nv = mesh.vertex_count();
  std::vector<double> contrib(nv);
  for (int v = 0; v < nv; ++v) {
    const double psi = state.F_nu[v] + config.omega0 * config.EF.dot(state.normal[v]);
    contrib[v] = state.vertex_area[v] * psi *
                 (2.0 * state.tr_hF2[v] - state.HF[v] * state.HF[v]);
  }
  return pairwise_sum(contrib);
}

namespace {

double energy_total_at(const CapillaryMesh& base, const std::vector<Vec3>& pos,
                       const Anisotropy& aniso, const HalfSpaceConfig& config) {
  std::vector<double> contrib(base.triangles.size());
  for (std::size_t f = 0; f < base.triangles.size(); ++f) {
    const auto& t = base.triangles[f];
    contrib[f] = aniso.value(0.5 * (pos[t[1]] - pos[t[0]]).cross(pos[t[2]] - pos[t[0]]));
  }
  double total = pairwise_sum(contrib);
  std::vector<double> shoelace;
  for (const auto& loop : base.boundary_loops) {
    const std::size_t nl = loop.size();
    for (std::size_t i = 0; i < nl; ++i) {
      const Vec3& a = pos[loop[i]];
      const Vec3& b = pos[loop[(i + 1) % nl]];
      shoelace.push_back(0.5 * (a.x() * b.y() - a.y() * b.x()));
    }
  }
  return total + config.omega0 * pairwise_sum(shoelace);
}

}  // namespace

SecondVariationCheck second_variation_fd_check(const CapillaryMesh& mesh, const Anisotropy& aniso,
                                               const HalfSpaceConfig& config,
                                               const std::vector<double>& f,
                                               const std::vector<double>& steps,
                                               double minimal_tol) {
  if (steps.size() < 2) throw std::invalid_argument("need at least two steps");
  for (std::size_t i = 1; i < steps.size(); ++i)
    if (std::abs(steps[i] - 0.5 * steps[i - 1]) > 1e-12 * steps[0])
      throw std::invalid_argument("steps must halve");
  if (steps.back() < 1e-7) throw std::invalid_argument("step underflow");

  const GeometricState state = compute_state(mesh, aniso, config);
  const VariationField var = first_variation(mesh, aniso, config, state);
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    if (mesh.is_boundary[v]) continue;
    if (std::abs(var.normal_density[v]) > minimal_tol)
      throw std::invalid_argument("configuration is not anisotropic capillary minimal");
  }

  const int nv = mesh.vertex_count();
  std::vector<Vec3> Y(nv, Vec3::Zero());
  for (int v = 0; v < nv; ++v) {
    if (mesh.is_boundary[v] && !mesh.is_contact[v]) continue;  // pinned
    Y[v] = f[v] * state.normal[v];
    if (mesh.is_contact[v]) {
      const Vec3& mu = state.conormal[v];
      Y[v] -= (state.normal[v].z() / mu.z()) * f[v] * mu;  // stays in the plane
    }
  }

  const double E0 = energy_total_at(mesh, mesh.vertices, aniso, config);
  auto second_diff = [&](double t) {
    std::vector<Vec3> plus(nv), minus(nv);
    for (int v = 0; v < nv; ++v) {
      plus[v] = mesh.vertices[v] + t * Y[v];
      minus[v] = mesh.vertices[v] - t * Y[v];
    }
    return (energy_total_at(mesh, plus, aniso, config) - 2.0 * E0 +
            energy_total_at(mesh, minus, aniso, config)) /
           (t * t);
  };

  // Richardson extrapolation in powers of t^2 over the halving ladder
  std::vector<double> row;
  for (double t : steps) row.push_back(second_diff(t));
  for (std::size_t j = 1; j < steps.size(); ++j) {
    const double w = std::pow(4.0, static_cast<double>(j));
    for (std::size_t i = row.size() - 1; i >= j; --i) row[i] = (w * row[i] - row[i - 1]) / (w - 1.0);
  }

  SecondVariationCheck chk;
  chk.fd_value = row.back();
  chk.quadratic_form = assemble(mesh, state, aniso, config).apply(f);
  chk.relative_discrepancy =
      std::abs(chk.fd_value - chk.quadratic_form) / std::max(std::abs(chk.quadratic_form), 1e-14);
  return chk;
}

}  // namespace anisocap
