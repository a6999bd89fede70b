#include "anisocap/generators.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <random>

namespace anisocap {

namespace {

constexpr double kPi = std::numbers::pi;

Vec3 sphere_dir(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

/// Zips two open vertex chains (shared parameter range) into a triangle
/// strip, advancing whichever chain lags in normalized arc position.
void stitch_chains(std::vector<std::array<int, 3>>& tris, const std::vector<int>& a,
                   const std::vector<int>& b) {
  const int na = static_cast<int>(a.size()) - 1;
  const int nb = static_cast<int>(b.size()) - 1;
  int i0 = 0, i1 = 0;
  while (i0 < na || i1 < nb) {
    const bool advance_b =
        i1 < nb && (i0 >= na || static_cast<long>(i1) * na <= static_cast<long>(i0) * nb);
    if (advance_b) {
      tris.push_back({a[i0], b[i1], b[i1 + 1]});
      ++i1;
    } else {
      tris.push_back({a[i0], b[i1], a[i0 + 1]});
      ++i0;
    }
  }
}

struct PlaneFrame {
  Vec3 nu;  // unit plane normal, in the x-z plane
  Vec3 e1;  // in-plane, positive z-component
  Vec3 e2;  // along the contact line (y-axis)
};

PlaneFrame capillary_frame(const Anisotropy& aniso, double omega0) {
  PlaneFrame f;
  f.nu = capillary_plane_normal(aniso, omega0);
  f.e2 = Vec3::UnitY();
  f.e1 = f.nu.cross(f.e2);  // (-cos a, 0, sin a): positive z for a in (0, pi)
  return f;
}

CapillaryMesh build_half_disk(const PlaneFrame& frame, const std::vector<double>& radii,
                              const std::vector<int>& segments) {
  CapillaryMesh mesh;
  mesh.vertices.push_back(Vec3::Zero());
  std::vector<std::vector<int>> chains;
  chains.push_back({0});
  for (std::size_t j = 0; j < radii.size(); ++j) {
    std::vector<int> chain;
    for (int k = 0; k <= segments[j]; ++k) {
      const double beta = kPi * k / segments[j];
      const Vec3 p = radii[j] * (std::cos(beta) * frame.e2 + std::sin(beta) * frame.e1);
      chain.push_back(static_cast<int>(mesh.vertices.size()));
      mesh.vertices.push_back(p);
    }
    chains.push_back(std::move(chain));
  }
  for (std::size_t j = 0; j + 1 < chains.size(); ++j)
    stitch_chains(mesh.triangles, chains[j], chains[j + 1]);

  // orient so face normals agree with the plane normal
  const auto& t = mesh.triangles.front();
  const Vec3 n = (mesh.vertices[t[1]] - mesh.vertices[t[0]])
                     .cross(mesh.vertices[t[2]] - mesh.vertices[t[0]]);
  if (n.dot(frame.nu) < 0.0)
    for (auto& tri : mesh.triangles) std::swap(tri[1], tri[2]);
  mesh.finalize(1e-10 * radii.back());
  return mesh;
}

}  // namespace

Vec3 capillary_plane_normal(const Anisotropy& aniso, double omega0) {
  auto val = [&](double alpha) {
    return -aniso.wulff_point(Vec3(std::sin(alpha), 0.0, std::cos(alpha))).z() - omega0;
  };
  double lo = 0.0, hi = kPi;  // val(0) = -F(E3) - w0 < 0 < F(-E3) - w0 = val(pi)
  if (!(val(lo) < 0.0 && val(hi) > 0.0))
    throw AdmissibilityError("no capillary plane for this contact parameter");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (val(mid) < 0.0 ? lo : hi) = mid;
  }
  const double alpha = 0.5 * (lo + hi);
  return {std::sin(alpha), 0.0, std::cos(alpha)};
}

CapillaryMesh build_flat_capillary_patch(const Anisotropy& aniso, const HalfSpaceConfig& config,
                                         double radius, int rings) {
  if (rings < 2) throw std::invalid_argument("rings must be >= 2");
  const PlaneFrame frame = capillary_frame(aniso, config.omega0);
  std::vector<double> radii;
  std::vector<int> segments;
  for (int j = 1; j <= rings; ++j) {
    radii.push_back(radius * j / rings);
    segments.push_back(3 * j);
  }
  return build_half_disk(frame, radii, segments);
}

CapillaryMesh build_half_plane_sample(const Anisotropy& aniso, const HalfSpaceConfig& config,
                                      const std::vector<double>& ring_radii, double max_edge) {
  if (ring_radii.empty()) throw std::invalid_argument("need at least one ring radius");
  for (std::size_t j = 0; j < ring_radii.size(); ++j)
    if (ring_radii[j] <= (j ? ring_radii[j - 1] : 0.0))
      throw std::invalid_argument("ring radii must be positive and strictly increasing");
  const PlaneFrame frame = capillary_frame(aniso, config.omega0);
  std::vector<int> segments;
  for (double r : ring_radii)
    segments.push_back(std::max(6, static_cast<int>(std::ceil(kPi * r / max_edge))));
  return build_half_disk(frame, ring_radii, segments);
}

CapillaryMesh perturb_normals(const CapillaryMesh& mesh, double rel_amplitude, unsigned seed,
                              int smooth_iters) {
  const int nv = mesh.vertex_count();
  std::vector<std::vector<int>> nbrs(nv);
  std::vector<Vec3> normal(nv, Vec3::Zero());
  for (const auto& t : mesh.triangles) {
    const Vec3 n = (mesh.vertices[t[1]] - mesh.vertices[t[0]])
                       .cross(mesh.vertices[t[2]] - mesh.vertices[t[0]]);
    for (int k = 0; k < 3; ++k) {
      normal[t[k]] += n;
      nbrs[t[k]].push_back(t[(k + 1) % 3]);
      nbrs[t[k]].push_back(t[(k + 2) % 3]);
    }
  }

  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<double> field(nv, 0.0);
  for (int v = 0; v < nv; ++v) field[v] = mesh.is_boundary[v] ? 0.0 : uni(rng);
  for (int it = 0; it < smooth_iters; ++it) {
    std::vector<double> next(nv, 0.0);
    for (int v = 0; v < nv; ++v) {
      if (mesh.is_boundary[v]) continue;
      double acc = 0.0;
      for (int w : nbrs[v]) acc += field[w];
      next[v] = 0.5 * field[v] + 0.5 * acc / static_cast<double>(nbrs[v].size());
    }
    field.swap(next);
  }
  double peak = 0.0;
  for (double f : field) peak = std::max(peak, std::abs(f));
  if (peak == 0.0) peak = 1.0;

  CapillaryMesh out = mesh;
  const double diam = mesh.bbox_diameter();
  const double amp = rel_amplitude * diam / peak;
  for (int v = 0; v < nv; ++v) {
    if (mesh.is_boundary[v]) continue;
    out.vertices[v] += amp * field[v] * normal[v].normalized();
    out.vertices[v].z() = std::max(out.vertices[v].z(), 1e-4 * diam);
  }
  out.reference_normals.clear();
  out.finalize(1e-12 * diam);
  return out;
}

ParametricPatch sphere_cap_patch(double omega0) {
  if (!(omega0 > -1.0 && omega0 < 1.0))
    throw AdmissibilityError("omega0 must lie in (-1, 1) for the unit sphere");
  const double theta_max = std::acos(-omega0);
  ParametricPatch p;
  p.chart = [omega0, theta_max](double s, double phi) {
    return Vec3(Vec3(0, 0, omega0) + sphere_dir(s * theta_max, phi));
  };
  p.u0 = 0.05;
  p.u1 = 1.0;
  p.contact_at_u1 = true;
  p.margin = 0.08;
  return p;
}

ParametricPatch wulff_cap_patch(const Anisotropy& aniso, const HalfSpaceConfig& config,
                                double bump_amp, int bump_mode) {
  // Fourier interpolant of the cut angle theta_cut(phi): smooth and periodic,
  // so high-order stencils across the contact line stay consistent.
  const int N = 512, modes = 160;
  std::vector<double> samples(N);
  for (int i = 0; i < N; ++i) {
    const double phi = 2.0 * kPi * i / N;
    auto height = [&](double th) {
      return aniso.wulff_point(sphere_dir(th, phi)).z() + config.omega0;
    };
    double lo = 0.0, hi = kPi;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (height(mid) > 0.0 ? lo : hi) = mid;
    }
    samples[i] = 0.5 * (lo + hi);
  }
  auto coeffs = std::make_shared<std::vector<std::pair<double, double>>>(modes + 1);
  for (int k = 0; k <= modes; ++k) {
    double a = 0.0, b = 0.0;
    for (int i = 0; i < N; ++i) {
      const double phi = 2.0 * kPi * i / N;
      a += samples[i] * std::cos(k * phi);
      b += samples[i] * std::sin(k * phi);
    }
    (*coeffs)[k] = {2.0 * a / N, 2.0 * b / N};
  }
  const Anisotropy an = aniso;
  const double w0 = config.omega0;
  ParametricPatch p;
  p.chart = [an, w0, coeffs, bump_amp, bump_mode](double s, double phi) {
    double theta_cut = 0.5 * (*coeffs)[0].first;
    for (std::size_t k = 1; k < coeffs->size(); ++k)
      theta_cut += (*coeffs)[k].first * std::cos(k * phi) + (*coeffs)[k].second * std::sin(k * phi);
    const Vec3 z = sphere_dir(s * theta_cut, phi);
    double rho = 1.0;
    if (bump_amp != 0.0) {
      const double eta = 64.0 * std::pow(s * (1.0 - s), 3);
      rho += bump_amp * eta * (bump_mode == 0 ? 1.0 : std::cos(bump_mode * phi));
    }
    return Vec3(Vec3(0, 0, w0) + rho * an.wulff_point(z));
  };
  p.u0 = 0.05;
  p.u1 = 1.0;
  p.contact_at_u1 = true;
  p.margin = 0.08;
  return p;
}

ParametricPatch graph_patch(std::function<double(double, double)> g, double halfwidth) {
  ParametricPatch p;
  p.chart = [g = std::move(g)](double u, double v) { return Vec3(u, v, g(u, v)); };
  p.u0 = -halfwidth;
  p.u1 = halfwidth;
  p.v0 = -halfwidth;
  p.v1 = halfwidth;
  p.periodic_v = false;
  p.contact_at_u1 = false;
  p.margin = 0.2;
  return p;
}

ParametricPatch flat_capillary_patch(const Anisotropy& aniso, const HalfSpaceConfig& config,
                                     double radius) {
  const PlaneFrame frame = capillary_frame(aniso, config.omega0);
  ParametricPatch p;
  const Vec3 e1 = frame.e1, e2 = frame.e2;
  p.chart = [e1, e2, radius](double u, double v) {
    return Vec3(radius * (1.0 - u) * e1 + v * e2);
  };
  p.u0 = 0.0;
  p.u1 = 1.0;
  p.v0 = -radius;
  p.v1 = radius;
  p.periodic_v = false;
  p.contact_at_u1 = true;
  p.margin = 0.2;
  return p;
}

}  // namespace anisocap
