#pragma once

#include "anisocap/patch.hpp"

namespace anisocap {

/// Unit normal (in the x-z plane) of a plane satisfying the capillary
/// condition <Phi(nu), -E3> = omega0, found by bisection.
Vec3 capillary_plane_normal(const Anisotropy& aniso, double omega0);

/// Flat half-disk of the capillary plane through the y-axis: contact
/// boundary along the diameter, truncation boundary along the arc. `rings`
/// concentric rings of radius step radius/rings.
CapillaryMesh build_flat_capillary_patch(const Anisotropy& aniso, const HalfSpaceConfig& config,
                                         double radius, int rings);

/// Flat half-plane sample with prescribed ring radii (strictly increasing,
/// positive). Angular resolution per ring keeps edge length <= max_edge, so
/// probe radii can be chosen ring-aligned for exact annulus quadrature.
CapillaryMesh build_half_plane_sample(const Anisotropy& aniso, const HalfSpaceConfig& config,
                                      const std::vector<double>& ring_radii, double max_edge);

/// Interior vertices displaced along their normals by a smoothed random
/// field of relative amplitude `rel_amplitude` (fraction of the bounding-box
/// diameter). Boundary vertices stay fixed. Deterministic for fixed seed.
CapillaryMesh perturb_normals(const CapillaryMesh& mesh, double rel_amplitude, unsigned seed,
                              int smooth_iters = 10);

/// Rotational chart of the unit-sphere cap centered at (0, 0, omega0).
ParametricPatch sphere_cap_patch(double omega0);

/// Radial chart over the truncated Wulff shape. With bump_amp = 0 this is
/// the exact Wulff cap; otherwise the radius is scaled by
/// 1 + bump_amp * eta(s) * cos(bump_mode * phi) with eta vanishing to
/// second order at the contact line, so the capillary condition is
/// preserved there.
ParametricPatch wulff_cap_patch(const Anisotropy& aniso, const HalfSpaceConfig& config,
                                double bump_amp = 0.0, int bump_mode = 0);

/// Graph chart (u, v) -> (u, v, g(u, v)) over a centered square of the given
/// half-width (no contact row).
ParametricPatch graph_patch(std::function<double(double, double)> g, double halfwidth);

/// Flat rectangular strip of the capillary plane with the contact row at
/// u = u1 (the y-axis).
ParametricPatch flat_capillary_patch(const Anisotropy& aniso, const HalfSpaceConfig& config,
                                     double radius);

}  // namespace anisocap
