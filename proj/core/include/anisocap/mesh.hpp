#pragma once

#include "anisocap/numeric.hpp"

#include <array>
#include <string>
#include <vector>

namespace anisocap {

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Oriented triangle mesh immersed in 3-space with its boundary pinned to
/// the plane {x3 = 0}. Interior vertices have x3 > 0, boundary vertices
/// x3 = 0 exactly. Boundary loops are stored counterclockwise as seen from
/// +E3 so the signed planar area they enclose is positive for caps.
///
/// Compact samples of unbounded surfaces are supported: boundary vertices
/// with x3 > 0 are classified as truncation boundary (is_contact false).
/// They are treated as pinned by every variational operation, and only
/// contact vertices carry conormal/contact-line data.
struct CapillaryMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::vector<int>> boundary_loops;
  std::vector<bool> is_boundary;
  std::vector<bool> is_contact;

  /// Exact unit normals from the generator, when the mesh was produced by
  /// an analytic construction (empty otherwise).
  std::vector<Vec3> reference_normals;

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int face_count() const { return static_cast<int>(triangles.size()); }

  /// Recomputes boundary flags and loops from connectivity, snapping
  /// vertices with |x3| <= tol onto the plane. Throws MeshError when the
  /// mesh is not an oriented manifold with plane-pinned boundary.
  void finalize(double snap_tol = 1e-12);

  /// Checks the structural invariants without mutating anything.
  void validate() const;

  double bbox_diameter() const;
};

/// V = (1/3) * integral of <x, nu> over the surface; the planar lid closes
/// the region and contributes nothing.
double enclosed_volume(const CapillaryMesh& mesh);

/// Signed planar area enclosed by the boundary loops (the wetted region).
double wetted_area(const CapillaryMesh& mesh);

/// One level of uniform 1:4 refinement. New midpoint vertices on boundary
/// edges stay on the plane; when `reference_normals` are present and a
/// sphere-parameter projector is desired, callers should rebuild from the
/// generator instead.
CapillaryMesh refine_uniform(const CapillaryMesh& mesh);

// ASCII OFF / OBJ import and export (positions and triangles only).
CapillaryMesh read_mesh(const std::string& path);
void write_mesh(const CapillaryMesh& mesh, const std::string& path);

}  // namespace anisocap
