#include "anisocap/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace anisocap {

namespace {

using Edge = std::pair<int, int>;

}  // namespace

void CapillaryMesh::finalize(double snap_tol) {
  const int nv = vertex_count();
  is_boundary.assign(nv, false);
  boundary_loops.clear();

  // Directed edge census. A consistently oriented manifold-with-boundary
  // has each undirected edge covered once or twice with opposite directions.
  std::map<Edge, int> directed;
  for (const auto& t : triangles) {
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      if (a == b) throw MeshError("degenerate triangle with repeated vertex");
      if (++directed[{a, b}] > 1) throw MeshError("non-manifold or inconsistently oriented edge");
    }
  }
  // Boundary edges are those without an opposite partner. A boundary vertex
  // has exactly one outgoing boundary edge, so loops can be walked.
  std::map<int, int> next_on_boundary;
  for (const auto& [e, cnt] : directed) {
    (void)cnt;
    if (!directed.count({e.second, e.first})) {
      if (next_on_boundary.count(e.first))
        throw MeshError("boundary is not a disjoint union of simple cycles");
      next_on_boundary[e.first] = e.second;
      is_boundary[e.first] = true;
      is_boundary[e.second] = true;
    }
  }
  std::vector<bool> visited(nv, false);
  for (const auto& [start, nxt] : next_on_boundary) {
    (void)nxt;
    if (visited[start]) continue;
    std::vector<int> loop;
    int v = start;
    do {
      loop.push_back(v);
      visited[v] = true;
      auto it = next_on_boundary.find(v);
      if (it == next_on_boundary.end()) throw MeshError("open boundary chain");
      v = it->second;
    } while (v != start);
    boundary_loops.push_back(std::move(loop));
  }

  is_contact.assign(nv, false);
  const double tol = std::max(snap_tol, 1e-9 * bbox_diameter());
  for (int i = 0; i < nv; ++i) {
    if (!is_boundary[i]) continue;
    if (std::abs(vertices[i].z()) <= tol) {
      vertices[i].z() = 0.0;
      is_contact[i] = true;
    } else if (vertices[i].z() < 0.0) {
      throw MeshError("boundary vertex below the plane x3 = 0");
    }
  }
  validate();
}

void CapillaryMesh::validate() const {
  const int nv = vertex_count();
  if (static_cast<int>(is_boundary.size()) != nv)
    throw MeshError("mesh not finalized: call finalize() first");
  std::vector<bool> used(nv, false);
  for (const auto& t : triangles)
    for (int k = 0; k < 3; ++k) {
      if (t[k] < 0 || t[k] >= nv) throw MeshError("triangle index out of range");
      used[t[k]] = true;
    }
  // Closed meshes (no boundary) are allowed as sanity inputs and are exempt
  // from the half-space position constraints.
  const bool has_boundary = !boundary_loops.empty();
  for (int i = 0; i < nv; ++i) {
    if (!used[i]) throw MeshError("isolated vertex " + std::to_string(i));
    if (!has_boundary) continue;
    if (is_boundary[i]) {
      if (is_contact[i]) {
        if (vertices[i].z() != 0.0) throw MeshError("contact vertex off the plane");
      } else if (vertices[i].z() < 0.0) {
        throw MeshError("truncation-boundary vertex below the plane");
      }
    } else if (!(vertices[i].z() > 0.0)) {
      throw MeshError("interior vertex not strictly above the plane");
    }
  }
  const double d2 = bbox_diameter() * bbox_diameter();
  for (const auto& t : triangles) {
    const Vec3 a = vertices[t[0]], b = vertices[t[1]], c = vertices[t[2]];
    if (0.5 * ((b - a).cross(c - a)).norm() < 1e-14 * d2)
      throw MeshError("degenerate triangle (area below threshold)");
  }
}

double CapillaryMesh::bbox_diameter() const {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (const auto& v : vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  return (hi - lo).norm();
}

double enclosed_volume(const CapillaryMesh& mesh) {
  std::vector<double> contrib(mesh.triangles.size());
  for (std::size_t f = 0; f < mesh.triangles.size(); ++f) {
    const auto& t = mesh.triangles[f];
    contrib[f] = mesh.vertices[t[0]].dot(mesh.vertices[t[1]].cross(mesh.vertices[t[2]])) / 6.0;
  }
  return pairwise_sum(contrib);
}

double wetted_area(const CapillaryMesh& mesh) {
  std::vector<double> contrib;
  for (const auto& loop : mesh.boundary_loops) {
    const std::size_t n = loop.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3& a = mesh.vertices[loop[i]];
      const Vec3& b = mesh.vertices[loop[(i + 1) % n]];
      contrib.push_back(0.5 * (a.x() * b.y() - a.y() * b.x()));
    }
  }
  return pairwise_sum(contrib);
}

CapillaryMesh refine_uniform(const CapillaryMesh& mesh) {
  CapillaryMesh out;
  out.vertices = mesh.vertices;
  std::map<Edge, int> midpoint;
  auto mid = [&](int a, int b) {
    const Edge key{std::min(a, b), std::max(a, b)};
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const int idx = static_cast<int>(out.vertices.size());
    Vec3 m = 0.5 * (mesh.vertices[a] + mesh.vertices[b]);
    if (mesh.is_contact[a] && mesh.is_contact[b]) m.z() = 0.0;
    out.vertices.push_back(m);
    midpoint[key] = idx;
    return idx;
  };
  for (const auto& t : mesh.triangles) {
    const int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
    out.triangles.push_back({t[0], ab, ca});
    out.triangles.push_back({ab, t[1], bc});
    out.triangles.push_back({bc, t[2], ca});
    out.triangles.push_back({ab, bc, ca});
  }
  out.finalize();
  return out;
}

CapillaryMesh read_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file: " + path);
  CapillaryMesh mesh;
  const std::string ext = std::filesystem::path(path).extension().string();
  if (ext == ".obj") {
    std::string line;
    while (std::getline(in, line)) {
      std::istringstream ls(line);
      std::string tag;
      ls >> tag;
      if (tag == "v") {
        Vec3 p;
        ls >> p.x() >> p.y() >> p.z();
        mesh.vertices.push_back(p);
      } else if (tag == "f") {
        std::array<int, 3> t;
        for (int k = 0; k < 3; ++k) {
          std::string tok;
          ls >> tok;
          t[k] = std::stoi(tok.substr(0, tok.find('/'))) - 1;
        }
        mesh.triangles.push_back(t);
      }
    }
  } else {
    std::string header;
    in >> header;
    if (header != "OFF") throw MeshError("expected OFF header in " + path);
    int nv = 0, nf = 0, ne = 0;
    in >> nv >> nf >> ne;
    mesh.vertices.resize(nv);
    for (auto& p : mesh.vertices) in >> p.x() >> p.y() >> p.z();
    mesh.triangles.resize(nf);
    for (auto& t : mesh.triangles) {
      int deg = 0;
      in >> deg;
      if (deg != 3) throw MeshError("only triangle faces are supported");
      in >> t[0] >> t[1] >> t[2];
    }
    if (!in) throw MeshError("truncated OFF file: " + path);
  }
  mesh.finalize();
  return mesh;
}

void write_mesh(const CapillaryMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw MeshError("cannot write mesh file: " + path);
  out.precision(17);
  const std::string ext = std::filesystem::path(path).extension().string();
  if (ext == ".obj") {
    for (const auto& p : mesh.vertices)
      out << "v " << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
    for (const auto& t : mesh.triangles)
      out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  } else {
    out << "OFF\n" << mesh.vertex_count() << ' ' << mesh.face_count() << " 0\n";
    for (const auto& p : mesh.vertices)
      out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
    for (const auto& t : mesh.triangles)
      out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  }
}

}  // namespace anisocap
