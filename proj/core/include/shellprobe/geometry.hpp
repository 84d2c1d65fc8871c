#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace shellprobe {

using Vec3 = Eigen::Vector3d;

/// Indexed triangle surface. Faces are counter-clockwise seen from outside.
struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;

  std::size_t num_vertices() const noexcept { return vertices.size(); }
  std::size_t num_faces() const noexcept { return faces.size(); }

  /// Throws IndexError if any face index is out of range or a face repeats a vertex.
  void validate() const;
};

struct TopologyReport {
  bool watertight = false;
  /// Directed edges (a, b) without a matching (b, a) partner, or used more than once.
  std::vector<std::pair<int, int>> boundary_edges;
};

/// Every edge must be shared by exactly two faces with opposite directions.
TopologyReport check_watertight(const TriMesh& mesh);

/// OBJ subset: `v x y z`, `f i j k [l ...]` (fan-triangulated), `#` comments.
/// Other records (vn, vt, o, g, usemtl, ...) are ignored; `f` tokens may carry
/// `/vt/vn` suffixes and negative (relative) indices.
TriMesh parse_obj(std::istream& in);
TriMesh load_mesh(const std::filesystem::path& path);
void write_obj(std::ostream& out, const TriMesh& mesh);
void write_obj(const std::filesystem::path& path, const TriMesh& mesh);

/// Subdivided icosahedron with vertices projected onto the sphere. Vertex 0
/// sits at center + radius * z and vertex 3 at center - radius * z.
TriMesh make_icosphere(int subdivisions, double radius, const Vec3& center = Vec3::Zero());
/// Axis-aligned box from `lo` to `hi`, 12 outward-facing triangles.
TriMesh make_box(const Vec3& lo, const Vec3& hi);

double face_area(const TriMesh& mesh, std::size_t face);
double surface_area(const TriMesh& mesh);
Vec3 vertex_centroid(const TriMesh& mesh);
double mean_edge_length(const TriMesh& mesh);

/// Vertex neighbourhood of a seed, used for local curvature estimation.
/// Holds a pointer to the mesh; the mesh must outlive the patch.
struct SurfacePatch {
  static constexpr std::size_t kMinVertices = 10;

  const TriMesh* mesh = nullptr;
  std::vector<int> vertex_ids;  // sorted ascending
  int seed = -1;
  double radius_hint = 0.0;
};

/// All vertices whose edge-length-weighted graph distance from `seed` is at
/// most `radius_hint` (Dijkstra over mesh edges).
SurfacePatch select_patch(const TriMesh& mesh, int seed, double radius_hint);

struct SphereFit {
  static constexpr double kNonUniformRatio = 0.05;

  double radius = 0.0;
  Vec3 center = Vec3::Zero();
  double rms_residual = 0.0;  // RMS of |x - c| - radius
  bool non_uniform = false;   // rms_residual / radius > kNonUniformRatio
};

/// Algebraic sphere fit followed by one Gauss-Newton pass on the geometric
/// distance. Throws DegenerateFitError for (near-)coplanar patches.
SphereFit fit_curvature(const SurfacePatch& patch);
SphereFit fit_sphere(const std::vector<Vec3>& points);

/// Divergence-theorem sum over faces, sum det(v0, v1, v2) / 6. No topology check.
double signed_volume(const TriMesh& mesh);

struct EnclosedVolume {
  double volume = 0.0;           // absolute value, m^3
  bool outward_oriented = true;  // sign of the signed sum was positive
};

/// Throws TopologyError (with the boundary edges) if the mesh is not watertight.
EnclosedVolume enclosed_volume(const TriMesh& mesh);

}  // namespace shellprobe
