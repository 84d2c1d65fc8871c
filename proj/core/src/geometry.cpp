#include "shellprobe/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <queue>
#include <sstream>
#include <string_view>

#include <Eigen/Dense>

#include "shellprobe/error.hpp"

namespace shellprobe {
namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

double to_double(std::string_view tok, std::size_t line_no) {
  double v = 0.0;
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    throw ParseError(line_no, "malformed coordinate '" + std::string(tok) + "'");
  }
  return v;
}

long to_index(std::string_view tok, std::size_t line_no) {
  tok = tok.substr(0, tok.find('/'));
  long v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(line_no, "malformed face index '" + std::string(tok) + "'");
  }
  return v;
}

using EdgeKey = std::pair<int, int>;

std::vector<std::vector<std::pair<int, double>>> edge_adjacency(const TriMesh& mesh) {
  std::vector<std::vector<std::pair<int, double>>> adj(mesh.num_vertices());
  std::map<EdgeKey, bool> seen;
  for (const auto& f : mesh.faces) {
    for (int k = 0; k < 3; ++k) {
      int a = f[k];
      int b = f[(k + 1) % 3];
      EdgeKey key{std::min(a, b), std::max(a, b)};
      if (seen.emplace(key, true).second) {
        const double len = (mesh.vertices[a] - mesh.vertices[b]).norm();
        adj[a].emplace_back(b, len);
        adj[b].emplace_back(a, len);
      }
    }
  }
  return adj;
}

}  // namespace

void TriMesh::validate() const {
  const auto n = static_cast<long>(vertices.size());
  for (std::size_t i = 0; i < faces.size(); ++i) {
    const auto& f = faces[i];
    for (int v : f) {
      if (v < 0 || v >= n) {
        throw IndexError("face " + std::to_string(i) + " references vertex " + std::to_string(v) + " (mesh has " +
                         std::to_string(n) + " vertices)");
      }
    }
    if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) {
      throw IndexError("face " + std::to_string(i) + " repeats a vertex");
    }
  }
}

TopologyReport check_watertight(const TriMesh& mesh) {
  std::map<EdgeKey, int> directed;
  for (const auto& f : mesh.faces) {
    for (int k = 0; k < 3; ++k) ++directed[{f[k], f[(k + 1) % 3]}];
  }
  TopologyReport report;
  for (const auto& [edge, count] : directed) {
    auto twin = directed.find({edge.second, edge.first});
    if (count != 1 || twin == directed.end() || twin->second != 1) {
      report.boundary_edges.push_back(edge);
    }
  }
  report.watertight = report.boundary_edges.empty() && !mesh.faces.empty();
  return report;
}

TriMesh parse_obj(std::istream& in) {
  TriMesh mesh;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto tokens = split_ws(raw);
    if (tokens.empty() || tokens[0].front() == '#') continue;
    if (tokens[0] == "v") {
      if (tokens.size() < 4) throw ParseError(line_no, "vertex needs three coordinates");
      mesh.vertices.emplace_back(to_double(tokens[1], line_no), to_double(tokens[2], line_no),
                                 to_double(tokens[3], line_no));
    } else if (tokens[0] == "f") {
      if (tokens.size() < 4) {
        throw ParseError(line_no, "face with fewer than three vertices cannot be triangulated");
      }
      std::vector<int> poly;
      for (std::size_t t = 1; t < tokens.size(); ++t) {
        long idx = to_index(tokens[t], line_no);
        if (idx == 0) throw IndexError("line " + std::to_string(line_no) + ": OBJ indices are 1-based, got 0");
        long resolved = idx > 0 ? idx - 1 : static_cast<long>(mesh.vertices.size()) + idx;
        if (resolved < 0) {
          throw IndexError("line " + std::to_string(line_no) + ": relative index " + std::to_string(idx) +
                           " out of range");
        }
        poly.push_back(static_cast<int>(resolved));
      }
      for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
        mesh.faces.push_back({poly[0], poly[k], poly[k + 1]});
      }
    }
  }
  mesh.validate();
  return mesh;
}

TriMesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mesh file '" + path.string() + "'");
  return parse_obj(in);
}

void write_obj(std::ostream& out, const TriMesh& mesh) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  for (const auto& v : mesh.vertices) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& f : mesh.faces) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
  out.precision(old_precision);
}

void write_obj(const std::filesystem::path& path, const TriMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write mesh file '" + path.string() + "'");
  write_obj(out, mesh);
}

TriMesh make_icosphere(int subdivisions, double radius, const Vec3& center) {
  if (subdivisions < 0) throw ValidationError("subdivisions must be non-negative");
  if (!(radius > 0.0)) throw ValidationError("icosphere radius must be positive");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, t, 0},  {1, t, 0},  {-1, -t, 0}, {1, -t, 0}, {0, -1, t},  {0, 1, t},
                         {0, -1, -t}, {0, 1, -t}, {t, 0, -1},  {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  // Vertex 0 on the +z pole, its antipode (vertex 3) on the -z pole.
  const Eigen::Quaterniond to_pole = Eigen::Quaterniond::FromTwoVectors(v[0], Vec3::UnitZ());
  for (auto& p : v) p = (to_pole * p).normalized();
  std::vector<std::array<int, 3>> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                       {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                       {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                       {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  for (int level = 0; level < subdivisions; ++level) {
    std::map<EdgeKey, int> midpoint;
    auto mid = [&](int a, int b) {
      EdgeKey key{std::min(a, b), std::max(a, b)};
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      const int id = static_cast<int>(v.size()) - 1;
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(f.size() * 4);
    for (const auto& tri : f) {
      const int a = mid(tri[0], tri[1]);
      const int b = mid(tri[1], tri[2]);
      const int c = mid(tri[2], tri[0]);
      next.push_back({tri[0], a, c});
      next.push_back({tri[1], b, a});
      next.push_back({tri[2], c, b});
      next.push_back({a, b, c});
    }
    f = std::move(next);
  }

  TriMesh mesh;
  mesh.vertices.reserve(v.size());
  for (const auto& p : v) mesh.vertices.push_back(center + radius * p);
  mesh.faces = std::move(f);
  return mesh;
}

TriMesh make_box(const Vec3& lo, const Vec3& hi) {
  if (!((hi.array() > lo.array()).all())) throw ValidationError("box needs hi > lo on every axis");
  TriMesh mesh;
  for (int i = 0; i < 8; ++i) {
    mesh.vertices.emplace_back((i & 1) ? hi.x() : lo.x(), (i & 2) ? hi.y() : lo.y(), (i & 4) ? hi.z() : lo.z());
  }
  // Two triangles per side, counter-clockwise from outside.
  mesh.faces = {{0, 2, 3}, {0, 3, 1}, {4, 5, 7}, {4, 7, 6}, {0, 1, 5}, {0, 5, 4},
                {2, 6, 7}, {2, 7, 3}, {0, 4, 6}, {0, 6, 2}, {1, 3, 7}, {1, 7, 5}};
  return mesh;
}

double face_area(const TriMesh& mesh, std::size_t face) {
  const auto& f = mesh.faces[face];
  const Vec3& a = mesh.vertices[f[0]];
  return 0.5 * (mesh.vertices[f[1]] - a).cross(mesh.vertices[f[2]] - a).norm();
}

double surface_area(const TriMesh& mesh) {
  double area = 0.0;
  for (std::size_t i = 0; i < mesh.num_faces(); ++i) area += face_area(mesh, i);
  return area;
}

Vec3 vertex_centroid(const TriMesh& mesh) {
  Vec3 c = Vec3::Zero();
  for (const auto& v : mesh.vertices) c += v;
  return mesh.vertices.empty() ? c : Vec3(c / static_cast<double>(mesh.vertices.size()));
}

double mean_edge_length(const TriMesh& mesh) {
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& f : mesh.faces) {
    for (int k = 0; k < 3; ++k) {
      total += (mesh.vertices[f[k]] - mesh.vertices[f[(k + 1) % 3]]).norm();
      ++count;
    }
  }
  return count ? total / static_cast<double>(count) : 0.0;
}

SurfacePatch select_patch(const TriMesh& mesh, int seed, double radius_hint) {
  if (seed < 0 || static_cast<std::size_t>(seed) >= mesh.num_vertices()) {
    throw IndexError("seed vertex " + std::to_string(seed) + " out of range");
  }
  if (!(radius_hint > 0.0)) throw ValidationError("patch radius must be positive");

  const auto adj = edge_adjacency(mesh);
  std::vector<double> dist(mesh.num_vertices(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[seed] = 0.0;
  queue.emplace(0.0, seed);
  while (!queue.empty()) {
    auto [d, v] = queue.top();
    queue.pop();
    if (d > dist[v]) continue;
    for (auto [w, len] : adj[v]) {
      const double nd = d + len;
      if (nd <= radius_hint && nd < dist[w]) {
        dist[w] = nd;
        queue.emplace(nd, w);
      }
    }
  }

  SurfacePatch patch;
  patch.mesh = &mesh;
  patch.seed = seed;
  patch.radius_hint = radius_hint;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist[i] <= radius_hint) patch.vertex_ids.push_back(static_cast<int>(i));
  }
  if (patch.vertex_ids.size() < SurfacePatch::kMinVertices) {
    throw InsufficientPatchError("patch around vertex " + std::to_string(seed) + " has " +
                                 std::to_string(patch.vertex_ids.size()) + " vertices; at least " +
                                 std::to_string(SurfacePatch::kMinVertices) + " are needed");
  }
  return patch;
}

SphereFit fit_sphere(const std::vector<Vec3>& points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  if (n < 4) throw DegenerateFitError("sphere fit needs at least 4 points");

  Vec3 mean = Vec3::Zero();
  Vec3 lo = points.front();
  Vec3 hi = points.front();
  for (const auto& p : points) {
    mean += p;
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  mean /= static_cast<double>(n);
  const double bbox = (hi - lo).norm();
  if (!(bbox > 0.0)) throw DegenerateFitError("all patch points coincide");

  // Work in centred, bbox-scaled coordinates for conditioning.
  Eigen::MatrixXd local(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) local.row(i) = (points[i] - mean).transpose() / bbox;

  Eigen::JacobiSVD<Eigen::MatrixXd> planarity(local);
  const double out_of_plane = planarity.singularValues()(2) / std::sqrt(static_cast<double>(n));
  if (out_of_plane < 1e-9) {
    throw DegenerateFitError("patch is coplanar within tolerance; curvature radius is unbounded");
  }

  // Algebraic fit: |x|^2 = 2 c.x + d, with d = R^2 - |c|^2.
  Eigen::MatrixXd A(n, 4);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Vector3d x = local.row(i).transpose();
    A.row(i) << 2.0 * x.transpose(), 1.0;
    b(i) = x.squaredNorm();
  }
  const Eigen::Vector4d sol = A.colPivHouseholderQr().solve(b);
  Eigen::Vector3d c = sol.head<3>();
  double r2 = sol(3) + c.squaredNorm();
  if (!(r2 > 0.0) || !std::isfinite(r2)) throw DegenerateFitError("algebraic sphere fit failed");
  double r = std::sqrt(r2);

  // One Gauss-Newton pass on r_i = |x_i - c| - R.
  Eigen::MatrixXd J(n, 4);
  Eigen::VectorXd res(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Vector3d d = local.row(i).transpose() - c;
    const double len = d.norm();
    if (len == 0.0) throw DegenerateFitError("patch point coincides with fitted centre");
    J.row(i) << -(d / len).transpose(), -1.0;
    res(i) = len - r;
  }
  const Eigen::Vector4d step = J.colPivHouseholderQr().solve(-res);
  c += step.head<3>();
  r += step(3);

  double sq = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double e = (local.row(i).transpose() - c).norm() - r;
    sq += e * e;
  }

  SphereFit fit;
  fit.radius = r * bbox;
  fit.center = mean + c * bbox;
  fit.rms_residual = std::sqrt(sq / static_cast<double>(n)) * bbox;
  fit.non_uniform = fit.rms_residual / fit.radius > SphereFit::kNonUniformRatio;
  return fit;
}

SphereFit fit_curvature(const SurfacePatch& patch) {
  if (patch.mesh == nullptr || patch.vertex_ids.empty()) {
    throw ValidationError("surface patch is empty");
  }
  if (std::find(patch.vertex_ids.begin(), patch.vertex_ids.end(), patch.seed) == patch.vertex_ids.end()) {
    throw ValidationError("surface patch does not contain its seed");
  }
  if (patch.vertex_ids.size() < SurfacePatch::kMinVertices) {
    throw InsufficientPatchError("surface patch has fewer than 10 vertices");
  }
  std::vector<Vec3> pts;
  pts.reserve(patch.vertex_ids.size());
  for (int id : patch.vertex_ids) pts.push_back(patch.mesh->vertices.at(id));
  return fit_sphere(pts);
}

double signed_volume(const TriMesh& mesh) {
  double six_v = 0.0;
  for (const auto& f : mesh.faces) {
    const Vec3& a = mesh.vertices[f[0]];
    const Vec3& b = mesh.vertices[f[1]];
    const Vec3& c = mesh.vertices[f[2]];
    six_v += a.dot(b.cross(c));
  }
  return six_v / 6.0;
}

EnclosedVolume enclosed_volume(const TriMesh& mesh) {
  auto topo = check_watertight(mesh);
  if (!topo.watertight) {
    std::ostringstream msg;
    msg << "mesh is not watertight: " << topo.boundary_edges.size() << " boundary edge(s)";
    const std::size_t shown = std::min<std::size_t>(topo.boundary_edges.size(), 8);
    for (std::size_t i = 0; i < shown; ++i) {
      msg << (i ? ", " : ": ") << '(' << topo.boundary_edges[i].first << ',' << topo.boundary_edges[i].second << ')';
    }
    if (shown < topo.boundary_edges.size()) msg << ", ...";
    throw TopologyError(msg.str(), std::move(topo.boundary_edges));
  }
  const double v = signed_volume(mesh);
  return {std::abs(v), v > 0.0};
}

}  // namespace shellprobe
