#include "fsi/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <string>

#include "fsi/error.hpp"

namespace fsi {

std::string_view to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::left: return "left";
    case BoundaryTag::right: return "right";
    case BoundaryTag::bottom: return "bottom";
    case BoundaryTag::top: return "top";
    case BoundaryTag::interface: return "interface";
  }
  return "?";
}

std::string_view to_string(RegionTag tag) {
  return tag == RegionTag::fluid ? "fluid" : "solid";
}

BoundaryTag boundary_tag_from_string(std::string_view name) {
  for (auto tag : {BoundaryTag::left, BoundaryTag::right, BoundaryTag::bottom, BoundaryTag::top,
                   BoundaryTag::interface}) {
    if (to_string(tag) == name) return tag;
  }
  throw InvalidArgument("unknown boundary tag '" + std::string(name) + "'");
}

double TriangleMesh::signed_area(int triangle) const {
  const auto& t = triangles[triangle];
  const Point e1 = nodes[t[1]] - nodes[t[0]];
  const Point e2 = nodes[t[2]] - nodes[t[0]];
  return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
}

void TriangleMesh::validate() const {
  const int n_nodes = static_cast<int>(nodes.size());
  std::map<std::pair<int, int>, int> edge_use;
  for (int t = 0; t < static_cast<int>(triangles.size()); ++t) {
    for (int v : triangles[t]) {
      if (v < 0 || v >= n_nodes) throw InvalidArgument("triangle references a missing node");
    }
    if (!(signed_area(t) > 0.0)) {
      throw InvalidArgument("triangle " + std::to_string(t) + " has non-positive area");
    }
    for (int e = 0; e < 3; ++e) {
      const int a = triangles[t][e];
      const int b = triangles[t][(e + 1) % 3];
      // Each directed edge may appear once; a shared edge appears once per direction.
      if (++edge_use[{a, b}] > 1) throw InvalidArgument("non-conforming edge in triangulation");
    }
  }
  for (const auto& [edge, count] : edge_use) {
    const bool shared = edge_use.count({edge.second, edge.first}) > 0;
    if (!shared) {
      const bool tagged = std::any_of(boundary_edges.begin(), boundary_edges.end(), [&](const BoundaryEdge& b) {
        return (b.nodes[0] == edge.first && b.nodes[1] == edge.second) ||
               (b.nodes[0] == edge.second && b.nodes[1] == edge.first);
      });
      if (!tagged) throw InvalidArgument("boundary edge without a tag");
    }
  }
}

TriangleMesh build_structured_mesh(int n, Range x_range, Range y_range, RegionTag region) {
  if (n < 1) throw InvalidArgument("mesh needs at least one subdivision per side");
  if (!(x_range.hi > x_range.lo) || !(y_range.hi > y_range.lo)) {
    throw InvalidArgument("degenerate mesh range");
  }
  TriangleMesh mesh;
  mesh.region = region;
  const int stride = n + 1;
  mesh.nodes.reserve(static_cast<std::size_t>(stride) * stride);
  for (int j = 0; j <= n; ++j) {
    // Pin the last coordinate to the range end so shared interfaces match bitwise.
    const double y = j == n ? y_range.hi : y_range.lo + (y_range.hi - y_range.lo) * j / n;
    for (int i = 0; i <= n; ++i) {
      const double x = i == n ? x_range.hi : x_range.lo + (x_range.hi - x_range.lo) * i / n;
      mesh.nodes.emplace_back(x, y);
    }
  }
  auto id = [stride](int i, int j) { return j * stride + i; };
  mesh.triangles.reserve(2 * static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      mesh.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      mesh.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  const BoundaryTag bottom = region == RegionTag::solid ? BoundaryTag::interface : BoundaryTag::bottom;
  const BoundaryTag top = region == RegionTag::fluid ? BoundaryTag::interface : BoundaryTag::top;
  for (int i = 0; i < n; ++i) {
    mesh.boundary_edges.push_back({{id(i, 0), id(i + 1, 0)}, bottom});
    mesh.boundary_edges.push_back({{id(i + 1, n), id(i, n)}, top});
  }
  for (int j = 0; j < n; ++j) {
    mesh.boundary_edges.push_back({{id(n, j), id(n, j + 1)}, BoundaryTag::right});
    mesh.boundary_edges.push_back({{id(0, j + 1), id(0, j)}, BoundaryTag::left});
  }
  return mesh;
}

int InterfaceGrid::locate(double x) const {
  const auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
  const int idx = static_cast<int>(it - nodes.begin()) - 1;
  return std::clamp(idx, 0, segment_count() - 1);
}

std::vector<double> interface_node_coordinates(const TriangleMesh& mesh) {
  std::vector<int> ids;
  for (const auto& e : mesh.boundary_edges) {
    if (e.tag == BoundaryTag::interface) ids.insert(ids.end(), e.nodes.begin(), e.nodes.end());
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::vector<double> xs;
  xs.reserve(ids.size());
  for (int id : ids) xs.push_back(mesh.nodes[id].x());
  std::sort(xs.begin(), xs.end());
  return xs;
}

namespace {

double interface_level(const TriangleMesh& mesh) {
  for (const auto& e : mesh.boundary_edges) {
    if (e.tag == BoundaryTag::interface) return mesh.nodes[e.nodes[0]].y();
  }
  throw MeshMismatch(std::string(to_string(mesh.region)) + " mesh has no interface edges");
}

}  // namespace

InterfaceGrid build_interface_grid(const TriangleMesh& fluid, const TriangleMesh& solid, int k) {
  if (k < 1) throw InvalidArgument("coarsening factor must be positive");
  const auto xf = interface_node_coordinates(fluid);
  const auto xs = interface_node_coordinates(solid);
  const double yf = interface_level(fluid);
  const double ys = interface_level(solid);
  constexpr double tol = 1e-12;
  if (std::abs(yf - ys) > tol) throw MeshMismatch("fluid and solid interfaces lie on different lines");
  if (xf.size() != xs.size()) {
    throw MeshMismatch("fluid and solid interface node counts differ (" + std::to_string(xf.size()) + " vs " +
                       std::to_string(xs.size()) + ")");
  }
  for (std::size_t i = 0; i < xf.size(); ++i) {
    if (std::abs(xf[i] - xs[i]) > tol) throw MeshMismatch("fluid and solid interface nodes do not coincide");
  }
  const int segments = static_cast<int>(xf.size()) - 1;
  if (segments % k != 0) {
    throw InvalidArgument("coarsening factor " + std::to_string(k) + " does not divide " +
                          std::to_string(segments) + " interface segments");
  }
  InterfaceGrid grid;
  grid.y = yf;
  grid.coarsening_factor = k;
  for (int i = 0; i <= segments; i += k) grid.nodes.push_back(xf[i]);
  return grid;
}

void write_mesh_text(const TriangleMesh& mesh, std::ostream& out) {
  out.precision(17);
  out << "region " << to_string(mesh.region) << '\n';
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
    out << "node " << i << ' ' << mesh.nodes[i].x() << ' ' << mesh.nodes[i].y() << '\n';
  }
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    const auto& t = mesh.triangles[i];
    out << "triangle " << i << ' ' << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  }
  for (const auto& e : mesh.boundary_edges) {
    out << "edge " << e.nodes[0] << ' ' << e.nodes[1] << ' ' << to_string(e.tag) << '\n';
  }
}

}  // namespace fsi
