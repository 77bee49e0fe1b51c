#pragma once

#include <array>
#include <iosfwd>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace fsi {

using Point = Eigen::Vector2d;

enum class BoundaryTag { left, right, bottom, top, interface };
enum class RegionTag { fluid, solid };

std::string_view to_string(BoundaryTag tag);
std::string_view to_string(RegionTag tag);
/// Throws InvalidArgument for an unknown name.
BoundaryTag boundary_tag_from_string(std::string_view name);

struct BoundaryEdge {
  std::array<int, 2> nodes;
  BoundaryTag tag;
};

/// Vertex-level triangulation of one rectangular subdomain. Triangles are
/// counterclockwise; every boundary edge carries exactly one tag.
struct TriangleMesh {
  std::vector<Point> nodes;
  std::vector<std::array<int, 3>> triangles;
  std::vector<BoundaryEdge> boundary_edges;
  RegionTag region = RegionTag::fluid;

  double signed_area(int triangle) const;
  /// Checks the structural invariants (positive areas, valid indices,
  /// conforming interior edges). Throws InvalidArgument on violation.
  void validate() const;
};

struct Range {
  double lo;
  double hi;
};

/// Uniform n-by-n grid of cells, each split along its bottom-left to
/// top-right diagonal. The side facing the other subdomain is tagged
/// `interface`: the top side for the fluid, the bottom side for the solid.
TriangleMesh build_structured_mesh(int n, Range x_range, Range y_range, RegionTag region);

/// Lagrange-multiplier grid on the horizontal interface line.
struct InterfaceGrid {
  double y = 1.0;
  std::vector<double> nodes;  // strictly increasing x coordinates
  int coarsening_factor = 1;

  int segment_count() const { return static_cast<int>(nodes.size()) - 1; }
  int node_count() const { return static_cast<int>(nodes.size()); }
  /// Index of the segment containing x (closed on the left, last segment
  /// closed on both sides).
  int locate(double x) const;
};

/// Builds the multiplier grid from every k-th interface node. The fluid and
/// solid interface node sets must coincide; otherwise MeshMismatch.
InterfaceGrid build_interface_grid(const TriangleMesh& fluid, const TriangleMesh& solid, int k);

/// Sorted x coordinates of the mesh nodes lying on `interface` edges.
std::vector<double> interface_node_coordinates(const TriangleMesh& mesh);

/// Debug dump: `node i x y`, `triangle i a b c`, `edge a b tag`, one record per line.
void write_mesh_text(const TriangleMesh& mesh, std::ostream& out);

}  // namespace fsi
