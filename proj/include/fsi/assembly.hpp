#pragma once

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "fsi/elements.hpp"
#include "fsi/mesh.hpp"
#include "fsi/sparse_linalg.hpp"

namespace fsi {

using Vec2 = Eigen::Vector2d;
/// Spatial vector field evaluated at (point, time).
using VectorField = std::function<Vec2(const Point&, double)>;
/// Boundary data evaluated at (point, outward unit normal, time).
using TractionField = std::function<Vec2(const Point&, const Vec2&, double)>;
using ScalarField = std::function<double(const Point&, double)>;

/// Continuous Lagrange P1 or P2 nodes on a triangle mesh. For P2 the
/// vertices keep their mesh numbering and edge midpoints follow.
class LagrangeSpace {
 public:
  struct Edge {
    std::array<int, 3> nodes;  // endpoints, then the midpoint (-1 for P1)
    BoundaryTag tag;
    Vec2 normal;  // outward unit normal
    double length;
  };

  LagrangeSpace(std::shared_ptr<const TriangleMesh> mesh, int degree);

  int degree() const { return degree_; }
  int nodes_per_cell() const { return degree_ == 1 ? 3 : 6; }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  int cell_count() const { return static_cast<int>(mesh_->triangles.size()); }
  const TriangleMesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const TriangleMesh>& mesh_ptr() const { return mesh_; }
  const std::vector<Point>& nodes() const { return nodes_; }
  std::span<const int> cell(int c) const {
    return {cells_.data() + static_cast<std::size_t>(c) * nodes_per_cell(), static_cast<std::size_t>(nodes_per_cell())};
  }
  std::array<Point, 3> vertices(int c) const;
  const std::vector<Edge>& boundary_edges() const { return edges_; }
  bool has_tag(BoundaryTag tag) const;
  /// Sorted, unique nodes lying on edges carrying any of `tags`.
  std::vector<int> boundary_nodes(std::span<const BoundaryTag> tags) const;

 private:
  std::shared_ptr<const TriangleMesh> mesh_;
  int degree_;
  std::vector<Point> nodes_;
  std::vector<int> cells_;
  std::vector<Edge> edges_;
};

/// Vector-valued dofs are component-blocked: dof(node, c) = c * node_count + node.
inline int vector_dof(const LagrangeSpace& space, int node, int component) {
  return component * space.node_count() + node;
}

struct PhysicalConstants {
  double rho_f = 1.0;
  double rho_s = 1.0;
  double nu_f = 1.0;
  double nu_s = 1.0;
  double lambda = 1.0;
};

/// Which non-interface sides carry Neumann data; all remaining
/// non-interface sides are Dirichlet.
struct BoundaryLayout {
  std::vector<BoundaryTag> fluid_neumann{BoundaryTag::left, BoundaryTag::right};
  std::vector<BoundaryTag> solid_neumann{};

  std::vector<BoundaryTag> fluid_dirichlet() const;
  std::vector<BoundaryTag> solid_dirichlet() const;
};

/// Per-field numbering. Each field owns its own contiguous index range
/// starting at zero.
struct DofMap {
  LagrangeSpace velocity;      // P2 on the fluid mesh, 2 components
  LagrangeSpace pressure;      // P1 on the fluid mesh
  LagrangeSpace displacement;  // P2 on the solid mesh, 2 components
  InterfaceGrid multiplier;    // P1 per component
  BoundaryLayout layout;
  std::vector<int> velocity_dirichlet;      // sorted; never on the interface
  std::vector<int> displacement_dirichlet;  // sorted

  int n_u() const { return 2 * velocity.node_count(); }
  int n_p() const { return pressure.node_count(); }
  int n_eta() const { return 2 * displacement.node_count(); }
  int n_gamma() const { return 2 * multiplier.node_count(); }
};

DofMap build_dof_map(std::shared_ptr<const TriangleMesh> fluid, std::shared_ptr<const TriangleMesh> solid,
                     const InterfaceGrid& grid, BoundaryLayout layout = {});

struct BlockOperatorSet {
  DofMap dofs;
  PhysicalConstants constants;
  SparseMatrix mass_f, stiffness_f;  // M_f, K_f
  SparseMatrix pressure;             // P, N_u x N_p
  SparseMatrix mass_s, stiffness_s;  // M_s, K_s
  SparseMatrix divdiv;               // L
  SparseMatrix coupling_f;           // G_f, N_gamma x N_u
  SparseMatrix coupling_s;           // G_s, N_gamma x N_eta
};

BlockOperatorSet assemble_blocks(DofMap dofs, const PhysicalConstants& constants,
                                 int quadrature_order = kDefaultVolumeOrder);

/// density * (phi_j, phi_i), block diagonal over `components`.
SparseMatrix assemble_mass(const LagrangeSpace& space, double density, int components = 2,
                           int quadrature_order = kDefaultVolumeOrder);
/// coefficient * (D(w), D(v)) for vector fields; pass 2 nu.
SparseMatrix assemble_strain_stiffness(const LagrangeSpace& space, double coefficient,
                                       int quadrature_order = kDefaultVolumeOrder);
/// lambda * (div w, div v).
SparseMatrix assemble_divdiv(const LagrangeSpace& space, double lambda, int quadrature_order = kDefaultVolumeOrder);
/// P_{(i,c), j} = (q_j, d_c phi_i); velocity P2 and pressure P1 on the same mesh.
SparseMatrix assemble_pressure_coupling(const LagrangeSpace& velocity, const LagrangeSpace& pressure,
                                        int quadrature_order = kDefaultVolumeOrder);
/// G_{(k,c),(i,c)} = <phi_i, mu_k>_gamma with mu_k the P1 hats of the grid.
SparseMatrix assemble_interface_coupling(const LagrangeSpace& field, const InterfaceGrid& grid,
                                         int quadrature_order = kDefaultSegmentOrder);

/// Entry (i,c) = (f_c(., t), phi_i).
Vector assemble_body_load(const LagrangeSpace& space, const VectorField& f, double t,
                          int quadrature_order = kDefaultVolumeOrder);
/// Entry (i,c) = <g_c(., n, t), phi_i> over edges carrying one of `tags`.
/// Throws InvalidArgument for a tag absent from the mesh.
Vector assemble_neumann_load(const LagrangeSpace& space, std::span<const BoundaryTag> tags, const TractionField& g,
                             double t, int quadrature_order = kDefaultSegmentOrder);

/// Nodal interpolation of a vector field (component-blocked).
Vector interpolate(const LagrangeSpace& space, const VectorField& f, double t);
Vector interpolate_scalar(const LagrangeSpace& space, const ScalarField& f, double t);

/// Both components of every node on the tagged sides. With
/// `exclude_interface`, nodes on interface edges are skipped.
std::vector<int> dirichlet_dofs(const LagrangeSpace& space, std::span<const BoundaryTag> tags, bool exclude_interface);

/// Zeroes the rows and columns of `dofs` and puts 1 on their diagonal.
SparseMatrix constrain_symmetric(const SparseMatrix& a, std::span<const int> dofs);
/// Zeroes the listed columns of a (possibly rectangular) matrix.
SparseMatrix zero_columns(const SparseMatrix& a, std::span<const int> dofs);
/// Full-length vector holding `values` at `dofs` and zero elsewhere.
Vector scatter_values(int size, std::span<const int> dofs, const Vector& values);

/// Symmetric elimination: rhs -= A(:, D) g on free rows, rhs(D) = g,
/// A <- constrain_symmetric(A, D). `values` is aligned with `dofs`.
void apply_dirichlet(SparseMatrix& a, Vector& rhs, std::span<const int> dofs, const Vector& values);

}  // namespace fsi
