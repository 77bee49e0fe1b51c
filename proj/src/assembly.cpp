#include "fsi/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "fsi/error.hpp"

namespace fsi {

namespace {

using EdgeKey = std::pair<int, int>;

EdgeKey edge_key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

constexpr std::array<std::array<int, 2>, 3> kCellEdges{{{0, 1}, {1, 2}, {2, 0}}};

std::vector<BoundaryTag> complement(const std::vector<BoundaryTag>& neumann) {
  std::vector<BoundaryTag> out;
  for (auto tag : {BoundaryTag::left, BoundaryTag::right, BoundaryTag::bottom, BoundaryTag::top}) {
    if (std::find(neumann.begin(), neumann.end(), tag) == neumann.end()) out.push_back(tag);
  }
  return out;
}

/// Reference basis tabulated at the quadrature points of one rule.
struct Tabulation {
  TriangleQuadrature rule;
  std::vector<BasisEval> basis;

  Tabulation(int degree, int order) : rule(quadrature_triangle(order)) {
    basis.reserve(rule.points.size());
    for (const auto& p : rule.points) basis.push_back(reference_basis(degree, p));
  }
};

/// Physical values on one cell: basis values, physical gradients and the
/// weight times |det J| per quadrature point.
struct CellValues {
  int count = 0;
  std::vector<std::array<double, 6>> value;
  std::vector<std::array<Vec2, 6>> grad;
  std::vector<double> jxw;
  std::vector<Point> point;

  void reinit(const LagrangeSpace& space, int cell, const Tabulation& tab) {
    const auto verts = space.vertices(cell);
    const std::size_t nq = tab.rule.points.size();
    count = space.nodes_per_cell();
    value.resize(nq);
    grad.resize(nq);
    jxw.resize(nq);
    point.resize(nq);
    const auto map0 = map_to_physical(verts, Point(0, 0));
    const Eigen::Matrix2d inv_t = map0.jacobian.inverse().transpose();
    for (std::size_t q = 0; q < nq; ++q) {
      point[q] = verts[0] + map0.jacobian * tab.rule.points[q];
      jxw[q] = tab.rule.weights[q] * map0.det;
      for (int i = 0; i < count; ++i) {
        value[q][i] = tab.basis[q].value[i];
        grad[q][i] = inv_t * tab.basis[q].grad[i];
      }
    }
  }
};

void require_positive(double v, const char* what) {
  if (!(v > 0.0)) throw InvalidArgument(std::string(what) + " must be positive");
}

}  // namespace

// --- LagrangeSpace ---------------------------------------------------------

LagrangeSpace::LagrangeSpace(std::shared_ptr<const TriangleMesh> mesh, int degree)
    : mesh_(std::move(mesh)), degree_(degree) {
  if (degree != 1 && degree != 2) throw InvalidArgument("Lagrange degree must be 1 or 2");
  const auto& m = *mesh_;
  nodes_ = m.nodes;
  const int per_cell = nodes_per_cell();
  cells_.resize(m.triangles.size() * per_cell);
  std::map<EdgeKey, int> midpoint;
  std::map<EdgeKey, int> owner;
  for (int c = 0; c < static_cast<int>(m.triangles.size()); ++c) {
    const auto& t = m.triangles[c];
    for (int v = 0; v < 3; ++v) cells_[c * per_cell + v] = t[v];
    for (int e = 0; e < 3; ++e) {
      const int a = t[kCellEdges[e][0]];
      const int b = t[kCellEdges[e][1]];
      const auto key = edge_key(a, b);
      owner.emplace(key, c);
      if (degree == 2) {
        auto [it, inserted] = midpoint.emplace(key, static_cast<int>(nodes_.size()));
        if (inserted) nodes_.push_back(0.5 * (m.nodes[a] + m.nodes[b]));
        cells_[c * per_cell + 3 + e] = it->second;
      }
    }
  }
  for (const auto& be : m.boundary_edges) {
    const auto key = edge_key(be.nodes[0], be.nodes[1]);
    const auto own = owner.find(key);
    if (own == owner.end()) throw InvalidArgument("boundary edge is not an edge of any triangle");
    Edge edge;
    edge.nodes = {be.nodes[0], be.nodes[1], degree == 2 ? midpoint.at(key) : -1};
    edge.tag = be.tag;
    const Vec2 d = m.nodes[be.nodes[1]] - m.nodes[be.nodes[0]];
    edge.length = d.norm();
    edge.normal = Vec2(d.y(), -d.x()) / edge.length;
    const auto& t = m.triangles[own->second];
    Point centroid = (m.nodes[t[0]] + m.nodes[t[1]] + m.nodes[t[2]]) / 3.0;
    if ((centroid - m.nodes[be.nodes[0]]).dot(edge.normal) > 0.0) edge.normal = -edge.normal;
    edges_.push_back(edge);
  }
}

std::array<Point, 3> LagrangeSpace::vertices(int c) const {
  const auto& t = mesh_->triangles[c];
  return {mesh_->nodes[t[0]], mesh_->nodes[t[1]], mesh_->nodes[t[2]]};
}

bool LagrangeSpace::has_tag(BoundaryTag tag) const {
  return std::any_of(edges_.begin(), edges_.end(), [tag](const Edge& e) { return e.tag == tag; });
}

std::vector<int> LagrangeSpace::boundary_nodes(std::span<const BoundaryTag> tags) const {
  std::vector<int> out;
  for (const auto& e : edges_) {
    if (std::find(tags.begin(), tags.end(), e.tag) == tags.end()) continue;
    for (int v : e.nodes) {
      if (v >= 0) out.push_back(v);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// --- layout and dof map ----------------------------------------------------

std::vector<BoundaryTag> BoundaryLayout::fluid_dirichlet() const { return complement(fluid_neumann); }
std::vector<BoundaryTag> BoundaryLayout::solid_dirichlet() const { return complement(solid_neumann); }

std::vector<int> dirichlet_dofs(const LagrangeSpace& space, std::span<const BoundaryTag> tags, bool exclude_interface) {
  auto nodes = space.boundary_nodes(tags);
  if (exclude_interface) {
    const std::array<BoundaryTag, 1> iface{BoundaryTag::interface};
    const auto on_gamma = space.boundary_nodes(iface);
    std::vector<int> kept;
    std::set_difference(nodes.begin(), nodes.end(), on_gamma.begin(), on_gamma.end(), std::back_inserter(kept));
    nodes = std::move(kept);
  }
  std::vector<int> dofs;
  dofs.reserve(2 * nodes.size());
  for (int c = 0; c < 2; ++c) {
    for (int v : nodes) dofs.push_back(vector_dof(space, v, c));
  }
  return dofs;
}

DofMap build_dof_map(std::shared_ptr<const TriangleMesh> fluid, std::shared_ptr<const TriangleMesh> solid,
                     const InterfaceGrid& grid, BoundaryLayout layout) {
  DofMap dofs{LagrangeSpace(fluid, 2), LagrangeSpace(fluid, 1), LagrangeSpace(solid, 2), grid, std::move(layout), {}, {}};
  dofs.velocity_dirichlet = dirichlet_dofs(dofs.velocity, dofs.layout.fluid_dirichlet(), true);
  dofs.displacement_dirichlet = dirichlet_dofs(dofs.displacement, dofs.layout.solid_dirichlet(), false);
  return dofs;
}

// --- bilinear forms --------------------------------------------------------

SparseMatrix assemble_mass(const LagrangeSpace& space, double density, int components, int quadrature_order) {
  require_positive(density, "density");
  if (components < 1) throw InvalidArgument("component count must be positive");
  const Tabulation tab(space.degree(), quadrature_order);
  CellValues cv;
  const int n = space.node_count();
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(space.cell_count()) * 36 * components);
  Eigen::Matrix<double, 6, 6> local;
  for (int c = 0; c < space.cell_count(); ++c) {
    cv.reinit(space, c, tab);
    const auto dofs = space.cell(c);
    local.setZero();
    for (std::size_t q = 0; q < cv.jxw.size(); ++q) {
      for (int i = 0; i < cv.count; ++i) {
        for (int j = 0; j < cv.count; ++j) local(i, j) += density * cv.value[q][i] * cv.value[q][j] * cv.jxw[q];
      }
    }
    for (int comp = 0; comp < components; ++comp) {
      for (int i = 0; i < cv.count; ++i) {
        for (int j = 0; j < cv.count; ++j) {
          entries.emplace_back(comp * n + dofs[i], comp * n + dofs[j], local(i, j));
        }
      }
    }
  }
  return finalize(components * n, components * n, entries);
}

SparseMatrix assemble_strain_stiffness(const LagrangeSpace& space, double coefficient, int quadrature_order) {
  require_positive(coefficient, "viscosity coefficient");
  const Tabulation tab(space.degree(), quadrature_order);
  CellValues cv;
  const int n = space.node_count();
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(space.cell_count()) * 144);
  for (int c = 0; c < space.cell_count(); ++c) {
    cv.reinit(space, c, tab);
    const auto dofs = space.cell(c);
    Eigen::Matrix<double, 12, 12> local = Eigen::Matrix<double, 12, 12>::Zero();
    for (std::size_t q = 0; q < cv.jxw.size(); ++q) {
      for (int i = 0; i < cv.count; ++i) {
        for (int j = 0; j < cv.count; ++j) {
          const Vec2& gi = cv.grad[q][i];
          const Vec2& gj = cv.grad[q][j];
          const double dot = gi.dot(gj);
          // D(phi_i e_a) : D(phi_j e_b) = (delta_ab gi.gj + d_b phi_i d_a phi_j) / 2
          for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
              const double v = 0.5 * ((a == b ? dot : 0.0) + gi[b] * gj[a]);
              local(a * 6 + i, b * 6 + j) += coefficient * v * cv.jxw[q];
            }
          }
        }
      }
    }
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        for (int i = 0; i < cv.count; ++i) {
          for (int j = 0; j < cv.count; ++j) {
            entries.emplace_back(a * n + dofs[i], b * n + dofs[j], local(a * 6 + i, b * 6 + j));
          }
        }
      }
    }
  }
  return finalize(2 * n, 2 * n, entries);
}

SparseMatrix assemble_divdiv(const LagrangeSpace& space, double lambda, int quadrature_order) {
  if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be non-negative");
  const Tabulation tab(space.degree(), quadrature_order);
  CellValues cv;
  const int n = space.node_count();
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(space.cell_count()) * 144);
  for (int c = 0; c < space.cell_count(); ++c) {
    cv.reinit(space, c, tab);
    const auto dofs = space.cell(c);
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        for (int i = 0; i < cv.count; ++i) {
          for (int j = 0; j < cv.count; ++j) {
            double v = 0.0;
            for (std::size_t q = 0; q < cv.jxw.size(); ++q) v += cv.grad[q][i][a] * cv.grad[q][j][b] * cv.jxw[q];
            entries.emplace_back(a * n + dofs[i], b * n + dofs[j], lambda * v);
          }
        }
      }
    }
  }
  return finalize(2 * n, 2 * n, entries);
}

SparseMatrix assemble_pressure_coupling(const LagrangeSpace& velocity, const LagrangeSpace& pressure,
                                        int quadrature_order) {
  if (velocity.degree() != 2 || pressure.degree() != 1) {
    throw InvalidArgument("pressure coupling supports the (P2, P1) pair only");
  }
  if (velocity.cell_count() != pressure.cell_count() || velocity.mesh().nodes.size() != pressure.mesh().nodes.size()) {
    throw MeshMismatch("velocity and pressure spaces live on different meshes");
  }
  const Tabulation tab_u(2, quadrature_order);
  const Tabulation tab_p(1, quadrature_order);
  CellValues cu, cp;
  const int nu = velocity.node_count();
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(velocity.cell_count()) * 36);
  for (int c = 0; c < velocity.cell_count(); ++c) {
    cu.reinit(velocity, c, tab_u);
    cp.reinit(pressure, c, tab_p);
    const auto udofs = velocity.cell(c);
    const auto pdofs = pressure.cell(c);
    for (int a = 0; a < 2; ++a) {
      for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 3; ++j) {
          double v = 0.0;
          for (std::size_t q = 0; q < cu.jxw.size(); ++q) v += cp.value[q][j] * cu.grad[q][i][a] * cu.jxw[q];
          entries.emplace_back(a * nu + udofs[i], pdofs[j], v);
        }
      }
    }
  }
  return finalize(2 * nu, pressure.node_count(), entries);
}

SparseMatrix assemble_interface_coupling(const LagrangeSpace& field, const InterfaceGrid& grid, int quadrature_order) {
  if (grid.node_count() < 2) throw MeshMismatch("interface grid has no segments");
  const auto rule = quadrature_segment(quadrature_order);
  const int n = field.node_count();
  const int ng = grid.node_count();
  constexpr double tol = 1e-12;

  // Every grid node must be a vertex of the field's interface edges.
  std::vector<double> vertex_x;
  for (const auto& e : field.boundary_edges()) {
    if (e.tag != BoundaryTag::interface) continue;
    for (int k = 0; k < 2; ++k) {
      const Point& p = field.nodes()[e.nodes[k]];
      if (std::abs(p.y() - grid.y) > tol) throw MeshMismatch("interface edge off the multiplier grid line");
      vertex_x.push_back(p.x());
    }
  }
  if (vertex_x.empty()) throw MeshMismatch("field space has no interface edges");
  for (double x : grid.nodes) {
    const bool found = std::any_of(vertex_x.begin(), vertex_x.end(), [x](double v) { return std::abs(v - x) <= tol; });
    if (!found) throw MeshMismatch("multiplier grid node is not an interface vertex of the mesh");
  }

  std::vector<Triplet> entries;
  const int trace_nodes = field.degree() + 1;
  for (const auto& e : field.boundary_edges()) {
    if (e.tag != BoundaryTag::interface) continue;
    const Point& a = field.nodes()[e.nodes[0]];
    const Point& b = field.nodes()[e.nodes[1]];
    const int seg = grid.locate(0.5 * (a.x() + b.x()));
    const double x0 = grid.nodes[seg];
    const double x1 = grid.nodes[seg + 1];
    if (std::min(a.x(), b.x()) < x0 - tol || std::max(a.x(), b.x()) > x1 + tol) {
      throw MeshMismatch("mesh interface edge straddles a multiplier grid node");
    }
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double s = rule.points[q];
      const Point x = a + s * (b - a);
      const double xi = (x.x() - x0) / (x1 - x0);
      const std::array<double, 2> mu{1.0 - xi, xi};
      const auto trace = segment_basis(field.degree(), s);
      const double w = rule.weights[q] * e.length;
      for (int k = 0; k < 2; ++k) {
        for (int i = 0; i < trace_nodes; ++i) {
          const double v = w * mu[k] * trace.value[i];
          for (int comp = 0; comp < 2; ++comp) entries.emplace_back(comp * ng + seg + k, comp * n + e.nodes[i], v);
        }
      }
    }
  }
  return finalize(2 * ng, 2 * n, entries);
}

// --- load vectors ----------------------------------------------------------

Vector assemble_body_load(const LagrangeSpace& space, const VectorField& f, double t, int quadrature_order) {
  const Tabulation tab(space.degree(), quadrature_order);
  CellValues cv;
  const int n = space.node_count();
  Vector load = Vector::Zero(2 * n);
  for (int c = 0; c < space.cell_count(); ++c) {
    cv.reinit(space, c, tab);
    const auto dofs = space.cell(c);
    for (std::size_t q = 0; q < cv.jxw.size(); ++q) {
      const Vec2 fq = f(cv.point[q], t) * cv.jxw[q];
      for (int i = 0; i < cv.count; ++i) {
        load[dofs[i]] += fq.x() * cv.value[q][i];
        load[n + dofs[i]] += fq.y() * cv.value[q][i];
      }
    }
  }
  return load;
}

Vector assemble_neumann_load(const LagrangeSpace& space, std::span<const BoundaryTag> tags, const TractionField& g,
                             double t, int quadrature_order) {
  for (auto tag : tags) {
    if (!space.has_tag(tag)) {
      throw InvalidArgument("boundary tag '" + std::string(to_string(tag)) + "' not present on the mesh");
    }
  }
  const auto rule = quadrature_segment(quadrature_order);
  const int n = space.node_count();
  const int trace_nodes = space.degree() + 1;
  Vector load = Vector::Zero(2 * n);
  for (const auto& e : space.boundary_edges()) {
    if (std::find(tags.begin(), tags.end(), e.tag) == tags.end()) continue;
    const Point& a = space.nodes()[e.nodes[0]];
    const Point& b = space.nodes()[e.nodes[1]];
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double s = rule.points[q];
      const Vec2 gq = g(a + s * (b - a), e.normal, t) * (rule.weights[q] * e.length);
      const auto trace = segment_basis(space.degree(), s);
      for (int i = 0; i < trace_nodes; ++i) {
        load[e.nodes[i]] += gq.x() * trace.value[i];
        load[n + e.nodes[i]] += gq.y() * trace.value[i];
      }
    }
  }
  return load;
}

Vector interpolate(const LagrangeSpace& space, const VectorField& f, double t) {
  const int n = space.node_count();
  Vector out(2 * n);
  for (int i = 0; i < n; ++i) {
    const Vec2 v = f(space.nodes()[i], t);
    out[i] = v.x();
    out[n + i] = v.y();
  }
  return out;
}

Vector interpolate_scalar(const LagrangeSpace& space, const ScalarField& f, double t) {
  Vector out(space.node_count());
  for (int i = 0; i < space.node_count(); ++i) out[i] = f(space.nodes()[i], t);
  return out;
}

// --- Dirichlet elimination --------------------------------------------------

SparseMatrix constrain_symmetric(const SparseMatrix& a, std::span<const int> dofs) {
  std::vector<char> fixed(a.rows(), 0);
  for (int d : dofs) fixed[d] = 1;
  std::vector<Triplet> entries;
  entries.reserve(a.nonZeros());
  for (int r = 0; r < a.outerSize(); ++r) {
    if (fixed[r]) {
      entries.emplace_back(r, r, 1.0);
      continue;
    }
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) {
      if (!fixed[it.col()]) entries.emplace_back(r, static_cast<int>(it.col()), it.value());
    }
  }
  return finalize(static_cast<int>(a.rows()), static_cast<int>(a.cols()), entries);
}

SparseMatrix zero_columns(const SparseMatrix& a, std::span<const int> dofs) {
  std::vector<char> fixed(a.cols(), 0);
  for (int d : dofs) fixed[d] = 1;
  std::vector<Triplet> entries;
  entries.reserve(a.nonZeros());
  for (int r = 0; r < a.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) {
      if (!fixed[it.col()]) entries.emplace_back(r, static_cast<int>(it.col()), it.value());
    }
  }
  return finalize(static_cast<int>(a.rows()), static_cast<int>(a.cols()), entries);
}

Vector scatter_values(int size, std::span<const int> dofs, const Vector& values) {
  Vector out = Vector::Zero(size);
  for (std::size_t k = 0; k < dofs.size(); ++k) out[dofs[k]] = values[static_cast<Eigen::Index>(k)];
  return out;
}

void apply_dirichlet(SparseMatrix& a, Vector& rhs, std::span<const int> dofs, const Vector& values) {
  if (static_cast<std::size_t>(values.size()) != dofs.size()) {
    throw InvalidArgument("Dirichlet values and dofs differ in length");
  }
  const Vector lifted = scatter_values(static_cast<int>(a.cols()), dofs, values);
  rhs -= a * lifted;
  for (std::size_t k = 0; k < dofs.size(); ++k) rhs[dofs[k]] = values[static_cast<Eigen::Index>(k)];
  a = constrain_symmetric(a, dofs);
}

// --- blocks ----------------------------------------------------------------

BlockOperatorSet assemble_blocks(DofMap dofs, const PhysicalConstants& k, int quadrature_order) {
  BlockOperatorSet b{std::move(dofs), k, {}, {}, {}, {}, {}, {}, {}, {}};
  const auto& d = b.dofs;
  b.mass_f = assemble_mass(d.velocity, k.rho_f, 2, quadrature_order);
  b.stiffness_f = assemble_strain_stiffness(d.velocity, 2.0 * k.nu_f, quadrature_order);
  b.pressure = assemble_pressure_coupling(d.velocity, d.pressure, quadrature_order);
  b.mass_s = assemble_mass(d.displacement, k.rho_s, 2, quadrature_order);
  b.stiffness_s = assemble_strain_stiffness(d.displacement, 2.0 * k.nu_s, quadrature_order);
  b.divdiv = assemble_divdiv(d.displacement, k.lambda, quadrature_order);
  b.coupling_f = assemble_interface_coupling(d.velocity, d.multiplier);
  b.coupling_s = assemble_interface_coupling(d.displacement, d.multiplier);
  return b;
}

}  // namespace fsi
