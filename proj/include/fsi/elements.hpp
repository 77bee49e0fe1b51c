#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

#include "fsi/mesh.hpp"

namespace fsi {

/// Shape function values and reference gradients at one point. Only the
/// first `count` entries are meaningful (3 for P1, 6 for P2).
struct BasisEval {
  int count = 0;
  std::array<double, 6> value{};
  std::array<Eigen::Vector2d, 6> grad{};
};

/// Lagrange P1/P2 on the reference triangle (0,0), (1,0), (0,1).
/// P2 node order: the three vertices, then the midpoints of edges
/// (0,1), (1,2), (2,0).
class ReferenceElement {
 public:
  explicit ReferenceElement(int degree);

  int degree() const { return degree_; }
  int node_count() const { return degree_ == 1 ? 3 : 6; }
  const std::vector<Point>& nodes() const { return nodes_; }
  BasisEval evaluate(const Point& ref) const;

 private:
  int degree_;
  std::vector<Point> nodes_;
};

/// Throws InvalidArgument unless degree is 1 or 2.
BasisEval reference_basis(int degree, const Point& ref);

/// 1D Lagrange basis of the given degree on [0,1], nodes ordered
/// (0, 1, 1/2) for degree 2. Used for edge traces.
BasisEval segment_basis(int degree, double s);

struct TriangleQuadrature {
  int order = 0;
  std::vector<Point> points;    // reference coordinates
  std::vector<double> weights;  // sum to 1/2
};

struct SegmentQuadrature {
  int order = 0;
  std::vector<double> points;  // in [0,1]
  std::vector<double> weights;  // sum to 1
};

inline constexpr int kMaxQuadratureOrder = 20;
inline constexpr int kDefaultVolumeOrder = 5;
inline constexpr int kDefaultSegmentOrder = 5;  // 3-point Gauss

/// Rules exact up to polynomial degree `order`, 1 <= order <= kMaxQuadratureOrder.
TriangleQuadrature quadrature_triangle(int order);
SegmentQuadrature quadrature_segment(int order);

/// Gauss-Legendre nodes and weights on [0,1].
SegmentQuadrature gauss_legendre(int points);

struct AffineMap {
  Point point;
  Eigen::Matrix2d jacobian;
  double det;  // |det J| = 2 * area
};

/// Affine map from the reference triangle. Throws SingularMap for a
/// degenerate triangle.
AffineMap map_to_physical(const std::array<Point, 3>& vertices, const Point& ref);

}  // namespace fsi
