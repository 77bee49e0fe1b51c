#include "fsi/elements.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "fsi/error.hpp"

namespace fsi {

namespace {

void check_degree(int degree) {
  if (degree != 1 && degree != 2) {
    throw InvalidArgument("Lagrange degree " + std::to_string(degree) + " not supported");
  }
}

}  // namespace

ReferenceElement::ReferenceElement(int degree) : degree_(degree) {
  check_degree(degree);
  nodes_ = {Point(0, 0), Point(1, 0), Point(0, 1)};
  if (degree == 2) {
    nodes_.insert(nodes_.end(), {Point(0.5, 0), Point(0.5, 0.5), Point(0, 0.5)});
  }
}

BasisEval ReferenceElement::evaluate(const Point& ref) const { return reference_basis(degree_, ref); }

BasisEval reference_basis(int degree, const Point& ref) {
  check_degree(degree);
  const double l0 = 1.0 - ref.x() - ref.y();
  const double l1 = ref.x();
  const double l2 = ref.y();
  const Eigen::Vector2d g0(-1, -1), g1(1, 0), g2(0, 1);
  BasisEval b;
  if (degree == 1) {
    b.count = 3;
    b.value = {l0, l1, l2};
    b.grad[0] = g0;
    b.grad[1] = g1;
    b.grad[2] = g2;
    return b;
  }
  b.count = 6;
  b.value = {l0 * (2 * l0 - 1), l1 * (2 * l1 - 1), l2 * (2 * l2 - 1), 4 * l0 * l1, 4 * l1 * l2, 4 * l2 * l0};
  b.grad[0] = (4 * l0 - 1) * g0;
  b.grad[1] = (4 * l1 - 1) * g1;
  b.grad[2] = (4 * l2 - 1) * g2;
  b.grad[3] = 4 * (l0 * g1 + l1 * g0);
  b.grad[4] = 4 * (l1 * g2 + l2 * g1);
  b.grad[5] = 4 * (l2 * g0 + l0 * g2);
  return b;
}

BasisEval segment_basis(int degree, double s) {
  check_degree(degree);
  BasisEval b;
  if (degree == 1) {
    b.count = 2;
    b.value = {1 - s, s};
    b.grad[0] = Eigen::Vector2d(-1, 0);
    b.grad[1] = Eigen::Vector2d(1, 0);
    return b;
  }
  b.count = 3;
  b.value = {(1 - s) * (1 - 2 * s), s * (2 * s - 1), 4 * s * (1 - s)};
  b.grad[0] = Eigen::Vector2d(4 * s - 3, 0);
  b.grad[1] = Eigen::Vector2d(4 * s - 1, 0);
  b.grad[2] = Eigen::Vector2d(4 - 8 * s, 0);
  return b;
}

namespace {

// Legendre P_m(x) and its derivative by the three-term recurrence.
std::pair<double, double> legendre(int m, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= m; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  return {p1, m * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

SegmentQuadrature gauss_legendre(int points) {
  if (points < 1) throw InvalidArgument("Gauss-Legendre needs at least one point");
  SegmentQuadrature rule;
  rule.order = 2 * points - 1;
  rule.points.resize(points);
  rule.weights.resize(points);
  for (int i = 0; i < (points + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (points + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(points, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(points, x).second;
    const double w = 1.0 / ((1.0 - x * x) * dp * dp);
    rule.points[i] = 0.5 * (1.0 - x);
    rule.points[points - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[i] = rule.weights[points - 1 - i] = w;
  }
  if (points % 2 == 1) rule.points[points / 2] = 0.5;
  return rule;
}

SegmentQuadrature quadrature_segment(int order) {
  if (order < 1 || order > kMaxQuadratureOrder) {
    throw InvalidArgument("segment quadrature order " + std::to_string(order) + " not supported");
  }
  auto rule = gauss_legendre((order + 2) / 2);
  rule.order = order;
  return rule;
}

TriangleQuadrature quadrature_triangle(int order) {
  if (order < 1 || order > kMaxQuadratureOrder) {
    throw InvalidArgument("triangle quadrature order " + std::to_string(order) + " not supported");
  }
  TriangleQuadrature rule;
  rule.order = order;
  auto add_orbit = [&rule](double a, double w) {
    // Barycentric orbit (a, a, 1-2a).
    const double b = 1.0 - 2.0 * a;
    rule.points.insert(rule.points.end(), {Point(a, a), Point(b, a), Point(a, b)});
    rule.weights.insert(rule.weights.end(), {w, w, w});
  };
  if (order == 1) {
    rule.points = {Point(1.0 / 3, 1.0 / 3)};
    rule.weights = {0.5};
  } else if (order == 2) {
    add_orbit(1.0 / 6, 1.0 / 6);
  } else if (order <= 5) {
    // 7-point degree-5 rule with closed-form orbits.
    const double s15 = std::sqrt(15.0);
    rule.points = {Point(1.0 / 3, 1.0 / 3)};
    rule.weights = {9.0 / 80};
    add_orbit((6.0 - s15) / 21, (155.0 - s15) / 2400);
    add_orbit((6.0 + s15) / 21, (155.0 + s15) / 2400);
  } else {
    // Collapsed (Duffy) Gauss product: x = u, y = v (1 - u).
    const auto gu = gauss_legendre((order + 3) / 2);
    const auto gv = gauss_legendre((order + 2) / 2);
    for (std::size_t i = 0; i < gu.points.size(); ++i) {
      for (std::size_t j = 0; j < gv.points.size(); ++j) {
        const double u = gu.points[i];
        rule.points.emplace_back(u, gv.points[j] * (1.0 - u));
        rule.weights.push_back(gu.weights[i] * gv.weights[j] * (1.0 - u));
      }
    }
  }
  return rule;
}

AffineMap map_to_physical(const std::array<Point, 3>& vertices, const Point& ref) {
  AffineMap map;
  map.jacobian.col(0) = vertices[1] - vertices[0];
  map.jacobian.col(1) = vertices[2] - vertices[0];
  const double det = map.jacobian.determinant();
  const double scale = map.jacobian.squaredNorm();
  if (!(std::abs(det) > 1e-14 * scale)) throw SingularMap("degenerate triangle");
  map.det = std::abs(det);
  map.point = vertices[0] + map.jacobian * ref;
  return map;
}

}  // namespace fsi
