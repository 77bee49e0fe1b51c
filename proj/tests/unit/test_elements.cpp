#include <gtest/gtest.h>

#include <cmath>

#include "fsi/elements.hpp"
#include "fsi/error.hpp"

using namespace fsi;

namespace {

double integrate(const TriangleQuadrature& q, double (*f)(double, double)) {
  double s = 0;
  for (std::size_t i = 0; i < q.points.size(); ++i) s += q.weights[i] * f(q.points[i].x(), q.points[i].y());
  return s;
}

// int_T x^a y^b over the reference triangle = a! b! / (a + b + 2)!
double monomial_exact(int a, int b) { return std::tgamma(a + 1) * std::tgamma(b + 1) / std::tgamma(a + b + 3); }

}  // namespace

TEST(Quadrature, TriangleWeightsSumToArea) {
  for (int order = 1; order <= kMaxQuadratureOrder; ++order) {
    const auto q = quadrature_triangle(order);
    double s = 0;
    for (double w : q.weights) s += w;
    EXPECT_NEAR(s, 0.5, 1e-14) << "order " << order;
  }
}

TEST(Quadrature, TriangleExactForMonomials) {
  for (int order = 1; order <= 12; ++order) {
    const auto q = quadrature_triangle(order);
    for (int a = 0; a <= order; ++a) {
      for (int b = 0; a + b <= order; ++b) {
        double s = 0;
        for (std::size_t i = 0; i < q.points.size(); ++i) {
          s += q.weights[i] * std::pow(q.points[i].x(), a) * std::pow(q.points[i].y(), b);
        }
        EXPECT_NEAR(s, monomial_exact(a, b), 1e-14) << "order " << order << " x^" << a << " y^" << b;
      }
    }
  }
}

TEST(Quadrature, KnownIntegrals) {
  EXPECT_NEAR(integrate(quadrature_triangle(1), [](double x, double) { return x; }), 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(integrate(quadrature_triangle(4), [](double x, double y) { return x * x * y * y; }), 1.0 / 180.0, 1e-15);
}

TEST(Quadrature, SegmentExactness) {
  const auto q = quadrature_segment(3);
  double s = 0;
  for (std::size_t i = 0; i < q.points.size(); ++i) s += q.weights[i] * std::pow(q.points[i], 3);
  EXPECT_NEAR(s, 0.25, 1e-15);
  for (int m = 1; m <= 10; ++m) {
    const auto g = gauss_legendre(m);
    for (int p = 0; p <= 2 * m - 1; ++p) {
      double v = 0;
      for (int i = 0; i < m; ++i) v += g.weights[i] * std::pow(g.points[i], p);
      EXPECT_NEAR(v, 1.0 / (p + 1), 1e-14);
    }
  }
}

TEST(Quadrature, RejectsUnsupportedOrders) {
  EXPECT_THROW(quadrature_triangle(0), InvalidArgument);
  EXPECT_THROW(quadrature_triangle(kMaxQuadratureOrder + 1), InvalidArgument);
  EXPECT_THROW(quadrature_segment(0), InvalidArgument);
}

TEST(ReferenceBasis, KroneckerAtNodes) {
  for (int degree : {1, 2}) {
    const ReferenceElement el(degree);
    for (int i = 0; i < el.node_count(); ++i) {
      const auto b = el.evaluate(el.nodes()[i]);
      for (int j = 0; j < el.node_count(); ++j) EXPECT_NEAR(b.value[j], i == j ? 1.0 : 0.0, 1e-15);
    }
  }
}

TEST(ReferenceBasis, PartitionOfUnityAndZeroGradientSum) {
  const Point pts[] = {{0.2, 0.3}, {0.0, 0.0}, {0.7, 0.1}, {1.0 / 3, 1.0 / 3}};
  for (int degree : {1, 2}) {
    for (const auto& p : pts) {
      const auto b = reference_basis(degree, p);
      double s = 0;
      Eigen::Vector2d g = Eigen::Vector2d::Zero();
      for (int i = 0; i < b.count; ++i) {
        s += b.value[i];
        g += b.grad[i];
      }
      EXPECT_NEAR(s, 1.0, 1e-14);
      EXPECT_NEAR(g.norm(), 0.0, 1e-13);
    }
  }
}

TEST(ReferenceBasis, GradientMatchesDifferences) {
  const Point p(0.31, 0.22);
  const double h = 1e-6;
  const auto b = reference_basis(2, p);
  const auto bx = reference_basis(2, p + Point(h, 0));
  const auto by = reference_basis(2, p + Point(0, h));
  for (int i = 0; i < 6; ++i) {
    EXPECT_NEAR(b.grad[i].x(), (bx.value[i] - b.value[i]) / h, 1e-5);
    EXPECT_NEAR(b.grad[i].y(), (by.value[i] - b.value[i]) / h, 1e-5);
  }
}

TEST(ReferenceBasis, RejectsDegree) { EXPECT_THROW(reference_basis(3, Point(0, 0)), InvalidArgument); }

TEST(SegmentBasis, NodesAndPartition) {
  const auto b = segment_basis(2, 0.5);
  EXPECT_NEAR(b.value[2], 1.0, 1e-15);
  EXPECT_NEAR(b.value[0], 0.0, 1e-15);
  const auto c = segment_basis(2, 0.3);
  EXPECT_NEAR(c.value[0] + c.value[1] + c.value[2], 1.0, 1e-15);
}

TEST(AffineMapTest, MapsVerticesAndScales) {
  const std::array<Point, 3> v{Point(1, 1), Point(3, 1), Point(1, 2)};
  const auto m = map_to_physical(v, Point(1, 0));
  EXPECT_NEAR((m.point - Point(3, 1)).norm(), 0.0, 1e-15);
  EXPECT_NEAR(m.det, 2.0, 1e-15);
  const auto c = map_to_physical(v, Point(1.0 / 3, 1.0 / 3));
  EXPECT_NEAR((c.point - Point(5.0 / 3, 4.0 / 3)).norm(), 0.0, 1e-15);
}

TEST(AffineMapTest, DegenerateTriangle) {
  const std::array<Point, 3> v{Point(0, 0), Point(1, 1), Point(2, 2)};
  EXPECT_THROW(map_to_physical(v, Point(0, 0)), SingularMap);
}
