#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fsi/coupling.hpp"
#include "fsi/error.hpp"
#include "fsi/manufactured.hpp"
#include "oracle/fd_oracle.hpp"

using namespace fsi;

TEST(ExactSolutionTest, ClosedFormValues) {
  const ExactSolution e;
  const auto f = e.fields(0.0, 0.0, 0.0);
  EXPECT_NEAR(f.u.x(), 0.0, 1e-15);
  EXPECT_NEAR(f.p, -2.0, 1e-15);
  EXPECT_NEAR(f.eta.y(), 1.0, 1e-15);
  const Vec2 g = e.multiplier(0.3, 0.2);
  EXPECT_NEAR(g.x(), 0.0, 1e-14);
  EXPECT_NEAR(g.y(), -2.0 * std::sin(1.2) * std::cos(0.5), 1e-14);
}

TEST(ExactSolutionTest, CorrectedVariantSatisfiesInterfaceConditions) {
  PhysicalConstants k;
  k.nu_f = 0.7;
  k.nu_s = 1.9;
  k.lambda = 2.4;
  const ExactSolution e(k);
  for (double x : {0.1, 0.45, 0.9}) {
    for (double t : {0.0, 0.3, 1.0}) {
      const Point p(x, 1.0);
      EXPECT_NEAR((e.velocity(p, t) - e.displacement_rate(p, t)).norm(), 0.0, 1e-14);
      const Vec2 nf(0.0, 1.0);
      EXPECT_NEAR((e.fluid_stress(p, t) * nf - e.solid_stress(p, t) * nf).norm(), 0.0, 1e-13);
      EXPECT_NEAR((e.multiplier(x, t) - e.fluid_stress(p, t) * nf).norm(), 0.0, 1e-14);
    }
  }
}

TEST(ExactSolutionTest, PrintedVariantBreaksVelocityContinuity) {
  const ExactSolution e({}, ExactVariant::printed);
  const Point p(0.3, 1.0);
  EXPECT_GT((e.velocity(p, 0.2) - e.displacement_rate(p, 0.2)).norm(), 1e-3);
}

TEST(ExactSolutionTest, IncompressibleVelocityAndSolenoidalDisplacement) {
  const ExactSolution e;
  const Point p(0.37, 0.61);
  EXPECT_NEAR(e.velocity_gradient(p, 0.4).trace(), 0.0, 1e-14);
  EXPECT_NEAR(e.displacement_gradient(Point(0.2, 1.5), 0.4).trace(), 0.0, 1e-14);
}

TEST(ExactSolutionTest, ForcingMatchesFiniteDifferences) {
  PhysicalConstants k;
  k.rho_f = 1.5;
  k.rho_s = 0.8;
  k.nu_f = 0.6;
  k.nu_s = 1.3;
  k.lambda = 2.0;
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto variant : {ExactVariant::corrected, ExactVariant::printed}) {
    const ExactSolution e(k, variant);
    for (int i = 0; i < 25; ++i) {
      const double x = u(rng), y = u(rng), t = u(rng);
      const auto fd_f = oracle::finite_difference_forcing(k, variant, x, y, t);
      const auto fd_s = oracle::finite_difference_forcing(k, variant, x, 1.0 + y, t);
      EXPECT_NEAR((e.fluid_force(Point(x, y), t) - fd_f.fluid_force).norm(), 0.0, 1e-6);
      EXPECT_NEAR((e.solid_force(Point(x, 1.0 + y), t) - fd_s.solid_force).norm(), 0.0, 1e-6);
      EXPECT_NEAR((e.solid_stress(Point(x, 1.0 + y), t) - fd_s.solid_stress).norm(), 0.0, 1e-6);
    }
  }
}

TEST(ErrorNorms, ExactInterpolantOnFineMeshIsSmall) {
  const auto blocks = build_unit_blocks(8);
  const ExactSolution e;
  const auto s = initial_state(blocks->dofs, e, 0.5);
  const auto err = compute_error_norms(blocks->dofs, s.u, s.p, s.eta, s.g, e, 0.5);
  EXPECT_LT(err.u_l2, 1e-4);
  EXPECT_LT(err.eta_l2, 1e-4);
  EXPECT_LT(err.p_l2, 1e-2);
  EXPECT_LT(err.g_l2, 1e-2);
  EXPECT_GE(err.u_h1, err.u_l2);
}

TEST(ErrorNorms, ZeroStateGivesFieldNorms) {
  const auto blocks = build_unit_blocks(4);
  const ExactSolution e;
  const auto z = zero_state(blocks->dofs);
  const auto err = compute_error_norms(blocks->dofs, z.u, z.p, z.eta, z.g, e, 0.0);
  // ||(sin s, -sin s)||^2 over the unit square, s = x + y
  EXPECT_NEAR(err.u_l2 * err.u_l2, 2 * (0.5 - (2 * std::cos(2.0) - std::cos(4.0) - 1) / 8), 1e-6);
}

TEST(ErrorNorms, SizeMismatchRejected) {
  const auto blocks = build_unit_blocks(2);
  const ExactSolution e;
  const auto z = zero_state(blocks->dofs);
  EXPECT_THROW(compute_error_norms(blocks->dofs, Vector::Zero(3), z.p, z.eta, z.g, e, 0.0), InvalidArgument);
}

TEST(ConvergenceRate, SecondOrderSequence) {
  const std::vector<double> e{4e-2, 1e-2, 2.5e-3};
  const std::vector<double> h{0.5, 0.25, 0.125};
  const auto r = convergence_rate(e, h);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_NEAR(*r[0], 2.0, 1e-12);
  EXPECT_NEAR(*r[1], 2.0, 1e-12);
}

TEST(ConvergenceRate, EdgeCases) {
  const std::vector<double> zero{1e-3, 0.0};
  const std::vector<double> h2{0.5, 0.25};
  EXPECT_FALSE(convergence_rate(zero, h2)[0].has_value());
  const std::vector<double> one{1.0};
  const std::vector<double> h1{0.5};
  EXPECT_THROW(convergence_rate(one, h1), InvalidArgument);
  const std::vector<double> e3{1, 2, 3};
  const std::vector<double> bad{0.5, 0.25, 0.3};
  EXPECT_THROW(convergence_rate(e3, bad), InvalidArgument);
  EXPECT_THROW(convergence_rate(e3, h2), InvalidArgument);
}

TEST(ProblemDataTest, ZeroProblemIsZero) {
  const auto d = zero_problem();
  EXPECT_EQ(d.fluid_force(Point(0.3, 0.3), 1.0).norm(), 0.0);
  EXPECT_EQ(d.solid_traction(Point(0.3, 1.3), Vec2(1, 0), 1.0).norm(), 0.0);
}
