#include <gtest/gtest.h>

#include <sstream>

#include "fsi/conditioning.hpp"
#include "fsi/error.hpp"

using namespace fsi;

TEST(Densify, IdentityAndCap) {
  const DenseMatrix i = densify(LinearOperator::identity(4));
  EXPECT_TRUE(i.isIdentity());
  EXPECT_THROW(densify(LinearOperator::identity(10), 5), SizeError);
}

TEST(Densify, SchurIsSymmetric) {
  const FsiSystem sys(build_unit_blocks(2), 1e-5);
  const DenseMatrix s = densify(schur_operator(sys));
  EXPECT_LE((s - s.transpose()).cwiseAbs().maxCoeff(), 1e-10 * s.cwiseAbs().maxCoeff());
}

TEST(ExtremalEigs, DiagonalExamples) {
  EXPECT_NEAR(extremal_eigs(LinearOperator::identity(3)).kappa, 1.0, 1e-14);
  DenseMatrix d = DenseMatrix::Zero(2, 2);
  d(0, 0) = 1;
  d(1, 1) = 4;
  for (SpectrumMode mode : {SpectrumMode::dense, SpectrumMode::lanczos}) {
    const auto e = extremal_eigs(LinearOperator::from_matrix(d), mode);
    EXPECT_NEAR(e.kappa, 4.0, 1e-10);
    EXPECT_TRUE(e.converged);
  }
}

TEST(ExtremalEigs, LanczosAgreesWithDense) {
  const FsiSystem sys(build_unit_blocks(4), 1e-5);
  const auto s = schur_operator(sys);
  const auto m = fluid_preconditioner_operator(sys);
  const auto dense = extremal_eigs(s, SpectrumMode::dense);
  const auto lanczos = extremal_eigs(s, SpectrumMode::lanczos);
  EXPECT_EQ(dense.method, "dense");
  EXPECT_EQ(lanczos.method, "lanczos");
  EXPECT_NEAR(lanczos.kappa / dense.kappa, 1.0, 1e-2);
  const auto pd = extremal_eigs(s, SpectrumMode::dense, &m);
  const auto pl = extremal_eigs(s, SpectrumMode::lanczos, &m);
  EXPECT_NEAR(pl.kappa / pd.kappa, 1.0, 1e-2);
  EXPECT_LT(pd.kappa, dense.kappa);
}

TEST(ConditionRowTest, CoarsestMeshNearReference) {
  const auto r = condition_row(2, 1e-5);
  EXPECT_GT(r.cg.kappa, 17.45 / 3);
  EXPECT_LT(r.cg.kappa, 17.45 * 3);
  EXPECT_LT(r.pcg.kappa, r.cg.kappa);
  EXPECT_LT(r.iters_pcg, r.iters_cg);
}

TEST(GrowthExponent, PowerLaw) {
  const std::vector<double> h{0.5, 0.25, 0.125};
  const std::vector<double> k{4, 16, 64};
  EXPECT_NEAR(growth_exponent(h, k), 2.0, 1e-12);
  const std::vector<double> one{1.0};
  EXPECT_THROW(growth_exponent(one, one), InvalidArgument);
}

TEST(ConditionCsv, Columns) {
  std::ostringstream out;
  ConditionRow r;
  r.dx = 0.5;
  r.dt = 1e-5;
  r.cg.kappa = 17.0;
  r.pcg.kappa = 6.0;
  r.iters_cg = 15;
  r.iters_pcg = 6;
  const std::vector<ConditionRow> rows{r};
  write_condition_csv(out, rows);
  EXPECT_EQ(out.str(), "dx,dt,cond_cg,cond_pcg,iters_cg,iters_pcg\n0.5,1.0000000000000001e-05,17,6,15,6\n");
}
