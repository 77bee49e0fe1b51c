#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "fsi/error.hpp"
#include "fsi/harness.hpp"

using namespace fsi;

namespace {

std::string csv(const StudyReport& r) {
  std::ostringstream out;
  write_report_csv(r, out);
  return out.str();
}

std::string parse_error_key(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ParseError& e) {
    return e.key();
  }
  return "<none>";
}

}  // namespace

TEST(ParseConfig, EmptyDocumentGivesDefaults) {
  const auto c = parse_config("");
  EXPECT_EQ(c.study, StudyKind::space);
  EXPECT_EQ(c.constants.rho_f, 1.0);
  EXPECT_EQ(c.constants.lambda, 1.0);
  EXPECT_EQ(c.lm_coarsening, 1);
  EXPECT_EQ(c.solver, SchurSolver::pcg);
  EXPECT_EQ(c.exact_variant, ExactVariant::corrected);
}

TEST(ParseConfig, ValuesListsAndComments) {
  const auto c = parse_config(
      "# comment\nstudy = time\nT = 1\ndt_list = [1/4, 0.125]  # trailing\nn = 8\nsolver = cg\n"
      "fluid_neumann = [left]\nexact_variant = printed\ncond_mode = lanczos\n");
  EXPECT_EQ(c.study, StudyKind::time);
  ASSERT_EQ(c.dt_list.size(), 2u);
  EXPECT_EQ(c.dt_list[0], 0.25);
  EXPECT_EQ(c.n, 8);
  EXPECT_EQ(c.solver, SchurSolver::cg);
  EXPECT_EQ(c.fluid_neumann, std::vector<BoundaryTag>{BoundaryTag::left});
  EXPECT_EQ(c.exact_variant, ExactVariant::printed);
  EXPECT_EQ(c.cond_mode, SpectrumMode::lanczos);
}

TEST(ParseConfig, Errors) {
  EXPECT_EQ(parse_error_key("study = time\ndt_list = [0.3]\nT = 1\n"), "dt_list");
  EXPECT_EQ(parse_error_key("lambda = -1\n"), "lambda");
  EXPECT_EQ(parse_error_key("colour = blue\n"), "colour");
  EXPECT_EQ(parse_error_key("n = 2.5\n"), "n");
  EXPECT_EQ(parse_error_key("rho_f = heavy\n"), "rho_f");
  EXPECT_EQ(parse_error_key("meshes = 2, 4\n"), "meshes");
  EXPECT_EQ(parse_error_key("nu_s = 0\n"), "nu_s");
  EXPECT_EQ(parse_error_key("solver = gmres\n"), "solver");
  EXPECT_EQ(parse_error_key("fluid_neumann = [interface]\n"), "fluid_neumann");
  EXPECT_EQ(parse_error_key("dt = 1e-5\ndt = 1e-4\n"), "dt");
  EXPECT_EQ(parse_error_key("meshes = [3]\nlm_coarsening = 2\n"), "lm_coarsening");
  EXPECT_EQ(parse_error_key("dt = 3e-4\n"), "dt");
  EXPECT_EQ(parse_error_key("lambda = 0\n"), "<none>");
}

TEST(ParseConfig, StudyOverride) {
  const auto c = parse_config("T = 1\n", StudyKind::time);
  EXPECT_EQ(c.study, StudyKind::time);
  EXPECT_THROW(parse_config("", StudyKind::time), ParseError);  // default dt_list against T = 1e-3
}

TEST(ConfigText, RoundTrip) {
  StudyConfig c = parse_config("study = conditioning\nmeshes = [2, 4]\ndt = 1e-5\nnu_f = 0.3\nsolid_neumann = [top]\n");
  const StudyConfig back = parse_config(config_text(c));
  EXPECT_EQ(config_text(back), config_text(c));
  EXPECT_EQ(back.constants.nu_f, 0.3);
  EXPECT_EQ(back.solid_neumann, std::vector<BoundaryTag>{BoundaryTag::top});
}

TEST(SpaceStudy, StructureRatesAndDeterminism) {
  const auto c = parse_config("meshes = [2, 4, 8]\ndt = 1e-5\nT = 1e-4\n");
  const auto r = run_space_study(c);
  ASSERT_EQ(r.rows.size(), 3u);
  const auto rates = r.values("rate_eta_l2");
  EXPECT_TRUE(std::isnan(rates[0]));
  EXPECT_NEAR(rates[2], 3.0, 0.2);
  // Rates recompute from the written errors.
  const auto e = r.values("eta_l2");
  const auto dx = r.values("dx");
  EXPECT_DOUBLE_EQ(rates[2], std::log(e[1] / e[2]) / std::log(dx[1] / dx[2]));

  const std::string first = csv(r);
  EXPECT_EQ(first, csv(run_space_study(c)));
  // The config echo reproduces the run.
  EXPECT_EQ(first, csv(run_study(parse_config(extract_config_echo(first)))));
}

TEST(TimeStudy, RowsPerStep) {
  const auto c = parse_config("study = time\nn = 2\nT = 0.5\ndt_list = [1/4, 1/8]\n");
  const auto r = run_time_study(c);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.columns[0], "dt");
  EXPECT_GT(r.values("rate_u_l2")[1], 0.0);
}

TEST(ConditioningStudy, MeshAndStepSweeps) {
  const auto c = parse_config("study = conditioning\nmeshes = [2, 4]\nn = 2\ndt_list = [1/4, 1/8]\n");
  const auto r = run_conditioning_study(c);
  ASSERT_EQ(r.rows.size(), 4u);
  const auto it_cg = r.values("iters_cg");
  const auto it_pcg = r.values("iters_pcg");
  for (std::size_t i = 0; i < r.rows.size(); ++i) EXPECT_LT(it_pcg[i], it_cg[i]);
  ASSERT_FALSE(r.metadata.empty());
  EXPECT_EQ(r.metadata[0].rfind("growth_exponent_cg = ", 0), 0u);
}

TEST(SingleRun, PerStepDiagnostics) {
  const auto c = parse_config("study = single\nn = 2\ndt = 0.01\nT = 0.05\n");
  const auto r = run_single(c);
  EXPECT_EQ(r.rows.size(), 5u);
  const std::string text = csv(r);
  EXPECT_NE(text.find("# final_eta_l2 = "), std::string::npos);
  EXPECT_NE(text.find("step,time,schur_iterations,schur_residual,constraint_residual,status"), std::string::npos);
}

TEST(SpaceStudy, FailedRowIsFlaggedAndStudyContinues) {
  auto c = parse_config("meshes = [2, 4]\ndt = 1e-3\nT = 2e-3\n");
  c.max_iter = 1;
  c.rel_tol = 1e-14;
  c.solver = SchurSolver::cg;
  const auto r = run_space_study(c);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_FALSE(r.rows[0].ok);
  EXPECT_NE(r.rows[0].message.find("no-convergence"), std::string::npos);
  EXPECT_NE(csv(r).find(",failed\n"), std::string::npos);
}
