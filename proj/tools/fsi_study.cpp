// Batch driver for the convergence and conditioning studies.
//
//   fsi_study space --config study.cfg --out space.csv
//   fsi_study conditioning --solver cg
//
// Config keys (flat `key = value`, lists as [a, b]):
//   meshes, dt, dt_list, n, T, rho_f, rho_s, nu_f, nu_s, lambda,
//   lm_coarsening, solver, rel_tol, max_iter, fluid_neumann, solid_neumann,
//   exact_variant, quadrature_order, cond_mode, output
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fsi/error.hpp"
#include "fsi/harness.hpp"

namespace {

const char* kKeyHelp =
    "Config keys:\n"
    "  meshes = [2, 4, 8, 16, 32]   mesh sizes n (dx = 1/n) for space/conditioning\n"
    "  dt = 1e-5                    step for space/single and the conditioning mesh sweep\n"
    "  dt_list = [1/4, ..., 1/128]  steps for time and the conditioning dt sweep\n"
    "  n = 32                       mesh for time/single and the conditioning dt sweep\n"
    "  T = 1e-3                     final time (T/dt must be an integer)\n"
    "  rho_f rho_s nu_f nu_s lambda physical constants (default 1)\n"
    "  lm_coarsening = 1            multiplier grid coarsening factor\n"
    "  solver = pcg                 cg | pcg | direct\n"
    "  rel_tol = 1e-10  max_iter = 0\n"
    "  fluid_neumann = [left, right]  solid_neumann = []\n"
    "  exact_variant = corrected    corrected | printed\n"
    "  quadrature_order = 5  cond_mode = auto (auto | dense | lanczos)\n"
    "  output = <path>\n";

std::string quote(const std::string& s) {
  std::string out;
  for (char ch : s) out += (ch == '"' || ch == '\\') ? std::string("\\") + ch : std::string(1, ch);
  return out;
}

int fail(const std::string& kind, const std::string& message, const std::string& key = {}) {
  std::cerr << "error: kind=" << kind;
  if (!key.empty()) std::cerr << " key=" << key;
  std::cerr << " message=\"" << quote(message) << "\"\n";
  return kind == "parse" || kind == "usage" ? 2 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partitioned FSI convergence and conditioning studies"};
  app.footer(kKeyHelp);
  app.require_subcommand(1);
  std::string config_path, out_path, solver;
  app.add_option("--config", config_path, "Config file (key = value)")->check(CLI::ExistingFile);
  app.add_option("--out", out_path, "Output CSV (default: config 'output' or stdout)");
  app.add_option("--solver", solver, "Override the Schur solver")->check(CLI::IsMember({"cg", "pcg", "direct"}));
  for (const char* name : {"space", "time", "conditioning", "single"}) app.add_subcommand(name)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what());
  }

  try {
    std::string text;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      std::ostringstream buf;
      buf << in.rdbuf();
      text = buf.str();
    }
    const std::string study = app.get_subcommands().front()->get_name();
    fsi::StudyConfig config = fsi::parse_config(text, fsi::study_kind_from_string(study));
    if (!solver.empty()) config.solver = fsi::schur_solver_from_string(solver);
    const fsi::StudyReport report = fsi::run_study(config);
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
      std::fprintf(stderr, "row %zu: %.2f s%s\n", i + 1, report.rows[i].seconds, report.rows[i].ok ? "" : " (failed)");
    }

    const std::string path = !out_path.empty() ? out_path : config.output;
    if (path.empty()) {
      fsi::write_report_csv(report, std::cout);
    } else {
      std::ofstream out(path);
      if (!out) return fail("io", "cannot open " + path);
      fsi::write_report_csv(report, out);
    }
    for (const auto& row : report.rows) {
      if (!row.ok) return fail("row-failed", row.message);
    }
    return 0;
  } catch (const fsi::ParseError& e) {
    return fail("parse", e.what(), e.key());
  } catch (const fsi::Error& e) {
    return fail(e.kind(), e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
}
