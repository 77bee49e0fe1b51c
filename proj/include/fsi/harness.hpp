#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fsi/conditioning.hpp"
#include "fsi/coupling.hpp"
#include "fsi/manufactured.hpp"

namespace fsi {

enum class StudyKind { space, time, conditioning, single };

std::string_view to_string(StudyKind kind);
/// Throws InvalidArgument for an unknown name.
StudyKind study_kind_from_string(std::string_view name);
SchurSolver schur_solver_from_string(std::string_view name);
std::string_view to_string(SchurSolver solver);
std::string_view to_string(ExactVariant variant);

/// Everything that determines a run. Key names in the text format match the
/// member names (`T` for final_time, `lambda` for constants.lambda).
struct StudyConfig {
  StudyKind study = StudyKind::space;
  std::vector<int> meshes{2, 4, 8, 16, 32};
  double dt = 1e-5;
  std::vector<double> dt_list{0.25, 0.125, 0.0625, 0.03125, 0.015625, 0.0078125};
  int n = 32;  // mesh for time and single runs and the conditioning dt sweep
  double final_time = 1e-3;
  PhysicalConstants constants{};
  int lm_coarsening = 1;
  SchurSolver solver = SchurSolver::pcg;
  double rel_tol = 1e-10;
  int max_iter = 0;
  std::vector<BoundaryTag> fluid_neumann{BoundaryTag::left, BoundaryTag::right};
  std::vector<BoundaryTag> solid_neumann{};
  ExactVariant exact_variant = ExactVariant::corrected;
  int quadrature_order = kDefaultVolumeOrder;
  SpectrumMode cond_mode = SpectrumMode::automatic;
  std::string output;  // empty: standard output
};

/// Flat `key = value` lines, `#` comments, lists as `[a, b, c]`. Numbers
/// may be written as fractions (`1/128`). Missing keys take the defaults.
/// A given `study` overrides the document's study key. The step-count
/// invariant is checked for the steps the study uses (dt for space and
/// single runs, dt_list for time studies). Throws ParseError naming the
/// offending key.
StudyConfig parse_config(std::string_view text, std::optional<StudyKind> study = std::nullopt);
/// Throws ParseError when a config built in code violates an invariant.
void validate_config(const StudyConfig& config);
/// Canonical text form; parse_config(config_text(c)) reproduces c exactly.
std::string config_text(const StudyConfig& config);
/// Recovers the config text from the `# config` lines of a written report.
std::string extract_config_echo(std::string_view report_csv);

struct ReportRow {
  std::vector<std::optional<double>> values;  // one per column, empty cell when absent
  bool ok = true;
  std::string message;  // failure description
  double seconds = 0.0;
};

struct StudyReport {
  StudyKind kind = StudyKind::space;
  StudyConfig config;
  std::vector<std::string> columns;
  std::vector<ReportRow> rows;
  /// Extra `key = value` lines (fitted exponents, final errors).
  std::vector<std::string> metadata;

  /// Index of a column; throws InvalidArgument when absent.
  int column(std::string_view name) const;
  std::vector<double> values(std::string_view name) const;
};

/// Error and rate columns shared by the space and time studies.
inline constexpr const char* kErrorFields[] = {"eta_l2", "eta_h1", "u_l2", "u_h1", "p_l2", "g_l2"};

StudyReport run_space_study(const StudyConfig& config);
StudyReport run_time_study(const StudyConfig& config);
StudyReport run_conditioning_study(const StudyConfig& config);
StudyReport run_single(const StudyConfig& config);
/// Dispatches on config.study.
StudyReport run_study(const StudyConfig& config);

/// Header row, `#` metadata (config echo first), then one line per row.
/// Numbers use 17 significant digits; timings are not written.
void write_report_csv(const StudyReport& report, std::ostream& out);

}  // namespace fsi
