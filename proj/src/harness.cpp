#include "fsi/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "fsi/error.hpp"

namespace fsi {

std::string_view to_string(StudyKind kind) {
  switch (kind) {
    case StudyKind::space: return "space";
    case StudyKind::time: return "time";
    case StudyKind::conditioning: return "conditioning";
    case StudyKind::single: return "single";
  }
  return "?";
}

StudyKind study_kind_from_string(std::string_view name) {
  for (StudyKind k : {StudyKind::space, StudyKind::time, StudyKind::conditioning, StudyKind::single}) {
    if (to_string(k) == name) return k;
  }
  throw InvalidArgument("unknown study '" + std::string(name) + "'");
}

SchurSolver schur_solver_from_string(std::string_view name) {
  for (SchurSolver s : {SchurSolver::cg, SchurSolver::pcg, SchurSolver::direct}) {
    if (to_string(s) == name) return s;
  }
  throw InvalidArgument("unknown solver '" + std::string(name) + "'");
}

std::string_view to_string(SchurSolver solver) {
  switch (solver) {
    case SchurSolver::cg: return "cg";
    case SchurSolver::pcg: return "pcg";
    case SchurSolver::direct: return "direct";
  }
  return "?";
}

std::string_view to_string(ExactVariant variant) {
  return variant == ExactVariant::corrected ? "corrected" : "printed";
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_number(const std::string& key, std::string_view s) {
  s = trim(s);
  const auto slash = s.find('/');
  if (slash != std::string_view::npos) {
    const double num = parse_number(key, s.substr(0, slash));
    const double den = parse_number(key, s.substr(slash + 1));
    if (den == 0.0) throw ParseError(key, "division by zero in '" + std::string(s) + "'");
    return num / den;
  }
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw ParseError(key, "expected a number, got '" + std::string(s) + "'");
  }
  return v;
}

int parse_int(const std::string& key, std::string_view s) {
  s = trim(s);
  int v = 0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end) {
    throw ParseError(key, "expected an integer, got '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> parse_list(const std::string& key, std::string_view s) {
  s = trim(s);
  if (s.size() < 2 || s.front() != '[' || s.back() != ']') throw ParseError(key, "expected a list [a, b, ...]");
  s = trim(s.substr(1, s.size() - 2));
  std::vector<std::string_view> items;
  if (s.empty()) return items;
  while (true) {
    const auto comma = s.find(',');
    items.push_back(trim(s.substr(0, comma)));
    if (items.back().empty()) throw ParseError(key, "empty list element");
    if (comma == std::string_view::npos) break;
    s = s.substr(comma + 1);
  }
  return items;
}

template <class E>
E parse_choice(const std::string& key, std::string_view s, std::initializer_list<std::pair<const char*, E>> choices) {
  s = trim(s);
  std::string names;
  for (const auto& [name, value] : choices) {
    if (s == name) return value;
    names += names.empty() ? name : std::string("|") + name;
  }
  throw ParseError(key, "expected one of " + names + ", got '" + std::string(s) + "'");
}

std::vector<BoundaryTag> parse_tags(const std::string& key, std::string_view s) {
  std::vector<BoundaryTag> tags;
  for (auto item : parse_list(key, s)) {
    BoundaryTag tag;
    try {
      tag = boundary_tag_from_string(item);
    } catch (const Error&) {
      throw ParseError(key, "unknown boundary side '" + std::string(item) + "'");
    }
    if (tag == BoundaryTag::interface) throw ParseError(key, "the interface cannot carry Neumann data");
    if (std::find(tags.begin(), tags.end(), tag) != tags.end()) throw ParseError(key, "duplicate side");
    tags.push_back(tag);
  }
  return tags;
}

std::string tags_text(const std::vector<BoundaryTag>& tags) {
  std::string s = "[";
  for (std::size_t i = 0; i < tags.size(); ++i) s += (i ? ", " : "") + std::string(to_string(tags[i]));
  return s + "]";
}

void check_steps(const std::string& key, double dt, double final_time) {
  if (!(dt > 0.0)) throw ParseError(key, "time step must be positive");
  const double steps = final_time / dt;
  if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps) || std::round(steps) < 1) {
    throw ParseError(key, "T / dt = " + fmt(steps) + " is not a positive integer");
  }
}

}  // namespace

void validate_config(const StudyConfig& c) {
  const PhysicalConstants& k = c.constants;
  for (auto [key, v] : {std::pair{"rho_f", k.rho_f}, {"rho_s", k.rho_s}, {"nu_f", k.nu_f}, {"nu_s", k.nu_s}}) {
    if (!(v > 0.0)) throw ParseError(key, "must be positive");
  }
  if (!(k.lambda >= 0.0)) throw ParseError("lambda", "must be non-negative");
  if (!(c.final_time > 0.0)) throw ParseError("T", "must be positive");
  if (c.dt_list.empty()) throw ParseError("dt_list", "must not be empty");
  if (c.study == StudyKind::space || c.study == StudyKind::single) check_steps("dt", c.dt, c.final_time);
  if (c.study == StudyKind::time) {
    for (double dt : c.dt_list) check_steps("dt_list", dt, c.final_time);
  }
  if (c.study == StudyKind::conditioning) {
    if (!(c.dt > 0.0)) throw ParseError("dt", "time step must be positive");
    for (double dt : c.dt_list) {
      if (!(dt > 0.0)) throw ParseError("dt_list", "time steps must be positive");
    }
  }
  if (c.meshes.empty()) throw ParseError("meshes", "must not be empty");
  if (c.lm_coarsening < 1) throw ParseError("lm_coarsening", "must be at least 1");
  for (int m : c.meshes) {
    if (m < 1) throw ParseError("meshes", "mesh sizes must be positive");
    if (m % c.lm_coarsening != 0) throw ParseError("lm_coarsening", "must divide every mesh size");
  }
  if (c.n < 1) throw ParseError("n", "must be positive");
  if (c.n % c.lm_coarsening != 0) throw ParseError("lm_coarsening", "must divide n");
  if (!(c.rel_tol > 0.0)) throw ParseError("rel_tol", "must be positive");
  if (c.max_iter < 0) throw ParseError("max_iter", "must be non-negative");
  if (c.quadrature_order < 1 || c.quadrature_order > kMaxQuadratureOrder) {
    throw ParseError("quadrature_order", "must be in 1.." + std::to_string(kMaxQuadratureOrder));
  }
}

StudyConfig parse_config(std::string_view text, std::optional<StudyKind> study) {
  StudyConfig c;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("", "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw ParseError(key, "duplicate key");

    if (key == "study") {
      c.study = parse_choice<StudyKind>(key, value, {{"space", StudyKind::space}, {"time", StudyKind::time},
                                                     {"conditioning", StudyKind::conditioning},
                                                     {"single", StudyKind::single}});
    } else if (key == "meshes") {
      c.meshes.clear();
      for (auto item : parse_list(key, value)) c.meshes.push_back(parse_int(key, item));
    } else if (key == "dt") {
      c.dt = parse_number(key, value);
    } else if (key == "dt_list") {
      c.dt_list.clear();
      for (auto item : parse_list(key, value)) c.dt_list.push_back(parse_number(key, item));
    } else if (key == "n") {
      c.n = parse_int(key, value);
    } else if (key == "T") {
      c.final_time = parse_number(key, value);
    } else if (key == "rho_f") {
      c.constants.rho_f = parse_number(key, value);
    } else if (key == "rho_s") {
      c.constants.rho_s = parse_number(key, value);
    } else if (key == "nu_f") {
      c.constants.nu_f = parse_number(key, value);
    } else if (key == "nu_s") {
      c.constants.nu_s = parse_number(key, value);
    } else if (key == "lambda") {
      c.constants.lambda = parse_number(key, value);
    } else if (key == "lm_coarsening") {
      c.lm_coarsening = parse_int(key, value);
    } else if (key == "solver") {
      c.solver = parse_choice<SchurSolver>(
          key, value, {{"cg", SchurSolver::cg}, {"pcg", SchurSolver::pcg}, {"direct", SchurSolver::direct}});
    } else if (key == "rel_tol") {
      c.rel_tol = parse_number(key, value);
    } else if (key == "max_iter") {
      c.max_iter = parse_int(key, value);
    } else if (key == "fluid_neumann") {
      c.fluid_neumann = parse_tags(key, value);
    } else if (key == "solid_neumann") {
      c.solid_neumann = parse_tags(key, value);
    } else if (key == "exact_variant") {
      c.exact_variant = parse_choice<ExactVariant>(
          key, value, {{"corrected", ExactVariant::corrected}, {"printed", ExactVariant::printed}});
    } else if (key == "quadrature_order") {
      c.quadrature_order = parse_int(key, value);
    } else if (key == "cond_mode") {
      c.cond_mode = parse_choice<SpectrumMode>(
          key, value,
          {{"auto", SpectrumMode::automatic}, {"dense", SpectrumMode::dense}, {"lanczos", SpectrumMode::lanczos}});
    } else if (key == "output") {
      c.output = std::string(value);
    } else {
      throw ParseError(key, "unknown key");
    }
  }
  if (study) c.study = *study;
  validate_config(c);
  return c;
}

std::string config_text(const StudyConfig& c) {
  std::ostringstream out;
  auto list = [](const auto& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(static_cast<double>(v[i]));
    return s + "]";
  };
  out << "study = " << to_string(c.study) << '\n'
      << "meshes = " << list(c.meshes) << '\n'
      << "dt = " << fmt(c.dt) << '\n'
      << "dt_list = " << list(c.dt_list) << '\n'
      << "n = " << c.n << '\n'
      << "T = " << fmt(c.final_time) << '\n'
      << "rho_f = " << fmt(c.constants.rho_f) << '\n'
      << "rho_s = " << fmt(c.constants.rho_s) << '\n'
      << "nu_f = " << fmt(c.constants.nu_f) << '\n'
      << "nu_s = " << fmt(c.constants.nu_s) << '\n'
      << "lambda = " << fmt(c.constants.lambda) << '\n'
      << "lm_coarsening = " << c.lm_coarsening << '\n'
      << "solver = " << to_string(c.solver) << '\n'
      << "rel_tol = " << fmt(c.rel_tol) << '\n'
      << "max_iter = " << c.max_iter << '\n'
      << "fluid_neumann = " << tags_text(c.fluid_neumann) << '\n'
      << "solid_neumann = " << tags_text(c.solid_neumann) << '\n'
      << "exact_variant = " << to_string(c.exact_variant) << '\n'
      << "quadrature_order = " << c.quadrature_order << '\n'
      << "cond_mode = " << to_string(c.cond_mode) << '\n';
  if (!c.output.empty()) out << "output = " << c.output << '\n';
  return out.str();
}

std::string extract_config_echo(std::string_view report_csv) {
  constexpr std::string_view prefix = "# config ";
  std::string text;
  std::istringstream in{std::string(report_csv)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(prefix, 0) == 0) text += line.substr(prefix.size()) + '\n';
  }
  return text;
}

int StudyReport::column(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return static_cast<int>(i);
  }
  throw InvalidArgument("report has no column '" + std::string(name) + "'");
}

std::vector<double> StudyReport::values(std::string_view name) const {
  const int c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.values[c].value_or(std::nan("")));
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

BoundaryLayout layout_of(const StudyConfig& c) {
  BoundaryLayout layout;
  layout.fluid_neumann = c.fluid_neumann;
  layout.solid_neumann = c.solid_neumann;
  return layout;
}

AdvanceOptions advance_options(const StudyConfig& c) {
  AdvanceOptions o;
  o.solver = c.solver;
  o.krylov.rel_tol = c.rel_tol;
  o.krylov.max_iter = c.max_iter;
  return o;
}

struct RunOutcome {
  ErrorNorms errors;
  int max_iterations = 0;
  double max_constraint = 0.0;
  std::vector<StepDiagnostics> steps;
};

RunOutcome run_manufactured(const StudyConfig& c, int n, double dt) {
  const ExactSolution exact(c.constants, c.exact_variant);
  auto blocks = build_unit_blocks(n, c.constants, c.lm_coarsening, layout_of(c), c.quadrature_order);
  SystemOptions sys_options;
  sys_options.build_preconditioner = c.solver == SchurSolver::pcg;
  sys_options.build_dense_schur = c.solver == SchurSolver::direct;
  const FsiSystem sys(blocks, dt, sys_options);
  TransientResult result =
      run_transient(sys, initial_state(sys.dofs(), exact, 0.0), c.final_time, manufactured_problem(exact),
                    advance_options(c));
  RunOutcome out;
  const TimeState& s = result.state;
  out.errors = compute_error_norms(sys.dofs(), s.u, s.p, s.eta, s.g, exact, s.time);
  for (const auto& d : result.steps) {
    out.max_iterations = std::max(out.max_iterations, d.schur_iterations);
    out.max_constraint = std::max(out.max_constraint, d.constraint_residual);
  }
  out.steps = std::move(result.steps);
  return out;
}

std::string failure_text(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) return "kind=" + err->kind() + " message=\"" + e.what() + "\"";
  return std::string("kind=internal message=\"") + e.what() + "\"";
}

double field_of(const ErrorNorms& e, std::string_view name) {
  if (name == "eta_l2") return e.eta_l2;
  if (name == "eta_h1") return e.eta_h1;
  if (name == "u_l2") return e.u_l2;
  if (name == "u_h1") return e.u_h1;
  if (name == "p_l2") return e.p_l2;
  return e.g_l2;
}

/// Rows of a convergence study; `params` is the refined quantity (dx or dt).
StudyReport convergence_study(const StudyConfig& c, StudyKind kind) {
  StudyReport report;
  report.kind = kind;
  report.config = c;
  const bool space = kind == StudyKind::space;
  report.columns = {space ? "dx" : "dt", space ? "dt" : "dx"};
  for (const char* f : kErrorFields) {
    report.columns.push_back(f);
    report.columns.push_back(std::string("rate_") + f);
  }
  report.columns.push_back("max_schur_iterations");
  report.columns.push_back("max_constraint_residual");

  const std::size_t count = space ? c.meshes.size() : c.dt_list.size();
  for (std::size_t i = 0; i < count; ++i) {
    const int n = space ? c.meshes[i] : c.n;
    const double dt = space ? c.dt : c.dt_list[i];
    ReportRow row;
    row.values.assign(report.columns.size(), std::nullopt);
    row.values[0] = space ? 1.0 / n : dt;
    row.values[1] = space ? dt : 1.0 / n;
    const auto t0 = Clock::now();
    try {
      const RunOutcome run = run_manufactured(c, n, dt);
      for (std::size_t f = 0; f < std::size(kErrorFields); ++f) row.values[2 + 2 * f] = field_of(run.errors, kErrorFields[f]);
      row.values[report.columns.size() - 2] = run.max_iterations;
      row.values[report.columns.size() - 1] = run.max_constraint;
    } catch (const std::exception& e) {
      row.ok = false;
      row.message = failure_text(e);
    }
    row.seconds = seconds_since(t0);
    report.rows.push_back(std::move(row));
  }

  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    auto& prev = report.rows[i - 1];
    auto& cur = report.rows[i];
    if (!prev.ok || !cur.ok) continue;
    const double params[2] = {*prev.values[0], *cur.values[0]};
    for (std::size_t f = 0; f < std::size(kErrorFields); ++f) {
      const int col = static_cast<int>(2 + 2 * f);
      const double errors[2] = {*prev.values[col], *cur.values[col]};
      try {
        cur.values[col + 1] = convergence_rate(errors, params)[0];
      } catch (const InvalidArgument&) {
        // non-monotone parameters: leave the rate empty
      }
    }
  }
  return report;
}

}  // namespace

StudyReport run_space_study(const StudyConfig& config) { return convergence_study(config, StudyKind::space); }

StudyReport run_time_study(const StudyConfig& config) { return convergence_study(config, StudyKind::time); }

StudyReport run_conditioning_study(const StudyConfig& c) {
  StudyReport report;
  report.kind = StudyKind::conditioning;
  report.config = c;
  report.columns = {"dx", "dt", "cond_cg", "cond_pcg", "iters_cg", "iters_pcg"};
  KrylovOptions krylov;
  krylov.rel_tol = c.rel_tol;
  krylov.max_iter = c.max_iter;

  auto add = [&](int n, double dt) {
    ReportRow row;
    row.values.assign(report.columns.size(), std::nullopt);
    row.values[0] = 1.0 / n;
    row.values[1] = dt;
    const auto t0 = Clock::now();
    try {
      const ConditionRow r = condition_row(n, dt, c.constants, c.exact_variant, c.cond_mode, krylov, c.lm_coarsening);
      row.values[2] = r.cg.kappa;
      row.values[3] = r.pcg.kappa;
      row.values[4] = r.iters_cg;
      row.values[5] = r.iters_pcg;
      if (!r.cg.converged || !r.pcg.converged) row.message = "spectrum estimate not converged";
    } catch (const std::exception& e) {
      row.ok = false;
      row.message = failure_text(e);
    }
    row.seconds = seconds_since(t0);
    report.rows.push_back(std::move(row));
  };
  for (int n : c.meshes) add(n, c.dt);
  for (double dt : c.dt_list) add(c.n, dt);

  std::vector<double> h, kappa;
  for (std::size_t i = 0; i < c.meshes.size(); ++i) {
    const auto& row = report.rows[i];
    if (row.ok) {
      h.push_back(*row.values[0]);
      kappa.push_back(*row.values[2]);
    }
  }
  if (h.size() >= 2) {
    report.metadata.push_back("growth_exponent_cg = " + fmt(growth_exponent(h, kappa)));
  }
  return report;
}

StudyReport run_single(const StudyConfig& c) {
  StudyReport report;
  report.kind = StudyKind::single;
  report.config = c;
  report.columns = {"step", "time", "schur_iterations", "schur_residual", "constraint_residual"};
  const auto t0 = Clock::now();
  const RunOutcome run = run_manufactured(c, c.n, c.dt);
  for (const auto& d : run.steps) {
    ReportRow row;
    row.values = {d.step, d.time, d.schur_iterations, d.schur_residual, d.constraint_residual};
    report.rows.push_back(std::move(row));
  }
  if (!report.rows.empty()) report.rows.back().seconds = seconds_since(t0);
  for (const char* f : kErrorFields) report.metadata.push_back(std::string("final_") + f + " = " + fmt(field_of(run.errors, f)));
  return report;
}

StudyReport run_study(const StudyConfig& config) {
  switch (config.study) {
    case StudyKind::space: return run_space_study(config);
    case StudyKind::time: return run_time_study(config);
    case StudyKind::conditioning: return run_conditioning_study(config);
    case StudyKind::single: return run_single(config);
  }
  throw InvalidArgument("unknown study kind");
}

void write_report_csv(const StudyReport& report, std::ostream& out) {
  out << "# fsi_study " << to_string(report.kind) << '\n';
  std::istringstream echo(config_text(report.config));
  std::string line;
  while (std::getline(echo, line)) out << "# config " << line << '\n';
  for (const auto& m : report.metadata) out << "# " << m << '\n';
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& r = report.rows[i];
    if (!r.message.empty()) out << "# row " << i + 1 << (r.ok ? " warning: " : " failed: ") << r.message << '\n';
  }
  for (std::size_t i = 0; i < report.columns.size(); ++i) out << (i ? "," : "") << report.columns[i];
  out << ",status\n";
  for (const auto& r : report.rows) {
    for (std::size_t i = 0; i < r.values.size(); ++i) {
      if (i) out << ',';
      if (r.values[i]) out << fmt(*r.values[i]);
    }
    out << ',' << (r.ok ? "ok" : "failed") << '\n';
  }
}

}  // namespace fsi
