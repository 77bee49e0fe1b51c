// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fsi/conditioning.hpp"
#include "fsi/coupling.hpp"
#include "fsi/harness.hpp"
#include "fsi/manufactured.hpp"
#include "oracle/dense_oracle.hpp"
#include "oracle/fd_oracle.hpp"

using namespace fsi;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

bool in_range(double v, double lo, double hi) { return v >= lo && v <= hi; }

// Reference errors at dt = 1e-5, T = 1e-3, rows dx = 1/2 ... 1/32.
const std::vector<std::pair<const char*, std::vector<double>>> kReferenceErrors = {
    {"eta_l2", {1.936e-03, 2.421e-04, 3.026e-05, 3.783e-06, 4.729e-07}},
    {"eta_h1", {2.967e-02, 7.417e-03, 1.854e-03, 4.635e-04, 1.159e-04}},
    {"u_l2", {2.538e-03, 3.203e-04, 4.072e-05, 5.162e-06, 6.548e-07}},
    {"u_h1", {3.822e-02, 9.674e-03, 2.462e-03, 6.204e-04, 1.555e-04}},
    {"p_l2", {2.266e-02, 3.848e-03, 8.141e-04, 1.969e-04, 4.883e-05}},
};

// Reference CG/PCG iteration counts at dt = 1e-5, dx = 1/2 ... 1/32.
const std::vector<int> kReferenceCgIters = {15, 25, 39, 79, 150};
const std::vector<int> kReferencePcgIters = {6, 9, 13, 19, 26};

StudyReport space_report;  // shared by criteria 1 and 4

Outcome spatial_convergence() {
  StudyConfig c;
  c.study = StudyKind::space;
  c.meshes = {2, 4, 8, 16, 32};
  c.dt = 1e-5;
  c.final_time = 1e-3;
  const auto t0 = Clock::now();
  space_report = run_space_study(c);
  const double seconds = std::chrono::duration<double>(Clock::now() - t0).count();

  Outcome o;
  std::ostringstream d;
  for (const auto& row : space_report.rows) {
    if (!row.ok) {
      o.pass = false;
      d << " row failed: " << row.message << ';';
    }
  }
  const int last = static_cast<int>(space_report.rows.size()) - 1;
  auto check_rate = [&](const char* field, double lo, double hi) {
    const auto rates = space_report.values(std::string("rate_") + field);
    d << ' ' << field << " rates";
    for (int i = last - 1; i <= last; ++i) {
      d << ' ' << fmt("%.2f", rates[i]);
      if (!in_range(rates[i], lo, hi)) o.pass = false;
    }
    d << ';';
  };
  check_rate("eta_l2", 2.7, 3.2);
  check_rate("u_l2", 2.7, 3.2);
  check_rate("eta_h1", 1.8, 2.2);
  check_rate("u_h1", 1.8, 2.2);
  check_rate("p_l2", 1.8, 2.4);
  double worst = 1.0;
  for (const auto& [field, ref] : kReferenceErrors) {
    const auto errors = space_report.values(field);
    for (std::size_t i = 0; i < ref.size(); ++i) {
      const double ratio = std::max(errors[i] / ref[i], ref[i] / errors[i]);
      worst = std::max(worst, ratio);
    }
  }
  if (!(worst <= 3.0)) o.pass = false;
  if (seconds > 300.0) o.pass = false;
  d << " worst ratio to reference " << fmt("%.2f", worst) << "; " << fmt("%.1f", seconds) << " s";
  o.detail = d.str();
  return o;
}

Outcome temporal_convergence() {
  StudyConfig c;
  c.study = StudyKind::time;
  c.n = 32;
  c.final_time = 1.0;
  c.dt_list = {1.0 / 4, 1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128};
  const auto t0 = Clock::now();
  const StudyReport r = run_time_study(c);
  const double seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  Outcome o;
  std::ostringstream d;
  for (const auto& row : r.rows) {
    if (!row.ok) {
      o.pass = false;
      d << " row failed: " << row.message << ';';
    }
  }
  const int last = static_cast<int>(r.rows.size()) - 1;
  for (const char* field : {"eta_l2", "eta_h1", "u_l2", "u_h1", "p_l2"}) {
    const auto rates = r.values(std::string("rate_") + field);
    d << ' ' << field;
    for (int i = last - 1; i <= last; ++i) {
      d << ' ' << fmt("%.3f", rates[i]);
      if (!in_range(rates[i], 0.85, 1.05)) o.pass = false;
    }
    d << ';';
  }
  if (seconds > 600.0) o.pass = false;
  d << ' ' << fmt("%.1f", seconds) << " s";
  o.detail = d.str();
  return o;
}

double rel_diff(const Vector& a, const Vector& b) {
  const double scale = std::max(b.norm(), 1e-300);
  return (a - b).norm() / scale;
}

Outcome partitioned_vs_monolithic() {
  Outcome o;
  double worst = 0.0;
  const ExactSolution exact;
  const ProblemData data = manufactured_problem(exact);
  AdvanceOptions options;
  options.krylov.rel_tol = 1e-13;
  for (int n : {2, 4}) {
    const FsiSystem sys(build_unit_blocks(n), 1e-3);
    TimeState part = initial_state(sys.dofs(), exact, 0.0);
    TimeState mono = part;
    for (int step = 0; step < 10; ++step) {
      part = advance(sys, part, data, options);
      mono = monolithic_solve(sys, mono, data);
      for (double e : {rel_diff(part.u, mono.u), rel_diff(part.eta, mono.eta), rel_diff(part.p, mono.p),
                       rel_diff(part.g, mono.g)}) {
        worst = std::max(worst, e);
      }
    }
  }
  o.pass = worst <= 1e-8;
  o.detail = " worst relative difference " + fmt("%.2e", worst);
  return o;
}

Outcome multiplier_accuracy() {
  Outcome o;
  const auto g = space_report.values("g_l2");
  std::ostringstream d;
  d << " g errors";
  for (std::size_t i = 0; i < g.size(); ++i) {
    d << ' ' << fmt("%.3e", g[i]);
    if (i > 0 && !(g[i] < g[i - 1])) o.pass = false;
  }
  if (g.size() < 4) o.pass = false;
  o.detail = d.str();
  return o;
}

Outcome schur_properties() {
  Outcome o;
  std::mt19937_64 rng(20240611);
  std::normal_distribution<double> normal;
  double worst_sym = 0.0, min_energy = std::numeric_limits<double>::infinity();
  for (double dt : {1e-5, 0.25}) {
    for (int n : {2, 4, 8, 16}) {
      const FsiSystem sys(build_unit_blocks(n), dt, {false, false});
      const LinearOperator s = schur_operator(sys);
      const double norm_est = extremal_eigs(s, SpectrumMode::lanczos).lambda_max;
      for (int probe = 0; probe < 100; ++probe) {
        Vector z1(sys.n_z()), z2(sys.n_z());
        for (int i = 0; i < sys.n_z(); ++i) {
          z1[i] = normal(rng);
          z2[i] = normal(rng);
        }
        const Vector s1 = s(z1), s2 = s(z2);
        const double sym = std::abs(z2.dot(s1) - z1.dot(s2)) / (z1.norm() * z2.norm() * norm_est);
        worst_sym = std::max(worst_sym, sym);
        const double energy = z1.dot(s1) / z1.squaredNorm();
        min_energy = std::min(min_energy, energy);
        if (!(sym <= 1e-10) || !(energy > 0.0)) o.pass = false;
      }
    }
  }
  o.detail = " worst symmetry defect " + fmt("%.2e", worst_sym) + ", min Rayleigh quotient " + fmt("%.3e", min_energy);
  return o;
}

Outcome conditioning_trends(std::string& info) {
  StudyConfig c;
  c.study = StudyKind::conditioning;
  c.meshes = {2, 4, 8, 16, 32};
  c.dt = 1e-5;
  c.n = 32;
  c.dt_list = {1.0 / 4, 1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128};
  const StudyReport r = run_conditioning_study(c);
  Outcome o;
  std::ostringstream d;
  for (const auto& row : r.rows) {
    if (!row.ok) {
      o.pass = false;
      d << " row failed: " << row.message << ';';
    }
  }
  const auto it_cg = r.values("iters_cg");
  const auto it_pcg = r.values("iters_pcg");
  const auto k_cg = r.values("cond_cg");
  const std::size_t m = c.meshes.size();

  bool a = true, b = true;
  for (std::size_t i = 0; i < m; ++i) {
    a = a && it_pcg[i] < it_cg[i];
    if (i > 0) b = b && it_cg[i] > it_cg[i - 1];
  }
  std::vector<double> h, kappa;
  for (std::size_t i = 0; i < m; ++i) {
    h.push_back(1.0 / c.meshes[i]);
    kappa.push_back(k_cg[i]);
  }
  const double exponent = growth_exponent(h, kappa);
  const bool cexp = in_range(exponent, 1.5, 3.0);
  bool dtrend = true;
  for (std::size_t i = m + 1; i < r.rows.size(); ++i) dtrend = dtrend && k_cg[i] < k_cg[i - 1];
  o.pass = o.pass && a && b && cexp && dtrend;

  d << " (a) " << (a ? "ok" : "violated") << " (b) " << (b ? "ok" : "violated") << " (c) exponent "
    << fmt("%.3f", exponent) << " (d) " << (dtrend ? "ok" : "violated") << "; cg iters";
  for (std::size_t i = 0; i < m; ++i) d << ' ' << it_cg[i];
  d << "; pcg iters";
  for (std::size_t i = 0; i < m; ++i) d << ' ' << it_pcg[i];
  d << "; dt-sweep cond_cg";
  for (std::size_t i = m; i < r.rows.size(); ++i) d << ' ' << fmt("%.1f", k_cg[i]);
  o.detail = d.str();

  int within = 0;
  for (std::size_t i = 0; i < m; ++i) {
    auto close = [](double v, double ref) { return v <= 2.0 * ref && v >= 0.5 * ref; };
    within += close(it_cg[i], kReferenceCgIters[i]) + close(it_pcg[i], kReferencePcgIters[i]);
  }
  info = std::to_string(within) + " of " + std::to_string(2 * m) + " iteration counts within x2 of the reference counts";
  return o;
}

Outcome assembly_oracle() {
  Outcome o;
  double worst_block = 0.0, worst_fd = 0.0;
  PhysicalConstants k;
  k.rho_f = 1.3;
  k.rho_s = 0.7;
  k.nu_f = 0.9;
  k.nu_s = 1.6;
  k.lambda = 2.2;
  for (int n : {1, 2}) {
    const auto blocks = build_unit_blocks(n, k);
    worst_block = std::max(worst_block, oracle::max_block_difference(*blocks, oracle::assemble_dense(blocks->dofs, k)));
  }
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (ExactVariant variant : {ExactVariant::corrected, ExactVariant::printed}) {
    const ExactSolution exact(k, variant);
    const ProblemData data = manufactured_problem(exact);
    for (int i = 0; i < 100; ++i) {
      const double x = unit(rng), yf = unit(rng), ys = 1.0 + unit(rng), t = unit(rng);
      const auto ff = oracle::finite_difference_forcing(k, variant, x, yf, t);
      const auto fs = oracle::finite_difference_forcing(k, variant, x, ys, t);
      const auto fg = oracle::finite_difference_forcing(k, variant, x, 1.0, t);
      const Vec2 n_side(unit(rng) < 0.5 ? -1.0 : 1.0, 0.0);
      auto err = [&](const Vec2& a, const Vec2& b) { worst_fd = std::max(worst_fd, (a - b).cwiseAbs().maxCoeff()); };
      err(exact.fluid_force(Point(x, yf), t), ff.fluid_force);
      err(data.fluid_force(Point(x, yf), t), ff.fluid_force);
      err(exact.solid_force(Point(x, ys), t), fs.solid_force);
      err(data.solid_force(Point(x, ys), t), fs.solid_force);
      err(data.fluid_traction(Point(x, yf), n_side, t), ff.fluid_stress * n_side);
      err(data.solid_traction(Point(x, ys), n_side, t), fs.solid_stress * n_side);
      err(exact.multiplier(x, t), fg.fluid_stress * Vec2(0.0, 1.0));
    }
  }
  o.pass = worst_block <= 1e-12 && worst_fd <= 1e-6;
  o.detail = " block difference " + fmt("%.2e", worst_block) + ", closed form vs finite differences " + fmt("%.2e", worst_fd);
  return o;
}

Outcome zero_fixed_point() {
  Outcome o;
  const FsiSystem sys(build_unit_blocks(4), 1e-3);
  const TransientResult r = run_transient(sys, zero_state(sys.dofs()), 0.1, zero_problem());
  double worst = 0.0;
  for (const Vector* v : {&r.state.u, &r.state.eta, &r.state.p, &r.state.g}) worst = std::max(worst, v->cwiseAbs().maxCoeff());
  o.pass = worst <= 1e-14 && r.steps.size() == 100;
  o.detail = " " + std::to_string(r.steps.size()) + " steps, max |value| " + fmt("%.1e", worst);
  return o;
}

}  // namespace

int main() {
  std::string info;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"1 spatial convergence", spatial_convergence},
      {"2 temporal convergence", temporal_convergence},
      {"3 partitioned-monolithic equivalence", partitioned_vs_monolithic},
      {"4 multiplier accuracy", multiplier_accuracy},
      {"5 Schur operator symmetry and positivity", schur_properties},
      {"6 conditioning trends", [&info] { return conditioning_trends(info); }},
      {"7 assembly and forcing oracles", assembly_oracle},
      {"8 zero-data fixed point", zero_fixed_point},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string(" exception: ") + e.what();
    }
    std::printf("%s criterion %s:%s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  }
  if (!info.empty()) std::printf("INFO criterion 6 iteration counts: %s\n", info.c_str());
  return failures == 0 ? 0 : 1;
}
