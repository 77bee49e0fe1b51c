#include "fsi/coupling.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "fsi/error.hpp"

namespace fsi {

struct FsiSystem::DenseCholesky {
  Eigen::LLT<DenseMatrix> llt;
};

namespace {

/// [top; bottom] with `top_rows` empty rows when `top` is null.
SparseMatrix stack_rows(const SparseMatrix* top, int top_rows, const SparseMatrix& bottom) {
  std::vector<Triplet> entries;
  entries.reserve((top ? top->nonZeros() : 0) + bottom.nonZeros());
  if (top != nullptr) {
    for (int r = 0; r < top->outerSize(); ++r) {
      for (SparseMatrix::InnerIterator it(*top, r); it; ++it) entries.emplace_back(r, it.col(), it.value());
    }
  }
  for (int r = 0; r < bottom.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(bottom, r); it; ++it) entries.emplace_back(top_rows + r, it.col(), it.value());
  }
  return finalize(top_rows + static_cast<int>(bottom.rows()), static_cast<int>(bottom.cols()), entries);
}

void append_block(std::vector<Triplet>& entries, const SparseMatrix& block, int row0, int col0, double scale,
                  bool transpose = false) {
  for (int r = 0; r < block.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(block, r); it; ++it) {
      const int i = static_cast<int>(transpose ? it.col() : it.row());
      const int j = static_cast<int>(transpose ? it.row() : it.col());
      entries.emplace_back(row0 + i, col0 + j, scale * it.value());
    }
  }
}

Vector fluid_load(const DofMap& d, const ProblemData& data, double t) {
  Vector f = assemble_body_load(d.velocity, data.fluid_force, t);
  if (!d.layout.fluid_neumann.empty()) f += assemble_neumann_load(d.velocity, d.layout.fluid_neumann, data.fluid_traction, t);
  return f;
}

Vector solid_load(const DofMap& d, const ProblemData& data, double t) {
  Vector f = assemble_body_load(d.displacement, data.solid_force, t);
  if (!d.layout.solid_neumann.empty()) {
    f += assemble_neumann_load(d.displacement, d.layout.solid_neumann, data.solid_traction, t);
  }
  return f;
}

/// Right-hand side of the structure equation in scaled form
/// (dt f_s + (2/dt) M_s eta^n - (1/dt) M_s eta^{n-1}; startup variant at n = 0).
Vector structure_history(const BlockOperatorSet& b, const TimeState& s, double dt) {
  if (s.step == 0) return b.mass_s * (s.eta / dt + s.eta_rate);
  return b.mass_s * ((2.0 / dt) * s.eta - (1.0 / dt) * s.eta_prev);
}

void check_state(const DofMap& d, const TimeState& s) {
  const bool ok = s.u.size() == d.n_u() && s.eta.size() == d.n_eta() &&
                  (s.step == 0 ? s.eta_rate.size() == d.n_eta() : s.eta_prev.size() == d.n_eta());
  if (!ok) throw InvalidArgument("time state does not match the system dimensions");
}

}  // namespace

FsiSystem::FsiSystem(std::shared_ptr<const BlockOperatorSet> blocks, double dt, SystemOptions options)
    : blocks_(std::move(blocks)), dt_(dt) {
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  const auto& b = *blocks_;
  const auto& d = b.dofs;
  wf_raw_ = b.mass_f + dt * b.stiffness_f;
  ws_raw_ = b.mass_s + (dt * dt) * (b.stiffness_s + b.divdiv);
  wf_ = constrain_symmetric(wf_raw_, d.velocity_dirichlet);
  ws_ = constrain_symmetric(ws_raw_, d.displacement_dirichlet);
  const SparseMatrix pt = b.pressure.transpose();
  af_raw_ = stack_rows(&pt, d.n_p(), b.coupling_f);
  as_raw_ = stack_rows(nullptr, d.n_p(), b.coupling_s);
  af_ = zero_columns(af_raw_, d.velocity_dirichlet);
  as_ = zero_columns(as_raw_, d.displacement_dirichlet);
  wf_factor_.emplace(wf_, FactorKind::spd);
  ws_factor_.emplace(ws_, FactorKind::spd);

  if (options.build_preconditioner) {
    const int nu = d.n_u();
    std::vector<Triplet> entries;
    append_block(entries, wf_, 0, 0, 1.0);
    append_block(entries, af_, nu, 0, 1.0);
    append_block(entries, af_, 0, nu, 1.0, true);
    const SparseMatrix aug = finalize(nu + n_z(), nu + n_z(), entries);
    augmented_.emplace(aug, FactorKind::symmetric_indefinite);
  }
  if (options.build_dense_schur) {
    DenseMatrix s(n_z(), n_z());
    Vector e = Vector::Zero(n_z());
    for (int j = 0; j < n_z(); ++j) {
      e[j] = 1.0;
      s.col(j) = apply_schur(*this, e);
      e[j] = 0.0;
    }
    auto dense = std::make_shared<DenseCholesky>();
    dense->llt.compute(0.5 * (s + s.transpose()));
    if (dense->llt.info() != Eigen::Success) throw SingularMatrix("Schur complement is not positive definite");
    dense_schur_ = std::move(dense);
  }
}

Vector FsiSystem::solve_augmented(const Vector& y) const {
  if (!augmented_) throw InvalidArgument("system was built without the fluid preconditioner");
  const int nu = dofs().n_u();
  Vector rhs = Vector::Zero(nu + n_z());
  rhs.tail(n_z()) = y;
  return augmented_->solve(rhs).tail(n_z());
}

Vector FsiSystem::solve_dense_schur(const Vector& rhs) const {
  if (!dense_schur_) throw InvalidArgument("system was built without the dense Schur factor");
  return dense_schur_->llt.solve(rhs);
}

std::shared_ptr<const BlockOperatorSet> build_unit_blocks(int n, const PhysicalConstants& constants, int lm_coarsening,
                                                          BoundaryLayout layout, int quadrature_order) {
  auto fluid = std::make_shared<const TriangleMesh>(build_structured_mesh(n, {0.0, 1.0}, {0.0, 1.0}, RegionTag::fluid));
  auto solid = std::make_shared<const TriangleMesh>(build_structured_mesh(n, {0.0, 1.0}, {1.0, 2.0}, RegionTag::solid));
  const InterfaceGrid grid = build_interface_grid(*fluid, *solid, lm_coarsening);
  DofMap dofs = build_dof_map(fluid, solid, grid, std::move(layout));
  return std::make_shared<const BlockOperatorSet>(assemble_blocks(std::move(dofs), constants, quadrature_order));
}

FsiSystem build_fsi_system(std::shared_ptr<const BlockOperatorSet> blocks, double dt, SystemOptions options) {
  return FsiSystem(std::move(blocks), dt, options);
}

Vector apply_schur(const FsiSystem& sys, const Vector& z) {
  const Vector xf = sys.solve_fluid(sys.a_fluid().transpose() * z);
  const Vector xs = sys.solve_solid(sys.a_solid().transpose() * z);
  return sys.a_fluid() * xf + sys.a_solid() * xs;
}

Vector apply_fluid_schur(const FsiSystem& sys, const Vector& z) {
  return sys.a_fluid() * sys.solve_fluid(sys.a_fluid().transpose() * z);
}

Vector apply_fluid_preconditioner(const FsiSystem& sys, const Vector& y) {
  // The augmented solve returns x = -S_f^{-1} y.
  return -sys.solve_augmented(y);
}

LinearOperator schur_operator(const FsiSystem& sys) {
  return LinearOperator(sys.n_z(), [&sys](const Vector& in, Vector& out) { out = apply_schur(sys, in); });
}

LinearOperator fluid_schur_operator(const FsiSystem& sys) {
  return LinearOperator(sys.n_z(), [&sys](const Vector& in, Vector& out) { out = apply_fluid_schur(sys, in); });
}

LinearOperator fluid_preconditioner_operator(const FsiSystem& sys) {
  return LinearOperator(sys.n_z(), [&sys](const Vector& in, Vector& out) { out = apply_fluid_preconditioner(sys, in); });
}

TimeState zero_state(const DofMap& d) {
  TimeState s;
  s.u = Vector::Zero(d.n_u());
  s.eta = Vector::Zero(d.n_eta());
  s.eta_prev = Vector::Zero(d.n_eta());
  s.eta_rate = Vector::Zero(d.n_eta());
  s.p = Vector::Zero(d.n_p());
  s.g = Vector::Zero(d.n_gamma());
  return s;
}

TimeState initial_state(const DofMap& d, const ExactSolution& exact, double t0) {
  TimeState s = zero_state(d);
  s.time = t0;
  s.u = interpolate(d.velocity, [&](const Point& x, double t) { return exact.velocity(x, t); }, t0);
  s.eta = interpolate(d.displacement, [&](const Point& x, double t) { return exact.displacement(x, t); }, t0);
  s.eta_rate = interpolate(d.displacement, [&](const Point& x, double t) { return exact.displacement_rate(x, t); }, t0);
  s.p = interpolate_scalar(d.pressure, [&](const Point& x, double t) { return exact.pressure(x, t); }, t0);
  const auto& grid = d.multiplier;
  for (int k = 0; k < grid.node_count(); ++k) {
    const Vec2 g = exact.multiplier(grid.nodes[k], t0, grid.y);
    s.g[k] = g.x();
    s.g[grid.node_count() + k] = g.y();
  }
  return s;
}

Vector dirichlet_values(const LagrangeSpace& space, std::span<const int> dofs, const VectorField& field, double t) {
  const int n = space.node_count();
  Vector out(static_cast<Eigen::Index>(dofs.size()));
  for (std::size_t k = 0; k < dofs.size(); ++k) {
    const int node = dofs[k] % n;
    const int comp = dofs[k] / n;
    out[static_cast<Eigen::Index>(k)] = field(space.nodes()[node], t)[comp];
  }
  return out;
}

double constraint_residual(const FsiSystem& sys, const TimeState& before, const TimeState& after) {
  const auto& b = sys.blocks();
  const double dt = sys.dt();
  const Vector r = b.coupling_s * ((after.eta - before.eta) / dt) - b.coupling_f * after.u;
  return r.cwiseAbs().maxCoeff();
}

TimeState advance(const FsiSystem& sys, const TimeState& state, const ProblemData& data, const AdvanceOptions& options,
                  StepDiagnostics* diagnostics) {
  const auto& b = sys.blocks();
  const auto& d = b.dofs;
  check_state(d, state);
  const double dt = sys.dt();
  const double t1 = state.time + dt;
  const int np = d.n_p();

  Vector w1 = dt * fluid_load(d, data, t1) + b.mass_f * state.u;
  Vector w2 = dt * solid_load(d, data, t1) + structure_history(b, state, dt);
  Vector w3 = Vector::Zero(sys.n_z());
  w3.tail(d.n_gamma()) = b.coupling_s * state.eta / dt;

  // Lift Dirichlet data; the structure unknown is eta / dt.
  const Vector u_bc = dirichlet_values(d.velocity, d.velocity_dirichlet, data.fluid_dirichlet, t1);
  const Vector eta_bc = dirichlet_values(d.displacement, d.displacement_dirichlet, data.solid_dirichlet, t1) / dt;
  const Vector u_lift = scatter_values(d.n_u(), d.velocity_dirichlet, u_bc);
  const Vector eta_lift = scatter_values(d.n_eta(), d.displacement_dirichlet, eta_bc);
  w1 -= sys.w_fluid_unconstrained() * u_lift;
  w2 -= sys.w_solid_unconstrained() * eta_lift;
  for (std::size_t k = 0; k < d.velocity_dirichlet.size(); ++k) w1[d.velocity_dirichlet[k]] = u_bc[k];
  for (std::size_t k = 0; k < d.displacement_dirichlet.size(); ++k) w2[d.displacement_dirichlet[k]] = eta_bc[k];
  w3 += sys.a_fluid_unconstrained() * u_lift - sys.a_solid_unconstrained() * eta_lift;

  const Vector yf = sys.solve_fluid(w1);
  const Vector ys = sys.solve_solid(w2);
  const Vector rhs = sys.a_solid() * ys - sys.a_fluid() * yf - w3;

  StepDiagnostics diag;
  diag.step = state.step + 1;
  diag.time = t1;
  Vector z;
  switch (options.solver) {
    case SchurSolver::cg: {
      auto res = cg(schur_operator(sys), rhs, options.krylov);
      z = std::move(res.solution);
      diag.schur_iterations = res.iterations;
      diag.schur_residual = res.relative_residual;
      break;
    }
    case SchurSolver::pcg: {
      auto res = pcg(schur_operator(sys), fluid_preconditioner_operator(sys), rhs, options.krylov);
      z = std::move(res.solution);
      diag.schur_iterations = res.iterations;
      diag.schur_residual = res.relative_residual;
      break;
    }
    case SchurSolver::direct: {
      z = sys.solve_dense_schur(rhs);
      const double rn = rhs.norm();
      diag.schur_residual = rn > 0 ? (rhs - apply_schur(sys, z)).norm() / rn : 0.0;
      break;
    }
  }

  TimeState next;
  next.step = state.step + 1;
  next.time = t1;
  next.u = sys.solve_fluid(w1 + sys.a_fluid().transpose() * z);
  next.eta = dt * sys.solve_solid(w2 - sys.a_solid().transpose() * z);
  next.eta_prev = state.eta;
  next.p = z.head(np) / dt;
  next.g = z.tail(d.n_gamma()) / dt;
  diag.constraint_residual = constraint_residual(sys, state, next);
  if (diagnostics != nullptr) *diagnostics = diag;
  return next;
}

TransientResult run_transient(const FsiSystem& sys, TimeState state, double final_time, const ProblemData& data,
                              const AdvanceOptions& options) {
  const double span = final_time - state.time;
  const double steps = std::round(span / sys.dt());
  if (steps < 0 || std::abs(steps * sys.dt() - span) > 1e-9 * std::max(1.0, std::abs(final_time))) {
    throw InvalidArgument("final time is not an integer number of steps from the current time");
  }
  TransientResult result;
  result.steps.reserve(static_cast<std::size_t>(steps));
  for (int n = 0; n < static_cast<int>(steps); ++n) {
    StepDiagnostics diag;
    state = advance(sys, state, data, options, &diag);
    result.steps.push_back(diag);
  }
  result.state = std::move(state);
  return result;
}

TimeState monolithic_solve(const FsiSystem& sys, const TimeState& state, const ProblemData& data) {
  const auto& b = sys.blocks();
  const auto& d = b.dofs;
  check_state(d, state);
  const double dt = sys.dt();
  const double t1 = state.time + dt;
  const int nu = d.n_u(), np = d.n_p(), ne = d.n_eta(), ng = d.n_gamma();
  const int ou = 0, op = nu, oe = nu + np, og = nu + np + ne;
  const int total = og + ng;

  std::vector<Triplet> entries;
  append_block(entries, sys.w_fluid_unconstrained(), ou, ou, 1.0);
  append_block(entries, b.pressure, ou, op, -dt);
  append_block(entries, b.coupling_f, ou, og, -dt, true);
  append_block(entries, b.pressure, op, ou, 1.0, true);
  append_block(entries, sys.w_solid_unconstrained(), oe, oe, 1.0 / dt);
  append_block(entries, b.coupling_s, oe, og, dt, true);
  append_block(entries, b.coupling_f, og, ou, -1.0);
  append_block(entries, b.coupling_s, og, oe, 1.0 / dt);
  SparseMatrix k = finalize(total, total, entries);

  Vector rhs = Vector::Zero(total);
  rhs.segment(ou, nu) = dt * fluid_load(d, data, t1) + b.mass_f * state.u;
  rhs.segment(oe, ne) = dt * solid_load(d, data, t1) + structure_history(b, state, dt);
  rhs.segment(og, ng) = b.coupling_s * state.eta / dt;

  std::vector<int> fixed;
  for (int dof : d.velocity_dirichlet) fixed.push_back(ou + dof);
  for (int dof : d.displacement_dirichlet) fixed.push_back(oe + dof);
  Vector values(static_cast<Eigen::Index>(fixed.size()));
  values << dirichlet_values(d.velocity, d.velocity_dirichlet, data.fluid_dirichlet, t1),
      dirichlet_values(d.displacement, d.displacement_dirichlet, data.solid_dirichlet, t1);
  apply_dirichlet(k, rhs, fixed, values);

  const Factorization lu(k, FactorKind::general);
  const Vector x = lu.solve(rhs);
  TimeState next;
  next.step = state.step + 1;
  next.time = t1;
  next.u = x.segment(ou, nu);
  next.p = x.segment(op, np);
  next.eta = x.segment(oe, ne);
  next.g = x.segment(og, ng);
  next.eta_prev = state.eta;
  return next;
}

void write_step_diagnostics(std::ostream& out, std::span<const StepDiagnostics> steps) {
  out << "step,time,schur_iterations,schur_residual,constraint_residual\n";
  char line[160];
  for (const auto& s : steps) {
    std::snprintf(line, sizeof line, "%d,%.17g,%d,%.6e,%.6e\n", s.step, s.time, s.schur_iterations, s.schur_residual,
                  s.constraint_residual);
    out << line;
  }
}

}  // namespace fsi
