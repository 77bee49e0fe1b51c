#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "fsi/assembly.hpp"
#include "fsi/manufactured.hpp"
#include "fsi/sparse_linalg.hpp"

namespace fsi {

enum class SchurSolver { cg, pcg, direct };

struct SystemOptions {
  /// Factorize [[W_f, A_f^T], [A_f, 0]] for the S_f preconditioner.
  bool build_preconditioner = true;
  /// Densify and Cholesky-factorize S (small meshes only).
  bool build_dense_schur = false;
};

/// Time-step operators for one (mesh, dt) pair:
///   W_f = M_f + dt K_f,   W_s = M_s + dt^2 (K_s + L),
///   A_f = [P^T; G_f],     A_s = [0; G_s],
///   S = A_f W_f^{-1} A_f^T + A_s W_s^{-1} A_s^T.
/// Dirichlet dofs are eliminated from the W blocks (unit rows/columns) and
/// their columns are removed from A, so S never sees constrained dofs.
/// Immutable after construction.
class FsiSystem {
 public:
  FsiSystem(std::shared_ptr<const BlockOperatorSet> blocks, double dt, SystemOptions options = {});

  double dt() const { return dt_; }
  const BlockOperatorSet& blocks() const { return *blocks_; }
  const DofMap& dofs() const { return blocks_->dofs; }
  /// Size of the stacked (pressure, multiplier) unknown.
  int n_z() const { return dofs().n_p() + dofs().n_gamma(); }

  const SparseMatrix& w_fluid() const { return wf_; }
  const SparseMatrix& w_solid() const { return ws_; }
  const SparseMatrix& w_fluid_unconstrained() const { return wf_raw_; }
  const SparseMatrix& w_solid_unconstrained() const { return ws_raw_; }
  const SparseMatrix& a_fluid() const { return af_; }
  const SparseMatrix& a_solid() const { return as_; }
  const SparseMatrix& a_fluid_unconstrained() const { return af_raw_; }
  const SparseMatrix& a_solid_unconstrained() const { return as_raw_; }

  Vector solve_fluid(const Vector& rhs) const { return wf_factor_->solve(rhs); }
  Vector solve_solid(const Vector& rhs) const { return ws_factor_->solve(rhs); }

  bool has_preconditioner() const { return augmented_.has_value(); }
  bool has_dense_schur() const { return dense_schur_ != nullptr; }
  /// Solves [[W_f, A_f^T], [A_f, 0]] [beta; x] = [0; y] and returns x.
  Vector solve_augmented(const Vector& y) const;
  Vector solve_dense_schur(const Vector& rhs) const;

 private:
  struct DenseCholesky;

  std::shared_ptr<const BlockOperatorSet> blocks_;
  double dt_;
  SparseMatrix wf_raw_, ws_raw_, wf_, ws_;
  SparseMatrix af_raw_, as_raw_, af_, as_;
  std::optional<Factorization> wf_factor_, ws_factor_, augmented_;
  std::shared_ptr<const DenseCholesky> dense_schur_;
};

/// Blocks for the unit-square fluid [0,1]^2 over the solid [0,1]x[1,2],
/// both meshed n x n.
std::shared_ptr<const BlockOperatorSet> build_unit_blocks(int n, const PhysicalConstants& constants = {},
                                                          int lm_coarsening = 1, BoundaryLayout layout = {},
                                                          int quadrature_order = kDefaultVolumeOrder);

/// Throws InvalidArgument for dt <= 0, SingularMatrix for singular W.
FsiSystem build_fsi_system(std::shared_ptr<const BlockOperatorSet> blocks, double dt, SystemOptions options = {});

/// S z without forming S.
Vector apply_schur(const FsiSystem& sys, const Vector& z);
/// S_f z = A_f W_f^{-1} A_f^T z.
Vector apply_fluid_schur(const FsiSystem& sys, const Vector& z);
/// S_f^{-1} y through the augmented fluid saddle system.
Vector apply_fluid_preconditioner(const FsiSystem& sys, const Vector& y);

LinearOperator schur_operator(const FsiSystem& sys);
LinearOperator fluid_schur_operator(const FsiSystem& sys);
LinearOperator fluid_preconditioner_operator(const FsiSystem& sys);

/// Coefficient vectors at time level n. At step 0, `eta_rate` holds the
/// initial structure velocity and `eta_prev` is unused.
struct TimeState {
  int step = 0;
  double time = 0.0;
  Vector u, eta, eta_prev, eta_rate;
  Vector p, g;
};

TimeState zero_state(const DofMap& dofs);
/// Nodal interpolation of u, eta and eta_t at time t0; p and g are set to
/// their exact values for reference.
TimeState initial_state(const DofMap& dofs, const ExactSolution& exact, double t0 = 0.0);

struct StepDiagnostics {
  int step = 0;
  double time = 0.0;
  int schur_iterations = 0;
  double schur_residual = 0.0;       // relative
  double constraint_residual = 0.0;  // max |(G_s eta^{n+1} - G_s eta^n)/dt - G_f u^{n+1}|
};

struct AdvanceOptions {
  SchurSolver solver = SchurSolver::pcg;
  KrylovOptions krylov{};
};

/// One step of the partitioned scheme: build w1, w2, w3 (first-order
/// startup at step 0), solve the Schur equation for the scaled
/// (dt p, dt g), then recover u and eta independently.
TimeState advance(const FsiSystem& sys, const TimeState& state, const ProblemData& data,
                  const AdvanceOptions& options = {}, StepDiagnostics* diagnostics = nullptr);

struct TransientResult {
  TimeState state;
  std::vector<StepDiagnostics> steps;
};

/// Advances from state.time to final_time; (final_time - state.time)/dt
/// must be an integer.
TransientResult run_transient(const FsiSystem& sys, TimeState state, double final_time, const ProblemData& data,
                              const AdvanceOptions& options = {});

/// Solves the undecomposed block system for (u, p, eta, g) at the next
/// level with a sparse LU. Reference for the partitioned path.
TimeState monolithic_solve(const FsiSystem& sys, const TimeState& state, const ProblemData& data);

/// Max-norm of the discrete interface constraint row for a completed step.
double constraint_residual(const FsiSystem& sys, const TimeState& before, const TimeState& after);

/// CSV: step,time,schur_iterations,schur_residual,constraint_residual
void write_step_diagnostics(std::ostream& out, std::span<const StepDiagnostics> steps);

/// Values of `field` at t on the given component-blocked dofs.
Vector dirichlet_values(const LagrangeSpace& space, std::span<const int> dofs, const VectorField& field, double t);

}  // namespace fsi
