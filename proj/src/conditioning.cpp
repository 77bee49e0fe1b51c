#include "fsi/conditioning.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "fsi/error.hpp"

namespace fsi {

std::string_view to_string(SpectrumMode mode) {
  switch (mode) {
    case SpectrumMode::automatic: return "auto";
    case SpectrumMode::dense: return "dense";
    case SpectrumMode::lanczos: return "lanczos";
  }
  return "?";
}

DenseMatrix densify(const LinearOperator& op, int cap) {
  const int n = op.dim();
  if (n > cap) {
    throw SizeError("operator dimension " + std::to_string(n) + " exceeds the densify cap " + std::to_string(cap));
  }
  DenseMatrix a(n, n);
  Vector e = Vector::Zero(n);
  Vector col(n);
  for (int j = 0; j < n; ++j) {
    e[j] = 1.0;
    op.apply(e, col);
    a.col(j) = col;
    e[j] = 0.0;
  }
  return a;
}

namespace {

SpectrumEstimate finish(double lo, double hi, std::string method, int iterations, bool converged) {
  SpectrumEstimate s;
  s.lambda_min = lo;
  s.lambda_max = hi;
  s.kappa = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  s.method = std::move(method);
  s.iterations = iterations;
  s.converged = converged;
  return s;
}

SpectrumEstimate dense_eigs(const LinearOperator& op, const LinearOperator* precond) {
  DenseMatrix a = densify(op);
  a = 0.5 * (a + a.transpose()).eval();
  int applications = op.dim();
  if (precond != nullptr) {
    DenseMatrix m = densify(*precond);
    applications += precond->dim();
    Eigen::LLT<DenseMatrix> llt(0.5 * (m + m.transpose()));
    if (llt.info() != Eigen::Success) throw SingularMatrix("preconditioner is not positive definite");
    const DenseMatrix l = llt.matrixL();
    a = l.transpose() * a * l;
    a = 0.5 * (a + a.transpose()).eval();
  }
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(a, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) return finish(0.0, 0.0, "dense", applications, false);
  const Vector& ev = eig.eigenvalues();
  return finish(ev[0], ev[ev.size() - 1], "dense", applications, true);
}

/// Lanczos on M^{1/2} A M^{1/2} carried out on v = M^{-1/2} u and z = M v,
/// with full reorthogonalization.
SpectrumEstimate lanczos_eigs(const LinearOperator& op, const LinearOperator* precond, const LanczosOptions& options) {
  const int n = op.dim();
  const int max_iter = std::min(n, options.max_iter > 0 ? options.max_iter : n);
  auto apply_m = [&](const Vector& in) { return precond != nullptr ? (*precond)(in) : in; };

  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = 1.0 + 0.5 * std::sin(1.0 + i);
  Vector z = apply_m(v);
  double norm = std::sqrt(v.dot(z));
  v /= norm;
  z /= norm;

  std::vector<Vector> vs{v}, zs{z};
  std::vector<double> alpha, beta;
  double lo = 0.0, hi = 0.0;
  bool converged = false;
  int k = 0;
  for (k = 1; k <= max_iter; ++k) {
    Vector r = op(zs.back());
    alpha.push_back(zs.back().dot(r));
    r -= alpha.back() * vs.back();
    if (k > 1) r -= beta.back() * vs[vs.size() - 2];
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < vs.size(); ++i) r -= zs[i].dot(r) * vs[i];
    }
    Vector rz = apply_m(r);
    const double b = std::sqrt(std::max(r.dot(rz), 0.0));

    DenseMatrix t = DenseMatrix::Zero(k, k);
    for (int i = 0; i < k; ++i) {
      t(i, i) = alpha[i];
      if (i + 1 < k) t(i, i + 1) = t(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(t);
    const Vector& theta = eig.eigenvalues();
    lo = theta[0];
    hi = theta[k - 1];
    const double res_lo = b * std::abs(eig.eigenvectors()(k - 1, 0));
    const double res_hi = b * std::abs(eig.eigenvectors()(k - 1, k - 1));
    if (k >= 2 && res_lo <= options.rel_tol * std::abs(lo) && res_hi <= options.rel_tol * std::abs(hi)) {
      converged = true;
      break;
    }
    if (b <= 1e-14 * std::abs(hi) || k == n) {
      converged = true;  // invariant subspace: Ritz values are exact
      break;
    }
    beta.push_back(b);
    vs.push_back(r / b);
    zs.push_back(rz / b);
  }
  return finish(lo, hi, "lanczos", std::min(k, max_iter), converged);
}

}  // namespace

SpectrumEstimate extremal_eigs(const LinearOperator& op, SpectrumMode mode, const LinearOperator* preconditioner,
                               const LanczosOptions& options) {
  if (preconditioner != nullptr && preconditioner->dim() != op.dim()) {
    throw InvalidArgument("preconditioner dimension does not match the operator");
  }
  if (mode == SpectrumMode::automatic) mode = op.dim() <= kAutoDenseLimit ? SpectrumMode::dense : SpectrumMode::lanczos;
  if (mode == SpectrumMode::dense) return dense_eigs(op, preconditioner);
  return lanczos_eigs(op, preconditioner, options);
}

ConditionRow condition_row(int n, double dt, const PhysicalConstants& constants, ExactVariant variant,
                           SpectrumMode mode, const KrylovOptions& krylov, int lm_coarsening) {
  const FsiSystem sys(build_unit_blocks(n, constants, lm_coarsening), dt);
  ConditionRow row;
  row.dx = 1.0 / n;
  row.dt = dt;
  const LinearOperator s = schur_operator(sys);
  const LinearOperator m = fluid_preconditioner_operator(sys);
  row.cg = extremal_eigs(s, mode);
  row.pcg = extremal_eigs(s, mode, &m);

  const ExactSolution exact(constants, variant);
  const ProblemData data = manufactured_problem(exact);
  const TimeState start = initial_state(sys.dofs(), exact, 0.0);
  StepDiagnostics diag;
  advance(sys, start, data, {SchurSolver::cg, krylov}, &diag);
  row.iters_cg = diag.schur_iterations;
  advance(sys, start, data, {SchurSolver::pcg, krylov}, &diag);
  row.iters_pcg = diag.schur_iterations;
  return row;
}

double growth_exponent(std::span<const double> h, std::span<const double> kappa) {
  if (h.size() != kappa.size() || h.size() < 2) throw InvalidArgument("need at least two (h, kappa) pairs");
  const int m = static_cast<int>(h.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < m; ++i) {
    if (!(h[i] > 0.0) || !(kappa[i] > 0.0)) throw InvalidArgument("mesh sizes and condition numbers must be positive");
    const double x = -std::log(h[i]);
    const double y = std::log(kappa[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = m * sxx - sx * sx;
  if (den == 0.0) throw InvalidArgument("mesh sizes must not all be equal");
  return (m * sxy - sx * sy) / den;
}

void write_condition_csv(std::ostream& out, std::span<const ConditionRow> rows) {
  out << "dx,dt,cond_cg,cond_pcg,iters_cg,iters_pcg\n";
  char line[200];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%d,%d\n", r.dx, r.dt, r.cg.kappa, r.pcg.kappa, r.iters_cg,
                  r.iters_pcg);
    out << line;
  }
}

}  // namespace fsi
