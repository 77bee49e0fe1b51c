#include "fsi/sparse_linalg.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <variant>

namespace fsi {

SparseMatrix finalize(int rows, int cols, const std::vector<Triplet>& entries) {
  SparseMatrix a(rows, cols);
  a.setFromTriplets(entries.begin(), entries.end());
  a.makeCompressed();
  return a;
}

double asymmetry(const SparseMatrix& a) {
  if (a.rows() != a.cols()) return INFINITY;
  const SparseMatrix t = a.transpose();
  const SparseMatrix diff = a - t;
  double worst = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  return worst;
}

void write_matrix_market(const SparseMatrix& a, std::ostream& out) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.rows() << ' ' << a.cols() << ' ' << a.nonZeros() << '\n';
  out.precision(17);
  for (int k = 0; k < a.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
      out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
    }
  }
}

LinearOperator LinearOperator::identity(int dim) {
  return LinearOperator(dim, [](const Vector& in, Vector& out) { out = in; });
}

LinearOperator LinearOperator::from_matrix(SparseMatrix a) {
  const int dim = static_cast<int>(a.rows());
  auto shared = std::make_shared<const SparseMatrix>(std::move(a));
  return LinearOperator(dim, [shared](const Vector& in, Vector& out) { out = (*shared) * in; });
}

LinearOperator LinearOperator::from_matrix(DenseMatrix a) {
  const int dim = static_cast<int>(a.rows());
  auto shared = std::make_shared<const DenseMatrix>(std::move(a));
  return LinearOperator(dim, [shared](const Vector& in, Vector& out) { out.noalias() = (*shared) * in; });
}

struct Factorization::Impl {
  using ColMatrix = Eigen::SparseMatrix<double>;
  std::variant<Eigen::SimplicialLDLT<ColMatrix>, Eigen::SparseLU<ColMatrix>> solver;
};

Factorization::Factorization(const SparseMatrix& a, FactorKind kind) : dim_(static_cast<int>(a.rows())), kind_(kind) {
  if (a.rows() != a.cols()) throw InvalidArgument("factorization needs a square matrix");
  auto impl = std::make_shared<Impl>();
  const Impl::ColMatrix col = a;
  if (kind == FactorKind::spd) {
    auto& ldlt = impl->solver.emplace<Eigen::SimplicialLDLT<Impl::ColMatrix>>();
    ldlt.compute(col);
    if (ldlt.info() != Eigen::Success) throw SingularMatrix("LDLT factorization failed");
    const Vector d = ldlt.vectorD();
    const double dmax = d.cwiseAbs().maxCoeff();
    if (!(d.minCoeff() > 1e-14 * dmax)) {
      throw SingularMatrix("matrix is singular or not positive definite (pivot ratio " +
                           std::to_string(d.minCoeff() / dmax) + ")");
    }
  } else {
    auto& lu = impl->solver.emplace<Eigen::SparseLU<Impl::ColMatrix>>();
    lu.analyzePattern(col);
    lu.factorize(col);
    if (lu.info() != Eigen::Success) throw SingularMatrix("LU factorization failed: " + lu.lastErrorMessage());
  }
  impl_ = std::move(impl);
  if (kind != FactorKind::spd && dim_ > 0) {
    // SparseLU only reports exact zero pivots; probe for near singularity.
    Vector probe(dim_);
    for (int i = 0; i < dim_; ++i) probe[i] = 1.0 + 0.5 * std::sin(1.0 + i);
    const Vector rhs = a * probe;
    const Vector back = solve(rhs);
    const double err = (back - probe).norm() / probe.norm();
    if (!(err < 1e-6)) throw SingularMatrix("matrix is numerically singular (probe error " + std::to_string(err) + ")");
  }
}

Vector Factorization::solve(const Vector& rhs) const {
  if (rhs.size() != dim_) throw InvalidArgument("right-hand side has wrong size");
  return std::visit([&rhs](const auto& s) -> Vector { return s.solve(rhs); }, impl_->solver);
}

namespace {

KrylovResult conjugate_gradient(const LinearOperator& op, const LinearOperator* precond, const Vector& b,
                                const KrylovOptions& options) {
  const int n = op.dim();
  if (b.size() != n) throw InvalidArgument("right-hand side has wrong size");
  const int max_iter = options.max_iter > 0 ? options.max_iter : 10 * std::max(n, 1);
  KrylovResult result;
  result.solution = Vector::Zero(n);
  const double bnorm = b.norm();
  result.residual_history.push_back(bnorm > 0.0 ? 1.0 : 0.0);
  if (bnorm == 0.0) return result;
  const double target = options.rel_tol * bnorm;

  Vector& x = result.solution;
  Vector r = b;
  Vector z(n), p(n), q(n);
  auto precondition = [&] {
    if (precond != nullptr) {
      precond->apply(r, z);
    } else {
      z = r;
    }
  };
  precondition();
  p = z;
  double rz = r.dot(z);
  Vector best = x;
  double best_res = bnorm;

  for (int k = 1; k <= max_iter; ++k) {
    op.apply(p, q);
    const double pq = p.dot(q);
    if (!(pq > 0.0)) {
      result.iterations = k;
      result.relative_residual = best_res / bnorm;
      result.solution = best;
      throw NoConvergence("operator is not positive definite (p'Ap = " + std::to_string(pq) + ")", result);
    }
    const double alpha = rz / pq;
    x.noalias() += alpha * p;
    r.noalias() -= alpha * q;
    double rnorm = r.norm();
    result.residual_history.push_back(rnorm / bnorm);
    result.iterations = k;
    if (rnorm <= target) {
      // Confirm with the true residual; on drift restart from it.
      Vector ax(n);
      op.apply(x, ax);
      r = b - ax;
      rnorm = r.norm();
      if (rnorm <= target) {
        result.relative_residual = rnorm / bnorm;
        return result;
      }
      precondition();
      p = z;
      rz = r.dot(z);
      continue;
    }
    if (rnorm < best_res) {
      best_res = rnorm;
      best = x;
    }
    precondition();
    const double rz_new = r.dot(z);
    const double beta = rz_new / rz;
    rz = rz_new;
    p = z + beta * p;
  }
  result.solution = best;
  result.relative_residual = best_res / bnorm;
  throw NoConvergence("CG did not converge in " + std::to_string(max_iter) + " iterations (relative residual " +
                          std::to_string(result.relative_residual) + ")",
                      result);
}

}  // namespace

KrylovResult cg(const LinearOperator& op, const Vector& rhs, const KrylovOptions& options) {
  return conjugate_gradient(op, nullptr, rhs, options);
}

KrylovResult pcg(const LinearOperator& op, const LinearOperator& precond, const Vector& rhs,
                 const KrylovOptions& options) {
  if (precond.dim() != op.dim()) throw InvalidArgument("preconditioner dimension mismatch");
  return conjugate_gradient(op, &precond, rhs, options);
}

}  // namespace fsi
