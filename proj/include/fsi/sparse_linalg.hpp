#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "fsi/error.hpp"

namespace fsi {

using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

/// Compresses coordinate entries; duplicates are summed.
SparseMatrix finalize(int rows, int cols, const std::vector<Triplet>& entries);

/// Largest |A_ij - A_ji|.
double asymmetry(const SparseMatrix& a);

/// Matrix Market coordinate/real/general, 1-based indices.
void write_matrix_market(const SparseMatrix& a, std::ostream& out);

/// Square linear map given only through its action.
class LinearOperator {
 public:
  using Apply = std::function<void(const Vector& in, Vector& out)>;

  LinearOperator(int dim, Apply apply) : dim_(dim), apply_(std::move(apply)) {}

  static LinearOperator identity(int dim);
  /// The operator keeps its own copy of the matrix.
  static LinearOperator from_matrix(SparseMatrix a);
  static LinearOperator from_matrix(DenseMatrix a);

  int dim() const { return dim_; }
  void apply(const Vector& in, Vector& out) const { apply_(in, out); }
  Vector operator()(const Vector& in) const {
    Vector out(dim_);
    apply_(in, out);
    return out;
  }

 private:
  int dim_;
  Apply apply_;
};

/// `symmetric_indefinite` and `general` both use a pivoted sparse LU.
enum class FactorKind { spd, symmetric_indefinite, general };

/// Reusable sparse direct factorization. Copies share the factor; solve is
/// re-entrant.
class Factorization {
 public:
  /// Throws SingularMatrix on a vanishing pivot (or a non-positive pivot
  /// for FactorKind::spd).
  Factorization(const SparseMatrix& a, FactorKind kind);

  Vector solve(const Vector& rhs) const;
  int dim() const { return dim_; }
  FactorKind kind() const { return kind_; }

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  int dim_ = 0;
  FactorKind kind_;
};

inline Factorization factorize(const SparseMatrix& a, FactorKind kind) { return Factorization(a, kind); }

struct KrylovOptions {
  double rel_tol = 1e-10;
  int max_iter = 0;  // 0 means 10 * dimension
};

struct KrylovResult {
  Vector solution;
  int iterations = 0;
  /// ||r_k|| / ||b||, entry 0 is the initial residual.
  std::vector<double> residual_history;
  /// True relative residual ||b - A x|| / ||b|| of the returned solution.
  double relative_residual = 0.0;
};

class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, KrylovResult best)
      : Error("no-convergence", what), best_(std::move(best)) {}

  const KrylovResult& best() const { return best_; }

 private:
  KrylovResult best_;
};

/// Conjugate gradients for an SPD operator from a zero initial guess.
/// Converged when the true residual satisfies ||b - A x|| <= rel_tol ||b||.
KrylovResult cg(const LinearOperator& op, const Vector& rhs, const KrylovOptions& options = {});

/// Preconditioned CG; `precond` applies an SPD approximation of op^{-1}.
/// Same stopping rule as cg (unpreconditioned residual).
KrylovResult pcg(const LinearOperator& op, const LinearOperator& precond, const Vector& rhs,
                 const KrylovOptions& options = {});

}  // namespace fsi
