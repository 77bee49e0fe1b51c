#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fsi/coupling.hpp"
#include "fsi/sparse_linalg.hpp"

namespace fsi {

enum class SpectrumMode { automatic, dense, lanczos };

std::string_view to_string(SpectrumMode mode);

struct SpectrumEstimate {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double kappa = 0.0;
  std::string method;  // "dense" or "lanczos"
  int iterations = 0;  // operator applications
  bool converged = false;
};

inline constexpr int kDensifyCap = 4000;
/// Largest dimension handled densely in automatic mode (the n <= 8 meshes).
inline constexpr int kAutoDenseLimit = 128;

/// Columns op(e_j). Throws SizeError when op.dim() > cap.
DenseMatrix densify(const LinearOperator& op, int cap = kDensifyCap);

struct LanczosOptions {
  double rel_tol = 1e-6;
  int max_iter = 0;  // 0 means the operator dimension
};

/// Extreme eigenvalues of an SPD operator. With a preconditioner M (an SPD
/// approximation of op^{-1}) the spectrum is that of M op, computed on the
/// symmetric form M^{1/2} op M^{1/2}.
SpectrumEstimate extremal_eigs(const LinearOperator& op, SpectrumMode mode = SpectrumMode::automatic,
                               const LinearOperator* preconditioner = nullptr, const LanczosOptions& options = {});

struct ConditionRow {
  double dx = 0.0;
  double dt = 0.0;
  SpectrumEstimate cg;
  SpectrumEstimate pcg;
  int iters_cg = 0;
  int iters_pcg = 0;
};

/// kappa(S), kappa(S_f^{-1} S) and the CG/PCG iteration counts of the first
/// step of the manufactured problem for one (mesh, dt) pair.
ConditionRow condition_row(int n, double dt, const PhysicalConstants& constants = {},
                           ExactVariant variant = ExactVariant::corrected, SpectrumMode mode = SpectrumMode::automatic,
                           const KrylovOptions& krylov = {}, int lm_coarsening = 1);

/// Least-squares slope of log(kappa) against log(1/h).
double growth_exponent(std::span<const double> h, std::span<const double> kappa);

/// CSV: dx,dt,cond_cg,cond_pcg,iters_cg,iters_pcg
void write_condition_csv(std::ostream& out, std::span<const ConditionRow> rows);

}  // namespace fsi
