#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "fsi/assembly.hpp"

namespace fsi {

using Mat2 = Eigen::Matrix2d;

/// `corrected` uses eta_2 = cos(x+t) cos(y+t), which satisfies both interface
/// conditions. `printed` uses eta_2 = cos(x+t)^2 and is kept for comparison
/// only: its velocity trace does not match the fluid velocity on y = 1.
enum class ExactVariant { corrected, printed };

template <class T>
struct PrimaryFields {
  std::array<T, 2> u;
  T p;
  std::array<T, 2> eta;
};

/// The closed-form velocity, pressure and displacement, generic in the
/// scalar type so test oracles can difference them in extended precision.
template <class T>
PrimaryFields<T> primary_fields(const PhysicalConstants& k, ExactVariant variant, T x, T y, T t) {
  using std::cos;
  using std::sin;
  const T a = x + t;
  const T b = y + t;
  const T nu_f = static_cast<T>(k.nu_f);
  const T nu_s = static_cast<T>(k.nu_s);
  PrimaryFields<T> f;
  f.u[0] = cos(a) * sin(b) + sin(a) * cos(b);
  f.u[1] = -cos(a) * sin(b) - sin(a) * cos(b);
  f.p = 2 * nu_f * (sin(a) * sin(b) - cos(a) * cos(b)) + 2 * nu_s * cos(a) * sin(b);
  f.eta[0] = sin(a) * sin(b);
  f.eta[1] = variant == ExactVariant::corrected ? cos(a) * cos(b) : cos(a) * cos(a);
  return f;
}

struct FieldValues {
  Vec2 u;
  double p;
  Vec2 eta;
};

/// Exact solution and every quantity derived from it in closed form.
/// Gradients are row = component, column = derivative direction.
class ExactSolution {
 public:
  explicit ExactSolution(PhysicalConstants constants = {}, ExactVariant variant = ExactVariant::corrected)
      : k_(constants), variant_(variant) {}

  const PhysicalConstants& constants() const { return k_; }
  ExactVariant variant() const { return variant_; }

  FieldValues fields(double x, double y, double t) const;
  Vec2 velocity(const Point& x, double t) const;
  double pressure(const Point& x, double t) const;
  Vec2 displacement(const Point& x, double t) const;

  Mat2 velocity_gradient(const Point& x, double t) const;
  Mat2 displacement_gradient(const Point& x, double t) const;
  Vec2 displacement_rate(const Point& x, double t) const;

  /// 2 nu_f D(u) - p I
  Mat2 fluid_stress(const Point& x, double t) const;
  /// 2 nu_s D(eta) + lambda (div eta) I
  Mat2 solid_stress(const Point& x, double t) const;

  /// rho_f u_t - 2 nu_f div D(u) + grad p
  Vec2 fluid_force(const Point& x, double t) const;
  /// rho_s eta_tt - 2 nu_s div D(eta) - lambda grad div eta
  Vec2 solid_force(const Point& x, double t) const;

  /// g = (2 nu_f D(u) - p) n_f on the interface y = y_gamma, n_f = (0, 1).
  Vec2 multiplier(double x, double t, double y_gamma = 1.0) const;

 private:
  PhysicalConstants k_;
  ExactVariant variant_;
};

/// Shorthand for ExactSolution::fields.
FieldValues exact_fields(const ExactSolution& exact, double x, double y, double t);
Vec2 exact_multiplier(const ExactSolution& exact, double x, double t);

/// Data driving one transient run. Traction callbacks receive the outward
/// unit normal of the boundary edge.
struct ProblemData {
  VectorField fluid_force;
  VectorField solid_force;
  TractionField fluid_traction;
  TractionField solid_traction;
  VectorField fluid_dirichlet;
  VectorField solid_dirichlet;
};

ProblemData manufactured_problem(const ExactSolution& exact);
ProblemData zero_problem();

struct ErrorNorms {
  double u_l2 = 0, u_h1 = 0;
  double p_l2 = 0;
  double eta_l2 = 0, eta_h1 = 0;
  double g_l2 = 0;  // multiplier error in L2(gamma)
};

/// Errors of a discrete state against the exact fields at time t. The H1
/// norm is ||e||_0^2 + ||D(e)||_0^2 (symmetric gradient).
ErrorNorms compute_error_norms(const DofMap& dofs, const Vector& u, const Vector& p, const Vector& eta,
                               const Vector& g, const ExactSolution& exact, double t, int quadrature_order = 8);

/// rate_i = log(e_{i-1}/e_i) / log(h_{i-1}/h_i). An entry is empty when
/// either error is zero. Throws InvalidArgument for fewer than two entries,
/// mismatched lengths or non-monotone parameters.
std::vector<std::optional<double>> convergence_rate(std::span<const double> errors, std::span<const double> params);

}  // namespace fsi
