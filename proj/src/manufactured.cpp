#include "fsi/manufactured.hpp"

#include <algorithm>

#include "fsi/elements.hpp"
#include "fsi/error.hpp"

namespace fsi {

FieldValues ExactSolution::fields(double x, double y, double t) const {
  const auto f = primary_fields<double>(k_, variant_, x, y, t);
  return {Vec2(f.u[0], f.u[1]), f.p, Vec2(f.eta[0], f.eta[1])};
}

Vec2 ExactSolution::velocity(const Point& x, double t) const { return fields(x.x(), x.y(), t).u; }
double ExactSolution::pressure(const Point& x, double t) const { return fields(x.x(), x.y(), t).p; }
Vec2 ExactSolution::displacement(const Point& x, double t) const { return fields(x.x(), x.y(), t).eta; }

// With a = x + t, b = y + t, s = a + b: u = (sin s, -sin s) and
// p = -2 nu_f cos s + 2 nu_s cos a sin b.

Mat2 ExactSolution::velocity_gradient(const Point& x, double t) const {
  const double c = std::cos(x.x() + x.y() + 2 * t);
  Mat2 g;
  g << c, c, -c, -c;
  return g;
}

Mat2 ExactSolution::displacement_gradient(const Point& x, double t) const {
  const double a = x.x() + t, b = x.y() + t;
  Mat2 g;
  g(0, 0) = std::cos(a) * std::sin(b);
  g(0, 1) = std::sin(a) * std::cos(b);
  if (variant_ == ExactVariant::corrected) {
    g(1, 0) = -std::sin(a) * std::cos(b);
    g(1, 1) = -std::cos(a) * std::sin(b);
  } else {
    g(1, 0) = -std::sin(2 * a);
    g(1, 1) = 0.0;
  }
  return g;
}

Vec2 ExactSolution::displacement_rate(const Point& x, double t) const {
  const double a = x.x() + t, s = x.x() + x.y() + 2 * t;
  return {std::sin(s), variant_ == ExactVariant::corrected ? -std::sin(s) : -std::sin(2 * a)};
}

Mat2 ExactSolution::fluid_stress(const Point& x, double t) const {
  const Mat2 g = velocity_gradient(x, t);
  return k_.nu_f * (g + g.transpose()) - pressure(x, t) * Mat2::Identity();
}

Mat2 ExactSolution::solid_stress(const Point& x, double t) const {
  const Mat2 g = displacement_gradient(x, t);
  return k_.nu_s * (g + g.transpose()) + k_.lambda * g.trace() * Mat2::Identity();
}

Vec2 ExactSolution::fluid_force(const Point& x, double t) const {
  const double a = x.x() + t, b = x.y() + t, s = a + b;
  const double cs = std::cos(s), ss = std::sin(s);
  return {2 * k_.rho_f * cs + 4 * k_.nu_f * ss - 2 * k_.nu_s * std::sin(a) * std::sin(b),
          -2 * k_.rho_f * cs + 2 * k_.nu_s * std::cos(a) * std::cos(b)};
}

Vec2 ExactSolution::solid_force(const Point& x, double t) const {
  const double a = x.x() + t, b = x.y() + t, s = a + b;
  const double sasb = std::sin(a) * std::sin(b);
  const double cacb = std::cos(a) * std::cos(b);
  if (variant_ == ExactVariant::corrected) {
    // div eta = 0, so lambda drops out.
    return {2 * k_.rho_s * std::cos(s) + 2 * k_.nu_s * sasb, -2 * k_.rho_s * std::cos(s) + 2 * k_.nu_s * cacb};
  }
  const double c2a = std::cos(2 * a);
  return {2 * k_.rho_s * std::cos(s) + (k_.lambda + 3 * k_.nu_s) * sasb,
          -2 * k_.rho_s * c2a + 2 * k_.nu_s * c2a - (k_.nu_s + k_.lambda) * cacb};
}

Vec2 ExactSolution::multiplier(double x, double t, double y_gamma) const {
  return fluid_stress(Point(x, y_gamma), t) * Vec2(0.0, 1.0);
}

FieldValues exact_fields(const ExactSolution& exact, double x, double y, double t) { return exact.fields(x, y, t); }

Vec2 exact_multiplier(const ExactSolution& exact, double x, double t) { return exact.multiplier(x, t); }

ProblemData manufactured_problem(const ExactSolution& exact) {
  ProblemData data;
  data.fluid_force = [exact](const Point& x, double t) { return exact.fluid_force(x, t); };
  data.solid_force = [exact](const Point& x, double t) { return exact.solid_force(x, t); };
  data.fluid_traction = [exact](const Point& x, const Vec2& n, double t) { return Vec2(exact.fluid_stress(x, t) * n); };
  data.solid_traction = [exact](const Point& x, const Vec2& n, double t) { return Vec2(exact.solid_stress(x, t) * n); };
  data.fluid_dirichlet = [exact](const Point& x, double t) { return exact.velocity(x, t); };
  data.solid_dirichlet = [exact](const Point& x, double t) { return exact.displacement(x, t); };
  return data;
}

ProblemData zero_problem() {
  ProblemData data;
  const VectorField zero = [](const Point&, double) { return Vec2::Zero().eval(); };
  const TractionField zero_traction = [](const Point&, const Vec2&, double) { return Vec2::Zero().eval(); };
  data.fluid_force = data.solid_force = data.fluid_dirichlet = data.solid_dirichlet = zero;
  data.fluid_traction = data.solid_traction = zero_traction;
  return data;
}

namespace {

struct SquaredErrors {
  double l2 = 0.0;
  double strain = 0.0;
};

template <class ExactValue, class ExactGrad>
SquaredErrors vector_errors(const LagrangeSpace& space, const Vector& coef, const TriangleQuadrature& rule,
                            ExactValue exact_value, ExactGrad exact_grad) {
  const int n = space.node_count();
  std::vector<BasisEval> tab;
  for (const auto& q : rule.points) tab.push_back(reference_basis(space.degree(), q));
  SquaredErrors e;
  for (int c = 0; c < space.cell_count(); ++c) {
    const auto verts = space.vertices(c);
    const auto dofs = space.cell(c);
    const auto map = map_to_physical(verts, Point(0, 0));
    const Mat2 inv_t = map.jacobian.inverse().transpose();
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Point x = verts[0] + map.jacobian * rule.points[q];
      Vec2 value = Vec2::Zero();
      Mat2 grad = Mat2::Zero();
      for (int i = 0; i < tab[q].count; ++i) {
        const Vec2 g = inv_t * tab[q].grad[i];
        for (int comp = 0; comp < 2; ++comp) {
          const double ci = coef[comp * n + dofs[i]];
          value[comp] += ci * tab[q].value[i];
          grad.row(comp) += ci * g.transpose();
        }
      }
      const double w = rule.weights[q] * map.det;
      const Vec2 dv = value - exact_value(x);
      const Mat2 dg = grad - exact_grad(x);
      const Mat2 strain = 0.5 * (dg + dg.transpose());
      e.l2 += w * dv.squaredNorm();
      e.strain += w * strain.squaredNorm();
    }
  }
  return e;
}

double scalar_l2_error(const LagrangeSpace& space, const Vector& coef, const TriangleQuadrature& rule,
                       const ScalarField& exact, double t) {
  std::vector<BasisEval> tab;
  for (const auto& q : rule.points) tab.push_back(reference_basis(space.degree(), q));
  double sum = 0.0;
  for (int c = 0; c < space.cell_count(); ++c) {
    const auto verts = space.vertices(c);
    const auto dofs = space.cell(c);
    const auto map = map_to_physical(verts, Point(0, 0));
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Point x = verts[0] + map.jacobian * rule.points[q];
      double value = 0.0;
      for (int i = 0; i < tab[q].count; ++i) value += coef[dofs[i]] * tab[q].value[i];
      const double d = value - exact(x, t);
      sum += rule.weights[q] * map.det * d * d;
    }
  }
  return sum;
}

}  // namespace

ErrorNorms compute_error_norms(const DofMap& dofs, const Vector& u, const Vector& p, const Vector& eta,
                               const Vector& g, const ExactSolution& exact, double t, int quadrature_order) {
  if (u.size() != dofs.n_u() || p.size() != dofs.n_p() || eta.size() != dofs.n_eta() || g.size() != dofs.n_gamma()) {
    throw InvalidArgument("state vectors do not match the dof map");
  }
  const auto rule = quadrature_triangle(quadrature_order);
  ErrorNorms out;
  const auto eu = vector_errors(
      dofs.velocity, u, rule, [&](const Point& x) { return exact.velocity(x, t); },
      [&](const Point& x) { return exact.velocity_gradient(x, t); });
  const auto ee = vector_errors(
      dofs.displacement, eta, rule, [&](const Point& x) { return exact.displacement(x, t); },
      [&](const Point& x) { return exact.displacement_gradient(x, t); });
  out.u_l2 = std::sqrt(eu.l2);
  out.u_h1 = std::sqrt(eu.l2 + eu.strain);
  out.eta_l2 = std::sqrt(ee.l2);
  out.eta_h1 = std::sqrt(ee.l2 + ee.strain);
  out.p_l2 = std::sqrt(
      scalar_l2_error(dofs.pressure, p, rule, [&](const Point& x, double tt) { return exact.pressure(x, tt); }, t));

  const auto& grid = dofs.multiplier;
  const int ng = grid.node_count();
  const auto seg_rule = quadrature_segment(quadrature_order);
  double g2 = 0.0;
  for (int s = 0; s < grid.segment_count(); ++s) {
    const double x0 = grid.nodes[s], x1 = grid.nodes[s + 1];
    for (std::size_t q = 0; q < seg_rule.points.size(); ++q) {
      const double xi = seg_rule.points[q];
      const double x = x0 + xi * (x1 - x0);
      const Vec2 gh((1 - xi) * g[s] + xi * g[s + 1], (1 - xi) * g[ng + s] + xi * g[ng + s + 1]);
      g2 += seg_rule.weights[q] * (x1 - x0) * (gh - exact.multiplier(x, t, grid.y)).squaredNorm();
    }
  }
  out.g_l2 = std::sqrt(g2);
  return out;
}

std::vector<std::optional<double>> convergence_rate(std::span<const double> errors, std::span<const double> params) {
  if (errors.size() < 2) throw InvalidArgument("convergence rates need at least two entries");
  if (errors.size() != params.size()) throw InvalidArgument("errors and parameters differ in length");
  const bool decreasing = params[1] < params[0];
  for (std::size_t i = 1; i < params.size(); ++i) {
    if (params[i] == params[i - 1] || (params[i] < params[i - 1]) != decreasing || !(params[i] > 0)) {
      throw InvalidArgument("parameters must be positive and strictly monotone");
    }
  }
  std::vector<std::optional<double>> rates;
  rates.reserve(errors.size() - 1);
  for (std::size_t i = 1; i < errors.size(); ++i) {
    if (!(errors[i] > 0.0) || !(errors[i - 1] > 0.0)) {
      rates.emplace_back();
    } else {
      rates.emplace_back(std::log(errors[i - 1] / errors[i]) / std::log(params[i - 1] / params[i]));
    }
  }
  return rates;
}

}  // namespace fsi
