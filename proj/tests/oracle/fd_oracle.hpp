#pragma once

// Finite-difference evaluation of the manufactured forcing and tractions
// from the primary fields alone, in long double.

#include "fsi/manufactured.hpp"

namespace oracle {

struct FdForcing {
  fsi::Vec2 fluid_force, solid_force;
  fsi::Mat2 fluid_stress, solid_stress;
};

FdForcing finite_difference_forcing(const fsi::PhysicalConstants& k, fsi::ExactVariant variant, double x, double y,
                                    double t);

}  // namespace oracle
