#pragma once

#include <vector>

#include "nlslab/radial.hpp"

namespace nlslab {

/// Radial virial weight chi_m(r) = m^2 chi(r/m) sampled on a grid, with the
/// derivatives entering the localized virial identity.
///
/// chi(s) = s^2 on [0, 1], constant on [3, inf), joined by a degree-7
/// polynomial matching value and three derivatives at both ends, so chi is C^3
/// and Delta^2 chi has no singular part. chi'' <= 2 everywhere.
struct CutoffProfile {
  double scale = 1.0;
  std::vector<double> chi;
  std::vector<double> d1;         // chi'
  std::vector<double> d2;         // chi''
  std::vector<double> laplacian;  // Delta chi
  std::vector<double> bilaplacian;  // Delta^2 chi
};

/// Cutoff of the given scale m on the grid. A scale at or beyond R_max/3
/// keeps chi = r^2 on the whole grid support up to the bridge.
CutoffProfile make_cutoff(const RadialGrid& grid, double scale);

/// Untruncated weight chi = |x|^2.
CutoffProfile make_quadratic_weight(const RadialGrid& grid);

/// Value and first four derivatives of the unit-scale chi at s >= 0.
struct CutoffJet {
  double v, d1, d2, d3, d4;
};
CutoffJet unit_cutoff(double s);

}  // namespace nlslab
