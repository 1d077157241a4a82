#pragma once

#include <cmath>
#include <complex>
#include <random>

#include "nlslab/groundstate.hpp"
#include "nlslab/radial.hpp"

namespace support {

// Default resolution of the cubic 3-D problem, shared across test cases.
inline const nlslab::GroundState& cubic_q() {
  static const nlslab::GroundState q = nlslab::solve_ground_state(3.0, 3, 1.0, nlslab::make_grid(3, 40.0, 4097));
  return q;
}

// Cheaper ground state for evolution tests.
inline const nlslab::GroundState& coarse_q() {
  static const nlslab::GroundState q = nlslab::solve_ground_state(3.0, 3, 1.0, nlslab::make_grid(3, 40.0, 1025));
  return q;
}

inline double max_abs_diff(const nlslab::RadialField& a, const nlslab::RadialField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Smooth radial field: a few complex Gaussian shells with random centres and widths.
inline nlslab::RadialField random_smooth_field(const nlslab::GridPtr& grid, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, 4);
  std::uniform_real_distribution<double> amp(-2.0, 2.0);
  std::uniform_real_distribution<double> centre(0.0, 4.0);
  std::uniform_real_distribution<double> width(0.6, 2.5);
  std::uniform_real_distribution<double> freq(-1.5, 1.5);
  const int k = count(rng);
  std::vector<std::complex<double>> a(k);
  std::vector<double> c(k), w(k), f(k);
  for (int j = 0; j < k; ++j) {
    a[j] = {amp(rng), amp(rng)};
    c[j] = centre(rng);
    w[j] = width(rng);
    f[j] = freq(rng);
  }
  return nlslab::RadialField::from_function(grid, [&](double r) {
    std::complex<double> s = 0.0;
    for (int j = 0; j < k; ++j) {
      // Even in r so the field is smooth through the origin.
      const double g = std::exp(-(r - c[j]) * (r - c[j]) / (w[j] * w[j])) + std::exp(-(r + c[j]) * (r + c[j]) / (w[j] * w[j]));
      s += a[j] * g * std::polar(1.0, f[j] * r * r);
    }
    return s;
  });
}

}  // namespace support
