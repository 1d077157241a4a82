#include "nlslab/cutoff.hpp"

#include <array>

#include "nlslab/error.hpp"

namespace nlslab {

namespace {

// chi(1 + t) = 1 + 2t + t^2 - t^4 + 13/40 t^5 + 1/16 t^6 - 3/112 t^7, t in [0, 2].
constexpr std::array<double, 8> kBridge = {1.0, 2.0, 1.0, 0.0, -1.0, 13.0 / 40.0, 1.0 / 16.0, -3.0 / 112.0};

double bridge_derivative(double t, int order) {
  double sum = 0.0;
  for (int k = static_cast<int>(kBridge.size()) - 1; k >= order; --k) {
    double coef = kBridge[k];
    for (int j = 0; j < order; ++j) coef *= (k - j);
    sum = sum * t + coef;
  }
  return sum;
}

CutoffProfile build(const RadialGrid& grid, double scale, bool truncated) {
  const int n = grid.dimension();
  CutoffProfile c;
  c.scale = scale;
  const std::size_t m = grid.size();
  c.chi.resize(m);
  c.d1.resize(m);
  c.d2.resize(m);
  c.laplacian.resize(m);
  c.bilaplacian.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double r = grid.node(i);
    CutoffJet j{};
    if (truncated) {
      j = unit_cutoff(r / scale);
      // chi_m(r) = m^2 chi(r/m): the k-th derivative picks up m^{2-k}.
      j.v *= scale * scale;
      j.d1 *= scale;
      j.d3 /= scale;
      j.d4 /= scale * scale;
    } else {
      j = {r * r, 2.0 * r, 2.0, 0.0, 0.0};
    }
    c.chi[i] = j.v;
    c.d1[i] = j.d1;
    c.d2[i] = j.d2;
    if (!truncated || r <= scale) {
      c.laplacian[i] = 2.0 * n;
      c.bilaplacian[i] = 0.0;
      continue;
    }
    // Delta chi = chi'' + (N-1) chi'/r and Delta^2 chi = psi'' + (N-1) psi'/r with psi = Delta chi.
    const double nm1 = n - 1.0;
    const double psi = j.d2 + nm1 * j.d1 / r;
    const double dpsi = j.d3 + nm1 * (j.d2 / r - j.d1 / (r * r));
    const double ddpsi = j.d4 + nm1 * (j.d3 / r - 2.0 * j.d2 / (r * r) + 2.0 * j.d1 / (r * r * r));
    c.laplacian[i] = psi;
    c.bilaplacian[i] = ddpsi + nm1 * dpsi / r;
  }
  return c;
}

}  // namespace

CutoffJet unit_cutoff(double s) {
  if (s <= 1.0) return {s * s, 2.0 * s, 2.0, 0.0, 0.0};
  if (s >= 3.0) return {bridge_derivative(2.0, 0), 0.0, 0.0, 0.0, 0.0};
  const double t = s - 1.0;
  return {bridge_derivative(t, 0), bridge_derivative(t, 1), bridge_derivative(t, 2), bridge_derivative(t, 3),
          bridge_derivative(t, 4)};
}

CutoffProfile make_cutoff(const RadialGrid& grid, double scale) {
  if (!(scale > 0.0)) throw_invalid("make_cutoff: scale must be positive");
  return build(grid, scale, true);
}

CutoffProfile make_quadratic_weight(const RadialGrid& grid) {
  return build(grid, grid.r_max(), false);
}

}  // namespace nlslab
