#pragma once

// Radial grids, fields and the quadrature/norm machinery shared by every
// other module. A radial function on R^N is stored by its samples on a
// uniform half-line grid 0 = r_0 < r_1 < ... < r_{M-1} = R_max.

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace nlslab {

using cplx = std::complex<double>;

/// Surface area of the unit sphere S^{N-1}, 2 pi^{N/2} / Gamma(N/2).
double sphere_area(int dimension);

/// Uniform radial grid with r^{N-1}-weighted quadrature.
///
/// The weights already contain sigma_N r_i^{N-1}, so that sum_i w_i f(r_i)
/// approximates the integral of the radial function f over the ball of
/// radius R_max. The rule is the trapezoid rule with sixth-order Gregory
/// end corrections. At the origin the correction is only needed for even N:
/// for odd N the integrand f(r) r^{N-1} of a smooth radial f is even in r,
/// and the plain trapezoid rule is already spectrally accurate there.
class RadialGrid {
 public:
  RadialGrid(int dimension, double r_max, std::size_t nodes);

  int dimension() const noexcept { return dimension_; }
  double r_max() const noexcept { return r_max_; }
  double spacing() const noexcept { return spacing_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> weights() const noexcept { return weights_; }
  double node(std::size_t i) const { return nodes_[i]; }

  /// Index of the first node with r >= radius (size() if none).
  std::size_t first_node_at_or_beyond(double radius) const;

 private:
  int dimension_;
  double r_max_;
  double spacing_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

GridPtr make_grid(int dimension, double r_max, std::size_t nodes);

/// Trapezoid weights on n equispaced unit-spaced points with optional
/// sixth-order Gregory corrections at either end.
std::vector<double> gregory_weights(std::size_t n, bool correct_left, bool correct_right);

/// Finite-difference weights for the m-th derivative at x0 using the given
/// stencil abscissae (Fornberg's recursion).
std::vector<double> fornberg_weights(double x0, std::span<const double> stencil, int derivative);

/// Complex radial profile sampled on a RadialGrid.
class RadialField {
 public:
  /// Empty placeholder without a grid; only assignment and empty() are valid.
  RadialField() = default;
  RadialField(GridPtr grid, std::vector<cplx> values);

  static RadialField zeros(GridPtr grid);
  static RadialField from_function(GridPtr grid, const std::function<cplx(double)>& f);

  const RadialGrid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  std::span<const cplx> values() const noexcept { return values_; }
  std::span<cplx> values() noexcept { return values_; }
  const cplx& operator[](std::size_t i) const { return values_[i]; }
  cplx& operator[](std::size_t i) { return values_[i]; }

  RadialField scaled(cplx factor) const;
  double max_abs() const;
  bool all_finite() const;

 private:
  GridPtr grid_;
  std::vector<cplx> values_;
};

/// sum_i w_i f(r_i), i.e. the integral of f over the ball B(0, R_max).
double integrate(const RadialGrid& grid, std::span<const double> samples);

/// Integral of f over the shell R < |x| < R_max.
double integrate_beyond(const RadialGrid& grid, std::span<const double> samples, double radius);

/// (integral of |u|^p dx)^{1/p}.
double lp_norm(const RadialField& u, double p);

/// integral of |u|^p dx, without the 1/p root.
double lp_norm_pow(const RadialField& u, double p);

/// Radial derivative du/dr at every node. Sixth-order central differences,
/// using the even reflection u(-r) = u(r) at the origin and one-sided
/// stencils at R_max. Requires at least 7 nodes.
std::vector<cplx> radial_derivative(const RadialField& u);

/// ||grad u||_{L^2}. For radial fields |grad u| = |du/dr|.
double gradient_norm(const RadialField& u);

/// Squared H^1 proxy norm ||u||_2^2 + ||grad u||_2^2.
double h1_norm_sq(const RadialField& u);

}  // namespace nlslab
