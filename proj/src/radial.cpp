#include "nlslab/radial.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "nlslab/error.hpp"

namespace nlslab {

namespace {

// Left-end Gregory weights of sixth order; exact for polynomials of degree <= 5.
constexpr std::array<double, 5> kGregoryEnd = {95.0 / 288.0, 317.0 / 240.0, 23.0 / 30.0,
                                               793.0 / 720.0, 157.0 / 160.0};

constexpr std::array<double, 7> kCentral6 = {-1.0 / 60.0, 9.0 / 60.0, -45.0 / 60.0, 0.0,
                                             45.0 / 60.0, -9.0 / 60.0, 1.0 / 60.0};

double radial_power(double r, int dimension) {
  return dimension == 1 ? 1.0 : std::pow(r, dimension - 1);
}

}  // namespace

double sphere_area(int dimension) {
  if (dimension < 1) throw_invalid("dimension must be >= 1");
  const double half = 0.5 * dimension;
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

std::vector<double> gregory_weights(std::size_t n, bool correct_left, bool correct_right) {
  std::vector<double> w(n, 1.0);
  if (n == 0) return w;
  if (n == 1) {
    w[0] = 0.0;
    return w;
  }
  w.front() = 0.5;
  w.back() = 0.5;
  const std::size_t k = kGregoryEnd.size();
  const std::size_t needed = (correct_left ? k : 0) + (correct_right ? k : 0) + 1;
  if (n < needed) return w;
  for (std::size_t i = 0; i < k; ++i) {
    if (correct_left) w[i] = kGregoryEnd[i];
    if (correct_right) w[n - 1 - i] = kGregoryEnd[i];
  }
  return w;
}

std::vector<double> fornberg_weights(double x0, std::span<const double> stencil, int derivative) {
  const std::size_t n = stencil.size();
  const int m = derivative;
  if (n == 0 || m < 0 || static_cast<std::size_t>(m) >= n) {
    throw_invalid("fornberg_weights: stencil too small for requested derivative");
  }
  // c[j][k]: weight of point j for the k-th derivative.
  std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0;
  double c4 = stencil[0] - x0;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const int mn = std::min<int>(static_cast<int>(i), m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = stencil[i] - x0;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = stencil[i] - stencil[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        }
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) {
        c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      }
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = c[j][m];
  return out;
}

RadialGrid::RadialGrid(int dimension, double r_max, std::size_t nodes)
    : dimension_(dimension), r_max_(r_max) {
  if (dimension < 1) throw_invalid("RadialGrid: dimension must be >= 1");
  if (!(r_max > 0.0) || !std::isfinite(r_max)) throw_invalid("RadialGrid: R_max must be positive");
  if (nodes < 2) throw_invalid("RadialGrid: need at least 2 nodes");

  spacing_ = r_max / static_cast<double>(nodes - 1);
  nodes_.resize(nodes);
  for (std::size_t i = 0; i < nodes; ++i) nodes_[i] = spacing_ * static_cast<double>(i);
  nodes_.back() = r_max;

  const bool even_dimension = dimension % 2 == 0;
  weights_ = gregory_weights(nodes, even_dimension, true);
  const double sigma = sphere_area(dimension);
  for (std::size_t i = 0; i < nodes; ++i) {
    weights_[i] *= spacing_ * sigma * radial_power(nodes_[i], dimension);
  }
}

std::size_t RadialGrid::first_node_at_or_beyond(double radius) const {
  if (radius <= 0.0) return 0;
  auto idx = static_cast<std::size_t>(std::ceil(radius / spacing_ - 1e-12));
  return std::min(idx, nodes_.size());
}

GridPtr make_grid(int dimension, double r_max, std::size_t nodes) {
  return std::make_shared<const RadialGrid>(dimension, r_max, nodes);
}

RadialField::RadialField(GridPtr grid, std::vector<cplx> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw_invalid("RadialField: null grid");
  if (values_.size() != grid_->size()) {
    throw_invalid("RadialField: " + std::to_string(values_.size()) + " samples for a grid of " +
                  std::to_string(grid_->size()) + " nodes");
  }
}

RadialField RadialField::zeros(GridPtr grid) {
  const std::size_t n = grid->size();
  return RadialField(std::move(grid), std::vector<cplx>(n));
}

RadialField RadialField::from_function(GridPtr grid, const std::function<cplx(double)>& f) {
  std::vector<cplx> values(grid->size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = f(grid->node(i));
  return RadialField(std::move(grid), std::move(values));
}

RadialField RadialField::scaled(cplx factor) const {
  RadialField out = *this;
  for (auto& v : out.values_) v *= factor;
  return out;
}

double RadialField::max_abs() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool RadialField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](const cplx& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

double integrate(const RadialGrid& grid, std::span<const double> samples) {
  if (samples.size() != grid.size()) {
    throw_invalid("integrate: " + std::to_string(samples.size()) + " samples for a grid of " +
                  std::to_string(grid.size()) + " nodes");
  }
  const auto w = grid.weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) sum += w[i] * samples[i];
  return sum;
}

double integrate_beyond(const RadialGrid& grid, std::span<const double> samples, double radius) {
  if (samples.size() != grid.size()) throw_invalid("integrate_beyond: sample/grid length mismatch");
  if (radius >= grid.r_max()) throw_invalid("integrate_beyond: radius must lie inside the grid");
  if (radius <= 0.0) return integrate(grid, samples);

  const int dim = grid.dimension();
  const double h = grid.spacing();
  const double sigma = sphere_area(dim);
  const std::size_t m = grid.size();
  const std::size_t i0 = grid.first_node_at_or_beyond(radius);

  auto g = [&](std::size_t i) { return samples[i] * radial_power(grid.node(i), dim); };

  double sum = 0.0;
  const std::size_t n = m - i0;
  if (n >= 2) {
    const auto w = gregory_weights(n, true, true);
    for (std::size_t j = 0; j < n; ++j) sum += w[j] * g(i0 + j);
    sum *= h;
  }

  // Partial cell [radius, r_{i0}] from the quadratic through nodes i0-1, i0, i0+1.
  const double xr = (radius - grid.node(i0)) / h;  // in (-1, 0]
  if (xr < 0.0 && i0 >= 1) {
    auto prim_m1 = [](double x) { return x * x * x / 6.0 - x * x / 4.0; };
    auto prim_0 = [](double x) { return x - x * x * x / 3.0; };
    auto prim_p1 = [](double x) { return x * x * x / 6.0 + x * x / 4.0; };
    if (i0 + 1 < m) {
      sum += h * (g(i0 - 1) * (prim_m1(0.0) - prim_m1(xr)) + g(i0) * (prim_0(0.0) - prim_0(xr)) +
                  g(i0 + 1) * (prim_p1(0.0) - prim_p1(xr)));
    } else {
      // Linear interpolation between the last two nodes.
      const double a = g(i0 - 1);
      const double b = g(i0);
      sum += h * (-xr) * (b + 0.5 * xr * (b - a));
    }
  }
  return sigma * sum;
}

double lp_norm_pow(const RadialField& u, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw_invalid("lp_norm: p must be finite and >= 1");
  std::vector<double> f(u.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::pow(std::abs(u[i]), p);
  return integrate(u.grid(), f);
}

double lp_norm(const RadialField& u, double p) {
  return std::pow(lp_norm_pow(u, p), 1.0 / p);
}

std::vector<cplx> radial_derivative(const RadialField& u) {
  const std::size_t m = u.size();
  if (m < kCentral6.size()) {
    throw_invalid("radial_derivative: grid of " + std::to_string(m) +
                  " nodes is too coarse for the 7-point stencil");
  }
  const double inv_h = 1.0 / u.grid().spacing();
  const auto vals = u.values();
  auto at = [&](std::ptrdiff_t i) -> cplx { return vals[static_cast<std::size_t>(i < 0 ? -i : i)]; };

  std::vector<cplx> d(m);
  const auto last_central = static_cast<std::ptrdiff_t>(m) - 4;
  for (std::ptrdiff_t i = 0; i <= last_central; ++i) {
    cplx s = 0.0;
    for (std::ptrdiff_t k = -3; k <= 3; ++k) s += kCentral6[k + 3] * at(i + k);
    d[static_cast<std::size_t>(i)] = s * inv_h;
  }
  // One-sided stencils on the last seven nodes.
  std::array<double, 7> offsets{};
  for (std::size_t i = m - 3; i < m; ++i) {
    const std::size_t first = m - 7;
    for (std::size_t j = 0; j < 7; ++j) offsets[j] = static_cast<double>(first + j) - static_cast<double>(i);
    const auto w = fornberg_weights(0.0, offsets, 1);
    cplx s = 0.0;
    for (std::size_t j = 0; j < 7; ++j) s += w[j] * vals[first + j];
    d[i] = s * inv_h;
  }
  return d;
}

double gradient_norm(const RadialField& u) {
  const auto d = radial_derivative(u);
  std::vector<double> f(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) f[i] = std::norm(d[i]);
  return std::sqrt(std::max(0.0, integrate(u.grid(), f)));
}

double h1_norm_sq(const RadialField& u) {
  const double g = gradient_norm(u);
  return lp_norm_pow(u, 2.0) + g * g;
}

}  // namespace nlslab
