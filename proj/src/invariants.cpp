#include "nlslab/invariants.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "nlslab/classifier.hpp"
#include "nlslab/error.hpp"

namespace nlslab {

namespace {

// Mean of the last Cartesian component of x/|x| over the unit sphere,
// evaluated by the midpoint rule in the polar angle. Zero up to rounding;
// it multiplies the radial current to give the momentum of a radial field.
double angular_first_moment(int dimension) {
  if (dimension == 1) return 0.5 * (1.0 + -1.0);
  constexpr int panels = 256;
  const double dtheta = std::numbers::pi / panels;
  double moment = 0.0;
  double norm = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double theta = (k + 0.5) * dtheta;
    const double jac = std::pow(std::sin(theta), dimension - 2);
    moment += std::cos(theta) * jac;
    norm += jac;
  }
  return moment / norm;
}

// |Im integral conj(u) grad u dx| for a radial field: the radial current
// J(r) = Im(conj(u) u_r) integrated against x/|x|.
double momentum_magnitude(const RadialField& u, const std::vector<cplx>& du) {
  std::vector<double> current(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) current[i] = std::imag(std::conj(u[i]) * du[i]);
  const double radial_flux = integrate(u.grid(), current);
  const int dim = u.grid().dimension();
  return std::abs(radial_flux * angular_first_moment(dim)) * std::sqrt(static_cast<double>(dim));
}

}  // namespace

void refresh_products(InvariantReport& r) {
  r.s_c = critical_index(r.p, r.dimension);
  const double grad = std::sqrt(std::max(0.0, r.grad_sq));
  const double l2 = std::sqrt(std::max(0.0, r.mass));
  r.product_grad = std::pow(grad, r.s_c) * std::pow(l2, 1.0 - r.s_c);
  if (r.energy >= 0.0) {
    r.product_me = std::pow(r.energy, r.s_c) * std::pow(r.mass, 1.0 - r.s_c);
  } else {
    r.product_me.reset();
  }
}

InvariantReport report(const RadialField& u, double p) {
  if (!(p > 1.0)) throw_invalid("report: p must exceed 1");
  InvariantReport r;
  r.p = p;
  r.dimension = u.grid().dimension();

  const auto du = radial_derivative(u);
  std::vector<double> grad(u.size());
  std::vector<double> mass(u.size());
  std::vector<double> l4(u.size());
  std::vector<double> lp1(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a2 = std::norm(u[i]);
    grad[i] = std::norm(du[i]);
    mass[i] = a2;
    l4[i] = a2 * a2;
    lp1[i] = std::pow(a2, 0.5 * (p + 1.0));
  }
  const RadialGrid& grid = u.grid();
  r.mass = integrate(grid, mass);
  r.grad_sq = integrate(grid, grad);
  r.l4_pow = integrate(grid, l4);
  r.lp1_pow = integrate(grid, lp1);
  r.energy = 0.5 * r.grad_sq - r.lp1_pow / (p + 1.0);
  r.momentum = momentum_magnitude(u, du);
  refresh_products(r);
  return r;
}

InvariantReport galilean_reduce(const InvariantReport& r) {
  if (!(r.mass > 0.0)) {
    throw_invalid("galilean_reduce: the boost xi_0 = -P/M needs positive mass");
  }
  InvariantReport out = r;
  const double p2 = r.momentum * r.momentum;
  out.energy = r.energy - p2 / (2.0 * r.mass);
  out.grad_sq = r.grad_sq - p2 / r.mass;
  out.momentum = 0.0;
  refresh_products(out);
  return out;
}

double check_gn(const RadialField& u, const GroundState& q) {
  if (u.grid().dimension() != q.dimension) throw_invalid("check_gn: dimension mismatch");
  const double n = q.dimension;
  const double grad = gradient_norm(u);
  const double l2 = lp_norm(u, 2.0);
  const double lhs = lp_norm_pow(u, q.p + 1.0);
  const double grad_exp = n * (q.p - 1.0) / 2.0;
  const double mass_exp = 2.0 - (n - 2.0) * (q.p - 1.0) / 2.0;
  return q.c_gn * std::pow(grad, grad_exp) * std::pow(l2, mass_exp) - lhs;
}

StraussTerms check_strauss(const RadialField& u, double radius) {
  if (!(radius > 0.0)) throw_invalid("check_strauss: radius must be positive");
  if (radius >= u.grid().r_max()) throw_invalid("check_strauss: radius must lie inside the grid");
  const auto du = radial_derivative(u);
  std::vector<double> l2(u.size());
  std::vector<double> l4(u.size());
  std::vector<double> grad(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a2 = std::norm(u[i]);
    l2[i] = a2;
    l4[i] = a2 * a2;
    grad[i] = std::norm(du[i]);
  }
  const RadialGrid& grid = u.grid();
  StraussTerms t;
  t.lhs = integrate_beyond(grid, l4, radius);
  const double mass_out = std::max(0.0, integrate_beyond(grid, l2, radius));
  const double grad_out = std::max(0.0, integrate_beyond(grid, grad, radius));
  t.rhs_without_c = std::pow(mass_out, 1.5) * std::sqrt(grad_out) / (radius * radius);
  return t;
}

double convexity_bound(const RadialField& u) {
  if (u.grid().dimension() != 3) throw_invalid("convexity_bound: defined for N = 3");
  const double g = gradient_norm(u);
  return 8.0 * g * g - 6.0 * lp_norm_pow(u, 4.0);
}

double threshold_gradient_ratio(double level) {
  if (!(level >= 0.0 && level <= 1.0)) throw_invalid("threshold_gradient_ratio: level outside [0,1]");
  // 3y^2 - 2y^3 increases monotonically on [0,1].
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (3.0 * mid * mid - 2.0 * mid * mid * mid < level) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double convexity_constant(double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw_invalid("convexity_constant: delta must lie in (0,1]");
  return 8.0 * (1.0 - threshold_gradient_ratio(1.0 - delta));
}

bool comparability_holds(const InvariantReport& r, double tolerance) {
  const double slack = tolerance * r.grad_sq;
  return r.grad_sq / 6.0 <= r.energy + slack && r.energy <= r.grad_sq / 2.0 + slack;
}

}  // namespace nlslab
