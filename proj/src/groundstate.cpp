#include "nlslab/groundstate.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "nlslab/classifier.hpp"
#include "nlslab/error.hpp"

namespace nlslab {

namespace {

enum class Shot { undershoot, overshoot };

struct Trajectory {
  Shot shot = Shot::undershoot;
  std::vector<double> value;  // Q at grid nodes, up to the first event
  std::vector<double> slope;  // Q' at grid nodes
};

class ShootingProblem {
 public:
  ShootingProblem(double p, int dimension, double lambda, const RadialGrid& grid, int substeps)
      : p_(p), dim_(dimension), lambda_(lambda), grid_(grid), substeps_(std::max(1, substeps)) {
    step_ = grid.spacing() / substeps_;
    r_cap_ = std::max(grid.r_max(), 80.0 / std::sqrt(lambda));
  }

  double source(double q) const { return lambda_ * q - std::pow(std::abs(q), p_ - 1.0) * q; }

  // Integrates outward from Q(0) = b until the trajectory either crosses zero
  // (overshoot) or turns upward while still positive (undershoot).
  Trajectory shoot(double b, bool record) const {
    Trajectory t;
    const std::size_t nodes = grid_.size();
    if (record) {
      t.value.reserve(nodes);
      t.slope.reserve(nodes);
      t.value.push_back(b);
      t.slope.push_back(0.0);
    }

    // Series start over the first substep: Q = b + c2 r^2 + c4 r^4.
    const double c2 = source(b) / (2.0 * dim_);
    const double dsource = lambda_ - p_ * std::pow(std::abs(b), p_ - 1.0);
    const double c4 = dsource * c2 / (4.0 * (dim_ + 2));
    double r = step_;
    double q = b + c2 * r * r + c4 * r * r * r * r;
    double dq = 2.0 * c2 * r + 4.0 * c4 * r * r * r;

    std::size_t sub = 1;
    std::size_t node = 0;
    std::optional<Shot> event;
    while (true) {
      if (sub == static_cast<std::size_t>(substeps_)) {
        sub = 0;
        ++node;
        if (record && node < nodes) {
          t.value.push_back(q);
          t.slope.push_back(dq);
        }
      }
      if (q <= 0.0) {
        event = Shot::overshoot;
      } else if (dq > 0.0) {
        event = Shot::undershoot;
      } else if (r >= r_cap_) {
        event = Shot::overshoot;  // still decaying monotonically at the cap
      }
      if (event) break;
      rk4(r, q, dq);
      r += step_;
      ++sub;
    }
    t.shot = *event;
    return t;
  }

 private:
  void rhs(double r, double q, double dq, double& out_q, double& out_dq) const {
    out_q = dq;
    out_dq = source(q) - (dim_ - 1) * dq / r;
  }

  void rk4(double r, double& q, double& dq) const {
    const double h = step_;
    double k1q, k1d, k2q, k2d, k3q, k3d, k4q, k4d;
    rhs(r, q, dq, k1q, k1d);
    rhs(r + 0.5 * h, q + 0.5 * h * k1q, dq + 0.5 * h * k1d, k2q, k2d);
    rhs(r + 0.5 * h, q + 0.5 * h * k2q, dq + 0.5 * h * k2d, k3q, k3d);
    rhs(r + h, q + h * k3q, dq + h * k3d, k4q, k4d);
    q += h / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
    dq += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
  }

  double p_;
  int dim_;
  double lambda_;
  const RadialGrid& grid_;
  int substeps_;
  double step_;
  double r_cap_;
};

// Decaying solution of the linearized equation, r^{1-N/2} K_{N/2-1}(sqrt(lambda) r).
double linear_tail(double r, int dimension, double lambda) {
  const double nu = std::abs(0.5 * dimension - 1.0);
  return std::pow(r, 1.0 - 0.5 * dimension) * std::cyl_bessel_k(nu, std::sqrt(lambda) * r);
}

}  // namespace

double expected_grad_mass_ratio(double p, int dimension, double normalization) {
  const double n = dimension;
  return normalization * n * (p - 1.0) / (2.0 * n - (n - 2.0) * (p + 1.0));
}

double expected_lp1_mass_ratio(double p, int dimension, double normalization) {
  return normalization + expected_grad_mass_ratio(p, dimension, normalization);
}

GroundState solve_ground_state(double p, int dimension, double normalization, GridPtr grid,
                               const GroundStateOptions& options) {
  if (!grid) throw_invalid("solve_ground_state: null grid");
  if (grid->dimension() != dimension) throw_invalid("solve_ground_state: grid dimension mismatch");
  if (!(p > 1.0)) throw_invalid("solve_ground_state: p must exceed 1");
  if (!(normalization > 0.0)) throw_invalid("solve_ground_state: normalization must be positive");
  const double s_c = critical_index(p, dimension);
  if (!(s_c > 1e-12 && s_c < 1.0 - 1e-12)) {
    throw_invalid("solve_ground_state: s_c = " + std::to_string(s_c) +
                  " lies outside the mass-supercritical, energy-subcritical window (0,1)");
  }

  const ShootingProblem problem(p, dimension, normalization, *grid, options.substeps);

  // Constant solution level; slightly above it the orbit undershoots.
  double lo = std::pow(normalization, 1.0 / (p - 1.0)) * (1.0 + 1e-6);
  if (problem.shoot(lo, false).shot != Shot::undershoot) {
    throw Error(ErrorCategory::convergence, "solve_ground_state: lower shooting bracket overshoots");
  }
  double hi = 2.0 * lo;
  int expansions = 0;
  while (problem.shoot(hi, false).shot != Shot::overshoot) {
    lo = hi;
    hi *= 2.0;
    if (++expansions > 60) {
      throw Error(ErrorCategory::convergence, "solve_ground_state: no sign change bracketed");
    }
  }

  int iterations = 0;
  for (; iterations < options.max_bisections; ++iterations) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // double precision exhausted
    if (problem.shoot(mid, false).shot == Shot::overshoot) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  const double width = hi - lo;
  if (width > options.tol * std::max(1.0, lo)) {
    throw Error(ErrorCategory::convergence,
                "solve_ground_state: bisection did not converge within " +
                    std::to_string(options.max_bisections) + " steps");
  }

  const Trajectory below = problem.shoot(lo, true);
  const Trajectory above = problem.shoot(hi, true);
  const std::size_t nodes = grid->size();
  const std::size_t available = std::min(below.value.size(), above.value.size());

  std::vector<double> q(nodes, 0.0);
  std::size_t match = 0;
  for (std::size_t i = 0; i < available; ++i) {
    const double a = below.value[i];
    const double b = above.value[i];
    const double mid = 0.5 * (a + b);
    const double mid_slope = 0.5 * (below.slope[i] + above.slope[i]);
    if (a <= 0.0 || b <= 0.0 || (i > 0 && mid_slope >= 0.0)) break;
    if (std::abs(b - a) > options.match_tolerance * mid) break;
    q[i] = mid;
    match = i;
  }
  if (match < 2) {
    throw Error(ErrorCategory::convergence, "solve_ground_state: shooting profile not resolved on grid");
  }
  const double r_match = grid->node(match);
  if (match + 1 < nodes) {
    const double tail_ref = linear_tail(r_match, dimension, normalization);
    for (std::size_t i = match + 1; i < nodes; ++i) {
      q[i] = q[match] * linear_tail(grid->node(i), dimension, normalization) / tail_ref;
    }
  }

  std::vector<cplx> values(q.begin(), q.end());
  GroundState gs{.profile = RadialField(grid, std::move(values))};
  gs.p = p;
  gs.dimension = dimension;
  gs.normalization = normalization;
  gs.s_c = s_c;
  gs.central_value = 0.5 * (lo + hi);
  gs.bracket_width = width;
  gs.bisections = iterations;
  gs.match_radius = r_match;

  gs.mass = lp_norm_pow(gs.profile, 2.0);
  const double g = gradient_norm(gs.profile);
  gs.grad_sq = g * g;
  gs.lp1_norm_pow = lp_norm_pow(gs.profile, p + 1.0);
  gs.energy = 0.5 * gs.grad_sq - gs.lp1_norm_pow / (p + 1.0);

  const SharpConstants sc = sharp_constants(gs);
  gs.c_gn = sc.c_gn;
  gs.threshold_me = sc.threshold_me;
  gs.threshold_grad = sc.threshold_grad;
  return gs;
}

PohozhaevResiduals verify_pohozhaev(const GroundState& q) {
  const double lam = q.normalization;
  const double n = q.dimension;
  const double m = q.mass;
  const double g = q.grad_sq;
  const double pp = q.lp1_norm_pow;

  PohozhaevResiduals r;
  r.q_multiplier = std::abs(-lam * m - g + pp) / (lam * m + g + pp);
  const double t1 = lam * n / 2.0 * m;
  const double t2 = (n - 2.0) / 2.0 * g;
  const double t3 = n / (q.p + 1.0) * pp;
  r.dilation_multiplier = std::abs(t1 + t2 - t3) / (std::abs(t1) + std::abs(t2) + std::abs(t3));
  return r;
}

SharpConstants sharp_constants(const GroundState& q) {
  const double n = q.dimension;
  const double grad_exp = n * (q.p - 1.0) / 2.0;
  const double mass_exp = 2.0 - (n - 2.0) * (q.p - 1.0) / 2.0;
  const double grad_norm = std::sqrt(q.grad_sq);
  const double l2_norm = std::sqrt(q.mass);

  SharpConstants sc;
  sc.c_gn = q.lp1_norm_pow / (std::pow(grad_norm, grad_exp) * std::pow(l2_norm, mass_exp));
  sc.threshold_me = std::pow(q.energy, q.s_c) * std::pow(q.mass, 1.0 - q.s_c);
  sc.threshold_grad = std::pow(grad_norm, q.s_c) * std::pow(l2_norm, 1.0 - q.s_c);
  return sc;
}

ScaledNorms scaled_norms(const GroundState& q, double mu) {
  const double n = q.dimension;
  const double a = 2.0 / (q.p - 1.0);
  return ScaledNorms{
      .mass = std::pow(mu, 2.0 * a - n) * q.mass,
      .grad_sq = std::pow(mu, 2.0 * a + 2.0 - n) * q.grad_sq,
      .lp1_norm_pow = std::pow(mu, a * (q.p + 1.0) - n) * q.lp1_norm_pow,
  };
}

}  // namespace nlslab
