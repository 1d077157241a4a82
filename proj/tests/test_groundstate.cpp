#include <array>
#include <cmath>

#include <boost/numeric/odeint.hpp>

#include "doctest.h"
#include "nlslab/classifier.hpp"
#include "nlslab/error.hpp"
#include "nlslab/groundstate.hpp"
#include "support.hpp"

using namespace nlslab;

namespace {

// Shooting with an adaptive Dormand-Prince integrator, independent of the
// fixed-step solver in the library. Returns +1 when the orbit crosses zero,
// -1 when it turns back up.
int shoot_oracle(double q0, double p, int n, double lambda, double r_end) {
  namespace ode = boost::numeric::odeint;
  using State = std::array<double, 2>;
  const double r0 = 1e-4;
  const double c = (lambda * q0 - std::pow(q0, p)) / (2.0 * n);
  State y{q0 + c * r0 * r0, 2.0 * c * r0};
  auto rhs = [&](const State& s, State& d, double r) {
    d[0] = s[1];
    d[1] = -(n - 1) / r * s[1] + lambda * s[0] - std::pow(std::abs(s[0]), p - 1.0) * s[0];
  };
  auto stepper = ode::make_controlled(1e-14, 1e-14, ode::runge_kutta_dopri5<State>());
  double r = r0;
  double dr = 1e-3;
  while (r < r_end) {
    if (stepper.try_step(rhs, y, r, dr) != ode::success) continue;
    if (y[0] < 0.0) return +1;
    if (y[1] > 0.0) return -1;
  }
  return 0;
}

double oracle_central_value(double p, int n, double lambda, double lo, double hi) {
  for (int i = 0; i < 60 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    const int s = shoot_oracle(mid, p, n, lambda, 30.0);
    if (s == 0) break;
    (s > 0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

// Central value of the cubic ground state in three dimensions at lambda = 1,
// frozen from the oracle above.
constexpr double kCubicCentre = 4.33738768;

}  // namespace

TEST_SUITE("groundstate") {

TEST_CASE("independent shooting oracle agrees with the frozen central value") {
  CHECK(oracle_central_value(3.0, 3, 1.0, 4.0, 4.7) == doctest::Approx(kCubicCentre).epsilon(1e-8));
}

TEST_CASE("cubic ground state in three dimensions") {
  const auto& q = support::cubic_q();
  CHECK(std::abs(q.central_value - kCubicCentre) < 2e-8);
  CHECK(q.s_c == doctest::Approx(0.5));
  CHECK(q.grad_sq / q.mass == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(q.lp1_norm_pow / q.mass == doctest::Approx(4.0).epsilon(1e-8));
  CHECK(q.energy == doctest::Approx(0.5 * q.mass).epsilon(1e-8));
  CHECK(q.c_gn == doctest::Approx(4.0 / (3.0 * std::sqrt(3.0) * q.mass)).epsilon(1e-9));
  CHECK(q.threshold_me == doctest::Approx(std::sqrt(q.energy * q.mass)).epsilon(1e-12));
  CHECK(q.threshold_grad == doctest::Approx(std::sqrt(std::sqrt(q.grad_sq * q.mass))).epsilon(1e-12));

  const auto sc = sharp_constants(q);
  CHECK(sc.c_gn == doctest::Approx(q.c_gn).epsilon(1e-12));

  // Positive and decreasing.
  const auto v = q.profile.values();
  for (std::size_t i = 1; i < v.size(); ++i) {
    REQUIRE(v[i].real() > 0.0);
    REQUIRE(v[i].real() <= v[i - 1].real());
    REQUIRE(v[i].imag() == 0.0);
  }
}

TEST_CASE("Pohozhaev residuals shrink under refinement") {
  auto coarse = verify_pohozhaev(support::coarse_q());
  auto fine = verify_pohozhaev(support::cubic_q());
  CHECK(std::abs(fine.q_multiplier) < 1e-8);
  CHECK(std::abs(fine.dilation_multiplier) < 1e-8);
  CHECK(std::abs(fine.q_multiplier) < std::abs(coarse.q_multiplier));
  CHECK(std::abs(fine.dilation_multiplier) < std::abs(coarse.dilation_multiplier));
}

TEST_CASE("expected norm ratios") {
  CHECK(expected_grad_mass_ratio(3.0, 3, 1.0) == doctest::Approx(3.0));
  CHECK(expected_lp1_mass_ratio(3.0, 3, 1.0) == doctest::Approx(4.0));
  // G / M = lambda N (p - 1) / (N + 2 - (N - 2) p).
  CHECK(expected_grad_mass_ratio(4.0, 3, 2.0) == doctest::Approx(2.0 * 3 * 3 / (5.0 - 4.0)));
  CHECK(expected_grad_mass_ratio(7.0, 1, 1.0) == doctest::Approx(6.0 / 10.0));
}

TEST_CASE("other supercritical pairs satisfy both identities") {
  struct Case {
    double p;
    int n;
    double lo, hi;
  };
  for (const Case c : {Case{4.0, 3, 1.01, 50.0}, Case{2.5, 4, 1.01, 50.0}, Case{5.0, 2, 1.01, 50.0}}) {
    CAPTURE(c.p);
    CAPTURE(c.n);
    const auto q = solve_ground_state(c.p, c.n, 1.0, make_grid(c.n, 30.0, 6001));
    const auto res = verify_pohozhaev(q);
    CHECK(std::abs(res.q_multiplier) < 1e-7);
    CHECK(std::abs(res.dilation_multiplier) < 1e-7);
    CHECK(q.grad_sq / q.mass == doctest::Approx(expected_grad_mass_ratio(c.p, c.n, 1.0)).epsilon(1e-7));
    CHECK(q.s_c == doctest::Approx(critical_index(c.p, c.n)));
    const double oracle = oracle_central_value(c.p, c.n, 1.0, c.lo, c.hi);
    CHECK(q.central_value == doctest::Approx(oracle).epsilon(1e-7));
  }
}

TEST_CASE("one-dimensional profile matches the sech closed form") {
  // Q = [(p+1) lambda / 2 sech^2((p-1) sqrt(lambda) x / 2)]^{1/(p-1)}; p = 7 gives Q(0) = 4^{1/6}.
  const double p = 7.0;
  const auto q = solve_ground_state(p, 1, 1.0, make_grid(1, 15.0, 3001));
  CHECK(q.central_value == doctest::Approx(std::pow(4.0, 1.0 / 6.0)).epsilon(1e-9));
  double err = 0.0;
  for (std::size_t i = 0; i < q.profile.size(); ++i) {
    const double x = q.profile.grid().node(i);
    const double sech = 1.0 / std::cosh(3.0 * x);
    err = std::max(err, std::abs(q.profile[i].real() - std::pow(4.0 * sech * sech, 1.0 / 6.0)));
  }
  CHECK(err < 1e-7);
}

TEST_CASE("changing lambda follows the NLS scaling") {
  // mu^{2/(p-1)} Q(mu r) solves the profile equation with lambda mu^2.
  const auto& q = support::cubic_q();
  const double mu = 2.0;
  const auto q4 = solve_ground_state(3.0, 3, mu * mu, make_grid(3, 40.0, 4097));
  const auto s = scaled_norms(q, mu);
  CHECK(q4.central_value == doctest::Approx(mu * q.central_value).epsilon(1e-7));
  CHECK(q4.mass == doctest::Approx(s.mass).epsilon(1e-5));
  CHECK(q4.grad_sq == doctest::Approx(s.grad_sq).epsilon(1e-5));
  CHECK(q4.lp1_norm_pow == doctest::Approx(s.lp1_norm_pow).epsilon(1e-5));
  // The scale-invariant quantities do not move.
  CHECK(q4.c_gn == doctest::Approx(q.c_gn).epsilon(1e-5));
  CHECK(q4.threshold_me == doctest::Approx(q.threshold_me).epsilon(1e-5));
  CHECK(q4.threshold_grad == doctest::Approx(q.threshold_grad).epsilon(1e-5));
}

TEST_CASE("rejected inputs") {
  auto g3 = make_grid(3, 40.0, 1025);
  CHECK_THROWS_AS(solve_ground_state(3.0, 2, 1.0, g3), Error);  // dimension mismatch
  CHECK_THROWS_AS(solve_ground_state(1.0, 3, 1.0, g3), Error);
  CHECK_THROWS_AS(solve_ground_state(3.0, 3, 0.0, g3), Error);
  CHECK_THROWS_AS(solve_ground_state(5.0, 3, 1.0, g3), Error);                      // s_c = 1
  CHECK_THROWS_AS(solve_ground_state(3.0, 2, 1.0, make_grid(2, 40.0, 1025)), Error);  // s_c = 0
  CHECK_THROWS_AS(solve_ground_state(3.0, 3, 1.0, nullptr), Error);
  try {
    solve_ground_state(5.0, 3, 1.0, g3);
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::invalid_argument);
  }
}

}
