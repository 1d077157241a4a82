#include <cmath>

#include "doctest.h"
#include "nlslab/classifier.hpp"
#include "nlslab/error.hpp"
#include "support.hpp"

using namespace nlslab;

namespace {

RadialField gaussian(const GridPtr& g, double a, double sigma) {
  return RadialField::from_function(g, [=](double r) { return cplx(a * std::exp(-r * r / (sigma * sigma)), 0.0); });
}

}  // namespace

TEST_SUITE("classifier") {

TEST_CASE("critical index endpoints") {
  CHECK(critical_index(3.0, 2) == doctest::Approx(0.0));
  CHECK(critical_index(5.0, 1) == doctest::Approx(0.0));
  CHECK(critical_index(5.0, 3) == doctest::Approx(1.0));
  CHECK(critical_index(3.0, 4) == doctest::Approx(1.0));
  CHECK(critical_index(3.0, 3) == doctest::Approx(0.5));
  CHECK(critical_index(7.0 / 3.0, 3) == doctest::Approx(0.0));
  CHECK_THROWS_AS(critical_index(1.0, 3), Error);
}

TEST_CASE("soliton multiples land in the expected categories") {
  const auto& q = support::cubic_q();
  const auto at = classify(report(q.profile, 3.0), q);
  CHECK(at.category == Category::at_threshold);
  CHECK(std::abs(*at.mass_energy.margin) < 1e-9);
  CHECK(std::abs(*at.gradient.margin) < 1e-9);
  CHECK(at.blowup_conclusion_valid);

  struct Case {
    double a;
    Category expected;
  };
  for (const Case c : {Case{0.5, Category::global_scatters_predicted}, Case{0.9, Category::global_scatters_predicted},
                       Case{1.1, Category::blowup_predicted}, Case{1.3, Category::negative_energy_blowup}}) {
    CAPTURE(c.a);
    const auto v = classify(report(q.profile.scaled(c.a), 3.0), q);
    CHECK(v.category == c.expected);
    CHECK(*v.gradient.margin == doctest::Approx(c.a - 1.0).epsilon(1e-9));
    const double ratio = 2.0 * std::pow(c.a, 4) * (1.5 - c.a * c.a);
    if (ratio > 0.0) {
      CHECK(*v.mass_energy.margin == doctest::Approx(std::sqrt(ratio) - 1.0).epsilon(1e-8));
    } else {
      CHECK_FALSE(v.mass_energy.margin.has_value());
    }
  }
}

TEST_CASE("above the mass-energy threshold is outside the theory") {
  const auto& q = support::cubic_q();
  // E M of A exp(-r^2) peaks near A^2 = 4 (pi/2)^{3/2} / (pi/4)^{3/2}, above the ground state.
  auto g = q.profile.grid_ptr();
  const auto v = classify(report(gaussian(g, 3.36, 1.0), 3.0), q);
  REQUIRE(v.mass_energy.margin.has_value());
  CHECK(*v.mass_energy.margin > 0.0);
  CHECK(v.category == Category::outside_theory);
}

TEST_CASE("verdicts are invariant under the NLS scaling") {
  // mu^{2/(p-1)} u(mu r) of A exp(-r^2/s^2) is mu A exp(-mu^2 r^2 / s^2) when p = 3.
  const auto& q = support::cubic_q();
  auto g = q.profile.grid_ptr();
  for (double a : {0.5, 1.5, 2.5}) {
    const auto base = classify(report(gaussian(g, a, 2.0), 3.0), q);
    for (double mu : {0.7, 1.6}) {
      CAPTURE(a);
      CAPTURE(mu);
      const auto v = classify(report(gaussian(g, mu * a, 2.0 / mu), 3.0), q);
      CHECK(v.category == base.category);
      CHECK(*v.gradient.margin == doctest::Approx(*base.gradient.margin).epsilon(1e-8));
      if (base.mass_energy.margin) CHECK(*v.mass_energy.margin == doctest::Approx(*base.mass_energy.margin).epsilon(1e-8));
    }
  }
}

TEST_CASE("negative energy") {
  const auto& q = support::cubic_q();
  const auto r = report(gaussian(q.profile.grid_ptr(), 5.0, 1.0), 3.0);
  REQUIRE(r.energy < 0.0);
  const auto v = classify(r, q);
  CHECK(v.category == Category::negative_energy_blowup);
  CHECK_FALSE(v.mass_energy.product.has_value());
}

TEST_CASE("near the endpoints of the supercritical window") {
  for (double p : {2.4, 4.5}) {
    CAPTURE(p);
    const auto q = solve_ground_state(p, 3, 1.0, make_grid(3, 40.0, 2049));
    CHECK(q.s_c == doctest::Approx(critical_index(p, 3)));
    const auto below = classify(report(q.profile.scaled(0.95), p), q);
    const auto above = classify(report(q.profile.scaled(1.02), p), q);
    CHECK(below.category == Category::global_scatters_predicted);
    CHECK(*below.gradient.margin == doctest::Approx(-0.05).epsilon(1e-8));
    CHECK(above.category == Category::blowup_predicted);
    // Off the cubic case the sub-threshold side is only global existence.
    CHECK_FALSE(below.notes.empty());
  }
}

TEST_CASE("options") {
  const auto& q = support::cubic_q();
  const auto r = report(q.profile.scaled(0.9), 3.0);
  ClassifyOptions o;
  o.apply_galilean = true;
  const auto v = classify(r, q, o);
  CHECK(v.galilean_applied);
  CHECK(v.category == Category::global_scatters_predicted);

  o.radial = false;
  o.finite_variance = false;
  CHECK_FALSE(classify(r, q, o).blowup_conclusion_valid);
  o.finite_variance = true;
  CHECK(classify(r, q, o).blowup_conclusion_valid);

  // A loose tie tolerance absorbs a near-threshold multiple.
  o = {};
  o.tie_tol = 0.05;
  CHECK(classify(report(q.profile.scaled(0.99), 3.0), q, o).category == Category::at_threshold);

  // Mismatched problem.
  auto r5 = r;
  r5.p = 4.0;
  CHECK_THROWS_AS(classify(r5, q), Error);

  CHECK(to_string(Category::blowup_predicted) == "BLOWUP_PREDICTED");
}

TEST_CASE("one dimension has no radial blow-up conclusion") {
  const auto q = solve_ground_state(7.0, 1, 1.0, make_grid(1, 15.0, 1501));
  const auto v = classify(report(q.profile.scaled(1.02), 7.0), q);
  CHECK(v.category == Category::blowup_predicted);
  CHECK_FALSE(v.blowup_conclusion_valid);
}

TEST_CASE("mass-energy products approach the mass at the lower endpoint") {
  // For u = 0.9 Q_p the product tends to M[u] and the threshold to M[Q] as s_c -> 0.
  auto g = make_grid(3, 40.0, 4097);
  double prev_u = 1e300, prev_q = 1e300;
  for (double p : {2.8, 2.5, 2.4, 2.35}) {
    const auto q = solve_ground_state(p, 3, 1.0, g);
    const auto r = report(q.profile.scaled(0.9), p);
    REQUIRE(r.product_me);
    const double du = std::abs(*r.product_me / r.mass - 1.0);
    const double dq = std::abs(q.threshold_me / q.mass - 1.0);
    CHECK(du < prev_u);
    CHECK(dq < prev_q);
    prev_u = du;
    prev_q = dq;
  }
  CHECK(prev_u < 0.1);
  CHECK(prev_q < 0.1);
}

}
