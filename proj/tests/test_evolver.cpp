#include <cmath>

#include "doctest.h"
#include "nlslab/error.hpp"
#include "nlslab/evolver.hpp"
#include "nlslab/invariants.hpp"
#include "support.hpp"

using namespace nlslab;

TEST_SUITE("evolver") {

TEST_CASE("strichartz exponent") {
  CHECK(strichartz_exponent(3.0, 3) == doctest::Approx(5.0));
  // q = 2(N+2)/(N - 2 s_c); s_c = 1/6 for (7, 1).
  CHECK(strichartz_exponent(7.0, 1) == doctest::Approx(9.0));
}

TEST_CASE("the ground state only rotates its phase") {
  const auto& q = support::cubic_q();
  const double dt = 1e-3;
  const auto u = step(q.profile, dt);
  const cplx phase = std::polar(1.0, dt);
  CHECK(support::max_abs_diff(u, q.profile.scaled(phase)) < 1e-8 * q.central_value);
}

TEST_CASE("linear stepper matches the free flow") {
  auto g = make_grid(3, 30.0, 513);
  std::mt19937_64 rng(8);
  const auto u0 = support::random_smooth_field(g, rng);
  Stepper s(g, 3.0, Splitting::strang, PropagatorKind::automatic, false);
  auto u = u0;
  for (int i = 0; i < 10; ++i) s.step(u.values(), 0.01);
  auto v = u0;
  make_propagator(g)->advance(v.values(), 0.1);
  CHECK(support::max_abs_diff(u, v) < 1e-12);
}

TEST_CASE("splittings converge at their orders") {
  const auto& q = support::coarse_q();
  auto g = q.profile.grid_ptr();
  const auto u0 = q.profile.scaled(0.8);
  auto run = [&](Splitting sp, int n) {
    Stepper s(g, 3.0, sp);
    auto u = u0;
    for (int i = 0; i < n; ++i) s.step(u.values(), 0.1 / n);
    return u;
  };
  for (auto [sp, order] : {std::pair{Splitting::strang, 2.0}, std::pair{Splitting::yoshida4, 4.0}}) {
    const auto ref = run(sp, 400);
    const double e1 = support::max_abs_diff(run(sp, 25), ref);
    const double e2 = support::max_abs_diff(run(sp, 50), ref);
    CAPTURE(order);
    CHECK(std::log2(e1 / e2) > order - 0.3);
  }
}

TEST_CASE("variance identities for soliton multiples") {
  const auto& q = support::cubic_q();
  CHECK(std::abs(virial_rhs(q.profile)) < 1e-8 * 8.0 * q.grad_sq);
  const double a = 0.9;
  CHECK(virial_rhs(q.profile.scaled(a)) == doctest::Approx(24.0 * a * a * (1.0 - a * a) * q.mass).epsilon(1e-7));
  // A cutoff wider than the data reduces to the untruncated identity.
  const auto u = q.profile.scaled(a);
  const auto wide = make_cutoff(u.grid(), 13.0);
  CHECK(local_virial_rhs(u, wide) == doctest::Approx(virial_rhs(u)).epsilon(1e-8));
  const auto quad = make_quadratic_weight(u.grid());
  CHECK(local_variance(u, wide) == doctest::Approx(local_variance(u, quad)).epsilon(1e-10));
  CHECK(local_variance(u, quad) > 0.0);
}

TEST_CASE("mass radius") {
  auto g = make_grid(3, 20.0, 2001);
  const auto u = RadialField::from_function(g, [](double r) { return cplx(std::exp(-r * r), 0.0); });
  // Mass fraction inside R of exp(-2 r^2) is erf(sqrt2 R) - sqrt(8/pi) R exp(-2 R^2).
  const double r = mass_radius(u, 0.9);
  const double frac = std::erf(std::sqrt(2.0) * r) - std::sqrt(8.0 / M_PI) * r * std::exp(-2.0 * r * r);
  CHECK(frac > 0.9 - 1e-3);
  CHECK(frac < 0.9 + 1e-2);
}

TEST_CASE("rate fit recovers a synthetic power law") {
  const double alpha = 0.5;
  const double big_t = 1.0;
  const double c = 2.0;
  std::vector<Sample> tail;
  for (int i = 0; i < 60; ++i) {
    Sample s;
    s.t = big_t - 0.1 * std::pow(0.9, i);
    const double g = c * std::pow(big_t - s.t, -alpha);
    s.grad_sq = g * g;
    tail.push_back(s);
  }
  const auto fit = fit_blowup_rate(tail);
  REQUIRE(fit);
  CHECK(fit->alpha == doctest::Approx(alpha).epsilon(1e-6));
  CHECK(fit->blowup_time == doctest::Approx(big_t).epsilon(1e-9));
  CHECK(fit->c == doctest::Approx(c).epsilon(1e-5));
  CHECK(fit->residual < 1e-8);
  CHECK_FALSE(fit_blowup_rate(std::span(tail).first(3)));
}

TEST_CASE("blow-up detector fires on growth") {
  EvolutionRecord rec;
  Sample s;
  s.grad_sq = 1.0;
  rec.samples.push_back(s);
  s.t = 0.5;
  s.grad_sq = 999.0;
  rec.samples.push_back(s);
  CHECK_FALSE(detect_blowup(rec));
  rec.samples.back().grad_sq = 1000.0;
  const auto d = detect_blowup(rec);
  REQUIRE(d);
  CHECK(d->growth == doctest::Approx(1000.0));
  BlowupOptions off;
  off.enabled = false;
  CHECK_FALSE(detect_blowup(rec, off));
}

TEST_CASE("small data scatters to nearly its own free profile") {
  auto g = make_grid(3, 80.0, 2049);
  const auto u0 = RadialField::from_function(g, [](double r) { return cplx(0.1 * std::exp(-r * r / 4.0), 0.0); });
  EvolveConfig c;
  c.t_end = 12.0;
  c.timestep.dt_max = 1e-2;
  c.scattering.burn_in = 2.0;
  c.scattering.window = 2.0;
  const auto rec = evolve(u0, c);
  CHECK(rec.outcome == Outcome::scattering_consistent);
  REQUIRE(rec.scattering);
  CHECK(rec.scattering->l4_ratio < c.scattering.l4_decay);
  std::vector<cplx> diff(u0.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = rec.scattering->phi_plus[i] - u0[i];
  const double rel = std::sqrt(lp_norm_pow(RadialField(g, diff), 2.0) / lp_norm_pow(u0, 2.0));
  CHECK(rel < 0.03);
  CHECK(rec.blowup == std::nullopt);
  // Mass is conserved by every substep.
  CHECK(rec.samples.back().mass == doctest::Approx(rec.samples.front().mass).epsilon(1e-10));
}

TEST_CASE("the ground state is stationary over short times") {
  // Q is linearly unstable, so its discretization error grows like exp(5.5 t);
  // on this grid the profile stays put to 1e-4 only up to t of about 0.5.
  const auto& q = support::coarse_q();
  EvolveConfig c;
  c.t_end = 0.5;
  c.timestep.dt_max = 1e-2;
  c.scattering.burn_in = 0.25;
  c.scattering.window = 0.25;
  const auto rec = evolve(q.profile, c);
  CHECK(rec.outcome == Outcome::inconclusive);
  CHECK(rec.reason == "stationary");
  CHECK(rec.regrids == 0);
  for (const auto& s : rec.samples) {
    REQUIRE(s.mass == doctest::Approx(q.mass).epsilon(1e-10));
    REQUIRE(s.energy == doctest::Approx(q.energy).epsilon(1e-6));
  }
  double dev = 0.0;
  for (std::size_t i = 0; i < q.profile.size(); ++i) {
    dev = std::max(dev, std::abs(std::abs(rec.final_field[i]) - q.profile[i].real()));
  }
  CHECK(dev < 1e-4 * q.central_value);
}

TEST_CASE("snapshots, callbacks and sample columns") {
  const auto& q = support::coarse_q();
  EvolveConfig c;
  c.t_end = 0.2;
  c.snapshot_times = {0.05, 0.1};
  c.scattering.enabled = false;
  int seen = 0;
  c.on_sample = [&](const Sample&) { ++seen; };
  const auto rec = evolve(q.profile.scaled(0.5), c);
  REQUIRE(rec.snapshots.size() == 2);
  CHECK(rec.snapshots[0].t == doctest::Approx(0.05));
  CHECK(rec.snapshots[1].t == doctest::Approx(0.1));
  CHECK(seen >= static_cast<int>(rec.samples.size()) - 1);
  CHECK(rec.samples.back().t == doctest::Approx(0.2));
  CHECK(sample_columns().size() == sample_row(rec.samples.front()).size());
  CHECK(sample_columns().front() == "t");
}

TEST_CASE("configuration errors") {
  const auto& q = support::coarse_q();
  EvolveConfig c;
  c.t_end = -1.0;
  CHECK_THROWS_AS(evolve(q.profile, c), Error);
  c = {};
  c.sample_stride = 0;
  CHECK_THROWS_AS(evolve(q.profile, c), Error);
  c = {};
  c.sponge_width = 100.0;
  CHECK_THROWS_AS(evolve(q.profile, c), Error);
  c = {};
  auto bad = q.profile;
  bad[3] = cplx(INFINITY, 0.0);
  CHECK_THROWS_AS(evolve(bad, c), Error);
  CHECK(parse_splitting("strang") == Splitting::strang);
  CHECK_THROWS_AS(parse_splitting("euler"), Error);
}

}
