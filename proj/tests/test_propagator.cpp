#include <cmath>

#include "doctest.h"
#include "nlslab/error.hpp"
#include "nlslab/propagator.hpp"
#include "support.hpp"

using namespace nlslab;

namespace {

// Free evolution of exp(-r^2 / s^2) in N dimensions.
cplx free_gaussian(double r, double t, double s, int n) {
  const cplx z = s * s + cplx(0.0, 4.0 * t);
  return std::pow(cplx(s * s, 0.0) / z, 0.5 * n) * std::exp(-r * r / z);
}

double free_error(PropagatorKind kind, int n, double r_max, std::size_t nodes, double t, double substep = 1e-3) {
  const double s = 1.5;
  auto g = make_grid(n, r_max, nodes);
  auto u = RadialField::from_function(g, [&](double r) { return free_gaussian(r, 0.0, s, n); });
  auto prop = make_propagator(g, kind);
  prop->free_substep = substep;
  prop->free_evolve(u.values(), t);
  double err = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) err = std::max(err, std::abs(u[i] - free_gaussian(g->node(i), t, s, n)));
  return err;
}

}  // namespace

TEST_SUITE("propagator") {

TEST_CASE("sine propagator is exact for a free gaussian in three dimensions") {
  CHECK(free_error(PropagatorKind::sine_spectral, 3, 40.0, 1025, 1.0) < 1e-11);
  CHECK(free_error(PropagatorKind::sine_spectral, 3, 40.0, 1025, 2.5) < 1e-11);
  CHECK(free_error(PropagatorKind::automatic, 3, 40.0, 1000, 1.0) < 1e-11);
}

TEST_CASE("mirrored sine propagator is exact in one dimension") {
  CHECK(free_error(PropagatorKind::mirrored_sine, 1, 40.0, 1025, 1.0) < 1e-11);
  CHECK(free_error(PropagatorKind::automatic, 1, 40.0, 777, 2.0) < 1e-11);
}

TEST_CASE("Crank-Nicolson converges at second order") {
  for (int n : {2, 3, 4}) {
    CAPTURE(n);
    const double coarse = free_error(PropagatorKind::crank_nicolson, n, 30.0, 601, 0.5, 2e-3);
    const double fine = free_error(PropagatorKind::crank_nicolson, n, 30.0, 1201, 0.5, 1e-3);
    CHECK(fine < 2e-3);
    CHECK(coarse / fine > 3.5);
  }
}

TEST_CASE("zero stays zero and the flow is unitary") {
  auto g = make_grid(3, 20.0, 513);
  auto prop = make_propagator(g);
  auto z = RadialField::zeros(g);
  prop->advance(z.values(), 0.3);
  CHECK(z.max_abs() == 0.0);

  auto u = RadialField::from_function(g, [](double r) { return cplx(1.0, r * r) * std::exp(-r * r / 4.0); });
  const double m0 = lp_norm_pow(u, 2.0);
  prop->advance(u.values(), 0.7);
  CHECK(lp_norm_pow(u, 2.0) == doctest::Approx(m0).epsilon(1e-12));
}

TEST_CASE("forward then backward returns the data") {
  std::mt19937_64 rng(4);
  for (auto kind : {PropagatorKind::sine_spectral, PropagatorKind::crank_nicolson}) {
    auto g = make_grid(3, 20.0, 401);
    const auto u0 = support::random_smooth_field(g, rng);
    auto u = u0;
    auto prop = make_propagator(g, kind);
    prop->advance(u.values(), 0.05);
    prop->advance(u.values(), -0.05);
    CHECK(support::max_abs_diff(u, u0) < 1e-11 * u0.max_abs());
  }
}

TEST_CASE("spectral refinement interpolates smooth data") {
  for (int n : {1, 3}) {
    CAPTURE(n);
    auto g = make_grid(n, 30.0, 513);
    auto f = [](double r) { return cplx(std::exp(-r * r / 4.0), r * r * std::exp(-r * r / 3.0)); };
    const auto u = RadialField::from_function(g, f);
    auto prop = make_propagator(g);
    const auto fine = prop->refine(u.values());
    auto g2 = refined_grid(*g);
    REQUIRE(fine.size() == 1025);
    REQUIRE(g2->size() == 1025);
    double err = 0.0;
    for (std::size_t i = 0; i < fine.size(); ++i) err = std::max(err, std::abs(fine[i] - f(g2->node(i))));
    CHECK(err < 1e-10);
  }
}

TEST_CASE("cubic refinement for Crank-Nicolson") {
  auto g = make_grid(2, 20.0, 401);
  auto f = [](double r) { return cplx(std::exp(-r * r / 4.0), 0.0); };
  const auto u = RadialField::from_function(g, f);
  auto prop = make_propagator(g);
  CHECK(prop->kind() == PropagatorKind::crank_nicolson);
  const auto fine = prop->refine(u.values());
  auto g2 = refined_grid(*g);
  double err = 0.0;
  for (std::size_t i = 0; i < fine.size(); ++i) err = std::max(err, std::abs(fine[i] - f(g2->node(i))));
  CHECK(err < 1e-5);
}

TEST_CASE("resolution indicator separates resolved and unresolved data") {
  const auto& q = support::cubic_q();
  auto prop = make_propagator(q.profile.grid_ptr());
  CHECK(prop->resolution_indicator(q.profile.values()) < prop->resolution_threshold());
  auto g = make_grid(3, 40.0, 513);
  // A spike a few cells wide.
  const auto spike = RadialField::from_function(g, [](double r) { return cplx(std::exp(-r * r / 0.02), 0.0); });
  auto coarse = make_propagator(g);
  CHECK(coarse->resolution_indicator(spike.values()) > coarse->resolution_threshold());
}

TEST_CASE("kind parsing and validation") {
  CHECK(parse_propagator_kind("auto") == PropagatorKind::automatic);
  CHECK(parse_propagator_kind("sine") == PropagatorKind::sine_spectral);
  CHECK(parse_propagator_kind("mirrored-sine") == PropagatorKind::mirrored_sine);
  CHECK(parse_propagator_kind("cn") == PropagatorKind::crank_nicolson);
  CHECK(to_string(PropagatorKind::crank_nicolson) == "crank-nicolson");
  CHECK_THROWS_AS(parse_propagator_kind("fourier"), Error);
  CHECK_THROWS_AS(make_propagator(make_grid(2, 10.0, 100), PropagatorKind::sine_spectral), Error);
  CHECK_THROWS_AS(make_propagator(make_grid(3, 10.0, 100), PropagatorKind::mirrored_sine), Error);
  CHECK_THROWS_AS(make_propagator(make_grid(3, 10.0, 4)), Error);
  CHECK(make_propagator(make_grid(3, 10.0, 100))->exact());
  CHECK_FALSE(make_propagator(make_grid(3, 10.0, 100), PropagatorKind::crank_nicolson)->exact());
}

}
