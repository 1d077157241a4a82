#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nlslab/cutoff.hpp"
#include "nlslab/propagator.hpp"
#include "nlslab/radial.hpp"

namespace nlslab {

enum class Splitting {
  strang,    // L(dt/2) N(dt) L(dt/2)
  yoshida4,  // triple-jump composition of Strang steps, fourth order
};

Splitting parse_splitting(std::string_view name);
std::string_view to_string(Splitting s);

/// dt = min(dt_max, grid_factor h^2, amplitude_factor / ||u||_inf^{p-1}).
/// A step below dt_min counts as resolution exhaustion.
struct TimestepPolicy {
  double dt_max = 1e-3;
  double grid_factor = 10.0;
  double amplitude_factor = 0.02;
  double dt_min = 1e-14;
};

struct BlowupOptions {
  bool enabled = true;
  /// Fires once ||grad u(t)||^2 >= growth * ||grad u(0)||^2.
  double growth = 1e3;
  /// Samples with grad_sq above fit_floor * (final grad_sq) enter the rate fit.
  double fit_floor = 1e-2;
};

struct ScatteringOptions {
  bool enabled = true;
  double burn_in = 5.0;
  /// Checks run every `window` time units after burn-in and compare against
  /// the previous check.
  double window = 5.0;
  /// Strichartz increment over the window relative to the accumulated total.
  double strichartz_tol = 1e-3;
  /// Required ratio l4_pow(t) / l4_pow(t - window).
  double l4_decay = 0.9;
  /// H^1-proxy distance between successive backward-pulled fields, relative
  /// to the H^1-proxy norm of the latest one.
  double cauchy_tol = 1e-2;
};

/// Diagnostics at one sampled time. The column order of the CSV output
/// follows the field order here.
struct Sample {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double grad_sq = 0.0;
  double l4_pow = 0.0;
  double lp1_pow = 0.0;
  double product_grad = 0.0;
  double virial_rhs = 0.0;
  double local_variance = 0.0;
  double local_virial_rhs = 0.0;
  double strichartz_accum = 0.0;
  double dt = 0.0;
  std::size_t nodes = 0;
  double max_amplitude = 0.0;
};

struct EvolveConfig {
  double p = 3.0;
  double t_end = 10.0;
  TimestepPolicy timestep;
  Splitting splitting = Splitting::yoshida4;
  PropagatorKind propagator = PropagatorKind::automatic;
  /// Record a sample every this many steps (and at t_end and at termination).
  int sample_stride = 10;
  BlowupOptions blowup;
  ScatteringOptions scattering;
  /// Stop the run as soon as a detector fires.
  bool stop_on_detection = true;
  /// Scale of the localized-variance cutoff; <= 0 picks the radius that
  /// encloses `cutoff_mass_fraction` of the initial mass.
  double cutoff_scale = 0.0;
  double cutoff_mass_fraction = 0.999;
  /// Regridding doubles the node count up to this bound.
  std::size_t max_nodes = (std::size_t{1} << 20) + 1;
  /// Drops the nonlinear substep: pure linear Schroedinger flow.
  bool nonlinear = true;
  /// Absorbing layer of this width at R_max (0 disables it). Damps by
  /// exp(-strength ((r - r_s)/width)^2 dt) beyond r_s = R_max - width.
  double sponge_width = 0.0;
  double sponge_strength = 0.0;
  /// Times at which (r, |u|) snapshots are kept.
  std::vector<double> snapshot_times;
  /// Called after every recorded sample.
  std::function<void(const Sample&)> on_sample;
};

/// Names of the Sample columns, in order.
const std::vector<std::string>& sample_columns();
std::vector<double> sample_row(const Sample& s);

enum class Outcome { blew_up, scattering_consistent, inconclusive };

std::string_view to_string(Outcome o);

/// ||grad u(t)|| ~ c (T - t)^{-alpha}, fitted on the tail of the record.
struct RateFit {
  double alpha = 0.0;
  double c = 0.0;
  double blowup_time = 0.0;
  double residual = 0.0;  // rms of the log-log fit
  std::size_t samples = 0;
};

struct BlowupDetection {
  double time = 0.0;
  double growth = 0.0;  // grad_sq(t) / grad_sq(0)
  std::optional<RateFit> rate_fit;
};

struct ScatteringReport {
  double time = 0.0;
  double strichartz_increment = 0.0;  // relative tail increment over the window
  double l4_ratio = 0.0;
  double cauchy_distance = 0.0;       // relative H^1-proxy distance
  RadialField phi_plus;               // e^{-it Delta} u(t)
};

/// State retained between scattering checks.
struct ScatteringCheckpoint {
  double time = 0.0;
  double strichartz_accum = 0.0;
  double l4_pow = 0.0;
  RadialField phi_plus;
};

struct Snapshot {
  double t = 0.0;
  RadialField field;
};

struct EvolutionRecord {
  double p = 3.0;
  int dimension = 3;
  double strichartz_exponent = 5.0;
  double cutoff_scale = 0.0;
  std::vector<Sample> samples;

  Outcome outcome = Outcome::inconclusive;
  std::string reason;
  std::optional<BlowupDetection> blowup;
  std::optional<ScatteringReport> scattering;

  std::size_t steps = 0;
  std::size_t regrids = 0;
  RadialField final_field;
  std::vector<Snapshot> snapshots;
};

/// Exponent q = 2(N+2)/(N - 2 s_c) of the space-time L^q proxy for the
/// critical Strichartz norm; 5 for the cubic problem in three dimensions.
double strichartz_exponent(double p, int dimension);

/// One splitting integrator bound to a grid.
class Stepper {
 public:
  Stepper(GridPtr grid, double p, Splitting splitting = Splitting::yoshida4,
          PropagatorKind kind = PropagatorKind::automatic, bool nonlinear = true);

  void step(std::span<cplx> u, double dt);

  LinearPropagator& propagator() noexcept { return *linear_; }
  const RadialGrid& grid() const noexcept { return linear_->grid(); }

  /// Rebinds to the doubled grid and returns the refined field.
  RadialField refine(const RadialField& u);

 private:
  void nonlinear_phase(std::span<cplx> u, double tau) const;

  double p_;
  Splitting splitting_;
  PropagatorKind kind_;
  bool nonlinear_;
  std::unique_ptr<LinearPropagator> linear_;
};

/// Advances u by one step of the default fourth-order splitting. Throws
/// Error(numerical) if the result is not finite.
RadialField step(const RadialField& u, double dt, double p = 3.0);

/// 8 ||grad u||^2 - 4N(p-1)/(p+1) ||u||_{p+1}^{p+1}: second time derivative of
/// the full variance. Equals 24E - 4||grad u||^2 for p = 3, N = 3.
double virial_rhs(const RadialField& u, double p = 3.0);

/// 4 int chi'' |u_r|^2 - int Delta^2 chi |u|^2 - 4 (1/2 - 1/(p+1)) int Delta chi |u|^{p+1}.
double local_virial_rhs(const RadialField& u, const CutoffProfile& chi, double p = 3.0);

/// int chi |u|^2.
double local_variance(const RadialField& u, const CutoffProfile& chi);

/// Smallest node radius enclosing the given fraction of the mass.
double mass_radius(const RadialField& u, double fraction);

std::optional<BlowupDetection> detect_blowup(const EvolutionRecord& record, const BlowupOptions& options = {});

/// Least-squares fit of log ||grad u|| = log c - alpha log(T - t) over the
/// supplied samples, minimizing the residual over T > last time.
std::optional<RateFit> fit_blowup_rate(std::span<const Sample> tail);

/// Builds the checkpoint for the current field by free evolution back to t = 0.
ScatteringCheckpoint scattering_checkpoint(const RadialField& u, double t, double strichartz_accum,
                                           LinearPropagator& propagator);

std::optional<ScatteringReport> detect_scattering(const ScatteringCheckpoint& previous,
                                                  const ScatteringCheckpoint& current,
                                                  const ScatteringOptions& options = {});

EvolutionRecord evolve(const RadialField& u0, const EvolveConfig& config);

}  // namespace nlslab
