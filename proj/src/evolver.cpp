#include "nlslab/evolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nlslab/classifier.hpp"
#include "nlslab/error.hpp"
#include "nlslab/invariants.hpp"

namespace nlslab {

Splitting parse_splitting(std::string_view name) {
  if (name == "strang") return Splitting::strang;
  if (name == "yoshida4" || name == "yoshida") return Splitting::yoshida4;
  throw_invalid("unknown splitting '" + std::string(name) + "'");
}

std::string_view to_string(Splitting s) {
  return s == Splitting::strang ? "strang" : "yoshida4";
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::blew_up:
      return "BLEW_UP";
    case Outcome::scattering_consistent:
      return "SCATTERING_CONSISTENT";
    case Outcome::inconclusive:
      return "INCONCLUSIVE";
  }
  return "UNKNOWN";
}

const std::vector<std::string>& sample_columns() {
  static const std::vector<std::string> cols = {
      "t",       "mass",           "energy",           "grad_sq",          "l4_pow",
      "lp1_pow", "product_grad",   "virial_rhs",       "local_variance",   "local_virial_rhs",
      "strichartz_accum", "dt",    "nodes",            "max_amplitude"};
  return cols;
}

std::vector<double> sample_row(const Sample& s) {
  return {s.t,          s.mass,           s.energy,         s.grad_sq,          s.l4_pow,
          s.lp1_pow,    s.product_grad,   s.virial_rhs,     s.local_variance,   s.local_virial_rhs,
          s.strichartz_accum, s.dt,       static_cast<double>(s.nodes),         s.max_amplitude};
}

double strichartz_exponent(double p, int dimension) {
  const double s_c = critical_index(p, dimension);
  return 2.0 * (dimension + 2.0) / (dimension - 2.0 * s_c);
}

// ---------------------------------------------------------------------------
// Stepper

Stepper::Stepper(GridPtr grid, double p, Splitting splitting, PropagatorKind kind, bool nonlinear)
    : p_(p), splitting_(splitting), kind_(kind), nonlinear_(nonlinear), linear_(make_propagator(std::move(grid), kind)) {
  if (!(p > 1.0)) throw_invalid("Stepper: p must exceed 1");
}

void Stepper::nonlinear_phase(std::span<cplx> u, double tau) const {
  if (!nonlinear_) return;
  const double half_power = 0.5 * (p_ - 1.0);
  const bool cubic = p_ == 3.0;
  for (auto& v : u) {
    const double a2 = std::norm(v);
    const double rate = cubic ? a2 : std::pow(a2, half_power);
    v *= std::polar(1.0, tau * rate);
  }
}

void Stepper::step(std::span<cplx> u, double dt) {
  if (splitting_ == Splitting::strang) {
    linear_->advance(u, 0.5 * dt);
    nonlinear_phase(u, dt);
    linear_->advance(u, 0.5 * dt);
    return;
  }
  const double cbrt2 = std::cbrt(2.0);
  const double w1 = 1.0 / (2.0 - cbrt2);
  const double w0 = -cbrt2 / (2.0 - cbrt2);
  linear_->advance(u, 0.5 * w1 * dt);
  nonlinear_phase(u, w1 * dt);
  linear_->advance(u, 0.5 * (w1 + w0) * dt);
  nonlinear_phase(u, w0 * dt);
  linear_->advance(u, 0.5 * (w0 + w1) * dt);
  nonlinear_phase(u, w1 * dt);
  linear_->advance(u, 0.5 * w1 * dt);
}

RadialField Stepper::refine(const RadialField& u) {
  auto values = linear_->refine(u.values());
  auto grid = refined_grid(linear_->grid());
  linear_ = make_propagator(grid, kind_);
  return RadialField(std::move(grid), std::move(values));
}

RadialField step(const RadialField& u, double dt, double p) {
  Stepper stepper(u.grid_ptr(), p);
  RadialField out = u;
  stepper.step(out.values(), dt);
  if (!out.all_finite()) throw Error(ErrorCategory::numerical, "step: non-finite field");
  return out;
}

// ---------------------------------------------------------------------------
// Virial quantities

double virial_rhs(const RadialField& u, double p) {
  const InvariantReport r = report(u, p);
  const double n = u.grid().dimension();
  return 8.0 * r.grad_sq - 4.0 * n * (p - 1.0) / (p + 1.0) * r.lp1_pow;
}

namespace {

void check_cutoff(const RadialField& u, const CutoffProfile& chi) {
  if (chi.chi.size() != u.size() || chi.bilaplacian.size() != u.size()) {
    throw_invalid("cutoff profile does not live on the field's grid");
  }
}

}  // namespace

double local_virial_rhs(const RadialField& u, const CutoffProfile& chi, double p) {
  check_cutoff(u, chi);
  const auto du = radial_derivative(u);
  const double coupling = 4.0 * (0.5 - 1.0 / (p + 1.0));
  std::vector<double> f(u.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double a2 = std::norm(u[i]);
    const double ap1 = std::pow(a2, 0.5 * (p + 1.0));
    f[i] = 4.0 * chi.d2[i] * std::norm(du[i]) - chi.bilaplacian[i] * a2 - coupling * chi.laplacian[i] * ap1;
  }
  return integrate(u.grid(), f);
}

double local_variance(const RadialField& u, const CutoffProfile& chi) {
  check_cutoff(u, chi);
  std::vector<double> f(u.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = chi.chi[i] * std::norm(u[i]);
  return integrate(u.grid(), f);
}

double mass_radius(const RadialField& u, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw_invalid("mass_radius: fraction must lie in (0, 1]");
  const auto w = u.grid().weights();
  double total = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) total += w[i] * std::norm(u[i]);
  if (!(total > 0.0)) throw_invalid("mass_radius: field has no mass");
  double running = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    running += w[i] * std::norm(u[i]);
    if (running >= fraction * total) return u.grid().node(i);
  }
  return u.grid().r_max();
}

// ---------------------------------------------------------------------------
// Detectors

std::optional<RateFit> fit_blowup_rate(std::span<const Sample> tail) {
  if (tail.size() < 4) return std::nullopt;
  const double t_last = tail.back().t;
  const double span = t_last - tail.front().t;
  if (!(span > 0.0)) return std::nullopt;

  std::vector<double> y(tail.size());
  for (std::size_t i = 0; i < tail.size(); ++i) y[i] = 0.5 * std::log(tail[i].grad_sq);

  auto fit_at = [&](double gap) {
    const double big_t = t_last + gap;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(tail.size());
    for (std::size_t i = 0; i < tail.size(); ++i) {
      const double x = std::log(big_t - tail[i].t);
      sx += x;
      sy += y[i];
      sxx += x * x;
      sxy += x * y[i];
    }
    const double denom = n * sxx - sx * sx;
    RateFit f;
    f.blowup_time = big_t;
    f.samples = tail.size();
    if (!(denom > 0.0)) {
      f.residual = std::numeric_limits<double>::infinity();
      return f;
    }
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;
    double rss = 0.0;
    for (std::size_t i = 0; i < tail.size(); ++i) {
      const double e = y[i] - (intercept + slope * std::log(big_t - tail[i].t));
      rss += e * e;
    }
    f.alpha = -slope;
    f.c = std::exp(intercept);
    f.residual = std::sqrt(rss / n);
    return f;
  };

  // Coarse log-spaced scan of T - t_last, then golden-section refinement.
  constexpr int scan = 240;
  const double lo = std::log(span * 1e-9);
  const double hi = std::log(span * 10.0);
  int best = 0;
  double best_res = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= scan; ++k) {
    const double r = fit_at(std::exp(lo + (hi - lo) * k / scan)).residual;
    if (r < best_res) {
      best_res = r;
      best = k;
    }
  }
  double a = lo + (hi - lo) * std::max(0, best - 1) / scan;
  double b = lo + (hi - lo) * std::min(scan, best + 1) / scan;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = fit_at(std::exp(c)).residual;
  double fd = fit_at(std::exp(d)).residual;
  for (int it = 0; it < 80; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = fit_at(std::exp(c)).residual;
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = fit_at(std::exp(d)).residual;
    }
  }
  RateFit out = fit_at(std::exp(0.5 * (a + b)));
  if (!std::isfinite(out.residual)) return std::nullopt;
  return out;
}

std::optional<BlowupDetection> detect_blowup(const EvolutionRecord& record, const BlowupOptions& options) {
  if (!options.enabled || record.samples.size() < 2) return std::nullopt;
  const double g0 = record.samples.front().grad_sq;
  const Sample& last = record.samples.back();
  if (!(g0 > 0.0) || !(last.grad_sq >= options.growth * g0)) return std::nullopt;
  BlowupDetection d;
  d.time = last.t;
  d.growth = last.grad_sq / g0;
  const double floor = options.fit_floor * last.grad_sq;
  auto first = record.samples.end();
  while (first != record.samples.begin() && std::prev(first)->grad_sq >= floor) --first;
  d.rate_fit = fit_blowup_rate(std::span<const Sample>(&*first, static_cast<std::size_t>(record.samples.end() - first)));
  return d;
}

ScatteringCheckpoint scattering_checkpoint(const RadialField& u, double t, double strichartz_accum,
                                           LinearPropagator& propagator) {
  ScatteringCheckpoint cp{t, strichartz_accum, lp_norm_pow(u, 4.0), u};
  propagator.free_evolve(cp.phi_plus.values(), -t);
  return cp;
}

std::optional<ScatteringReport> detect_scattering(const ScatteringCheckpoint& previous,
                                                  const ScatteringCheckpoint& current,
                                                  const ScatteringOptions& options) {
  if (!options.enabled) return std::nullopt;
  if (current.phi_plus.size() != previous.phi_plus.size()) {
    throw_invalid("detect_scattering: checkpoints live on different grids");
  }
  if (!(current.strichartz_accum > 0.0) || !(previous.l4_pow > 0.0)) return std::nullopt;

  ScatteringReport rep;
  rep.time = current.time;
  rep.strichartz_increment = (current.strichartz_accum - previous.strichartz_accum) / current.strichartz_accum;
  rep.l4_ratio = current.l4_pow / previous.l4_pow;

  std::vector<cplx> diff(current.phi_plus.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = current.phi_plus[i] - previous.phi_plus[i];
  const double dist = h1_norm_sq(RadialField(current.phi_plus.grid_ptr(), std::move(diff)));
  const double norm = h1_norm_sq(current.phi_plus);
  rep.cauchy_distance = norm > 0.0 ? std::sqrt(dist / norm) : 0.0;

  const bool fires = rep.strichartz_increment < options.strichartz_tol && rep.l4_ratio < options.l4_decay &&
                     rep.cauchy_distance < options.cauchy_tol;
  if (!fires) return std::nullopt;
  rep.phi_plus = current.phi_plus;
  return rep;
}

// ---------------------------------------------------------------------------
// Evolution loop

namespace {

// integral of |u|^q, with repeated multiplication for integer q.
double lq_pow(const RadialField& u, double q) {
  const double rounded = std::round(q);
  if (rounded != q || q < 1.0 || q > 16.0) return lp_norm_pow(u, q);
  const int k = static_cast<int>(rounded);
  std::vector<double> f(u.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double a = std::abs(u[i]);
    double v = a;
    for (int j = 1; j < k; ++j) v *= a;
    f[i] = v;
  }
  return integrate(u.grid(), f);
}

std::vector<double> sponge_rates(const RadialGrid& grid, double width, double strength) {
  std::vector<double> rates;
  if (!(width > 0.0) || !(strength > 0.0)) return rates;
  const double start = grid.r_max() - width;
  rates.assign(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double s = (grid.node(i) - start) / width;
    if (s > 0.0) rates[i] = strength * s * s;
  }
  return rates;
}

Sample measure(const RadialField& u, double t, double dt, double p, const CutoffProfile& chi, double accum) {
  const InvariantReport r = report(u, p);
  const double n = u.grid().dimension();
  Sample s;
  s.t = t;
  s.mass = r.mass;
  s.energy = r.energy;
  s.grad_sq = r.grad_sq;
  s.l4_pow = r.l4_pow;
  s.lp1_pow = r.lp1_pow;
  s.product_grad = r.product_grad;
  s.virial_rhs = 8.0 * r.grad_sq - 4.0 * n * (p - 1.0) / (p + 1.0) * r.lp1_pow;
  s.local_variance = local_variance(u, chi);
  s.local_virial_rhs = local_virial_rhs(u, chi, p);
  s.strichartz_accum = accum;
  s.dt = dt;
  s.nodes = u.size();
  s.max_amplitude = u.max_abs();
  return s;
}

void validate(const RadialField& u0, const EvolveConfig& c) {
  if (!(c.p > 1.0)) throw_invalid("evolve: p must exceed 1");
  if (!(c.t_end > 0.0) || !std::isfinite(c.t_end)) throw_invalid("evolve: t_end must be positive and finite");
  if (c.sample_stride < 1) throw_invalid("evolve: sample stride must be at least 1");
  const auto& ts = c.timestep;
  if (!(ts.dt_max > 0.0) || !(ts.grid_factor > 0.0) || !(ts.amplitude_factor > 0.0) || !(ts.dt_min > 0.0)) {
    throw_invalid("evolve: timestep policy parameters must be positive");
  }
  if (c.scattering.enabled && (!(c.scattering.window > 0.0) || c.scattering.burn_in < 0.0)) {
    throw_invalid("evolve: scattering window must be positive and burn-in nonnegative");
  }
  if (c.blowup.enabled && !(c.blowup.growth > 1.0)) throw_invalid("evolve: blow-up growth factor must exceed 1");
  if (c.sponge_width < 0.0 || c.sponge_width >= u0.grid().r_max()) {
    throw_invalid("evolve: sponge width must lie in [0, R_max)");
  }
  if (!u0.all_finite()) throw_invalid("evolve: initial data is not finite");
  critical_index(c.p, u0.grid().dimension());
}

bool stationary_tail(const std::vector<Sample>& samples, double window) {
  if (samples.size() < 2) return false;
  const double t_last = samples.back().t;
  double lo = samples.back().l4_pow;
  double hi = lo;
  for (auto it = samples.rbegin(); it != samples.rend() && it->t >= t_last - window; ++it) {
    lo = std::min(lo, it->l4_pow);
    hi = std::max(hi, it->l4_pow);
  }
  return hi > 0.0 && (hi - lo) <= 1e-2 * hi;
}

}  // namespace

EvolutionRecord evolve(const RadialField& u0, const EvolveConfig& config) {
  validate(u0, config);
  const double p = config.p;
  const double q = strichartz_exponent(p, u0.grid().dimension());

  EvolutionRecord rec;
  rec.p = p;
  rec.dimension = u0.grid().dimension();
  rec.strichartz_exponent = q;
  rec.cutoff_scale = config.cutoff_scale > 0.0 ? config.cutoff_scale : mass_radius(u0, config.cutoff_mass_fraction);
  if (!(rec.cutoff_scale > 0.0)) rec.cutoff_scale = u0.grid().spacing();

  Stepper stepper(u0.grid_ptr(), p, config.splitting, config.propagator, config.nonlinear);
  RadialField u = u0;
  CutoffProfile chi = make_cutoff(u.grid(), rec.cutoff_scale);
  std::vector<double> sponge = sponge_rates(u.grid(), config.sponge_width, config.sponge_strength);

  std::vector<double> snapshot_times = config.snapshot_times;
  std::sort(snapshot_times.begin(), snapshot_times.end());
  std::size_t next_snapshot = 0;
  while (next_snapshot < snapshot_times.size() && snapshot_times[next_snapshot] <= 0.0) {
    if (snapshot_times[next_snapshot] == 0.0) rec.snapshots.push_back({0.0, u});
    ++next_snapshot;
  }

  double t = 0.0;
  double accum = 0.0;
  double lq_prev = lq_pow(u, q);
  rec.samples.push_back(measure(u, t, 0.0, p, chi, accum));

  std::optional<ScatteringCheckpoint> checkpoint;
  double next_check = config.scattering.burn_in;
  bool stop = false;

  auto conclude_blowup = [&](const BlowupDetection& d) {
    if (rec.blowup || rec.scattering) return;
    rec.blowup = d;
    rec.outcome = Outcome::blew_up;
    rec.reason = "gradient grew by " + std::to_string(d.growth);
    if (config.stop_on_detection) stop = true;
  };

  while (t < config.t_end && !stop) {
    const double amp = u.max_abs();
    const double h = u.grid().spacing();
    double dt = std::min(config.timestep.dt_max, config.timestep.grid_factor * h * h);
    if (config.nonlinear && amp > 0.0) {
      dt = std::min(dt, config.timestep.amplitude_factor / std::pow(amp, p - 1.0));
    }
    if (dt < config.timestep.dt_min) {
      rec.reason = "resolution exhausted: timestep below floor";
      break;
    }
    double target = config.t_end;
    if (next_snapshot < snapshot_times.size()) target = std::min(target, snapshot_times[next_snapshot]);
    if (t + dt > target) dt = target - t;
    // Avoid a sliver step just before the target.
    else if (t + 1.5 * dt > target) dt = 0.5 * (target - t);

    stepper.step(u.values(), dt);
    if (!sponge.empty()) {
      for (std::size_t i = 0; i < u.size(); ++i) {
        if (sponge[i] > 0.0) u[i] *= std::exp(-sponge[i] * dt);
      }
    }
    ++rec.steps;
    t = target - (t + dt) <= 1e-12 * std::max(1.0, target) ? target : t + dt;

    if (!u.all_finite()) {
      rec.reason = "non-finite field";
      break;
    }

    const double lq = lq_pow(u, q);
    accum += 0.5 * dt * (lq_prev + lq);
    lq_prev = lq;

    while (next_snapshot < snapshot_times.size() && snapshot_times[next_snapshot] <= t + 1e-12) {
      rec.snapshots.push_back({t, u});
      ++next_snapshot;
    }

    const bool at_end = t >= config.t_end;
    if (rec.steps % static_cast<std::size_t>(config.sample_stride) == 0 || at_end) {
      bool exhausted = false;
      while (stepper.propagator().resolution_indicator(u.values()) > stepper.propagator().resolution_threshold()) {
        if (2 * (u.size() - 1) + 1 > config.max_nodes) {
          exhausted = true;
          break;
        }
        if (checkpoint) {
          auto refined = stepper.propagator().refine(checkpoint->phi_plus.values());
          checkpoint->phi_plus = RadialField(refined_grid(u.grid()), std::move(refined));
        }
        u = stepper.refine(u);
        chi = make_cutoff(u.grid(), rec.cutoff_scale);
        sponge = sponge_rates(u.grid(), config.sponge_width, config.sponge_strength);
        lq_prev = lq_pow(u, q);
        ++rec.regrids;
      }

      rec.samples.push_back(measure(u, t, dt, p, chi, accum));
      if (config.on_sample) config.on_sample(rec.samples.back());
      if (auto d = detect_blowup(rec, config.blowup)) conclude_blowup(*d);
      if (exhausted && !stop) {
        if (!rec.blowup && !rec.scattering) rec.reason = "resolution exhausted at " + std::to_string(u.size()) + " nodes";
        break;
      }
    }

    if (config.scattering.enabled && !stop && t >= next_check) {
      ScatteringCheckpoint cp = scattering_checkpoint(u, t, accum, stepper.propagator());
      if (checkpoint && !rec.scattering && !rec.blowup) {
        if (auto rep = detect_scattering(*checkpoint, cp, config.scattering)) {
          rec.scattering = std::move(*rep);
          rec.outcome = Outcome::scattering_consistent;
          rec.reason = "scattering detectors converged";
          if (config.stop_on_detection) stop = true;
        }
      }
      checkpoint = std::move(cp);
      next_check += config.scattering.window;
    }
  }

  if (rec.samples.back().t != t) rec.samples.push_back(measure(u, t, 0.0, p, chi, accum));
  if (!rec.blowup && !rec.scattering) {
    if (auto d = detect_blowup(rec, config.blowup)) conclude_blowup(*d);
  }
  if (!rec.blowup && !rec.scattering && rec.reason.empty()) {
    rec.reason = stationary_tail(rec.samples, config.scattering.window) ? "stationary"
                                                                        : "t_end reached without detection";
  }
  rec.final_field = std::move(u);
  return rec;
}

}  // namespace nlslab
