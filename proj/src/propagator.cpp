#include "nlslab/propagator.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "nlslab/error.hpp"

namespace nlslab {

namespace {

// The FFTW planner is not re-entrant; plans are created and destroyed under
// this lock so that sweeps can evolve runs on several threads.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

/// DST-I, Y_k = 2 sum_j X_j sin(pi (j+1)(k+1)/(n+1)), applied to n complex
/// samples in place. Computed as a complex FFT of the odd extension of length
/// 2(n+1), which FFTW handles much faster than its RODFT00 kind for large n.
/// Unnormalized: applying it twice multiplies by 2(n+1).
class SineTransform {
 public:
  explicit SineTransform(std::size_t n) : n_(n), buffer_(n), work_(2 * (n + 1)) {
    if (n == 0) throw_invalid("SineTransform: empty transform");
    auto* data = reinterpret_cast<fftw_complex*>(work_.data());
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_1d(static_cast<int>(work_.size()), data, data, FFTW_FORWARD, FFTW_ESTIMATE);
    if (plan_ == nullptr) throw Error(ErrorCategory::numerical, "SineTransform: FFTW planning failed");
  }

  ~SineTransform() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }

  SineTransform(const SineTransform&) = delete;
  SineTransform& operator=(const SineTransform&) = delete;

  std::size_t size() const noexcept { return n_; }
  std::span<cplx> data() noexcept { return buffer_; }

  void execute() {
    const std::size_t m = work_.size();
    work_[0] = 0.0;
    work_[n_ + 1] = 0.0;
    for (std::size_t j = 1; j <= n_; ++j) {
      work_[j] = buffer_[j - 1];
      work_[m - j] = -buffer_[j - 1];
    }
    fftw_execute(plan_);
    // The FFT of the odd extension is -2i times the sine sum.
    for (std::size_t k = 1; k <= n_; ++k) buffer_[k - 1] = cplx(-work_[k].imag(), work_[k].real());
  }

 private:
  std::size_t n_;
  std::vector<cplx> buffer_;
  std::vector<cplx> work_;
  fftw_plan plan_ = nullptr;
};

/// Shared machinery for propagators that expand an odd function on an
/// interval of length L with n interior points in sin(k pi x / L).
class SpectralPropagator : public LinearPropagator {
 public:
  SpectralPropagator(GridPtr grid, std::size_t interior, double length)
      : LinearPropagator(std::move(grid)), transform_(interior), length_(length) {
    wavenumber_sq_.resize(interior);
    for (std::size_t k = 0; k < interior; ++k) {
      const double kappa = std::numbers::pi * static_cast<double>(k + 1) / length_;
      wavenumber_sq_[k] = kappa * kappa;
    }
  }

  bool exact() const noexcept override { return true; }
  double resolution_threshold() const noexcept override { return 1e-14; }

  void advance(std::span<cplx> u, double tau) override {
    check_size(u);
    load(u, transform_.data());
    transform_.execute();
    const auto& phase = phases(tau);
    auto buf = transform_.data();
    for (std::size_t k = 0; k < buf.size(); ++k) buf[k] *= phase[k];
    const cplx origin = origin_value(buf, 2.0);
    transform_.execute();
    store(transform_.data(), u, origin);
  }

  double resolution_indicator(std::span<const cplx> u) override {
    check_size(u);
    load(u, transform_.data());
    transform_.execute();
    const auto buf = transform_.data();
    const std::size_t half = buf.size() / 2;
    double total = 0.0;
    double upper = 0.0;
    for (std::size_t k = 0; k < buf.size(); ++k) {
      const double e = wavenumber_sq_[k] * std::norm(buf[k]);
      total += e;
      if (k >= half) upper += e;
    }
    return total > 0.0 ? upper / total : 0.0;
  }

  std::vector<cplx> refine(std::span<const cplx> u) override {
    check_size(u);
    const std::size_t n = transform_.size();
    load(u, transform_.data());
    transform_.execute();
    // Sine coefficients c_k = Y_k/(n+1); the finer transform of c/2 returns samples.
    SineTransform fine(2 * n + 1);
    auto src = transform_.data();
    auto dst = fine.data();
    std::fill(dst.begin(), dst.end(), cplx{});
    const double scale = 1.0 / (2.0 * static_cast<double>(n + 1));
    for (std::size_t k = 0; k < n; ++k) dst[k] = src[k] * scale;
    const cplx origin = origin_value(dst, 2.0);
    fine.execute();
    const auto fine_grid = refined_grid(grid());
    std::vector<cplx> out(fine_grid->size());
    store_on(*fine_grid, fine.data(), out, origin);
    return out;
  }

 protected:
  // Packs the grid samples into the odd interval function.
  virtual void load(std::span<const cplx> u, std::span<cplx> buf) const = 0;
  // Unpacks the interval function; `origin` is u(0) where it must be derived.
  virtual void store_on(const RadialGrid& g, std::span<const cplx> buf, std::span<cplx> u, cplx origin) const = 0;
  // u(0) from normalized coefficients when the representation does not
  // sample the origin directly; `factor` converts buffer entries to c_k.
  virtual cplx origin_value(std::span<const cplx> coeffs, double factor) const = 0;

  void store(std::span<const cplx> buf, std::span<cplx> u, cplx origin) const { store_on(grid(), buf, u, origin); }

  double length() const noexcept { return length_; }
  double wavenumber(std::size_t k) const { return std::sqrt(wavenumber_sq_[k]); }

 private:
  void check_size(std::span<const cplx> u) const {
    if (u.size() != grid().size()) throw_invalid("propagator: field does not live on the propagator grid");
  }

  const std::vector<cplx>& phases(double tau) {
    for (auto& entry : cache_) {
      if (entry.first == tau) return entry.second;
    }
    const double norm = 1.0 / (2.0 * static_cast<double>(transform_.size() + 1));
    std::vector<cplx> table(wavenumber_sq_.size());
    for (std::size_t k = 0; k < table.size(); ++k) table[k] = std::polar(norm, -wavenumber_sq_[k] * tau);
    if (cache_.size() >= 6) cache_.erase(cache_.begin());
    cache_.emplace_back(tau, std::move(table));
    return cache_.back().second;
  }

  SineTransform transform_;
  double length_;
  std::vector<double> wavenumber_sq_;
  std::vector<std::pair<double, std::vector<cplx>>> cache_;
};

// N = 3: v = r u satisfies the one-dimensional equation i v_t + v_rr = 0 with
// v(0) = v(R) = 0.
class SinePropagator final : public SpectralPropagator {
 public:
  explicit SinePropagator(GridPtr g) : SpectralPropagator(g, g->size() - 2, g->r_max()) {}

  PropagatorKind kind() const noexcept override { return PropagatorKind::sine_spectral; }

 protected:
  void load(std::span<const cplx> u, std::span<cplx> buf) const override {
    const RadialGrid& g = grid();
    for (std::size_t j = 0; j < buf.size(); ++j) buf[j] = g.node(j + 1) * u[j + 1];
  }

  void store_on(const RadialGrid& g, std::span<const cplx> buf, std::span<cplx> u, cplx origin) const override {
    u[0] = origin;
    for (std::size_t j = 0; j < buf.size(); ++j) u[j + 1] = buf[j] / g.node(j + 1);
    u[u.size() - 1] = 0.0;
  }

  // u(0) = v'(0) = sum_k c_k kappa_k.
  cplx origin_value(std::span<const cplx> coeffs, double factor) const override {
    cplx s = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
      s += coeffs[k] * (std::numbers::pi * static_cast<double>(k + 1) / length());
    }
    return factor * s;
  }
};

// N = 1: the even extension to [-R, R] vanishes at both ends.
class MirroredSinePropagator final : public SpectralPropagator {
 public:
  explicit MirroredSinePropagator(GridPtr g) : SpectralPropagator(g, 2 * g->size() - 3, 2.0 * g->r_max()) {}

  PropagatorKind kind() const noexcept override { return PropagatorKind::mirrored_sine; }

 protected:
  void load(std::span<const cplx> u, std::span<cplx> buf) const override {
    const std::size_t centre = (buf.size() - 1) / 2;  // buffer index of r = 0
    for (std::size_t j = 0; j < buf.size(); ++j) {
      const std::size_t i = j >= centre ? j - centre : centre - j;
      buf[j] = u[i];
    }
  }

  void store_on(const RadialGrid&, std::span<const cplx> buf, std::span<cplx> u, cplx) const override {
    const std::size_t centre = (buf.size() - 1) / 2;
    for (std::size_t i = 0; i + 1 < u.size(); ++i) u[i] = 0.5 * (buf[centre + i] + buf[centre - i]);
    u[u.size() - 1] = 0.0;
  }

  cplx origin_value(std::span<const cplx>, double) const override { return 0.0; }
};

// Finite-volume radial Laplacian, self-adjoint with respect to the cell
// volumes, advanced by Crank-Nicolson. Conserves sum_j V_j |u_j|^2 exactly.
class CrankNicolsonPropagator final : public LinearPropagator {
 public:
  explicit CrankNicolsonPropagator(GridPtr g) : LinearPropagator(std::move(g)) {
    const RadialGrid& gr = grid();
    const std::size_t m = gr.size();
    const double h = gr.spacing();
    const int n = gr.dimension();
    volume_.resize(m);
    flux_.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
      const double r = gr.node(j);
      const double outer = r + 0.5 * h;
      const double inner = std::max(0.0, r - 0.5 * h);
      volume_[j] = (std::pow(outer, n) - std::pow(inner, n)) / n;
      flux_[j] = std::pow(outer, n - 1) / h;
    }
  }

  PropagatorKind kind() const noexcept override { return PropagatorKind::crank_nicolson; }
  bool exact() const noexcept override { return false; }
  double resolution_threshold() const noexcept override { return 0.02; }

  void advance(std::span<cplx> u, double tau) override {
    const std::size_t m = grid().size();
    if (u.size() != m) throw_invalid("propagator: field does not live on the propagator grid");
    const std::size_t n = m - 1;  // unknowns 0..m-2, u[m-1] = 0
    const cplx half(0.0, 0.5 * tau);
    lower_.assign(n, 0.0);
    diag_.assign(n, 0.0);
    upper_.assign(n, 0.0);
    rhs_.assign(n, 0.0);
    u[m - 1] = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double a_minus = j > 0 ? flux_[j - 1] : 0.0;
      const double a_plus = flux_[j];
      const cplx left = j > 0 ? u[j - 1] : cplx{};
      const cplx ku = a_plus * (u[j + 1] - u[j]) - a_minus * (u[j] - left);
      rhs_[j] = volume_[j] * u[j] + half * ku;
      diag_[j] = volume_[j] + half * (a_plus + a_minus);
      lower_[j] = -half * a_minus;
      upper_[j] = -half * a_plus;
    }
    // Thomas algorithm; the system is diagonally dominant in modulus.
    for (std::size_t j = 1; j < n; ++j) {
      const cplx w = lower_[j] / diag_[j - 1];
      diag_[j] -= w * upper_[j - 1];
      rhs_[j] -= w * rhs_[j - 1];
    }
    u[n - 1] = rhs_[n - 1] / diag_[n - 1];
    for (std::size_t j = n - 1; j-- > 0;) u[j] = (rhs_[j] - upper_[j] * u[j + 1]) / diag_[j];
  }

  // Largest second difference relative to the peak amplitude.
  double resolution_indicator(std::span<const cplx> u) override {
    double peak = 0.0;
    for (const auto& v : u) peak = std::max(peak, std::abs(v));
    if (peak == 0.0) return 0.0;
    double worst = 0.0;
    for (std::size_t j = 0; j + 1 < u.size(); ++j) {
      const cplx left = j > 0 ? u[j - 1] : u[1];
      worst = std::max(worst, std::abs(u[j + 1] - 2.0 * u[j] + left));
    }
    return worst / peak;
  }

  std::vector<cplx> refine(std::span<const cplx> u) override {
    const std::size_t m = u.size();
    auto at = [&](std::ptrdiff_t i) -> cplx {
      if (i < 0) return u[static_cast<std::size_t>(-i)];
      if (i >= static_cast<std::ptrdiff_t>(m)) return -u[2 * (m - 1) - static_cast<std::size_t>(i)];
      return u[static_cast<std::size_t>(i)];
    };
    std::vector<cplx> out(2 * (m - 1) + 1);
    for (std::size_t j = 0; j < m; ++j) out[2 * j] = u[j];
    for (std::ptrdiff_t j = 0; j + 1 < static_cast<std::ptrdiff_t>(m); ++j) {
      out[2 * static_cast<std::size_t>(j) + 1] = (-at(j - 1) + 9.0 * at(j) + 9.0 * at(j + 1) - at(j + 2)) / 16.0;
    }
    out.back() = 0.0;
    return out;
  }

 private:
  std::vector<double> volume_;
  std::vector<double> flux_;
  std::vector<cplx> lower_, diag_, upper_, rhs_;
};

}  // namespace

PropagatorKind parse_propagator_kind(std::string_view name) {
  if (name == "auto" || name == "automatic") return PropagatorKind::automatic;
  if (name == "sine" || name == "sine-spectral") return PropagatorKind::sine_spectral;
  if (name == "mirrored-sine") return PropagatorKind::mirrored_sine;
  if (name == "crank-nicolson" || name == "cn") return PropagatorKind::crank_nicolson;
  throw_invalid("unknown propagator '" + std::string(name) + "'");
}

std::string_view to_string(PropagatorKind kind) {
  switch (kind) {
    case PropagatorKind::automatic:
      return "auto";
    case PropagatorKind::sine_spectral:
      return "sine-spectral";
    case PropagatorKind::mirrored_sine:
      return "mirrored-sine";
    case PropagatorKind::crank_nicolson:
      return "crank-nicolson";
  }
  return "unknown";
}

void LinearPropagator::free_evolve(std::span<cplx> u, double t) {
  if (exact()) {
    advance(u, t);
    return;
  }
  const auto steps = static_cast<std::size_t>(std::ceil(std::abs(t) / free_substep));
  if (steps == 0) return;
  const double tau = t / static_cast<double>(steps);
  for (std::size_t s = 0; s < steps; ++s) advance(u, tau);
}

GridPtr refined_grid(const RadialGrid& grid) {
  return make_grid(grid.dimension(), grid.r_max(), 2 * (grid.size() - 1) + 1);
}

std::unique_ptr<LinearPropagator> make_propagator(GridPtr grid, PropagatorKind kind) {
  if (!grid) throw_invalid("make_propagator: null grid");
  if (grid->size() < 8) throw_invalid("make_propagator: grid too coarse");
  const int n = grid->dimension();
  if (kind == PropagatorKind::automatic) {
    kind = n == 3 ? PropagatorKind::sine_spectral
                  : (n == 1 ? PropagatorKind::mirrored_sine : PropagatorKind::crank_nicolson);
  }
  switch (kind) {
    case PropagatorKind::sine_spectral:
      if (n != 3) throw_invalid("sine-spectral propagator needs N = 3");
      return std::make_unique<SinePropagator>(std::move(grid));
    case PropagatorKind::mirrored_sine:
      if (n != 1) throw_invalid("mirrored-sine propagator needs N = 1");
      return std::make_unique<MirroredSinePropagator>(std::move(grid));
    case PropagatorKind::crank_nicolson:
      return std::make_unique<CrankNicolsonPropagator>(std::move(grid));
    case PropagatorKind::automatic:
      break;
  }
  throw_invalid("make_propagator: unsupported kind");
}

}  // namespace nlslab
