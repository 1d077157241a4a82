#pragma once

#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "nlslab/radial.hpp"

namespace nlslab {

enum class PropagatorKind {
  automatic,       // spectral for N = 1 and N = 3, Crank-Nicolson otherwise
  sine_spectral,   // v = r u expanded in sin(k pi r / R); N = 3 only
  mirrored_sine,   // even extension to [-R, R] and a sine basis there; N = 1 only
  crank_nicolson,  // finite-volume radial Laplacian, any N
};

PropagatorKind parse_propagator_kind(std::string_view name);
std::string_view to_string(PropagatorKind kind);

/// Linear Schroedinger flow u -> e^{i tau Delta} u on a radial grid with a
/// homogeneous Dirichlet condition at R_max.
class LinearPropagator {
 public:
  virtual ~LinearPropagator() = default;

  const RadialGrid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }

  /// One application of the (possibly approximate) propagator.
  virtual void advance(std::span<cplx> u, double tau) = 0;

  /// Free evolution over an arbitrary time; substeps when the propagator is
  /// not exact.
  virtual void free_evolve(std::span<cplx> u, double t);

  /// True when advance() is the exact discrete flow for any tau.
  virtual bool exact() const noexcept = 0;

  /// Dimensionless measure of unresolved content; the propagator refines
  /// when it exceeds resolution_threshold().
  virtual double resolution_indicator(std::span<const cplx> u) = 0;
  virtual double resolution_threshold() const noexcept = 0;

  /// Samples on the grid with 2(M-1)+1 nodes over the same [0, R_max].
  virtual std::vector<cplx> refine(std::span<const cplx> u) = 0;

  virtual PropagatorKind kind() const noexcept = 0;

  /// Largest substep used by free_evolve() for inexact propagators.
  double free_substep = 1e-3;

 protected:
  explicit LinearPropagator(GridPtr grid) : grid_(std::move(grid)) {}

 private:
  GridPtr grid_;
};

std::unique_ptr<LinearPropagator> make_propagator(GridPtr grid, PropagatorKind kind = PropagatorKind::automatic);

/// Grid with 2(M-1)+1 nodes covering the same interval.
GridPtr refined_grid(const RadialGrid& grid);

}  // namespace nlslab
