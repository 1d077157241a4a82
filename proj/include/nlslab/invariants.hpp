#pragma once

#include <optional>

#include "nlslab/groundstate.hpp"
#include "nlslab/radial.hpp"

namespace nlslab {

/// Conserved quantities and scale-invariant products of a single field.
struct InvariantReport {
  double p = 3.0;
  int dimension = 3;
  double s_c = 0.5;

  double mass = 0.0;          // integral |u|^2
  double energy = 0.0;        // 1/2 ||grad u||^2 - 1/(p+1) ||u||_{p+1}^{p+1}
  double grad_sq = 0.0;       // ||grad u||_2^2
  double momentum = 0.0;      // |Im integral conj(u) grad u|
  double l4_pow = 0.0;        // ||u||_4^4
  double lp1_pow = 0.0;       // ||u||_{p+1}^{p+1}
  double product_grad = 0.0;  // ||grad u||^{s_c} ||u||^{1-s_c}
  /// E^{s_c} M^{1-s_c}; empty when E < 0.
  std::optional<double> product_me;

  bool negative_energy() const { return energy < 0.0; }
};

/// Recomputes s_c and both scale-invariant products from mass, energy and grad_sq.
void refresh_products(InvariantReport& r);

InvariantReport report(const RadialField& u, double p);

/// Zero-momentum frame: boost by xi_0 = -P/M. Mass is unchanged,
/// E -> E - P^2/(2M), ||grad u||^2 -> ||grad u||^2 - P^2/M.
InvariantReport galilean_reduce(const InvariantReport& r);

/// c_GN ||grad u||^{N(p-1)/2} ||u||^{2-(N-2)(p-1)/2} - ||u||_{p+1}^{p+1}.
/// Nonnegative for every u by the sharp Gagliardo-Nirenberg inequality.
double check_gn(const RadialField& u, const GroundState& q);

struct StraussTerms {
  double lhs = 0.0;            // ||u||_{L^4(|x|>R)}^4
  double rhs_without_c = 0.0;  // R^{-2} ||u||_{L^2(|x|>R)}^3 ||grad u||_{L^2(|x|>R)}
};

/// Exterior radial Gagliardo-Nirenberg terms; the constant is not fixed, only
/// the boundedness of lhs / rhs_without_c is meaningful.
StraussTerms check_strauss(const RadialField& u, double radius);

/// 8 ||grad u||^2 - 6 ||u||_4^4, the full-variance virial right side for the
/// cubic problem in three dimensions. Requires a 3-D grid.
double convexity_bound(const RadialField& u);

/// Convexity constant for data below the mass-energy threshold.
///
/// With y = ||grad u|| ||u|| / (||grad Q|| ||Q||) the sharp inequality gives
/// M E / (M[Q] E[Q]) >= 3 y^2 - 2 y^3, so ME < (1-delta) M[Q]E[Q] with y < 1
/// confines y below the root y* of 3y^2 - 2y^3 = 1 - delta; then
/// 8 ||grad u||^2 - 6 ||u||_4^4 >= 8 (1 - y*) ||grad u||^2.
double convexity_constant(double delta);

/// Root y in [0, 1] of 3y^2 - 2y^3 = level, for level in [0, 1].
double threshold_gradient_ratio(double level);

/// Two-sided bound ||grad u||^2 / 6 <= E <= ||grad u||^2 / 2.
bool comparability_holds(const InvariantReport& r, double tolerance = 0.0);

}  // namespace nlslab
