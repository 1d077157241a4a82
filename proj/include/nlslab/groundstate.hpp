#pragma once

#include "nlslab/radial.hpp"

namespace nlslab {

struct GroundStateOptions {
  /// Stop bisecting once the bracket on Q(0) is narrower than tol * max(1, Q(0)).
  double tol = 1e-12;
  int max_bisections = 200;
  /// RK4 substeps per grid cell in the shooting integration.
  int substeps = 2;
  /// The shooting profile is trusted while the two bracketing trajectories
  /// agree to this relative accuracy; beyond that the linear decaying tail
  /// takes over.
  double match_tolerance = 1e-7;
};

/// Positive radial solution of Q'' + (N-1)/r Q' - lambda Q + Q^p = 0 together
/// with the norms and sharp constants derived from it.
struct GroundState {
  RadialField profile;
  double p = 0.0;
  int dimension = 0;
  double normalization = 1.0;  // lambda
  double s_c = 0.0;

  double central_value = 0.0;   // Q(0)
  double bracket_width = 0.0;   // final bisection bracket on Q(0)
  int bisections = 0;
  double match_radius = 0.0;    // start of the analytic far-field tail

  double mass = 0.0;            // ||Q||_2^2
  double grad_sq = 0.0;         // ||grad Q||_2^2
  double lp1_norm_pow = 0.0;    // ||Q||_{p+1}^{p+1}
  double energy = 0.0;          // E[Q]

  double c_gn = 0.0;
  double threshold_me = 0.0;    // E[Q]^{s_c} M[Q]^{1-s_c}
  double threshold_grad = 0.0;  // ||grad Q||^{s_c} ||Q||^{1-s_c}
};

GroundState solve_ground_state(double p, int dimension, double normalization, GridPtr grid,
                               const GroundStateOptions& options = {});

/// Relative residuals of the two integral identities satisfied by Q, from
/// multiplying the profile equation by Q and by x.grad Q:
///   -lambda M - G + P = 0,
///   lambda N/2 M + (N-2)/2 G - N/(p+1) P = 0,
/// with M = ||Q||_2^2, G = ||grad Q||_2^2, P = ||Q||_{p+1}^{p+1}.
struct PohozhaevResiduals {
  double q_multiplier = 0.0;
  double dilation_multiplier = 0.0;
};

PohozhaevResiduals verify_pohozhaev(const GroundState& q);

/// Ratios G/M and P/M implied by the two identities above.
double expected_grad_mass_ratio(double p, int dimension, double normalization);
double expected_lp1_mass_ratio(double p, int dimension, double normalization);

struct SharpConstants {
  double c_gn = 0.0;
  double threshold_me = 0.0;
  double threshold_grad = 0.0;
};

SharpConstants sharp_constants(const GroundState& q);

/// Norms of the rescaled profile mu^{2/(p-1)} Q(mu r) computed from the
/// power laws of the NLS scaling, used to compare solves at different lambda.
struct ScaledNorms {
  double mass;
  double grad_sq;
  double lp1_norm_pow;
};

ScaledNorms scaled_norms(const GroundState& q, double mu);

}  // namespace nlslab
