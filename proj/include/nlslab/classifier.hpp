#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nlslab/groundstate.hpp"
#include "nlslab/invariants.hpp"

namespace nlslab {

/// s_c = N/2 - 2/(p-1): the Sobolev index left invariant by the NLS scaling.
double critical_index(double p, int dimension);

enum class Category {
  global_scatters_predicted,
  blowup_predicted,
  negative_energy_blowup,
  at_threshold,
  outside_theory,
};

std::string_view to_string(Category c);

/// One compared pair. margin = product / threshold - 1, so the sign carries
/// the strict inequality and the magnitude is relative.
struct Witness {
  std::optional<double> product;
  double threshold = 0.0;
  std::optional<double> margin;
};

struct ClassifyOptions {
  bool apply_galilean = false;
  bool radial = true;
  bool finite_variance = false;
  double tie_tol = 1e-6;
};

struct Verdict {
  Category category = Category::outside_theory;
  Witness mass_energy;  // E^{s_c} M^{1-s_c} against the ground state
  Witness gradient;     // ||grad u||^{s_c} ||u||^{1-s_c} against the ground state
  bool galilean_applied = false;
  bool radial = false;
  bool finite_variance_assumed = false;
  /// Blow-up conclusions need radial data or finite variance.
  bool blowup_conclusion_valid = false;
  std::vector<std::string> notes;
};

/// Label initial data by the threshold dichotomy. This is a prediction; the
/// evolver confirms or refutes it dynamically.
Verdict classify(const InvariantReport& report, const GroundState& q, const ClassifyOptions& options = {});

}  // namespace nlslab
