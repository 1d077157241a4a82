#include "nlslab/classifier.hpp"

#include <cmath>

#include "nlslab/error.hpp"

namespace nlslab {

double critical_index(double p, int dimension) {
  if (!(p > 1.0)) throw_invalid("critical_index: p must exceed 1");
  return 0.5 * dimension - 2.0 / (p - 1.0);
}

std::string_view to_string(Category c) {
  switch (c) {
    case Category::global_scatters_predicted:
      return "GLOBAL_SCATTERS_PREDICTED";
    case Category::blowup_predicted:
      return "BLOWUP_PREDICTED";
    case Category::negative_energy_blowup:
      return "NEGATIVE_ENERGY_BLOWUP";
    case Category::at_threshold:
      return "AT_THRESHOLD";
    case Category::outside_theory:
      return "OUTSIDE_THEORY";
  }
  return "UNKNOWN";
}

namespace {

bool blowup_regime_for_radial(double p, int dimension) {
  // Radial blow-up is established for N > 1 and 1 + 4/N < p < min(1 + 4/(N-2), 5).
  if (dimension <= 1) return false;
  if (p >= 5.0) return false;
  return critical_index(p, dimension) > 0.0 && critical_index(p, dimension) < 1.0;
}

}  // namespace

Verdict classify(const InvariantReport& report, const GroundState& q, const ClassifyOptions& options) {
  if (report.dimension != q.dimension || std::abs(report.p - q.p) > 1e-12 * q.p) {
    throw_invalid("classify: report and ground state disagree on (p, N)");
  }

  InvariantReport r = report;
  Verdict v;
  v.radial = options.radial;
  v.finite_variance_assumed = options.finite_variance;
  if (options.apply_galilean) {
    r = galilean_reduce(report);  // throws for M = 0
    v.galilean_applied = true;
  }

  v.mass_energy.threshold = q.threshold_me;
  v.gradient.threshold = q.threshold_grad;
  v.gradient.product = r.product_grad;
  v.gradient.margin = r.product_grad / q.threshold_grad - 1.0;
  v.mass_energy.product = r.product_me;
  if (r.product_me) v.mass_energy.margin = *r.product_me / q.threshold_me - 1.0;

  const bool radial_ok = options.radial && blowup_regime_for_radial(r.p, r.dimension);
  v.blowup_conclusion_valid = options.finite_variance || radial_ok;
  if (options.radial && !radial_ok) {
    v.notes.emplace_back("radial blow-up argument requires N > 1 and p < min(1 + 4/(N-2), 5)");
  }
  if (!(r.dimension == 3 && std::abs(r.p - 3.0) < 1e-12)) {
    v.notes.emplace_back("outside the 3-D cubic case the sub-threshold conclusion is global existence");
  }

  const double tie = options.tie_tol;
  if (r.negative_energy()) {
    v.category = Category::negative_energy_blowup;
    return v;
  }

  const double me = *v.mass_energy.margin;
  const double grad = *v.gradient.margin;
  if (me > tie) {
    v.category = Category::outside_theory;
  } else if (me >= -tie || std::abs(grad) <= tie) {
    v.category = Category::at_threshold;
  } else if (grad < -tie) {
    v.category = Category::global_scatters_predicted;
  } else {
    v.category = Category::blowup_predicted;
  }
  return v;
}

}  // namespace nlslab
