// Command-line front end: groundstate | invariants | classify | evolve | sweep.
//
// Every subcommand accepts --config <file>; flags given explicitly on the
// command line take precedence over values from the file.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nlslab/classifier.hpp"
#include "nlslab/error.hpp"
#include "nlslab/field_io.hpp"
#include "nlslab/groundstate.hpp"
#include "nlslab/harness.hpp"
#include "nlslab/invariants.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace nlslab;

struct ProblemFlags {
  std::string config;
  std::optional<double> p, lambda, r_max;
  std::optional<int> dimension;
  std::optional<std::size_t> nodes;

  void add(CLI::App* app) {
    app->add_option("--config", config, "INI run configuration")->check(CLI::ExistingFile);
    app->add_option("--p", p, "nonlinearity exponent");
    app->add_option("--N", dimension, "space dimension");
    app->add_option("--lambda", lambda, "ground-state normalization");
    app->add_option("--rmax", r_max, "outer radius of the grid");
    app->add_option("--nodes", nodes, "grid nodes including r = 0");
  }

  RunConfig build() const {
    RunConfig c = config.empty() ? RunConfig{} : load_config(config);
    if (p) c.p = *p;
    if (dimension) c.dimension = *dimension;
    if (lambda) c.normalization = *lambda;
    if (r_max) c.r_max = *r_max;
    if (nodes) c.nodes = *nodes;
    return c;
  }
};

struct DataFlags {
  std::string input;
  std::optional<std::string> family;
  std::optional<double> amplitude, scale, radius;

  void add(CLI::App* app) {
    app->add_option("--input", input, "field file with the initial data")->check(CLI::ExistingFile);
    app->add_option("--family", family, "soliton-multiple | soliton-scaling | gaussian | ring | file");
    app->add_option("--amplitude,-a", amplitude, "a for soliton-multiple, A otherwise");
    app->add_option("--scale", scale, "mu for soliton-scaling, sigma for gaussian and ring");
    app->add_option("--radius", radius, "ring radius");
  }

  void apply(RunConfig& c) const {
    if (family) c.initial.family = parse_family(*family);
    if (!input.empty()) {
      c.initial.family = Family::file;
      c.initial.path = input;
      // The grid of a loaded field comes from the file header.
      const RadialField u = load_field(input);
      c.r_max = u.grid().r_max();
      c.nodes = u.size();
    }
    if (amplitude) c.initial.amplitude = *amplitude;
    if (scale) c.initial.scale = *scale;
    if (radius) c.initial.radius = *radius;
  }
};

struct ClassifyFlags {
  bool galilean = false;
  bool finite_variance = false;
  std::optional<double> tie_tol;

  void add(CLI::App* app) {
    app->add_flag("--galilean", galilean, "boost to the zero-momentum frame first");
    app->add_flag("--finite-variance", finite_variance, "assume |x| u0 in L^2");
    app->add_option("--tie-tol", tie_tol, "relative tolerance for threshold ties");
  }

  void apply(RunConfig& c) const {
    if (galilean) c.classify.apply_galilean = true;
    if (finite_variance) c.classify.finite_variance = true;
    if (tie_tol) c.classify.tie_tol = *tie_tol;
  }
};

struct EvolveFlags {
  std::optional<double> t_end, growth, sponge_width, sponge_strength, dt_max;
  std::optional<int> stride;
  std::optional<std::size_t> max_nodes;
  std::optional<std::string> detectors, splitting, propagator, output, run_id;
  std::vector<double> snapshots;
  bool linear = false;
  bool keep_going = false;

  void add(CLI::App* app) {
    app->add_option("--tend", t_end, "final time");
    app->add_option("--detectors", detectors, "all | none | blowup | scattering")
        ->check(CLI::IsMember({"all", "none", "blowup", "scattering"}));
    app->add_option("--sample-stride", stride, "steps between recorded samples");
    app->add_option("--dt-max", dt_max, "largest timestep");
    app->add_option("--growth", growth, "blow-up growth factor on ||grad u||^2");
    app->add_option("--max-nodes", max_nodes, "regridding bound");
    app->add_option("--splitting", splitting, "yoshida4 | strang");
    app->add_option("--propagator", propagator, "auto | sine-spectral | mirrored-sine | crank-nicolson");
    app->add_option("--sponge-width", sponge_width, "absorbing layer width (0 = off)");
    app->add_option("--sponge-strength", sponge_strength, "absorbing layer strength");
    app->add_option("--snapshot", snapshots, "times at which to write (r, |u|) snapshots")->delimiter(',');
    app->add_flag("--linear", linear, "drop the nonlinearity");
    app->add_flag("--keep-going", keep_going, "continue to t_end after a detector fires");
    app->add_option("--output", output, "output directory");
    app->add_option("--run-id", run_id, "run id (default: generated)");
  }

  void apply(RunConfig& c) const {
    EvolveConfig& e = c.evolution;
    if (t_end) e.t_end = *t_end;
    if (detectors) {
      e.blowup.enabled = *detectors == "all" || *detectors == "blowup";
      e.scattering.enabled = *detectors == "all" || *detectors == "scattering";
    }
    if (stride) e.sample_stride = *stride;
    if (dt_max) e.timestep.dt_max = *dt_max;
    if (growth) e.blowup.growth = *growth;
    if (max_nodes) e.max_nodes = *max_nodes;
    if (splitting) e.splitting = parse_splitting(*splitting);
    if (propagator) e.propagator = parse_propagator_kind(*propagator);
    if (sponge_width) e.sponge_width = *sponge_width;
    if (sponge_strength) e.sponge_strength = *sponge_strength;
    if (!snapshots.empty()) e.snapshot_times = snapshots;
    if (linear) e.nonlinear = false;
    if (keep_going) e.stop_on_detection = false;
    if (output) c.output_dir = *output;
    if (run_id) c.run_id = *run_id;
  }
};

json ground_state_json(const GroundState& q) {
  const auto res = verify_pohozhaev(q);
  return {{"p", q.p},
          {"N", q.dimension},
          {"lambda", q.normalization},
          {"s_c", q.s_c},
          {"central_value", q.central_value},
          {"bracket_width", q.bracket_width},
          {"bisections", q.bisections},
          {"match_radius", q.match_radius},
          {"mass", q.mass},
          {"grad_sq", q.grad_sq},
          {"lp1_norm_pow", q.lp1_norm_pow},
          {"energy", q.energy},
          {"c_gn", q.c_gn},
          {"threshold_me", q.threshold_me},
          {"threshold_grad", q.threshold_grad},
          {"pohozhaev_residuals", {{"q_multiplier", res.q_multiplier}, {"dilation_multiplier", res.dilation_multiplier}}}};
}

json invariants_json(const InvariantReport& r) {
  return {{"p", r.p},
          {"N", r.dimension},
          {"s_c", r.s_c},
          {"mass", r.mass},
          {"energy", r.energy},
          {"grad_sq", r.grad_sq},
          {"momentum", r.momentum},
          {"l4_pow", r.l4_pow},
          {"lp1_pow", r.lp1_pow},
          {"product_grad", r.product_grad},
          {"product_me", r.product_me ? json(*r.product_me) : json(nullptr)}};
}

std::vector<double> parse_values(const std::string& text) {
  // Either a comma list or lo:hi:count.
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    if (parts.size() != 3) throw_invalid("--values: expected lo:hi:count");
    const double lo = parse_double(parts[0], "--values", 1);
    const double hi = parse_double(parts[1], "--values", 1);
    const int n = static_cast<int>(parse_double(parts[2], "--values", 1));
    if (n < 1) throw_invalid("--values: count must be positive");
    for (int i = 0; i < n; ++i) out.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
    return out;
  }
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(parse_double(item, "--values", 1));
  }
  return out;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Threshold dichotomy laboratory for the focusing radial NLS"};
  app.require_subcommand(1);

  ProblemFlags gs_problem;
  std::string gs_output, gs_profile;
  auto* gs = app.add_subcommand("groundstate", "solve for the ground state and print its constants");
  gs_problem.add(gs);
  gs->add_option("--output", gs_output, "write the profile as a field file");
  gs->add_option("--profile", gs_profile, "write (r, Q) as a two-column file");

  ProblemFlags inv_problem;
  DataFlags inv_data;
  bool inv_galilean = false;
  auto* inv = app.add_subcommand("invariants", "conserved quantities of the initial data");
  inv_problem.add(inv);
  inv_data.add(inv);
  inv->add_flag("--galilean", inv_galilean, "also report the zero-momentum frame");

  ProblemFlags cls_problem;
  DataFlags cls_data;
  ClassifyFlags cls_flags;
  auto* cls = app.add_subcommand("classify", "predict the dichotomy branch of the initial data");
  cls_problem.add(cls);
  cls_data.add(cls);
  cls_flags.add(cls);

  ProblemFlags ev_problem;
  DataFlags ev_data;
  ClassifyFlags ev_cls;
  EvolveFlags ev_flags;
  auto* ev = app.add_subcommand("evolve", "evolve, detect blow-up or scattering, and persist the run");
  ev_problem.add(ev);
  ev_data.add(ev);
  ev_cls.add(ev);
  ev_flags.add(ev);

  ProblemFlags sw_problem;
  DataFlags sw_data;
  ClassifyFlags sw_cls;
  EvolveFlags sw_flags;
  std::string sw_axis = "a";
  std::string sw_values;
  int sw_jobs = 1;
  auto* sw = app.add_subcommand("sweep", "one run per parameter value with a summary table");
  sw_problem.add(sw);
  sw_data.add(sw);
  sw_cls.add(sw);
  sw_flags.add(sw);
  sw->add_option("--axis", sw_axis, "parameter name (a, scale, radius, p, t_end or section.key)");
  sw->add_option("--values", sw_values, "comma list or lo:hi:count")->required();
  sw->add_option("--jobs", sw_jobs, "concurrent runs")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ErrorCategory::invalid_argument);
  }

  if (gs->parsed()) {
    const RunConfig c = gs_problem.build();
    const GroundState q = ground_state_for(c);
    if (!gs_output.empty()) save_field(q.profile, gs_output);
    if (!gs_profile.empty()) write_profile(q.profile, gs_profile);
    std::cout << ground_state_json(q).dump(2) << '\n';
    return 0;
  }

  if (inv->parsed()) {
    RunConfig c = inv_problem.build();
    inv_data.apply(c);
    const bool needs_q = c.initial.family == Family::soliton_multiple || c.initial.family == Family::soliton_scaling;
    const GroundState q = needs_q ? ground_state_for(c) : GroundState{};
    const RadialField u = make_initial_data(c, q);
    const InvariantReport r = report(u, c.p);
    json j = invariants_json(r);
    if (inv_galilean) j["galilean"] = invariants_json(galilean_reduce(r));
    std::cout << j.dump(2) << '\n';
    return 0;
  }

  if (cls->parsed()) {
    RunConfig c = cls_problem.build();
    cls_data.apply(c);
    cls_flags.apply(c);
    c.evolve = false;
    const RunArtifact a = run(c);
    std::cout << verdict_json(a);
    return 0;
  }

  if (ev->parsed()) {
    RunConfig c = ev_problem.build();
    ev_data.apply(c);
    ev_cls.apply(c);
    ev_flags.apply(c);
    c.evolve = true;
    RunArtifact a = run(c);
    const auto dir = persist(a);
    std::cerr << "run directory: " << dir.string() << '\n';
    std::cout << verdict_json(a);
    return 0;
  }

  if (sw->parsed()) {
    RunConfig c = sw_problem.build();
    sw_data.apply(c);
    sw_cls.apply(c);
    sw_flags.apply(c);
    const SweepResult result = sweep(c, SweepAxis{sw_axis, parse_values(sw_values)}, sw_jobs);
    std::cout << sweep_summary_csv(result);
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const nlslab::Error& e) {
    std::cerr << "error (" << nlslab::to_string(e.category()) << "): " << e.what() << '\n';
    return static_cast<int>(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
