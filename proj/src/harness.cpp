#include "nlslab/harness.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <functional>
#include <iomanip>
#include <random>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include "json.hpp"

#include "nlslab/error.hpp"
#include "nlslab/field_io.hpp"

namespace nlslab {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;
using json = nlohmann::ordered_json;

Family parse_family(std::string_view name) {
  if (name == "soliton-multiple") return Family::soliton_multiple;
  if (name == "soliton-scaling") return Family::soliton_scaling;
  if (name == "gaussian") return Family::gaussian;
  if (name == "ring") return Family::ring;
  if (name == "file") return Family::file;
  throw_invalid("unknown initial-data family '" + std::string(name) + "'");
}

std::string_view to_string(Family f) {
  switch (f) {
    case Family::soliton_multiple:
      return "soliton-multiple";
    case Family::soliton_scaling:
      return "soliton-scaling";
    case Family::gaussian:
      return "gaussian";
    case Family::ring:
      return "ring";
    case Family::file:
      return "file";
  }
  return "unknown";
}

std::string_view to_string(Agreement a) {
  switch (a) {
    case Agreement::confirmed:
      return "confirmed";
    case Agreement::refuted:
      return "refuted";
    case Agreement::unresolved:
      return "unresolved";
    case Agreement::not_run:
      return "not-run";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// INI serialization

namespace {

struct Key {
  const char* section;
  const char* name;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

[[noreturn]] void bad_value(const std::string& key, const std::string& text, const char* what) {
  throw_invalid("config key " + key + ": '" + text + "' is not " + what);
}

template <class Ref>
Key real_key(const char* section, const char* name, Ref ref) {
  const std::string full = std::string(section) + "." + name;
  return {section, name, [ref](const RunConfig& c) { return format_double(ref(const_cast<RunConfig&>(c))); },
          [ref, full](RunConfig& c, const std::string& v) {
            double x = 0.0;
            const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
            if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) bad_value(full, v, "a number");
            ref(c) = x;
          }};
}

template <class T, class Ref>
Key integer_key(const char* section, const char* name, Ref ref) {
  const std::string full = std::string(section) + "." + name;
  return {section, name, [ref](const RunConfig& c) { return std::to_string(ref(const_cast<RunConfig&>(c))); },
          [ref, full](RunConfig& c, const std::string& v) {
            T x{};
            const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
            if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) bad_value(full, v, "an integer");
            ref(c) = x;
          }};
}

template <class Ref>
Key bool_key(const char* section, const char* name, Ref ref) {
  const std::string full = std::string(section) + "." + name;
  return {section, name, [ref](const RunConfig& c) { return std::string(ref(const_cast<RunConfig&>(c)) ? "true" : "false"); },
          [ref, full](RunConfig& c, const std::string& v) {
            if (v == "true" || v == "yes" || v == "1") {
              ref(c) = true;
            } else if (v == "false" || v == "no" || v == "0") {
              ref(c) = false;
            } else {
              bad_value(full, v, "a boolean");
            }
          }};
}

template <class Ref>
Key string_key(const char* section, const char* name, Ref ref) {
  return {section, name, [ref](const RunConfig& c) { return ref(const_cast<RunConfig&>(c)); },
          [ref](RunConfig& c, const std::string& v) { ref(c) = v; }};
}

std::string join_times(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_double(v[i]);
  return out;
}

std::vector<double> split_times(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start < text.size()) {
    auto comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    std::string item = text.substr(start, comma - start);
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    double x = 0.0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), x);
    if (item.empty() || res.ec != std::errc{} || res.ptr != item.data() + item.size()) {
      bad_value("evolve.snapshot_times", text, "a comma-separated list of numbers");
    }
    out.push_back(x);
    start = comma + 1;
  }
  return out;
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = [] {
    std::vector<Key> k;
    k.push_back(real_key("problem", "p", [](RunConfig& c) -> double& { return c.p; }));
    k.push_back(integer_key<int>("problem", "N", [](RunConfig& c) -> int& { return c.dimension; }));
    k.push_back(real_key("problem", "lambda", [](RunConfig& c) -> double& { return c.normalization; }));

    k.push_back(real_key("grid", "r_max", [](RunConfig& c) -> double& { return c.r_max; }));
    k.push_back(integer_key<std::size_t>("grid", "nodes", [](RunConfig& c) -> std::size_t& { return c.nodes; }));

    k.push_back({"initial", "family", [](const RunConfig& c) { return std::string(to_string(c.initial.family)); },
                 [](RunConfig& c, const std::string& v) { c.initial.family = parse_family(v); }});
    k.push_back(real_key("initial", "amplitude", [](RunConfig& c) -> double& { return c.initial.amplitude; }));
    k.push_back(real_key("initial", "scale", [](RunConfig& c) -> double& { return c.initial.scale; }));
    k.push_back(real_key("initial", "radius", [](RunConfig& c) -> double& { return c.initial.radius; }));
    k.push_back(string_key("initial", "path", [](RunConfig& c) -> std::string& { return c.initial.path; }));

    k.push_back(bool_key("evolve", "enabled", [](RunConfig& c) -> bool& { return c.evolve; }));
    k.push_back(real_key("evolve", "t_end", [](RunConfig& c) -> double& { return c.evolution.t_end; }));
    k.push_back(real_key("evolve", "dt_max", [](RunConfig& c) -> double& { return c.evolution.timestep.dt_max; }));
    k.push_back(real_key("evolve", "grid_factor", [](RunConfig& c) -> double& { return c.evolution.timestep.grid_factor; }));
    k.push_back(real_key("evolve", "amplitude_factor",
                         [](RunConfig& c) -> double& { return c.evolution.timestep.amplitude_factor; }));
    k.push_back(real_key("evolve", "dt_min", [](RunConfig& c) -> double& { return c.evolution.timestep.dt_min; }));
    k.push_back({"evolve", "splitting", [](const RunConfig& c) { return std::string(to_string(c.evolution.splitting)); },
                 [](RunConfig& c, const std::string& v) { c.evolution.splitting = parse_splitting(v); }});
    k.push_back({"evolve", "propagator",
                 [](const RunConfig& c) { return std::string(to_string(c.evolution.propagator)); },
                 [](RunConfig& c, const std::string& v) { c.evolution.propagator = parse_propagator_kind(v); }});
    k.push_back(integer_key<int>("evolve", "sample_stride", [](RunConfig& c) -> int& { return c.evolution.sample_stride; }));
    k.push_back(bool_key("evolve", "stop_on_detection", [](RunConfig& c) -> bool& { return c.evolution.stop_on_detection; }));
    k.push_back(real_key("evolve", "cutoff_scale", [](RunConfig& c) -> double& { return c.evolution.cutoff_scale; }));
    k.push_back(real_key("evolve", "cutoff_mass_fraction",
                         [](RunConfig& c) -> double& { return c.evolution.cutoff_mass_fraction; }));
    k.push_back(integer_key<std::size_t>("evolve", "max_nodes",
                                         [](RunConfig& c) -> std::size_t& { return c.evolution.max_nodes; }));
    k.push_back(bool_key("evolve", "nonlinear", [](RunConfig& c) -> bool& { return c.evolution.nonlinear; }));
    k.push_back(real_key("evolve", "sponge_width", [](RunConfig& c) -> double& { return c.evolution.sponge_width; }));
    k.push_back(real_key("evolve", "sponge_strength", [](RunConfig& c) -> double& { return c.evolution.sponge_strength; }));
    k.push_back({"evolve", "snapshot_times", [](const RunConfig& c) { return join_times(c.evolution.snapshot_times); },
                 [](RunConfig& c, const std::string& v) { c.evolution.snapshot_times = split_times(v); }});

    k.push_back(bool_key("detectors", "blowup", [](RunConfig& c) -> bool& { return c.evolution.blowup.enabled; }));
    k.push_back(real_key("detectors", "growth", [](RunConfig& c) -> double& { return c.evolution.blowup.growth; }));
    k.push_back(real_key("detectors", "fit_floor", [](RunConfig& c) -> double& { return c.evolution.blowup.fit_floor; }));
    k.push_back(bool_key("detectors", "scattering", [](RunConfig& c) -> bool& { return c.evolution.scattering.enabled; }));
    k.push_back(real_key("detectors", "burn_in", [](RunConfig& c) -> double& { return c.evolution.scattering.burn_in; }));
    k.push_back(real_key("detectors", "window", [](RunConfig& c) -> double& { return c.evolution.scattering.window; }));
    k.push_back(real_key("detectors", "strichartz_tol",
                         [](RunConfig& c) -> double& { return c.evolution.scattering.strichartz_tol; }));
    k.push_back(real_key("detectors", "l4_decay", [](RunConfig& c) -> double& { return c.evolution.scattering.l4_decay; }));
    k.push_back(real_key("detectors", "cauchy_tol", [](RunConfig& c) -> double& { return c.evolution.scattering.cauchy_tol; }));

    k.push_back(bool_key("classify", "galilean", [](RunConfig& c) -> bool& { return c.classify.apply_galilean; }));
    k.push_back(bool_key("classify", "radial", [](RunConfig& c) -> bool& { return c.classify.radial; }));
    k.push_back(bool_key("classify", "finite_variance", [](RunConfig& c) -> bool& { return c.classify.finite_variance; }));
    k.push_back(real_key("classify", "tie_tol", [](RunConfig& c) -> double& { return c.classify.tie_tol; }));

    k.push_back(string_key("output", "directory", [](RunConfig& c) -> std::string& { return c.output_dir; }));
    k.push_back(string_key("output", "run_id", [](RunConfig& c) -> std::string& { return c.run_id; }));
    return k;
  }();
  return table;
}

const Key* find_key(std::string_view section, std::string_view name) {
  for (const auto& k : keys()) {
    if (section == k.section && name == k.name) return &k;
  }
  return nullptr;
}

}  // namespace

std::string to_ini(const RunConfig& c) {
  pt::ptree tree;
  for (const auto& k : keys()) tree.put(pt::ptree::path_type(std::string(k.section) + "/" + k.name, '/'), k.get(c));
  std::ostringstream out;
  pt::write_ini(out, tree);
  return out.str();
}

RunConfig config_from_ini(std::string_view text, const std::string& origin) {
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(origin, e.line(), e.message());
  }
  RunConfig c;
  for (const auto& [section, entries] : tree) {
    if (!entries.data().empty() && entries.empty()) {
      throw Error(ErrorCategory::invalid_argument, origin + ": key '" + section + "' outside any section");
    }
    for (const auto& [name, value] : entries) {
      const Key* k = find_key(section, name);
      if (!k) throw Error(ErrorCategory::invalid_argument, origin + ": unknown key " + section + "." + name);
      k->set(c, value.data());
    }
  }
  return c;
}

RunConfig load_config(const fs::path& path) {
  return config_from_ini(read_text(path), path.string());
}

void save_config(const RunConfig& c, const fs::path& path) {
  write_text(path, to_ini(c));
}

void set_parameter(RunConfig& c, std::string_view name, double value) {
  std::string_view section;
  std::string_view key;
  if (name == "a" || name == "amplitude" || name == "A") {
    section = "initial", key = "amplitude";
  } else if (name == "scale" || name == "sigma" || name == "mu") {
    section = "initial", key = "scale";
  } else if (name == "radius") {
    section = "initial", key = "radius";
  } else if (name == "p" || name == "N" || name == "lambda") {
    section = "problem", key = name;
  } else if (name == "t_end") {
    section = "evolve", key = "t_end";
  } else if (const auto dot = name.find('.'); dot != std::string_view::npos) {
    section = name.substr(0, dot);
    key = name.substr(dot + 1);
  } else {
    throw_invalid("unknown parameter '" + std::string(name) + "'");
  }
  const Key* k = find_key(section, key);
  if (!k) throw_invalid("unknown parameter '" + std::string(name) + "'");
  std::string text;
  if (section == "problem" && key == "N") {
    if (value != std::floor(value)) throw_invalid("N must be an integer");
    text = std::to_string(static_cast<long long>(value));
  } else if (section == "grid" && key == "nodes") {
    if (value != std::floor(value) || value < 2) throw_invalid("nodes must be an integer >= 2");
    text = std::to_string(static_cast<long long>(value));
  } else {
    text = format_double(value);
  }
  k->set(c, text);
}

std::string make_run_id() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::random_device rd;
  std::ostringstream id;
  id << std::put_time(&tm, "%Y%m%dT%H%M%SZ") << '-' << std::hex << std::setw(8) << std::setfill('0') << rd();
  return id.str();
}

// ---------------------------------------------------------------------------
// Initial data

GroundState ground_state_for(const RunConfig& c) {
  return solve_ground_state(c.p, c.dimension, c.normalization, make_grid(c.dimension, c.r_max, c.nodes));
}

namespace {

void require_tail(const RadialGrid& g, double reach, const char* family) {
  if (reach > g.r_max()) {
    throw_invalid(std::string(family) + ": profile does not decay before R_max (needs R_max >= " + format_double(reach) + ")");
  }
}

bool same_grid(const RadialGrid& a, const RadialGrid& b) {
  return a.dimension() == b.dimension() && a.r_max() == b.r_max() && a.size() == b.size();
}

}  // namespace

RadialField make_initial_data(const RunConfig& c, const GroundState& q) {
  const InitialDataSpec& s = c.initial;
  if (!std::isfinite(s.amplitude)) throw_invalid("initial amplitude must be finite");
  const auto check_q = [&] {
    if (q.profile.empty() || q.dimension != c.dimension || q.p != c.p) {
      throw_invalid("soliton family needs a ground state for the configured (p, N)");
    }
  };

  switch (s.family) {
    case Family::soliton_multiple:
      check_q();
      return q.profile.scaled(s.amplitude);
    case Family::soliton_scaling: {
      check_q();
      if (!(s.scale > 0.0)) throw_invalid("soliton-scaling: scale must be positive");
      const RadialGrid& g = q.profile.grid();
      if (s.scale * g.spacing() > 0.25) throw_invalid("soliton-scaling: scale too large for the grid spacing");
      require_tail(g, 30.0 / (s.scale * std::sqrt(q.normalization)), "soliton-scaling");
      // mu^{2/(p-1)} Q(mu r) solves the profile equation with lambda mu^2.
      const GroundState scaled = solve_ground_state(c.p, c.dimension, q.normalization * s.scale * s.scale, q.profile.grid_ptr());
      return scaled.profile.scaled(s.amplitude);
    }
    case Family::gaussian:
    case Family::ring: {
      if (!(s.scale > 0.0)) throw_invalid("gaussian/ring: width must be positive");
      if (s.family == Family::ring && s.radius < 0.0) throw_invalid("ring: radius must be nonnegative");
      auto grid = make_grid(c.dimension, c.r_max, c.nodes);
      const double r0 = s.family == Family::ring ? s.radius : 0.0;
      require_tail(*grid, r0 + 6.5 * s.scale, std::string(to_string(s.family)).c_str());
      if (s.scale < 2.0 * grid->spacing()) throw_invalid("gaussian/ring: width below two grid spacings");
      const double a = s.amplitude;
      const double w2 = s.scale * s.scale;
      if (s.family == Family::gaussian) {
        return RadialField::from_function(grid, [=](double r) { return cplx(a * std::exp(-r * r / w2)); });
      }
      return RadialField::from_function(grid, [=](double r) {
        return cplx(a * (std::exp(-(r - r0) * (r - r0) / w2) + std::exp(-(r + r0) * (r + r0) / w2)));
      });
    }
    case Family::file: {
      if (s.path.empty()) throw_invalid("file family: no path given");
      RadialField u = load_field(s.path);
      if (u.grid().dimension() != c.dimension) {
        throw_invalid("file family: field dimension " + std::to_string(u.grid().dimension()) +
                      " differs from configured N = " + std::to_string(c.dimension));
      }
      return s.amplitude == 1.0 ? u : u.scaled(s.amplitude);
    }
  }
  throw_invalid("unsupported family");
}

// ---------------------------------------------------------------------------
// Runs

Agreement compare(const Verdict& v, const std::optional<EvolutionRecord>& record) {
  if (!record) return Agreement::not_run;
  const bool predicts_global = v.category == Category::global_scatters_predicted;
  const bool predicts_blowup =
      v.category == Category::blowup_predicted || v.category == Category::negative_energy_blowup;
  if (!predicts_global && !predicts_blowup) return Agreement::unresolved;
  switch (record->outcome) {
    case Outcome::inconclusive:
      return Agreement::unresolved;
    case Outcome::blew_up:
      return predicts_blowup ? Agreement::confirmed : Agreement::refuted;
    case Outcome::scattering_consistent:
      return predicts_global ? Agreement::confirmed : Agreement::refuted;
  }
  return Agreement::unresolved;
}

namespace {

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

}  // namespace

RunArtifact run(RunConfig config, const GroundState* q) {
  if (config.run_id.empty()) config.run_id = make_run_id();
  RunArtifact a;
  a.started_utc = utc_now();
  const auto start = std::chrono::steady_clock::now();
  a.config = config;

  if (q) {
    if (q->p != config.p || q->dimension != config.dimension || q->normalization != config.normalization ||
        !same_grid(q->profile.grid(), *make_grid(config.dimension, config.r_max, config.nodes))) {
      throw_invalid("run: supplied ground state does not match the configuration");
    }
    a.ground_state = *q;
  } else {
    a.ground_state = ground_state_for(config);
  }
  a.field = make_initial_data(config, a.ground_state);
  a.initial = report(a.field, config.p);
  a.verdict = classify(a.initial, a.ground_state, config.classify);
  if (config.evolve) {
    EvolveConfig ec = config.evolution;
    ec.p = config.p;
    a.record = evolve(a.field, ec);
  }
  a.agreement = compare(a.verdict, a.record);
  a.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return a;
}

namespace {

json witness_json(const Witness& w) {
  json j;
  j["product"] = w.product ? json(*w.product) : json(nullptr);
  j["threshold"] = w.threshold;
  j["margin"] = w.margin ? json(*w.margin) : json(nullptr);
  return j;
}

}  // namespace

std::string verdict_json(const RunArtifact& a) {
  const RunConfig& c = a.config;
  json j;
  j["run_id"] = c.run_id;
  j["started_utc"] = a.started_utc;
  j["wall_seconds"] = a.wall_seconds;
  j["p"] = c.p;
  j["N"] = c.dimension;
  j["lambda"] = c.normalization;
  j["initial_data"] = {{"family", std::string(to_string(c.initial.family))},
                       {"amplitude", c.initial.amplitude},
                       {"scale", c.initial.scale},
                       {"radius", c.initial.radius},
                       {"path", c.initial.path}};
  if (!a.error.empty()) j["error"] = a.error;

  const GroundState& q = a.ground_state;
  if (!q.profile.empty()) {
    j["ground_state"] = {{"central_value", q.central_value}, {"mass", q.mass},
                         {"grad_sq", q.grad_sq},             {"lp1_norm_pow", q.lp1_norm_pow},
                         {"energy", q.energy},               {"c_gn", q.c_gn},
                         {"threshold_me", q.threshold_me},   {"threshold_grad", q.threshold_grad},
                         {"s_c", q.s_c}};
  }
  if (!a.field.empty()) {
    const InvariantReport& r = a.initial;
    j["invariants"] = {{"mass", r.mass},       {"energy", r.energy},   {"grad_sq", r.grad_sq},
                       {"momentum", r.momentum}, {"l4_pow", r.l4_pow}, {"lp1_pow", r.lp1_pow},
                       {"product_grad", r.product_grad},
                       {"product_me", r.product_me ? json(*r.product_me) : json(nullptr)}};
    const Verdict& v = a.verdict;
    j["prediction"] = {{"category", std::string(to_string(v.category))},
                       {"mass_energy", witness_json(v.mass_energy)},
                       {"gradient", witness_json(v.gradient)},
                       {"galilean_applied", v.galilean_applied},
                       {"radial", v.radial},
                       {"finite_variance_assumed", v.finite_variance_assumed},
                       {"blowup_conclusion_valid", v.blowup_conclusion_valid},
                       {"notes", v.notes}};
  }
  if (a.record) {
    const EvolutionRecord& rec = *a.record;
    json e;
    e["outcome"] = std::string(to_string(rec.outcome));
    e["reason"] = rec.reason;
    e["steps"] = rec.steps;
    e["regrids"] = rec.regrids;
    e["samples"] = rec.samples.size();
    e["t_final"] = rec.samples.empty() ? 0.0 : rec.samples.back().t;
    e["final_nodes"] = rec.final_field.size();
    e["cutoff_scale"] = rec.cutoff_scale;
    e["strichartz_exponent"] = rec.strichartz_exponent;
    if (rec.blowup) {
      json b = {{"T_detect", rec.blowup->time}, {"growth", rec.blowup->growth}};
      if (rec.blowup->rate_fit) {
        const RateFit& f = *rec.blowup->rate_fit;
        b["rate_fit"] = {{"alpha", f.alpha}, {"c", f.c}, {"T", f.blowup_time}, {"residual", f.residual}, {"samples", f.samples}};
      }
      e["blowup"] = b;
    }
    if (rec.scattering) {
      const ScatteringReport& s = *rec.scattering;
      e["scattering"] = {{"time", s.time},
                         {"strichartz_increment", s.strichartz_increment},
                         {"l4_ratio", s.l4_ratio},
                         {"cauchy_distance", s.cauchy_distance},
                         {"phi_plus_mass", lp_norm_pow(s.phi_plus, 2.0)}};
    }
    j["evolution"] = e;
  }
  j["agreement"] = std::string(to_string(a.agreement));
  return j.dump(2) + "\n";
}

fs::path persist(RunArtifact& a) {
  const fs::path dir = fs::path(a.config.output_dir) / a.config.run_id;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCategory::io, dir.string() + ": " + ec.message());
  a.directory = dir;

  save_config(a.config, dir / "config.ini");
  if (!a.field.empty()) save_field(a.field, dir / "initial_field.txt");
  if (a.record) {
    const EvolutionRecord& rec = *a.record;
    write_samples_csv(rec.samples, dir / "timeseries.csv");
    write_series(rec.samples, dir / "series");
    if (!rec.final_field.empty()) save_field(rec.final_field, dir / "final_field.txt");
    if (rec.scattering) save_field(rec.scattering->phi_plus, dir / "phi_plus.txt");
    for (const auto& snap : rec.snapshots) {
      write_profile(snap.field, dir / "snapshots" / ("t_" + format_double(snap.t) + ".dat"));
    }
  }
  // Written last: its presence marks a complete run directory.
  write_text(dir / "verdict.json", verdict_json(a));
  return dir;
}

LoadedRun load_run(const fs::path& directory) {
  LoadedRun out;
  out.config = load_config(directory / "config.ini");
  out.run_id = out.config.run_id;
  out.summary_json = read_text(directory / "verdict.json");
  if (fs::exists(directory / "timeseries.csv")) out.samples = read_samples_csv(directory / "timeseries.csv");
  return out;
}

std::vector<std::string> list_runs(const fs::path& root) {
  std::vector<std::string> ids;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw Error(ErrorCategory::io, root.string() + ": not a directory");
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && fs::exists(entry.path() / "verdict.json")) ids.push_back(entry.path().filename().string());
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

// ---------------------------------------------------------------------------
// Sweeps

namespace {

bool affects_ground_state(const std::string& parameter) {
  return parameter == "p" || parameter == "N" || parameter == "lambda" || parameter.rfind("problem.", 0) == 0 ||
         parameter.rfind("grid.", 0) == 0;
}

SweepRow row_for(double value, const RunArtifact& a) {
  SweepRow row;
  row.value = value;
  row.run_id = a.config.run_id;
  row.error = a.error;
  if (!a.field.empty()) row.predicted = std::string(to_string(a.verdict.category));
  if (a.record) {
    row.outcome = std::string(to_string(a.record->outcome));
    if (a.record->blowup) row.detect_time = a.record->blowup->time;
    if (a.record->scattering) row.detect_time = a.record->scattering->time;
  }
  row.agreement = std::string(to_string(a.agreement));
  return row;
}

}  // namespace

SweepResult sweep(const RunConfig& base, const SweepAxis& axis, int jobs, bool persist_runs) {
  SweepResult result;
  if (axis.values.empty()) return result;
  const std::string sweep_id = base.run_id.empty() ? make_run_id() : base.run_id;

  std::vector<RunConfig> configs;
  for (std::size_t i = 0; i < axis.values.size(); ++i) {
    RunConfig c = base;
    set_parameter(c, axis.parameter, axis.values[i]);
    std::ostringstream id;
    id << sweep_id << '-' << std::setw(3) << std::setfill('0') << i;
    c.run_id = id.str();
    c.output_dir = (fs::path(base.output_dir) / sweep_id).string();
    configs.push_back(std::move(c));
  }

  std::optional<GroundState> shared;
  if (!affects_ground_state(axis.parameter)) shared = ground_state_for(base);

  result.runs.resize(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      RunArtifact& slot = result.runs[i];
      try {
        slot = run(configs[i], shared ? &*shared : nullptr);
      } catch (const std::exception& e) {
        slot.config = configs[i];
        slot.error = e.what();
      }
      if (persist_runs) {
        try {
          persist(slot);
        } catch (const std::exception& e) {
          if (slot.error.empty()) slot.error = std::string("persist: ") + e.what();
        }
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), 1, configs.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }

  for (std::size_t i = 0; i < configs.size(); ++i) result.rows.push_back(row_for(axis.values[i], result.runs[i]));
  if (persist_runs) write_text(fs::path(base.output_dir) / sweep_id / "summary.csv", sweep_summary_csv(result));
  return result;
}

std::string sweep_summary_csv(const SweepResult& result) {
  std::ostringstream out;
  out << "value,run_id,predicted,outcome,agreement,detect_time,error\n";
  for (const auto& r : result.rows) {
    std::string err = r.error;
    for (auto& ch : err) {
      if (ch == ',' || ch == '\n') ch = ';';
    }
    out << format_double(r.value) << ',' << r.run_id << ',' << r.predicted << ',' << r.outcome << ',' << r.agreement
        << ',' << (r.detect_time ? format_double(*r.detect_time) : "") << ',' << err << '\n';
  }
  return out.str();
}

}  // namespace nlslab
