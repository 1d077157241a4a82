#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nlslab/classifier.hpp"
#include "nlslab/evolver.hpp"
#include "nlslab/groundstate.hpp"
#include "nlslab/invariants.hpp"

namespace nlslab {

enum class Family {
  soliton_multiple,  // a Q
  soliton_scaling,   // mu^{2/(p-1)} Q(mu r)
  gaussian,          // A exp(-r^2 / sigma^2)
  ring,              // A [exp(-(r - r0)^2 / sigma^2) + exp(-(r + r0)^2 / sigma^2)]
  file,              // profile loaded from a field file
};

Family parse_family(std::string_view name);
std::string_view to_string(Family f);

struct InitialDataSpec {
  Family family = Family::soliton_multiple;
  double amplitude = 1.0;  // a for soliton-multiple, A otherwise
  double scale = 1.0;      // mu for soliton-scaling, sigma for gaussian and ring
  double radius = 0.0;     // r0 for ring
  std::string path;        // field file for the file family
};

/// Everything needed to reproduce a run. Serialized as an INI file with the
/// sections [problem], [grid], [initial], [evolve], [detectors], [classify]
/// and [output]; see the example config in the README.
struct RunConfig {
  double p = 3.0;
  int dimension = 3;
  double normalization = 1.0;  // lambda in Q'' + (N-1)/r Q' - lambda Q + Q^p = 0

  double r_max = 40.0;
  std::size_t nodes = 4097;

  InitialDataSpec initial;

  bool evolve = true;
  EvolveConfig evolution;
  ClassifyOptions classify;

  std::string output_dir = "runs";
  std::string run_id;  // generated when empty
};

std::string to_ini(const RunConfig& c);
RunConfig config_from_ini(std::string_view text, const std::string& origin = "<config>");
RunConfig load_config(const std::filesystem::path& path);
void save_config(const RunConfig& c, const std::filesystem::path& path);

/// Sets one numeric parameter by name ("section.key" as in the INI file, or
/// one of the shorthands a, amplitude, scale, sigma, radius, p, N, t_end).
void set_parameter(RunConfig& c, std::string_view name, double value);

/// Identifier that differs between invocations: UTC timestamp plus a random suffix.
std::string make_run_id();

/// Ground state on the configured grid and normalization.
GroundState ground_state_for(const RunConfig& c);

/// Initial field for the configured family. The soliton families use `q`,
/// which must match the configured (p, N, grid).
RadialField make_initial_data(const RunConfig& c, const GroundState& q);

enum class Agreement { confirmed, refuted, unresolved, not_run };
std::string_view to_string(Agreement a);

/// Compares the classifier prediction with the dynamical outcome.
Agreement compare(const Verdict& v, const std::optional<EvolutionRecord>& record);

struct RunArtifact {
  RunConfig config;
  GroundState ground_state;
  RadialField field;  // initial data
  InvariantReport initial;
  Verdict verdict;
  std::optional<EvolutionRecord> record;
  Agreement agreement = Agreement::not_run;
  double wall_seconds = 0.0;
  std::string started_utc;
  std::string error;  // set when the run failed; the other fields may be partial
  std::filesystem::path directory;
};

/// Runs one configuration. A ground state already solved for the same
/// (p, N, lambda, grid) may be passed in to skip the solve.
RunArtifact run(RunConfig config, const GroundState* q = nullptr);

/// Writes <output_dir>/<run_id>/ with config.ini, verdict.json,
/// timeseries.csv, series/*.dat, initial_field.txt, final_field.txt,
/// phi_plus.txt (when scattering fired) and snapshots/. Returns the directory.
std::filesystem::path persist(RunArtifact& artifact);

/// The JSON summary written to verdict.json.
std::string verdict_json(const RunArtifact& artifact);

/// Reconstructs what was persisted: config, verdict summary and time series.
struct LoadedRun {
  RunConfig config;
  std::string run_id;
  std::string summary_json;
  std::vector<Sample> samples;
};
LoadedRun load_run(const std::filesystem::path& directory);

/// Run ids under an output directory (subdirectories holding verdict.json), sorted.
std::vector<std::string> list_runs(const std::filesystem::path& root);

struct SweepAxis {
  std::string parameter;
  std::vector<double> values;
};

struct SweepRow {
  double value = 0.0;
  std::string run_id;
  std::string predicted;
  std::string outcome;
  std::string agreement;
  std::optional<double> detect_time;
  std::string error;
};

struct SweepResult {
  std::vector<RunArtifact> runs;
  std::vector<SweepRow> rows;
};

/// One run per axis value, sharing the ground state. Runs execute on up to
/// `jobs` threads; a failing run is recorded in its row and never aborts the
/// sweep. With persist_runs, each run owns <output_dir>/<sweep id>/<run id>/
/// and the merged table goes to summary.csv beside them.
SweepResult sweep(const RunConfig& base, const SweepAxis& axis, int jobs = 1, bool persist_runs = true);

std::string sweep_summary_csv(const SweepResult& result);

}  // namespace nlslab
