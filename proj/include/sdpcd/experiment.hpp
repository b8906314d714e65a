#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sdpcd/bethe_hessian.hpp"
#include "sdpcd/diagnostics.hpp"
#include "sdpcd/errors.hpp"
#include "sdpcd/graph.hpp"
#include "sdpcd/rng.hpp"
#include "sdpcd/solver.hpp"

namespace sdpcd {

/// Invalid experiment configuration; field() names the offending key.
class ConfigError : public InvalidParameter {
 public:
  ConfigError(std::string field, const std::string& what)
      : InvalidParameter(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

enum class ExperimentKind { kGenerate, kSolve, kSpectral, kClones, kSweep, kRobustness, kBench };
enum class SweepAxis { kLambda, kRank };
enum class OutputFormat { kCsv, kJson };

std::string to_string(ExperimentKind kind);
std::string to_string(SweepAxis axis);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kClones;

  // Graph: SBM from (c, lambda) or (c_in, c_out), or an edge-list file.
  std::size_t n = 10000;
  double c = 3.0;
  std::optional<double> lambda = 1.2;
  std::optional<double> c_in;
  std::optional<double> c_out;
  std::string graph_path;
  double p = 0.0;  // clique perturbation on the 2-core

  // Solver.
  std::size_t rank = 16;
  double epsilon = 1e-4;
  std::size_t max_sweeps = 10000;
  FieldRule field_rule = FieldRule::kExcludeSelf;

  std::size_t clones = 100;
  Seed seed = 1;
  /// Sweeps at which clone overlaps are measured. Empty means powers of two.
  std::vector<std::size_t> checkpoints;

  // Sweep grid.
  SweepAxis over = SweepAxis::kLambda;
  std::vector<double> values;
  std::size_t replicates = 1;

  bool spectral = true;     // run the Bethe Hessian baseline on the same graph
  bool distances = true;    // pairwise clone distances and histograms
  bool extend_trees = false;
  bool procrustes = false;
  std::size_t threads = 0;  // 0: hardware concurrency

  std::string out;
  OutputFormat format = OutputFormat::kCsv;
  bool strict = false;

  /// Throws ConfigError on the first invalid field.
  void validate() const;
  /// Checkpoint list with the default filled in, capped at max_sweeps.
  std::vector<std::size_t> checkpoint_sweeps() const;
  std::size_t worker_count() const;
};

/// Sets one field from its textual key (the CLI long-flag name, `-` or `_`
/// separated). Throws ConfigError on an unknown key or unparsable value.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

/// `key = value` lines; `#` starts a comment.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

struct PreparedGraph {
  Graph raw;
  std::optional<PlantedPartition> planted;  // on the raw graph
  TwoCore two_core;
  Graph working;                            // the core, perturbed when p > 0
  std::vector<Label> core_planted;          // empty without a planted partition
  std::size_t clique_edges = 0;
  Seed graph_seed = 0;
  Seed perturbation_seed = 0;
  double generate_seconds = 0.0;
  double prune_seconds = 0.0;
  double perturb_seconds = 0.0;
};

PreparedGraph prepare_graph(const ExperimentConfig& config);

struct Checkpoint {
  std::size_t sweep = 0;
  double overlap = 0.0;
  double seconds = 0.0;  // solver time up to this sweep, projections excluded
};

struct CloneRecord {
  std::size_t index = 0;
  Seed seed = 0;
  std::size_t t_conv = 0;
  bool converged = false;
  double objective = 0.0;
  double magnetization_norm = 0.0;
  double overlap = 0.0;  // NaN without a planted partition
  std::vector<Checkpoint> checkpoints;
  double solve_seconds = 0.0;
  double projection_seconds = 0.0;
};

struct SpectralRecord {
  bool computed = false;
  double r = 0.0;
  double overlap = 0.0;
  double first_eigenvalue = 0.0;
  double second_eigenvalue = 0.0;
  double localization = 0.0;
  bool detected = false;
  bool converged = false;
  double seconds = 0.0;
};

struct DistanceRecord {
  bool computed = false;
  std::vector<double> raw;
  std::vector<double> aligned;
  std::size_t flagged_pairs = 0;
  DistanceHistogram raw_histogram;
  DistanceHistogram aligned_histogram;
  double seconds = 0.0;
};

struct GraphRecord {
  std::size_t raw_vertices = 0;
  std::size_t raw_edges = 0;
  std::size_t core_vertices = 0;
  std::size_t core_edges = 0;
  std::size_t clique_edges = 0;
  Seed graph_seed = 0;
  Seed perturbation_seed = 0;
  double generate_seconds = 0.0;
  double prune_seconds = 0.0;
  double perturb_seconds = 0.0;
};

struct RunRecord {
  ExperimentConfig config;
  GraphRecord graph;
  std::vector<CloneRecord> clones;
  SpectralRecord spectral;
  DistanceRecord distances;
  double solve_seconds = 0.0;  // wall time of the clone phase

  double mean_overlap() const;
  double overlap_stddev() const;
  bool all_converged() const;
};

/// Clones on an already prepared graph. Clone i uses
/// derive_seed(clone_master, kClone, i), so results do not depend on the
/// number of worker threads.
RunRecord run_on_graph(const PreparedGraph& graph, const ExperimentConfig& config,
                       Seed clone_master);
RunRecord run_clones(const ExperimentConfig& config);

/// The clone run at p = 0 followed by the same graph seed at config.p.
struct RobustnessRecord {
  RunRecord clean;
  RunRecord perturbed;
};
RobustnessRecord run_robustness(const ExperimentConfig& config);

struct SweepPoint {
  std::size_t grid_index = 0;
  double value = 0.0;
  std::size_t replicate = 0;
  RunRecord record;
};

/// Grid over lambda or rank. A lambda point draws a fresh graph per
/// replicate; rank points share the graph of each replicate so that only m
/// varies. Seeds derive from (master, grid index, replicate).
std::vector<SweepPoint> run_sweep(const ExperimentConfig& config);

/// run_clones with distances and spectral baseline off and timings kept.
RunRecord run_bench(const ExperimentConfig& config);

// Output. Timing columns are written only when include_timings is set, so
// that two runs with the same seed produce identical bytes otherwise.
void write_clone_csv(std::ostream& out, const RunRecord& record, bool include_timings);
void write_checkpoint_csv(std::ostream& out, const RunRecord& record, bool include_timings);
void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points);
std::string to_json(const RunRecord& record, bool include_timings);
std::string to_json(const ExperimentConfig& config);
std::string to_json(const std::vector<SweepPoint>& points, const ExperimentConfig& config,
                    bool include_timings);

/// Writes `<out>.csv` plus `<out>.json` (csv format) or `<out>.json` alone.
/// Returns the paths written. Throws IoError.
std::vector<std::filesystem::path> write_outputs(const RunRecord& record);
std::vector<std::filesystem::path> write_outputs(const std::vector<SweepPoint>& points,
                                                 const ExperimentConfig& config);

}  // namespace sdpcd
