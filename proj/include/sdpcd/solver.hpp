#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "sdpcd/dense_eigen.hpp"
#include "sdpcd/graph.hpp"
#include "sdpcd/rng.hpp"
#include "sdpcd/spin_config.hpp"

namespace sdpcd {

// Rank-m relaxation of balanced bisection:
//
//   maximize   sum_{(ij) in E} x_i . x_j
//   subject to ||x_i|| = 1,  sum_i x_i = 0
//
// solved by greedy block-coordinate ascent. Each spin is set to its
// normalized local field h_i = sum_{j~i} x_j - M, where M = sum_k x_k is the
// current magnetization; the -M term is the adaptive field that drives the
// magnetization to zero.

/// Below this field norm a spin keeps its previous value.
inline constexpr double kZeroFieldNorm = 1e-12;

enum class FieldRule {
  /// h_i = sum_{j~i} x_j - (M - x_i): the exact maximizer over x_i of
  /// sum_E x_i . x_j - |M|^2 / 2, so each update is an ascent step.
  kExcludeSelf,
  /// h_i = sum_{j~i} x_j - M with M still containing x_i. Equivalent for
  /// large sparse graphs, but can flip spins back and forth when |M| is
  /// comparable to the neighbor sum (small dense graphs).
  kIncludeSelf,
};

struct SolverOptions {
  std::size_t rank = 16;
  double epsilon = 1e-4;
  std::size_t max_sweeps = 10000;
  Seed seed = 0;
  /// Full recomputation of M every this many sweeps (0 disables).
  std::size_t magnetization_refresh = 64;
  /// Evaluate the objective after every sweep. Costs one pass over the edges.
  bool record_objective = true;
  FieldRule field_rule = FieldRule::kExcludeSelf;
};

struct SweepStats {
  std::size_t sweep = 0;  // 1-based
  double objective = 0.0;
  double delta_max = 0.0;
  double magnetization_norm = 0.0;  // ||M|| / n
  double seconds = 0.0;             // wall time of the sweep itself
};

/// Called after every sweep; may inspect but not modify the configuration.
using SweepObserver = std::function<void(const SweepStats&, const SpinConfig&)>;

struct SolverResult {
  SpinConfig config;
  std::size_t t_conv = 0;
  bool converged = false;
  std::vector<double> objective_trace;
  std::vector<double> delta_trace;
  std::vector<double> magnetization_trace;
  std::vector<double> sweep_seconds;
  double final_magnetization_norm = 0.0;
};

/// One pass over all spins in a fresh uniformly random order, updating in
/// place. Returns max_i ||x_i^new - x_i^old||.
double bcd_sweep(SpinConfig& config, const Graph& g, Rng& rng,
                 FieldRule rule = FieldRule::kExcludeSelf);

/// Sweeps until delta_max < epsilon or max_sweeps. Initial spins are drawn
/// with init_config from a stream derived from options.seed.
SolverResult run_solver(const Graph& g, const SolverOptions& options,
                        const SweepObserver& observer = {});

/// Same, starting from a given configuration (options.rank is ignored).
SolverResult run_solver(const Graph& g, SpinConfig initial, const SolverOptions& options,
                        const SweepObserver& observer = {});

/// sum over edges of x_i . x_j
double objective(const SpinConfig& config, const Graph& g);

/// Sigma_jk = (1/n) sum_i (x_i)_j (x_i)_k
DenseMatrix component_covariance(const SpinConfig& config);

/// Gap below which the top eigenvalue counts as degenerate.
inline constexpr double kDegenerateGap = 1e-10;

struct PrincipalComponent {
  std::vector<double> direction;  // unit norm, first nonzero component > 0
  double eigenvalue = 0.0;
  double gap = 0.0;  // top minus second eigenvalue
  bool degenerate = false;
};

PrincipalComponent principal_component(const DenseMatrix& sigma);

/// sign(x_i . v1) with sign(0) = +1.
std::vector<Label> project_to_labels(const SpinConfig& config);
std::vector<Label> project_to_labels(const SpinConfig& config, std::span<const double> axis);

/// CSV `sweep,objective,delta_max,mag_norm`, one row per sweep.
void write_trace_csv(std::ostream& out, const SolverResult& result);

}  // namespace sdpcd
