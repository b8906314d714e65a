#include "sdpcd/solver.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "sdpcd/errors.hpp"

namespace sdpcd {

namespace {

// Field buffer: fixed-size for the common ranks so the inner loops unroll.
template <std::size_t Rank>
struct FieldBuffer {
  std::array<double, Rank> h;
  explicit FieldBuffer(std::size_t) {}
  double* data() { return h.data(); }
};

template <>
struct FieldBuffer<0> {
  std::vector<double> h;
  explicit FieldBuffer(std::size_t m) : h(m) {}
  double* data() { return h.data(); }
};

inline void prefetch_row(const double* row, std::size_t m) {
  constexpr std::size_t kLine = 64 / sizeof(double);
  for (std::size_t k = 0; k < m; k += kLine) __builtin_prefetch(row + k);
}

template <std::size_t Rank, bool ExcludeSelf>
double sweep_kernel(double* __restrict x, double* __restrict mag, std::size_t m_dynamic,
                    const Graph& g, std::span<const VertexId> order) {
  const std::size_t m = Rank != 0 ? Rank : m_dynamic;
  FieldBuffer<Rank> buffer(m);
  double* __restrict h = buffer.data();
  double worst = 0.0;
  constexpr std::size_t kAhead = 2;
  const std::size_t count = order.size();

  for (std::size_t t = 0; t < count; ++t) {
    if (t + kAhead < count) {
      // Spins are visited in random order; fetch the next rows early.
      const VertexId ahead = order[t + kAhead];
      prefetch_row(x + static_cast<std::size_t>(ahead) * m, m);
      for (const VertexId j : g.neighbors(ahead)) {
        prefetch_row(x + static_cast<std::size_t>(j) * m, m);
      }
    }
    const VertexId i = order[t];
    double* xi = x + static_cast<std::size_t>(i) * m;
    // Neighbor sum first: it does not depend on the previous update of M.
    for (std::size_t k = 0; k < m; ++k) h[k] = 0.0;
    for (const VertexId j : g.neighbors(i)) {
      const double* xj = x + static_cast<std::size_t>(j) * m;
      for (std::size_t k = 0; k < m; ++k) h[k] += xj[k];
    }
    double norm2 = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      h[k] -= mag[k];
      if constexpr (ExcludeSelf) h[k] += xi[k];
      norm2 += h[k] * h[k];
    }
    if (norm2 < kZeroFieldNorm * kZeroFieldNorm) continue;

    const double inv = 1.0 / std::sqrt(norm2);
    double change2 = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double updated = h[k] * inv;
      const double diff = updated - xi[k];
      change2 += diff * diff;
      mag[k] += diff;
      xi[k] = updated;
    }
    worst = std::max(worst, change2);
  }
  return std::sqrt(worst);
}

template <bool ExcludeSelf>
double dispatch_rank(double* x, double* mag, std::size_t m, const Graph& g,
                     std::span<const VertexId> order) {
  switch (m) {
    case 1: return sweep_kernel<1, ExcludeSelf>(x, mag, m, g, order);
    case 2: return sweep_kernel<2, ExcludeSelf>(x, mag, m, g, order);
    case 3: return sweep_kernel<3, ExcludeSelf>(x, mag, m, g, order);
    case 4: return sweep_kernel<4, ExcludeSelf>(x, mag, m, g, order);
    case 8: return sweep_kernel<8, ExcludeSelf>(x, mag, m, g, order);
    case 16: return sweep_kernel<16, ExcludeSelf>(x, mag, m, g, order);
    case 32: return sweep_kernel<32, ExcludeSelf>(x, mag, m, g, order);
    case 64: return sweep_kernel<64, ExcludeSelf>(x, mag, m, g, order);
    default: return sweep_kernel<0, ExcludeSelf>(x, mag, m, g, order);
  }
}

double dispatch_sweep(SpinConfig& config, const Graph& g, std::span<const VertexId> order,
                      FieldRule rule) {
  double* x = config.values().data();
  double* mag = config.magnetization().data();
  const std::size_t m = config.rank();
  return rule == FieldRule::kExcludeSelf ? dispatch_rank<true>(x, mag, m, g, order)
                                         : dispatch_rank<false>(x, mag, m, g, order);
}

void check_dimensions(const SpinConfig& config, const Graph& g) {
  if (config.num_spins() != g.num_vertices()) {
    throw InvalidParameter("spin count " + std::to_string(config.num_spins()) +
                           " != vertex count " + std::to_string(g.num_vertices()));
  }
}

}  // namespace

double bcd_sweep(SpinConfig& config, const Graph& g, Rng& rng, FieldRule rule) {
  check_dimensions(config, g);
  std::vector<VertexId> order(g.num_vertices());
  std::iota(order.begin(), order.end(), VertexId{0});
  std::shuffle(order.begin(), order.end(), rng);
  return dispatch_sweep(config, g, order, rule);
}

SolverResult run_solver(const Graph& g, const SolverOptions& options,
                        const SweepObserver& observer) {
  if (g.num_vertices() == 0) throw InvalidParameter("cannot solve on an empty graph");
  return run_solver(g,
                    init_config(g.num_vertices(), options.rank,
                                derive_seed(options.seed, StreamTag::kSpinInit)),
                    options, observer);
}

SolverResult run_solver(const Graph& g, SpinConfig initial, const SolverOptions& options,
                        const SweepObserver& observer) {
  check_dimensions(initial, g);
  if (!(options.epsilon > 0.0)) throw InvalidParameter("epsilon must be > 0");
  if (options.max_sweeps == 0) throw InvalidParameter("max_sweeps must be >= 1");

  using Clock = std::chrono::steady_clock;
  SolverResult result;
  result.config = std::move(initial);
  SpinConfig& config = result.config;
  Rng order_rng(derive_seed(options.seed, StreamTag::kSweepOrder));
  std::vector<VertexId> order(g.num_vertices());
  std::iota(order.begin(), order.end(), VertexId{0});

  for (std::size_t sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    const auto start = Clock::now();
    std::shuffle(order.begin(), order.end(), order_rng);
    const double delta = dispatch_sweep(config, g, order, options.field_rule);
    if (options.magnetization_refresh != 0 && sweep % options.magnetization_refresh == 0) {
      config.refresh_magnetization();
    }
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();

    SweepStats stats;
    stats.sweep = sweep;
    stats.delta_max = delta;
    stats.magnetization_norm = config.magnetization_norm();
    stats.objective = options.record_objective ? objective(config, g) : std::nan("");
    stats.seconds = seconds;

    result.delta_trace.push_back(delta);
    result.objective_trace.push_back(stats.objective);
    result.magnetization_trace.push_back(stats.magnetization_norm);
    result.sweep_seconds.push_back(seconds);
    result.t_conv = sweep;
    if (observer) observer(stats, config);
    if (delta < options.epsilon) {
      result.converged = true;
      break;
    }
  }
  result.final_magnetization_norm = config.magnetization_norm();
  return result;
}

double objective(const SpinConfig& config, const Graph& g) {
  check_dimensions(config, g);
  const std::size_t m = config.rank();
  const double* x = config.values().data();
  double total = 0.0;
  for (const Edge& e : g.edges()) {
    const double* a = x + static_cast<std::size_t>(e.u) * m;
    const double* b = x + static_cast<std::size_t>(e.v) * m;
    double dot = 0.0;
    for (std::size_t k = 0; k < m; ++k) dot += a[k] * b[k];
    total += dot;
  }
  return total;
}

DenseMatrix component_covariance(const SpinConfig& config) {
  const std::size_t m = config.rank();
  const std::size_t n = config.num_spins();
  DenseMatrix sigma(m);
  if (n == 0) return sigma;
  for (std::size_t i = 0; i < n; ++i) {
    auto x = config.spin(i);
    for (std::size_t j = 0; j < m; ++j) {
      const double xj = x[j];
      for (std::size_t k = j; k < m; ++k) sigma(j, k) += xj * x[k];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = j; k < m; ++k) {
      sigma(j, k) *= inv_n;
      sigma(k, j) = sigma(j, k);
    }
  }
  return sigma;
}

PrincipalComponent principal_component(const DenseMatrix& sigma) {
  const std::size_t m = sigma.dim;
  if (m == 0) throw InvalidParameter("principal component of a 0x0 matrix");
  if (sigma.asymmetry() > 1e-10) throw InvalidParameter("matrix is not symmetric");

  const SymmetricEigen eig = jacobi_eigen(sigma);
  PrincipalComponent pc;
  pc.eigenvalue = eig.values[m - 1];
  pc.gap = m > 1 ? eig.values[m - 1] - eig.values[m - 2]
                 : std::numeric_limits<double>::infinity();
  pc.degenerate = pc.gap < kDegenerateGap;
  pc.direction.resize(m);
  double norm2 = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    pc.direction[r] = eig.vectors(r, m - 1);
    norm2 += pc.direction[r] * pc.direction[r];
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& v : pc.direction) v *= inv;
  for (double v : pc.direction) {
    if (std::abs(v) > 1e-12) {
      if (v < 0.0) {
        for (double& w : pc.direction) w = -w;
      }
      break;
    }
  }
  return pc;
}

std::vector<Label> project_to_labels(const SpinConfig& config, std::span<const double> axis) {
  if (axis.size() != config.rank()) throw InvalidParameter("projection axis has wrong size");
  std::vector<Label> labels(config.num_spins());
  for (std::size_t i = 0; i < config.num_spins(); ++i) {
    auto x = config.spin(i);
    double dot = 0.0;
    for (std::size_t k = 0; k < axis.size(); ++k) dot += x[k] * axis[k];
    labels[i] = dot >= 0.0 ? Label{1} : Label{-1};
  }
  return labels;
}

std::vector<Label> project_to_labels(const SpinConfig& config) {
  const PrincipalComponent pc = principal_component(component_covariance(config));
  return project_to_labels(config, pc.direction);
}

void write_trace_csv(std::ostream& out, const SolverResult& result) {
  out << "sweep,objective,delta_max,mag_norm\n";
  const auto old_precision = out.precision(17);
  for (std::size_t s = 0; s < result.delta_trace.size(); ++s) {
    out << (s + 1) << ',' << result.objective_trace[s] << ',' << result.delta_trace[s] << ','
        << result.magnetization_trace[s] << '\n';
  }
  out.precision(old_precision);
}

}  // namespace sdpcd
