#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "sdpcd/graph.hpp"
#include "sdpcd/rng.hpp"

namespace sdpcd {

/// Matrix-free Bethe Hessian H(r) = (r^2 - 1) I - r A + D over a borrowed graph.
class BetheHessianOperator {
 public:
  BetheHessianOperator(const Graph& g, double r) : graph_(&g), r_(r) {}

  std::size_t dim() const noexcept { return graph_->num_vertices(); }
  double r() const noexcept { return r_; }
  const Graph& graph() const noexcept { return *graph_; }

  /// out = H(r) v, O(n + |E|).
  void apply(std::span<const double> v, std::span<double> out) const;

 private:
  const Graph* graph_;
  double r_;
};

std::vector<double> bh_matvec(const BetheHessianOperator& op, std::span<const double> v);

/// k eigenpairs in ascending eigenvalue order. vectors[j] has unit norm.
struct EigenPairs {
  std::vector<double> values;
  std::vector<std::vector<double>> vectors;
  std::vector<double> residuals;  // ||H v - lambda v||
  bool converged = false;
  std::size_t iterations = 0;     // operator applications
};

struct LanczosOptions {
  std::size_t count = 2;
  double tolerance = 1e-8;
  std::size_t max_iterations = 5000;
  /// Krylov basis size before an explicit restart.
  std::size_t max_basis = 400;
  Seed seed = 0x5eed;
};

using LinearOperator = std::function<void(std::span<const double>, std::span<double>)>;

/// Algebraically smallest eigenpairs of a symmetric operator by Lanczos with
/// full reorthogonalization. Bases that span the whole space (small n) give
/// the exact spectrum including multiplicities.
EigenPairs smallest_eigenpairs(const LinearOperator& apply, std::size_t dim,
                               const LanczosOptions& options);
EigenPairs smallest_eigenpairs(const BetheHessianOperator& op, const LanczosOptions& options);

/// sum v_i^4 / (sum v_i^2)^2; 1/n for a flat vector, 1 for a single site.
double inverse_participation_ratio(std::span<const double> v);

struct SpectralEstimate {
  std::vector<Label> labels;
  double r = 0.0;
  double first_eigenvalue = 0.0;
  double second_eigenvalue = 0.0;
  double localization = 0.0;  // IPR of the second eigenvector
  bool detected = false;      // second eigenvalue < 0
  bool converged = false;
  std::vector<double> eigenvector;
};

/// Labels from the signs of the eigenvector of the second smallest
/// eigenvalue of H(sqrt(mean degree)).
SpectralEstimate bethe_hessian_estimate(const Graph& g, const LanczosOptions& options = {});

}  // namespace sdpcd
