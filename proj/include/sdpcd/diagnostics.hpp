#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "sdpcd/graph.hpp"
#include "sdpcd/spin_config.hpp"

namespace sdpcd {

/// |<estimate, planted>| / n, in [0, 1].
double overlap(std::span<const Label> estimate, std::span<const Label> planted);

/// d = (1 - (1/n) sum_i a_i . b_i) / 2, in [0, 1].
double clone_distance(const SpinConfig& a, const SpinConfig& b);

struct AlignedConfig {
  SpinConfig config;
  bool reliable = true;  // false when the top eigenvalue of Sigma is degenerate
};

/// Applies the Householder reflection that maps the principal component v1
/// of Sigma onto +e1. Identity when v1 already equals e1.
AlignedConfig align_rotation(const SpinConfig& config);

enum class AlignmentMode {
  kPrincipalAxis,  // fix v1 per clone, then resolve the sign of axis 1
  kProcrustes,     // best orthogonal map per pair
};

struct PairwiseDistances {
  std::size_t num_clones = 0;
  std::vector<double> distances;  // pairs (a, b), a < b, in lexicographic order
  std::vector<bool> flagged;      // either clone had a degenerate alignment
};

/// Raw distances: no alignment at all.
PairwiseDistances raw_pairwise_distances(std::span<const SpinConfig> clones);

/// Distances after breaking the rotational symmetry. In principal-axis mode a
/// pair with d > 1/2 has the first coordinate of the second clone flipped
/// before the distance is recorded.
PairwiseDistances aligned_pairwise_distances(std::span<const SpinConfig> clones,
                                             AlignmentMode mode = AlignmentMode::kPrincipalAxis);

/// min over orthogonal R of d(a, R b) = (1 - ||sum_i a_i b_i^T||_* / n) / 2.
double procrustes_distance(const SpinConfig& a, const SpinConfig& b);

struct DistanceHistogram {
  std::vector<double> edges;  // bins + 1 values
  std::vector<std::size_t> counts;
  std::size_t total = 0;
  bool aligned = false;
};

/// Uniform bins on [lo, hi]; values outside are clamped into the end bins.
DistanceHistogram make_histogram(std::span<const double> values, bool aligned,
                                 std::size_t bins = 50, double lo = 0.0, double hi = 1.0);

/// CSV `bin_lo,bin_hi,count,aligned`.
void write_histogram_csv(std::ostream& out, const DistanceHistogram& hist, bool header = true);

/// Linear-interpolated quantile, q in [0, 1].
double quantile(std::vector<double> values, double q);

}  // namespace sdpcd
