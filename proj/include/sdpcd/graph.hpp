#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "sdpcd/rng.hpp"

namespace sdpcd {

using VertexId = std::uint32_t;
using Label = std::int8_t;

inline constexpr VertexId kNoVertex = std::numeric_limits<VertexId>::max();

/// Unordered vertex pair stored with u < v.
struct Edge {
  VertexId u;
  VertexId v;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Immutable simple undirected graph in CSR form. Neighbor lists are sorted.
class Graph {
 public:
  Graph() = default;

  /// Builds a graph from an arbitrary list of pairs. Pairs are normalized to
  /// u < v and sorted. Throws InvalidParameter on self-loops, duplicates or
  /// out-of-range endpoints.
  static Graph from_edges(std::size_t n_vertices, std::vector<Edge> edges);

  std::size_t num_vertices() const noexcept { return n_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }

  std::span<const Edge> edges() const noexcept { return edges_; }

  std::span<const VertexId> neighbors(VertexId v) const noexcept {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }

  std::size_t degree(VertexId v) const noexcept {
    return offsets_[v + 1] - offsets_[v];
  }

  bool has_edge(VertexId a, VertexId b) const noexcept;

  /// 2|E|/n, zero for the empty graph.
  double mean_degree() const noexcept;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<VertexId> adjacency_;
};

/// Ground-truth ±1 labels. Used only for scoring.
struct PlantedPartition {
  std::vector<Label> labels;
};

struct SbmParams {
  std::size_t n = 0;
  double c_in = 0.0;
  double c_out = 0.0;

  /// (c_in + c_out) / 2
  double mean_degree() const noexcept;
  /// (c_in - c_out) / (2 sqrt(c))
  double snr() const noexcept;
};

/// Inverts the mean-degree and signal-to-noise relations for q equal groups:
/// c_out = c - lambda sqrt(c), c_in = c + (q - 1) lambda sqrt(c).
SbmParams params_from_snr(std::size_t n, double c, double lambda, int q = 2);

struct SbmSample {
  Graph graph;
  PlantedPartition partition;
};

/// Two-group SBM. Vertices [0, n/2) get +1, the rest -1. Intra-group pairs
/// are present with probability c_in/n, inter-group with c_out/n.
SbmSample sbm_generate(const SbmParams& params, Seed seed);

/// Maps every vertex of the original graph onto the 2-core.
class AttachmentForest {
 public:
  AttachmentForest() = default;
  AttachmentForest(std::vector<VertexId> core_vertices,
                   std::vector<VertexId> core_index,
                   std::vector<VertexId> attachment);

  std::size_t num_original() const noexcept { return attachment_.size(); }
  std::size_t num_core() const noexcept { return core_vertices_.size(); }

  bool in_core(VertexId original) const noexcept {
    return core_index_[original] != kNoVertex;
  }

  /// Core-local index of an original vertex, kNoVertex when pruned.
  VertexId core_index(VertexId original) const noexcept {
    return core_index_[original];
  }

  /// Original id of the core vertex that a pruned tree hangs from. A core
  /// vertex is its own attachment. kNoVertex for trees in components that
  /// have no core at all.
  VertexId attachment(VertexId original) const noexcept {
    return attachment_[original];
  }

  /// Original ids of core vertices, indexed by core-local index.
  std::span<const VertexId> core_vertices() const noexcept {
    return core_vertices_;
  }

 private:
  std::vector<VertexId> core_vertices_;
  std::vector<VertexId> core_index_;
  std::vector<VertexId> attachment_;
};

struct TwoCore {
  Graph core;
  AttachmentForest forest;
};

/// Peels degree <= 1 vertices until none remain. The core is re-indexed
/// densely in increasing original-id order.
TwoCore two_core(const Graph& g);

/// Restricts a full-graph labelling to the core vertices of a forest.
std::vector<Label> restrict_to_core(std::span<const Label> labels,
                                    const AttachmentForest& forest);

/// Gives every pruned vertex the label of its attachment vertex. Vertices in
/// coreless components get +1.
std::vector<Label> extend_labels_to_trees(std::span<const Label> core_labels,
                                          const AttachmentForest& forest);

/// Independently for every vertex, with probability p, joins all pairs of
/// its neighbors (neighborhoods taken from the input graph).
Graph add_neighborhood_cliques(const Graph& g, double p, Seed seed);

}  // namespace sdpcd
