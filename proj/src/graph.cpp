#include "sdpcd/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "sdpcd/errors.hpp"

namespace sdpcd {

Graph Graph::from_edges(std::size_t n_vertices, std::vector<Edge> edges) {
  if (n_vertices >= kNoVertex) {
    throw InvalidParameter("vertex count exceeds the 32-bit id range");
  }
  for (Edge& e : edges) {
    if (e.u == e.v) {
      throw InvalidParameter("self-loop at vertex " + std::to_string(e.u));
    }
    if (e.u >= n_vertices || e.v >= n_vertices) {
      throw InvalidParameter("edge (" + std::to_string(e.u) + ", " +
                             std::to_string(e.v) + ") out of range for n=" +
                             std::to_string(n_vertices));
    }
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges.begin(), edges.end());
  auto dup = std::adjacent_find(edges.begin(), edges.end());
  if (dup != edges.end()) {
    throw InvalidParameter("duplicate edge (" + std::to_string(dup->u) + ", " +
                           std::to_string(dup->v) + ")");
  }

  Graph g;
  g.n_ = n_vertices;
  g.offsets_.assign(n_vertices + 1, 0);
  for (const Edge& e : edges) {
    ++g.offsets_[e.u + 1];
    ++g.offsets_[e.v + 1];
  }
  for (std::size_t i = 0; i < n_vertices; ++i) g.offsets_[i + 1] += g.offsets_[i];
  g.adjacency_.resize(2 * edges.size());
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  // Sorted edge order fills every neighbor list in increasing order.
  for (const Edge& e : edges) {
    g.adjacency_[cursor[e.u]++] = e.v;
    g.adjacency_[cursor[e.v]++] = e.u;
  }
  g.edges_ = std::move(edges);
  return g;
}

bool Graph::has_edge(VertexId a, VertexId b) const noexcept {
  if (a >= n_ || b >= n_) return false;
  if (degree(a) > degree(b)) std::swap(a, b);
  auto nbrs = neighbors(a);
  return std::binary_search(nbrs.begin(), nbrs.end(), b);
}

double Graph::mean_degree() const noexcept {
  if (n_ == 0) return 0.0;
  return 2.0 * static_cast<double>(edges_.size()) / static_cast<double>(n_);
}

double SbmParams::mean_degree() const noexcept { return 0.5 * (c_in + c_out); }

double SbmParams::snr() const noexcept {
  const double c = mean_degree();
  if (c <= 0.0) return 0.0;
  return (c_in - c_out) / (2.0 * std::sqrt(c));
}

SbmParams params_from_snr(std::size_t n, double c, double lambda, int q) {
  if (!(c > 0.0)) throw InvalidParameter("mean degree c must be > 0");
  if (q < 2) throw InvalidParameter("group count q must be >= 2");
  const double shift = lambda * std::sqrt(c);
  SbmParams p;
  p.n = n;
  p.c_out = c - shift;
  p.c_in = c + static_cast<double>(q - 1) * shift;
  // lambda = sqrt(c) exactly can round to a tiny negative c_out.
  if (p.c_out < 0.0 && p.c_out > -1e-12 * c) p.c_out = 0.0;
  if (p.c_out < 0.0) {
    throw InvalidParameter("c_out = c - lambda*sqrt(c) is negative; need lambda <= sqrt(c) = " +
                           std::to_string(std::sqrt(c)));
  }
  if (p.c_in < 0.0) {
    throw InvalidParameter("c_in = c + (q-1)*lambda*sqrt(c) is negative; need lambda >= " +
                           std::to_string(-std::sqrt(c) / (q - 1)));
  }
  return p;
}

namespace {

// Geometric skipping over a sequence of `total` Bernoulli(p) trials: calls
// emit(k) for every successful trial index k.
template <class Emit>
void sample_bernoulli_indices(std::uint64_t total, double p, Rng& rng, Emit emit) {
  if (total == 0 || p <= 0.0) return;
  if (p >= 1.0) {
    for (std::uint64_t k = 0; k < total; ++k) emit(k);
    return;
  }
  std::geometric_distribution<std::uint64_t> skip(p);
  std::uint64_t k = 0;
  while (true) {
    const std::uint64_t s = skip(rng);
    if (s >= total - k) return;
    k += s;
    emit(k);
    if (++k >= total) return;
  }
}

}  // namespace

SbmSample sbm_generate(const SbmParams& params, Seed seed) {
  const std::size_t n = params.n;
  if (n == 0 || n % 2 != 0) throw InvalidParameter("n must be even and positive");
  const double nd = static_cast<double>(n);
  const double p_in = params.c_in / nd;
  const double p_out = params.c_out / nd;
  if (!(p_in >= 0.0 && p_in <= 1.0)) {
    throw InvalidParameter("c_in/n = " + std::to_string(p_in) + " is not a probability");
  }
  if (!(p_out >= 0.0 && p_out <= 1.0)) {
    throw InvalidParameter("c_out/n = " + std::to_string(p_out) + " is not a probability");
  }

  const std::uint64_t half = n / 2;
  SbmSample out;
  out.partition.labels.assign(n, Label{-1});
  std::fill_n(out.partition.labels.begin(), half, Label{1});

  Rng rng(seed);
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(0.5 * nd * params.mean_degree() * 1.1) + 16);

  // Intra-group pairs, enumerated as (v, w) with w < v in row-major order of
  // the strict lower triangle.
  for (std::uint64_t base : {std::uint64_t{0}, half}) {
    std::uint64_t row = 1, row_start = 0;
    sample_bernoulli_indices(half * (half - 1) / 2, p_in, rng, [&](std::uint64_t k) {
      while (k >= row_start + row) {
        row_start += row;
        ++row;
      }
      edges.push_back({static_cast<VertexId>(base + (k - row_start)),
                       static_cast<VertexId>(base + row)});
    });
  }
  sample_bernoulli_indices(half * half, p_out, rng, [&](std::uint64_t k) {
    edges.push_back({static_cast<VertexId>(k / half),
                     static_cast<VertexId>(half + k % half)});
  });

  out.graph = Graph::from_edges(n, std::move(edges));
  return out;
}

AttachmentForest::AttachmentForest(std::vector<VertexId> core_vertices,
                                   std::vector<VertexId> core_index,
                                   std::vector<VertexId> attachment)
    : core_vertices_(std::move(core_vertices)),
      core_index_(std::move(core_index)),
      attachment_(std::move(attachment)) {
  if (core_index_.size() != attachment_.size()) {
    throw ConsistencyError("attachment forest: index and attachment sizes differ");
  }
}

TwoCore two_core(const Graph& g) {
  const std::size_t n = g.num_vertices();
  std::vector<std::size_t> degree(n);
  std::vector<char> removed(n, 0);
  std::vector<VertexId> parent(n, kNoVertex);
  std::vector<VertexId> removal_order;
  std::deque<VertexId> queue;

  for (VertexId v = 0; v < n; ++v) {
    degree[v] = g.degree(v);
    if (degree[v] <= 1) queue.push_back(v);
  }
  while (!queue.empty()) {
    const VertexId v = queue.front();
    queue.pop_front();
    if (removed[v]) continue;
    removed[v] = 1;
    removal_order.push_back(v);
    for (VertexId u : g.neighbors(v)) {
      if (removed[u]) continue;
      parent[v] = u;  // at most one surviving neighbor
      if (--degree[u] == 1) queue.push_back(u);
    }
  }

  std::vector<VertexId> core_vertices;
  std::vector<VertexId> core_index(n, kNoVertex);
  std::vector<VertexId> attachment(n, kNoVertex);
  for (VertexId v = 0; v < n; ++v) {
    if (!removed[v]) {
      core_index[v] = static_cast<VertexId>(core_vertices.size());
      core_vertices.push_back(v);
      attachment[v] = v;
    }
  }
  // A parent is removed after its children, so reverse order resolves each
  // parent before the vertices hanging from it.
  for (auto it = removal_order.rbegin(); it != removal_order.rend(); ++it) {
    const VertexId p = parent[*it];
    if (p != kNoVertex) attachment[*it] = attachment[p];
  }

  std::vector<Edge> core_edges;
  for (const Edge& e : g.edges()) {
    if (!removed[e.u] && !removed[e.v]) {
      core_edges.push_back({core_index[e.u], core_index[e.v]});
    }
  }

  TwoCore out;
  out.core = Graph::from_edges(core_vertices.size(), std::move(core_edges));
  out.forest = AttachmentForest(std::move(core_vertices), std::move(core_index),
                                std::move(attachment));
  return out;
}

std::vector<Label> restrict_to_core(std::span<const Label> labels,
                                    const AttachmentForest& forest) {
  if (labels.size() != forest.num_original()) {
    throw InvalidParameter("label vector does not match the original vertex count");
  }
  std::vector<Label> out;
  out.reserve(forest.num_core());
  for (VertexId v : forest.core_vertices()) out.push_back(labels[v]);
  return out;
}

std::vector<Label> extend_labels_to_trees(std::span<const Label> core_labels,
                                          const AttachmentForest& forest) {
  if (core_labels.size() != forest.num_core()) {
    throw InvalidParameter("core label count " + std::to_string(core_labels.size()) +
                           " != core size " + std::to_string(forest.num_core()));
  }
  std::vector<Label> out(forest.num_original(), Label{1});
  for (VertexId v = 0; v < forest.num_original(); ++v) {
    const VertexId a = forest.attachment(v);
    if (a == kNoVertex) continue;
    if (a >= forest.num_original() || !forest.in_core(a)) {
      throw ConsistencyError("vertex " + std::to_string(v) +
                             " attaches to non-core vertex " + std::to_string(a));
    }
    out[v] = core_labels[forest.core_index(a)];
  }
  return out;
}

Graph add_neighborhood_cliques(const Graph& g, double p, Seed seed) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidParameter("clique probability p must lie in [0, 1]");
  }
  Rng rng(seed);
  std::bernoulli_distribution pick(p);
  std::vector<Edge> added;
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    if (!pick(rng)) continue;
    auto nbrs = g.neighbors(v);
    for (std::size_t a = 0; a < nbrs.size(); ++a) {
      for (std::size_t b = a + 1; b < nbrs.size(); ++b) {
        if (!g.has_edge(nbrs[a], nbrs[b])) added.push_back({nbrs[a], nbrs[b]});
      }
    }
  }
  if (added.empty()) return g;
  std::sort(added.begin(), added.end());
  added.erase(std::unique(added.begin(), added.end()), added.end());
  std::vector<Edge> edges(g.edges().begin(), g.edges().end());
  edges.insert(edges.end(), added.begin(), added.end());
  return Graph::from_edges(g.num_vertices(), std::move(edges));
}

}  // namespace sdpcd
