#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "sdpcd/graph.hpp"

namespace sdpcd {

// Plain-text edge list:
//
//   # n=<N> m=<M>
//   # labels            (optional, followed by N lines of +1 / -1)
//   i j                 (M lines, 0-indexed, i < j)

struct EdgeListFile {
  Graph graph;
  std::optional<PlantedPartition> partition;
};

void write_edge_list(std::ostream& out, const Graph& g,
                     const PlantedPartition* partition = nullptr);
EdgeListFile read_edge_list(std::istream& in);

/// Throws IoError when the file cannot be opened or written.
void save_edge_list(const std::filesystem::path& path, const Graph& g,
                    const PlantedPartition* partition = nullptr);
/// Throws IoError on open failure and ParseError on malformed content.
EdgeListFile load_edge_list(const std::filesystem::path& path);

}  // namespace sdpcd
