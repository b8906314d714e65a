#include "sdpcd/edge_list_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_set>

#include "sdpcd/errors.hpp"

namespace sdpcd {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
bool parse_number(std::string_view s, T& value) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

// Splits on runs of blanks; returns false if the count differs from `want`.
bool split_fields(std::string_view line, std::string_view* fields, std::size_t want) {
  std::size_t count = 0;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    if (pos >= line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
    if (count == want) return false;
    fields[count++] = line.substr(pos, end - pos);
    pos = end;
  }
  return count == want;
}

}  // namespace

void write_edge_list(std::ostream& out, const Graph& g, const PlantedPartition* partition) {
  out << "# n=" << g.num_vertices() << " m=" << g.num_edges() << '\n';
  if (partition != nullptr) {
    if (partition->labels.size() != g.num_vertices()) {
      throw InvalidParameter("partition size does not match the graph");
    }
    out << "# labels\n";
    for (Label l : partition->labels) out << (l > 0 ? "+1\n" : "-1\n");
  }
  for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

EdgeListFile read_edge_list(std::istream& in) {
  std::string raw;
  std::size_t line_no = 0;

  auto next_line = [&](std::string_view& line) {
    while (std::getline(in, raw)) {
      ++line_no;
      line = trim(raw);
      if (!line.empty()) return true;
    }
    return false;
  };

  std::string_view line;
  if (!next_line(line)) throw ParseError(line_no + 1, "missing '# n=<N> m=<M>' header");
  std::size_t n = 0, m = 0;
  {
    std::string_view f[3];
    if (!split_fields(line, f, 3) || f[0] != "#" || !f[1].starts_with("n=") ||
        !f[2].starts_with("m=") || !parse_number(f[1].substr(2), n) ||
        !parse_number(f[2].substr(2), m)) {
      throw ParseError(line_no, "expected header '# n=<N> m=<M>'");
    }
  }
  if (n >= kNoVertex) throw ParseError(line_no, "vertex count too large");

  EdgeListFile out;
  bool have_line = next_line(line);
  if (have_line && line.starts_with("#")) {
    std::string_view f[2];
    if (!split_fields(line, f, 2) || f[0] != "#" || f[1] != "labels") {
      throw ParseError(line_no, "expected '# labels' or an edge");
    }
    PlantedPartition partition;
    partition.labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!next_line(line)) throw ParseError(line_no + 1, "truncated label block");
      int value = 0;
      if (!parse_number(line, value) || (value != 1 && value != -1)) {
        throw ParseError(line_no, "label must be +1 or -1");
      }
      partition.labels.push_back(static_cast<Label>(value));
    }
    out.partition = std::move(partition);
    have_line = next_line(line);
  }

  std::vector<Edge> edges;
  edges.reserve(m);
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(m * 2);
  for (; have_line; have_line = next_line(line)) {
    std::string_view f[2];
    std::uint64_t i = 0, j = 0;
    if (!split_fields(line, f, 2) || !parse_number(f[0], i) || !parse_number(f[1], j)) {
      throw ParseError(line_no, "expected 'i j' with non-negative integers");
    }
    if (i >= n || j >= n) throw ParseError(line_no, "vertex index out of range [0, n)");
    if (i == j) throw ParseError(line_no, "self-loop at vertex " + std::to_string(i));
    if (i > j) throw ParseError(line_no, "edge endpoints must satisfy i < j");
    if (!seen.insert(i * n + j).second) {
      throw ParseError(line_no, "duplicate edge " + std::to_string(i) + " " + std::to_string(j));
    }
    edges.push_back({static_cast<VertexId>(i), static_cast<VertexId>(j)});
  }
  if (edges.size() != m) {
    throw ParseError(line_no, "header declares m=" + std::to_string(m) + " but found " +
                                  std::to_string(edges.size()) + " edges");
  }
  out.graph = Graph::from_edges(n, std::move(edges));
  return out;
}

void save_edge_list(const std::filesystem::path& path, const Graph& g,
                    const PlantedPartition* partition) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_edge_list(out, g, partition);
  if (!out) throw IoError("write failed for " + path.string());
}

EdgeListFile load_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_edge_list(in);
}

}  // namespace sdpcd
