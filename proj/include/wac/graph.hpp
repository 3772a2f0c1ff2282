#pragma once

// Simple directed graphs with 0/1 adjacency: parsing, out-degrees, the
// Laplacian L = D - A, and the structural checks the convergence theorem
// depends on.

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wac/error.hpp"
#include "wac/linalg.hpp"

namespace wac {

using DegreeVector = std::vector<std::size_t>;

// Node set {0, ..., n-1} plus a set of directed edges (i, j), i != j. An edge
// (i, j) makes j an out-neighbor of i: node i listens to node j.
class Digraph {
 public:
  using Edge = std::pair<std::size_t, std::size_t>;

  explicit Digraph(std::size_t n, std::span<const Edge> edges = {}) : adjacency_(n) {
    if (n == 0) throw DomainError("digraph: node count must be at least 1");
    for (const auto& [from, to] : edges) {
      if (from >= n || to >= n) {
        throw DomainError("digraph: edge (" + std::to_string(from) + ", " + std::to_string(to) +
                          ") has an endpoint >= node count " + std::to_string(n));
      }
      if (from == to) throw DomainError("digraph: self-loop at node " + std::to_string(from));
      adjacency_[from].push_back(to);
    }
    for (auto& out : adjacency_) {
      std::sort(out.begin(), out.end());
      if (std::adjacent_find(out.begin(), out.end()) != out.end()) {
        throw DomainError("digraph: duplicate edge");
      }
      edge_count_ += out.size();
    }
  }

  Digraph(std::size_t n, std::initializer_list<Edge> edges)
      : Digraph(n, std::span<const Edge>(edges.begin(), edges.size())) {}

  std::size_t node_count() const noexcept { return adjacency_.size(); }
  std::size_t edge_count() const noexcept { return edge_count_; }

  // Out-neighbors of node i, ascending.
  std::span<const std::size_t> out_neighbors(std::size_t i) const { return adjacency_[i]; }

  bool has_edge(std::size_t from, std::size_t to) const {
    const auto& out = adjacency_[from];
    return std::binary_search(out.begin(), out.end(), to);
  }

  std::vector<Edge> edges() const {
    std::vector<Edge> result;
    result.reserve(edge_count_);
    for (std::size_t i = 0; i < adjacency_.size(); ++i)
      for (std::size_t j : adjacency_[i]) result.emplace_back(i, j);
    return result;
  }

  friend bool operator==(const Digraph&, const Digraph&) = default;

 private:
  std::vector<std::vector<std::size_t>> adjacency_;
  std::size_t edge_count_ = 0;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\f\v");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\f\v");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const auto start = s.find_first_not_of(" \t\r\f\v", pos);
    if (start == std::string_view::npos) break;
    auto end = s.find_first_of(" \t\r\f\v", start);
    if (end == std::string_view::npos) end = s.size();
    tokens.push_back(s.substr(start, end - start));
    pos = end;
  }
  return tokens;
}

inline std::optional<std::size_t> parse_index(std::string_view token) {
  std::size_t value = 0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace detail

// Edge-list text: an optional "nodes <n>" line first, then one "<from> <to>"
// pair per line. '#' lines are comments; blank lines are ignored. Without a
// header n is one more than the largest index seen.
inline Digraph parse_edge_list(std::string_view text) {
  std::optional<std::size_t> declared_n;
  std::vector<Digraph::Edge> edges;
  std::vector<std::size_t> edge_lines;
  bool seen_content = false;
  std::size_t line_no = 0;

  for (std::size_t pos = 0; pos <= text.size();) {
    const auto nl = text.find('\n', pos);
    const auto line = detail::trim(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;

    if (line.empty() || line.front() == '#') continue;
    const auto tokens = detail::split_ws(line);
    if (!seen_content && tokens.size() == 2 && tokens[0] == "nodes") {
      const auto n = detail::parse_index(tokens[1]);
      if (!n || *n == 0) throw ParseError(line_no, "invalid node count '" + std::string(tokens[1]) + "'");
      declared_n = *n;
      seen_content = true;
      continue;
    }
    seen_content = true;
    if (tokens.size() != 2) throw ParseError(line_no, "expected '<from> <to>', got '" + std::string(line) + "'");
    const auto from = detail::parse_index(tokens[0]);
    const auto to = detail::parse_index(tokens[1]);
    if (!from || !to) throw ParseError(line_no, "non-integer node index in '" + std::string(line) + "'");
    if (*from == *to) throw ParseError(line_no, "self-loop at node " + std::to_string(*from));
    if (declared_n && (*from >= *declared_n || *to >= *declared_n)) {
      throw ParseError(line_no, "node index exceeds declared count " + std::to_string(*declared_n));
    }
    edges.emplace_back(*from, *to);
    edge_lines.push_back(line_no);
  }

  std::size_t n = declared_n.value_or(0);
  if (!declared_n) {
    for (const auto& [from, to] : edges) n = std::max({n, from + 1, to + 1});
  }
  if (n == 0) throw ParseError(line_no, "edge list declares no nodes");

  std::vector<std::size_t> order(edges.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return edges[a] != edges[b] ? edges[a] < edges[b] : a < b;
  });
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (edges[order[k]] == edges[order[k - 1]]) {
      throw ParseError(edge_lines[order[k]], "duplicate edge " + std::to_string(edges[order[k]].first) + " " +
                                                 std::to_string(edges[order[k]].second));
    }
  }
  return Digraph(n, edges);
}

inline Digraph read_edge_list(const std::filesystem::path& path) {
  return parse_edge_list(detail::read_file(path));
}

inline DegreeVector out_degrees(const Digraph& g) {
  DegreeVector d(g.node_count());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = g.out_neighbors(i).size();
  return d;
}

// L = D - A. Every entry is a small integer, so the conversion is exact and
// each row sums to exactly zero.
inline DenseMatrix laplacian(const Digraph& g) {
  DenseMatrix l(g.node_count());
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const auto out = g.out_neighbors(i);
    l(i, i) = static_cast<double>(out.size());
    for (std::size_t j : out) l(i, j) = -1.0;
  }
  return l;
}

namespace detail {

template <typename Neighbors>
std::size_t reach_count(std::size_t n, Neighbors&& neighbors) {
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t v : neighbors(u)) {
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count;
}

}  // namespace detail

// Single-SCC test: node 0 reaches everything and everything reaches node 0.
// Linear in n + m.
inline bool is_strongly_connected(const Digraph& g) {
  const std::size_t n = g.node_count();
  if (n == 1) return true;
  if (detail::reach_count(n, [&g](std::size_t u) { return g.out_neighbors(u); }) != n) return false;

  std::vector<std::vector<std::size_t>> reverse(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j : g.out_neighbors(i)) reverse[j].push_back(i);
  return detail::reach_count(n, [&reverse](std::size_t u) -> const std::vector<std::size_t>& {
           return reverse[u];
         }) == n;
}

// True when every edge has its reverse, i.e. A is symmetric.
inline bool is_undirected(const Digraph& g) {
  for (std::size_t i = 0; i < g.node_count(); ++i)
    for (std::size_t j : g.out_neighbors(i))
      if (!g.has_edge(j, i)) return false;
  return true;
}

}  // namespace wac
