#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace bdmpl {

using Vertex = int;

// Unordered vertex pair, always stored as (min, max).
struct Edge {
  Vertex i = 0;
  Vertex j = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Canonicalizes (a, b) into an Edge. Throws std::invalid_argument on a == b
// or negative indices.
Edge make_edge(Vertex a, Vertex b);

inline std::size_t pair_count(std::size_t p) { return p * (p - 1) / 2; }

// Row-major index of a canonical edge in the strict upper triangle.
inline std::size_t edge_index(Edge e, std::size_t p) {
  const auto i = static_cast<std::size_t>(e.i);
  const auto j = static_cast<std::size_t>(e.j);
  return i * p - i * (i + 1) / 2 + (j - i - 1);
}

Edge edge_from_index(std::size_t index, std::size_t p);

// Undirected simple graph on vertices 0..p-1.
//
// Membership lives in a dense p*p byte matrix for O(1) lookups, and each
// vertex additionally keeps a sorted neighbor list. Both are updated together.
class UndirectedGraph {
 public:
  UndirectedGraph() = default;
  explicit UndirectedGraph(std::size_t p);
  UndirectedGraph(std::size_t p, std::span<const Edge> edges);

  static UndirectedGraph complete(std::size_t p);

  std::size_t vertex_count() const { return p_; }
  std::size_t edge_count() const { return edge_count_; }

  bool has_edge(Vertex a, Vertex b) const;
  bool has_edge(Edge e) const { return has_edge(e.i, e.j); }

  // Sorted ascending. Throws std::out_of_range for a bad index.
  const std::vector<Vertex>& neighbors(Vertex i) const;
  std::size_t degree(Vertex i) const { return neighbors(i).size(); }

  // Returns true if the edge was added (birth), false if removed (death).
  bool toggle(Edge e);
  void add_edge(Edge e);
  void remove_edge(Edge e);

  // Canonical edges in ascending (i, j) order.
  std::vector<Edge> edges() const;

  friend bool operator==(const UndirectedGraph& a, const UndirectedGraph& b) {
    return a.p_ == b.p_ && a.adjacency_ == b.adjacency_;
  }

 private:
  void check_vertex(Vertex v) const;
  void check_edge(Edge e) const;

  std::size_t p_ = 0;
  std::size_t edge_count_ = 0;
  std::vector<std::uint8_t> adjacency_;
  std::vector<std::vector<Vertex>> neighbors_;
};

// Value-returning wrappers for the birth/death jump G -> G^{+e} / G^{-e}.
UndirectedGraph toggle_edge(const UndirectedGraph& g, Edge e);
UndirectedGraph complement(const UndirectedGraph& g);

// Sparsity prior Pr(G) proportional to (beta / (1 - beta))^|E|.
class GraphPrior {
 public:
  explicit GraphPrior(double beta = 0.5);

  double beta() const { return beta_; }
  // log(beta / (1 - beta))
  double log_odds() const { return log_odds_; }
  // delta * log(beta / (1 - beta)) for delta in {+1, -1}.
  double log_prior_ratio(int delta) const;
  double log_prior(std::size_t edge_count) const {
    return static_cast<double>(edge_count) * log_odds_;
  }

 private:
  double beta_;
  double log_odds_;
};

// Edge-list text format: "p=<count>" header, then one "i j" pair per line.
// Blank lines and lines starting with '#' are ignored.
UndirectedGraph read_edge_list(std::istream& in);
void write_edge_list(std::ostream& out, const UndirectedGraph& g);
UndirectedGraph load_edge_list(const std::string& path);
void save_edge_list(const std::string& path, const UndirectedGraph& g);

}  // namespace bdmpl
