#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

#include "bdmpl/graph.hpp"
#include "bdmpl/trace.hpp"

namespace bdmpl {

// Symmetric p x p matrix of edge probabilities with zero diagonal, stored as
// the strict upper triangle in edge_index() order.
class EdgeProbMatrix {
 public:
  EdgeProbMatrix() = default;
  explicit EdgeProbMatrix(std::size_t p);

  std::size_t vertex_count() const { return p_; }
  double operator()(Vertex a, Vertex b) const;
  double at(std::size_t index) const { return upper_.at(index); }
  void set(Edge e, double value);
  const std::vector<double>& upper() const { return upper_; }

  // Sum over the upper triangle: the expected number of edges.
  double total() const;

 private:
  std::size_t p_ = 0;
  std::vector<double> upper_;
};

// Rao-Blackwellized estimate: sum_t I(e in G^(t)) W^(t) / sum_t W^(t).
// Throws std::invalid_argument if nothing remains after burn-in removal.
EdgeProbMatrix edge_inclusion_probs(const ChainTrace& trace, bool skip_burnin = true);

// Edges with probability strictly greater than the threshold.
UndirectedGraph median_graph(const EdgeProbMatrix& probs, double threshold = 0.5);

// Canonical graph key: ascending edge indices.
using GraphKey = std::vector<std::uint32_t>;
GraphKey graph_key(const UndirectedGraph& g);
UndirectedGraph graph_from_key(const GraphKey& key, std::size_t p);

// Posterior probability of each visited graph, proportional to its total
// waiting time. Refuses p > 25 unless allow_large is set.
std::map<GraphKey, double> graph_posterior(const ChainTrace& trace, bool skip_burnin = true,
                                           bool allow_large = false);

struct ConvergencePoint {
  std::size_t iteration = 0;  // 1-based
  double edge_prob_sum = 0.0;
  std::size_t edge_count = 0;
};

// Running sum of edge inclusion probabilities over every iteration prefix,
// together with the edge count of the graph visited at that iteration.
std::vector<ConvergencePoint> convergence_trace(const ChainTrace& trace);

// CSV formats. Edge probabilities: a "#p=" line, then "i,j,prob" rows for the
// upper triangle. Dense: p rows of p values. Convergence:
// "iteration,edge_prob_sum,edge_count".
void write_edge_probs_csv(std::ostream& out, const EdgeProbMatrix& probs);
EdgeProbMatrix read_edge_probs_csv(std::istream& in);
void write_dense_matrix_csv(std::ostream& out, const EdgeProbMatrix& probs);
void write_convergence_csv(std::ostream& out, const std::vector<ConvergencePoint>& points);

}  // namespace bdmpl
