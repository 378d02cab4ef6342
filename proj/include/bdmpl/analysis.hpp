#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "bdmpl/graph.hpp"

namespace bdmpl {

std::vector<std::size_t> degree(const UndirectedGraph& g);

// Harmonic closeness: sum over other vertices of 1 / distance, unreachable
// vertices contributing 0.
std::vector<double> closeness(const UndirectedGraph& g, int threads = 1);

// Exact shortest-path betweenness (Brandes), unnormalized, each unordered
// pair counted once.
std::vector<double> betweenness(const UndirectedGraph& g, int threads = 1);

struct PageRankResult {
  std::vector<double> values;
  std::size_t iterations = 0;
  bool converged = false;
};

// Power iteration on the adjacency with every edge as two directed links.
// Isolated vertices spread their mass uniformly. Stops when the max-norm
// change drops below tol or after max_iterations.
PageRankResult pagerank(const UndirectedGraph& g, double damping = 0.85, double tol = 1e-10,
                        std::size_t max_iterations = 10000);

enum class Measure { degree, closeness, betweenness, pagerank };
inline constexpr Measure kMeasures[] = {Measure::degree, Measure::closeness, Measure::betweenness,
                                        Measure::pagerank};
std::string to_string(Measure m);
Measure parse_measure(const std::string& name);

struct CentralityReport {
  std::vector<std::string> labels;
  std::vector<double> degree;
  std::vector<double> closeness;
  std::vector<double> betweenness;
  std::vector<double> pagerank;
  bool pagerank_converged = true;

  std::size_t vertex_count() const { return degree.size(); }
  const std::vector<double>& values(Measure m) const;
};

// Labels default to the vertex index when `labels` is empty.
CentralityReport centrality(const UndirectedGraph& g, std::vector<std::string> labels = {}, int threads = 1);

// Vertices ordered by descending value; equal values keep index order.
std::vector<Vertex> top_k(const CentralityReport& report, Measure measure, std::size_t k);

void write_centrality_csv(std::ostream& out, const CentralityReport& report);
void write_top_k_csv(std::ostream& out, const CentralityReport& report, std::size_t k);

}  // namespace bdmpl
