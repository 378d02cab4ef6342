#pragma once

#include <optional>
#include <vector>

#include "bdmpl/data.hpp"
#include "bdmpl/graph.hpp"
#include "bdmpl/score.hpp"

namespace bdmpl {

// Hill-climbing baseline for the MPL posterior: each vertex's neighborhood is
// grown and pruned greedily on its own, and the per-vertex answers are then
// combined into one undirected graph.

enum class Criterion { And, Or };

struct HcOptions {
  DirichletHyper hyper{0.5};
  // When set, each neighbor contributes log(beta / (1 - beta)) / 2 to the
  // vertex objective, the per-vertex share of the graph prior.
  std::optional<GraphPrior> prior = GraphPrior(0.5);
  int threads = 1;
};

struct HcResult {
  std::vector<std::vector<Vertex>> neighborhoods;
  UndirectedGraph and_graph;
  UndirectedGraph or_graph;
  std::vector<double> local_scores;  // objective of each final neighborhood

  const UndirectedGraph& graph(Criterion c) const { return c == Criterion::And ? and_graph : or_graph; }
};

// Greedy search from the empty neighborhood. Every round evaluates all
// single additions and removals and applies the one with the largest strict
// improvement; equal improvements go to the smallest candidate index.
std::vector<Vertex> hc_neighborhood(const CategoricalDataset& data, Vertex i, const HcOptions& options = {});

// Edge (i, j) present iff j in nbd(i) and i in nbd(j) (And) or either (Or).
UndirectedGraph combine_neighborhoods(const std::vector<std::vector<Vertex>>& neighborhoods, Criterion criterion);

HcResult hc_search(const CategoricalDataset& data, const HcOptions& options = {});
UndirectedGraph hc_learn(const CategoricalDataset& data, Criterion criterion, const HcOptions& options = {});

}  // namespace bdmpl
