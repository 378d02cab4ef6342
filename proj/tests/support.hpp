#pragma once

// Shared fixtures for the test binaries.

#include <cmath>
#include <cstdint>
#include <vector>

#include "bdmpl/data.hpp"
#include "bdmpl/graph.hpp"
#include "bdmpl/rng.hpp"
#include "bdmpl/simbench.hpp"

namespace bdmpl::testing {

// n rows of independent categorical noise.
inline CategoricalDataset noise_data(std::size_t p, std::size_t n, int levels, RandomStream& rng) {
  std::vector<std::vector<int>> rows(n, std::vector<int>(p));
  for (auto& row : rows)
    for (auto& x : row) x = static_cast<int>(rng.below(static_cast<std::uint64_t>(levels)));
  return from_rows(rows, std::vector<int>(p, levels));
}

// Binary data from a random MRF so that scores carry real structure.
inline CategoricalDataset mrf_data(std::size_t p, std::size_t n, double beta, std::uint64_t seed) {
  GraphSpec spec{GraphKind::random, p, beta, 1, 1};
  const UndirectedGraph g = gen_graph(spec, seed);
  const MrfModel model = random_mrf(g, 0.5, 1.0, seed + 1);
  return gen_data(model, n, seed + 2, GibbsOptions{200, 2});
}

inline UndirectedGraph random_graph(std::size_t p, double density, RandomStream& rng) {
  UndirectedGraph g(p);
  for (std::size_t idx = 0; idx < pair_count(p); ++idx)
    if (rng.bernoulli(density)) g.add_edge(edge_from_index(idx, p));
  return g;
}

inline UndirectedGraph path_graph(std::size_t p) {
  UndirectedGraph g(p);
  for (std::size_t v = 0; v + 1 < p; ++v) g.add_edge(Edge{static_cast<Vertex>(v), static_cast<Vertex>(v + 1)});
  return g;
}

inline UndirectedGraph star_graph(std::size_t p) {
  UndirectedGraph g(p);
  for (std::size_t v = 1; v < p; ++v) g.add_edge(Edge{0, static_cast<Vertex>(v)});
  return g;
}

// Relabels vertices: vertex v becomes perm[v].
inline UndirectedGraph relabel(const UndirectedGraph& g, const std::vector<Vertex>& perm) {
  UndirectedGraph out(g.vertex_count());
  for (const Edge& e : g.edges()) out.add_edge(make_edge(perm[e.i], perm[e.j]));
  return out;
}

inline CategoricalDataset relabel(const CategoricalDataset& data, const std::vector<Vertex>& perm) {
  const std::size_t p = data.variable_count();
  std::vector<int> card(p);
  for (std::size_t v = 0; v < p; ++v) card[static_cast<std::size_t>(perm[v])] = data.cardinality(static_cast<Vertex>(v));
  std::vector<Cell> cells;
  for (std::size_t c = 0; c < data.cell_count(); ++c) {
    const auto levels = data.cell_levels(c);
    std::vector<Level> moved(p);
    for (std::size_t v = 0; v < p; ++v) moved[static_cast<std::size_t>(perm[v])] = levels[v];
    cells.push_back(Cell{moved, data.counts()[c]});
  }
  return CategoricalDataset(card, cells);
}

inline std::vector<Vertex> random_permutation(std::size_t p, RandomStream& rng) {
  std::vector<Vertex> perm(p);
  for (std::size_t v = 0; v < p; ++v) perm[v] = static_cast<Vertex>(v);
  for (std::size_t k = p; k > 1; --k) std::swap(perm[k - 1], perm[rng.below(k)]);
  return perm;
}

}  // namespace bdmpl::testing
