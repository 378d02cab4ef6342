#include "bdmpl/hillclimb.hpp"

#include <algorithm>
#include <stdexcept>

namespace bdmpl {

namespace {

struct SearchOutcome {
  std::vector<Vertex> neighborhood;
  double objective = 0.0;
};

SearchOutcome search_vertex(const LocalScorer& scorer, Vertex i, const HcOptions& options) {
  const std::size_t p = scorer.data().variable_count();
  const double per_neighbor = options.prior ? 0.5 * options.prior->log_odds() : 0.0;
  std::vector<Vertex> nbd;
  std::vector<double> row(p, 0.0);
  double current = scorer.score(i, nbd);

  while (true) {
    scorer.toggle_scores(i, nbd, row);
    const double size_term = per_neighbor * static_cast<double>(nbd.size());
    Vertex best = -1;
    double best_gain = 0.0;
    for (std::size_t k = 0; k < p; ++k) {
      const auto u = static_cast<Vertex>(k);
      if (u == i) continue;
      const bool present = std::binary_search(nbd.begin(), nbd.end(), u);
      const double gain = (row[k] - current) + (present ? -per_neighbor : per_neighbor);
      if (gain > best_gain) {
        best_gain = gain;
        best = u;
      }
    }
    if (best < 0) return SearchOutcome{nbd, current + size_term};
    const auto pos = std::lower_bound(nbd.begin(), nbd.end(), best);
    if (pos != nbd.end() && *pos == best) nbd.erase(pos);
    else nbd.insert(pos, best);
    current = row[static_cast<std::size_t>(best)];
  }
}

}  // namespace

std::vector<Vertex> hc_neighborhood(const CategoricalDataset& data, Vertex i, const HcOptions& options) {
  if (i < 0 || static_cast<std::size_t>(i) >= data.variable_count())
    throw std::invalid_argument("hc_neighborhood: vertex out of range");
  LocalScorer scorer(data, options.hyper);
  return search_vertex(scorer, i, options).neighborhood;
}

UndirectedGraph combine_neighborhoods(const std::vector<std::vector<Vertex>>& neighborhoods, Criterion criterion) {
  const std::size_t p = neighborhoods.size();
  std::vector<std::uint8_t> claims(p * p, 0);
  for (std::size_t i = 0; i < p; ++i)
    for (Vertex j : neighborhoods[i]) {
      if (j < 0 || static_cast<std::size_t>(j) >= p || static_cast<std::size_t>(j) == i)
        throw std::invalid_argument("combine_neighborhoods: invalid neighbor");
      claims[i * p + static_cast<std::size_t>(j)] = 1;
    }
  UndirectedGraph g(p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j) {
      const bool a = claims[i * p + j] != 0;
      const bool b = claims[j * p + i] != 0;
      if (criterion == Criterion::And ? (a && b) : (a || b))
        g.add_edge(Edge{static_cast<Vertex>(i), static_cast<Vertex>(j)});
    }
  return g;
}

HcResult hc_search(const CategoricalDataset& data, const HcOptions& options) {
  const std::size_t p = data.variable_count();
  LocalScorer scorer(data, options.hyper);
  HcResult result;
  result.neighborhoods.assign(p, {});
  result.local_scores.assign(p, 0.0);
  const auto count = static_cast<std::ptrdiff_t>(p);
#pragma omp parallel for num_threads(std::max(1, options.threads)) schedule(dynamic, 1)
  for (std::ptrdiff_t v = 0; v < count; ++v) {
    auto outcome = search_vertex(scorer, static_cast<Vertex>(v), options);
    result.neighborhoods[static_cast<std::size_t>(v)] = std::move(outcome.neighborhood);
    result.local_scores[static_cast<std::size_t>(v)] = outcome.objective;
  }
  result.and_graph = combine_neighborhoods(result.neighborhoods, Criterion::And);
  result.or_graph = combine_neighborhoods(result.neighborhoods, Criterion::Or);
  return result;
}

UndirectedGraph hc_learn(const CategoricalDataset& data, Criterion criterion, const HcOptions& options) {
  return hc_search(data, options).graph(criterion);
}

}  // namespace bdmpl
