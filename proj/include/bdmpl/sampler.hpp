#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "bdmpl/data.hpp"
#include "bdmpl/graph.hpp"
#include "bdmpl/rng.hpp"
#include "bdmpl/score.hpp"
#include "bdmpl/trace.hpp"

namespace bdmpl {

// Birth/death rates for every unordered pair, indexed by edge_index().
// Rates are kept on the log scale (log R_e <= 0) so that very unfavourable
// moves on large tables do not underflow; rate() exponentiates.
struct RateVector {
  std::size_t p = 0;
  std::vector<double> log_rates;
  std::vector<std::uint8_t> present;  // 1: edge in graph (death rate), 0: birth rate

  std::size_t size() const { return log_rates.size(); }
  double rate(std::size_t index) const;
  bool is_birth(std::size_t index) const { return present[index] == 0; }

  friend bool operator==(const RateVector&, const RateVector&) = default;
};

// log R_e = min(delta_i + delta_j + prior_term, 0) where delta_v is the change
// of vertex v's local score under the move. Every rate computation in the
// library goes through this function.
inline double combine_log_rate(double star_i, double current_i, double star_j, double current_j,
                               double prior_term) {
  const double log_ratio = (star_i - current_i) + (star_j - current_j) + prior_term;
  return log_ratio < 0.0 ? log_ratio : 0.0;
}

// Rate of toggling e in g, evaluated from scratch with local_log_score. Only
// the local scores of the two endpoints are computed.
double edge_log_rate(const CategoricalDataset& data, const UndirectedGraph& g, Edge e, const DirichletHyper& hyper,
                     const GraphPrior& prior);
double edge_rate(const CategoricalDataset& data, const UndirectedGraph& g, Edge e, const DirichletHyper& hyper,
                 const GraphPrior& prior);

RateVector full_rates(const CategoricalDataset& data, const UndirectedGraph& g, const DirichletHyper& hyper,
                      const GraphPrior& prior, int threads = 1);

// Rates of g_new given the rates of g_new with `toggled` flipped. Recomputes
// the 2p-3 pairs incident to an endpoint of `toggled` and copies the rest.
// Throws std::invalid_argument if prev does not describe that graph.
RateVector incremental_rates(const RateVector& prev, Edge toggled, const CategoricalDataset& data,
                             const UndirectedGraph& g_new, const DirichletHyper& hyper, const GraphPrior& prior);

struct RateCounters {
  std::uint64_t rate_evaluations = 0;
  std::uint64_t score_lookups = 0;  // two per rate evaluation
};

// Keeps a graph together with its rate vector and updates both as edges flip.
//
// For each vertex v it stores the current local score and the scores of
// every neighborhood one toggle away (row v of a p x p matrix). Toggling
// (i, j) refreshes rows i and j, then the rates of the pairs touching i or j.
// Rows are independent and are evaluated in parallel.
class RateEngine {
 public:
  RateEngine(const LocalScorer& scorer, GraphPrior prior, UndirectedGraph initial, int threads = 1);

  const UndirectedGraph& graph() const { return graph_; }
  const RateVector& rates() const { return rates_; }
  const GraphPrior& prior() const { return prior_; }
  const LocalScorer& scorer() const { return *scorer_; }
  std::size_t vertex_count() const { return p_; }

  void recompute_all();
  // Flips every edge, then refreshes rows and rates around their endpoints.
  void toggle(std::span<const Edge> edges);
  void toggle(Edge e) { toggle(std::span<const Edge>(&e, 1)); }

  // Current log posterior up to a constant: sum of local scores plus prior.
  double log_posterior() const;

  const RateCounters& counters() const { return counters_; }
  void reset_counters() { counters_ = {}; }

 private:
  void refresh_rows(std::span<const Vertex> vertices);
  void refresh_rate(std::size_t index, Edge e);

  const LocalScorer* scorer_;
  GraphPrior prior_;
  UndirectedGraph graph_;
  std::size_t p_;
  int threads_;
  std::vector<double> current_;  // local score per vertex
  std::vector<double> toggled_;  // p x p; [v * p + u] = score(v, nbd(v) xor {u})
  RateVector rates_;
  RateCounters counters_;
};

// Jump selection for one birth-death iteration: the waiting time
// W = 1 / sum_e R_e and the edge chosen with probability R_e / sum_e R_e for
// u uniform on [0, 1). Sums run in edge-index order.
struct Jump {
  std::size_t index = 0;
  double waiting_time = 0.0;
};
Jump choose_jump(const RateVector& rates, double u);
double waiting_time(const RateVector& rates);

// Indices of the n0 largest rates, ties broken by a uniform draw from `rng`.
std::vector<std::size_t> top_rated(const RateVector& rates, std::size_t n0, RandomStream& rng);

struct SamplerConfig {
  std::size_t iterations = 1000;
  std::size_t burnin = 0;
  GraphPrior prior{0.5};
  DirichletHyper hyper{0.5};
  std::uint64_t seed = 1;
  std::size_t multi_edges = 0;  // N0; 0 selects single-edge updates
  int threads = 1;
  std::optional<UndirectedGraph> initial;  // empty graph when unset
  std::size_t cache_capacity = std::size_t{1} << 20;

  void validate(std::size_t p) const;
};

struct StepResult {
  double waiting_time = 0.0;
  std::vector<EdgeDelta> deltas;
};

// The birth-death chain. Iteration m draws from substream m of the root
// seed's "sample" stream (and "tie-break" stream in multiple-edge mode), so a
// run is reproducible independent of thread count.
class BirthDeathSampler {
 public:
  BirthDeathSampler(const CategoricalDataset& data, const SamplerConfig& config);

  const RateEngine& engine() const { return engine_; }
  const UndirectedGraph& graph() const { return engine_.graph(); }
  std::size_t iteration() const { return iteration_; }

  StepResult step();
  StepResult multi_step(std::size_t n0);

 private:
  SamplerConfig config_;
  LocalScorer scorer_;
  RateEngine engine_;
  RandomStream sample_stream_;
  RandomStream tie_stream_;
  std::size_t iteration_ = 0;
};

using ProgressCallback = std::function<void(std::size_t iteration, const RateEngine& engine)>;

ChainTrace run(const CategoricalDataset& data, const SamplerConfig& config, const ProgressCallback& progress = {});

}  // namespace bdmpl
