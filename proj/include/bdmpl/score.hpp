#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "bdmpl/data.hpp"
#include "bdmpl/graph.hpp"

namespace bdmpl {

// Symmetric Dirichlet pseudo-count alpha applied to every alpha_{i,kl}; the
// per-configuration total is alpha_{i,+l} = r_i * alpha.
struct DirichletHyper {
  double alpha = 0.5;

  explicit DirichletHyper(double a = 0.5);
  double alpha_plus(int cardinality) const { return alpha * static_cast<double>(cardinality); }
};

// log Pr(x_i | x_nbd): the Dirichlet-marginalized conditional likelihood of
// variable i given the configurations of nbd, summed over observed
// configurations only. Evaluated directly with log-Gamma.
double local_log_score(const CategoricalDataset& data, Vertex i, std::span<const Vertex> nbd,
                       const DirichletHyper& hyper);
double local_log_score(const ConditionalCounts& counts, const DirichletHyper& hyper);

// Log marginal pseudo-likelihood of a graph: sum of local scores.
double mpl_log(const CategoricalDataset& data, const UndirectedGraph& g, const DirichletHyper& hyper);

// Unnormalized log posterior: mpl_log + |E| log(beta / (1 - beta)).
double log_posterior_mpl(const CategoricalDataset& data, const UndirectedGraph& g, const DirichletHyper& hyper,
                         const GraphPrior& prior);

// Thread-safe LRU memo of local scores keyed by (vertex, sorted neighborhood).
// Capacity 0 disables storage. Inserting an existing key keeps the stored
// value, which is identical to the new one since scores are deterministic.
class LocalScoreCache {
 public:
  explicit LocalScoreCache(std::size_t capacity = std::size_t{1} << 20);
  ~LocalScoreCache();

  LocalScoreCache(const LocalScoreCache&) = delete;
  LocalScoreCache& operator=(const LocalScoreCache&) = delete;

  std::optional<double> find(Vertex i, std::span<const Vertex> nbd) const;
  void insert(Vertex i, std::span<const Vertex> nbd, double value);
  void clear();

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const;
  std::uint64_t hits() const { return hits_.load(std::memory_order_relaxed); }
  std::uint64_t misses() const { return misses_.load(std::memory_order_relaxed); }

 private:
  struct Shard;
  static constexpr std::size_t kShards = 16;

  std::size_t capacity_;
  std::vector<std::unique_ptr<Shard>> shards_;
  mutable std::atomic<std::uint64_t> hits_{0};
  mutable std::atomic<std::uint64_t> misses_{0};
};

// Local-score evaluator bound to one dataset.
//
// Log-Gamma values lgamma(alpha + n) and lgamma(r * alpha + n) are tabulated
// once for n = 0..sample_count, so every score is a sum of table lookups. The
// tabulated values are produced by the same call used in local_log_score, so
// both routes agree bit-for-bit.
class LocalScorer {
 public:
  LocalScorer(const CategoricalDataset& data, DirichletHyper hyper,
              std::size_t cache_capacity = std::size_t{1} << 20);

  const CategoricalDataset& data() const { return *data_; }
  const DirichletHyper& hyper() const { return hyper_; }
  const LocalScoreCache& cache() const { return cache_; }

  // `nbd` must be sorted ascending and must not contain i.
  double score(Vertex i, std::span<const Vertex> nbd) const;

  // For every u != i writes out[u] = score(i, nbd with u toggled in or out).
  // out[i] is left untouched. `nbd` sorted, out.size() == p.
  void toggle_scores(Vertex i, std::span<const Vertex> nbd, std::span<double> out) const;
  // Same, restricted to u in [u_begin, u_end).
  void toggle_scores(Vertex i, std::span<const Vertex> nbd, std::span<double> out, Vertex u_begin,
                     Vertex u_end) const;

  // Number of scores computed from the data (cache misses included).
  std::uint64_t computations() const { return computations_.load(std::memory_order_relaxed); }

 private:
  double score_partition(Vertex i, const CellPartition& part, std::vector<std::uint64_t>& table) const;
  const std::vector<double>& plus_table(int cardinality) const;

  const CategoricalDataset* data_;
  DirichletHyper hyper_;
  std::vector<double> lgamma_alpha_;                    // lgamma(alpha + n)
  std::vector<std::vector<double>> lgamma_alpha_plus_;  // [r] -> lgamma(r alpha + n)
  mutable LocalScoreCache cache_;
  mutable std::atomic<std::uint64_t> computations_{0};
};

}  // namespace bdmpl
