#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "bdmpl/data.hpp"
#include "bdmpl/estimate.hpp"
#include "bdmpl/graph.hpp"
#include "bdmpl/rng.hpp"

namespace bdmpl {

enum class GraphKind { random, cluster, scalefree };

std::string to_string(GraphKind kind);
GraphKind parse_graph_kind(const std::string& name);

// Vertices are split into `components` contiguous blocks of near-equal size
// and each block gets its own structure; no edges cross blocks.
//   random:    each pair inside a block is an edge with probability beta
//   cluster:   as random, default two blocks
//   scalefree: Barabasi-Albert growth from a seed edge, `attachment` links
//              per new vertex, targets chosen proportional to degree
struct GraphSpec {
  GraphKind kind = GraphKind::random;
  std::size_t p = 10;
  double beta = 0.4;
  std::size_t attachment = 1;
  std::size_t components = 0;  // 0: 2 for cluster, 1 otherwise

  std::size_t block_count() const;
  void validate() const;
};

UndirectedGraph gen_graph(const GraphSpec& spec, std::uint64_t seed);

// Exactly `edges` distinct pairs drawn uniformly.
UndirectedGraph random_graph_with_edges(std::size_t p, std::size_t edges, RandomStream& rng);

// Pairwise binary Markov random field on spins s in {-1, +1}:
//   P(s) proportional to exp(sum_{(i,j) in E} w_ij s_i s_j + sum_i h_i s_i).
// Level 1 encodes s = +1.
struct MrfModel {
  UndirectedGraph graph;
  std::vector<double> weights;  // aligned with graph.edges()
  std::vector<double> fields;   // per vertex

  void validate() const;
};

// Weights with magnitude uniform on [weight_min, weight_max] and a fair-coin
// sign; zero fields.
MrfModel random_mrf(const UndirectedGraph& graph, double weight_min, double weight_max, std::uint64_t seed);

struct GibbsOptions {
  std::size_t burnin_sweeps = 1000;
  std::size_t thinning = 10;
};

// n samples from a systematic-scan Gibbs sampler, one every `thinning`
// sweeps after `burnin_sweeps`.
CategoricalDataset gen_data(const MrfModel& model, std::size_t n, std::uint64_t seed, const GibbsOptions& gibbs = {});

// Hyper-sparse binary table for exercising the pipeline at scale: an
// all-zero cell plus `cells - 1` distinct sparse activation patterns with
// heavy-tailed counts, built around a random latent graph.
CategoricalDataset gen_sparse_table(std::size_t p, std::size_t cells, std::uint64_t total, std::uint64_t seed);

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
};

Confusion confusion(const UndirectedGraph& truth, const UndirectedGraph& estimate);
// 2TP / (2TP + FP + FN); 1 when both graphs are empty.
double f1_score(const UndirectedGraph& truth, const UndirectedGraph& estimate);
// FP + FN.
std::size_t shd(const UndirectedGraph& truth, const UndirectedGraph& estimate);

struct RocCurve {
  std::vector<std::pair<double, double>> points;  // (FPR, TPR), from (0,0) to (1,1)
  double auc = 0.0;
  bool degenerate = false;  // true graph empty or complete
};

// Sweeps the threshold over the distinct probabilities in descending order,
// predicting an edge when its probability is at least the threshold.
RocCurve roc_points(const EdgeProbMatrix& probs, const UndirectedGraph& truth);

enum class Method { bdmcmc, hc_or, hc_and };
inline constexpr Method kMethods[] = {Method::bdmcmc, Method::hc_or, Method::hc_and};
std::string to_string(Method method);

struct BenchmarkProtocol {
  std::vector<GraphKind> kinds{GraphKind::random, GraphKind::cluster, GraphKind::scalefree};
  std::vector<std::size_t> ps{10, 20};
  std::vector<std::size_t> ns{200, 500, 1000};
  std::size_t replicates = 50;
  std::size_t iterations = 100000;
  std::size_t burnin = 60000;
  double weight_min = 0.5;
  double weight_max = 1.0;
  double alpha = 0.5;
  double prior_beta = 0.5;
  GibbsOptions gibbs;
  std::uint64_t seed = 1;
  int threads = 1;

  void validate() const;
};

// Graph spec used for one benchmark cell: random beta 0.4, cluster beta 0.6
// with two blocks, scale-free m = 1; random and scale-free graphs with p > 10
// are built from blocks of 10 vertices.
GraphSpec benchmark_graph_spec(GraphKind kind, std::size_t p);

struct ReplicateResult {
  GraphKind kind = GraphKind::random;
  std::size_t p = 0;
  std::size_t n = 0;
  std::size_t replicate = 0;
  double f1[3] = {0, 0, 0};
  std::size_t shd[3] = {0, 0, 0};
  RocCurve roc;
  std::size_t true_edges = 0;
};

struct SummaryRow {
  GraphKind kind = GraphKind::random;
  std::size_t p = 0;
  std::size_t n = 0;
  Method method = Method::bdmcmc;
  double mean_f1 = 0.0;
  double sd_f1 = 0.0;
  double mean_shd = 0.0;
  double sd_shd = 0.0;
  double mean_auc = 0.0;  // BDMCMC only
  std::size_t replicates = 0;
};

struct BenchmarkResult {
  std::vector<ReplicateResult> replicates;  // ordered by (kind, p, n, replicate)
  std::vector<SummaryRow> summary;
};

// Runs every (kind, p, n, replicate) job. The true graph and MRF weights
// depend on (kind, p, replicate) only, so the sample sizes of one replicate
// share a ground truth. Jobs run in parallel; results do not depend on the
// thread count.
BenchmarkResult run_benchmark(const BenchmarkProtocol& protocol,
                              const std::function<void(const ReplicateResult&)>& on_replicate = {});

std::vector<SummaryRow> summarize(const std::vector<ReplicateResult>& replicates);

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
void write_replicates_csv(std::ostream& out, const std::vector<ReplicateResult>& replicates);
// ROC points of every replicate of one (kind, p, n) cell.
void write_roc_csv(std::ostream& out, const std::vector<ReplicateResult>& replicates, GraphKind kind, std::size_t p,
                   std::size_t n);

}  // namespace bdmpl
