#include <cmath>
#include <sstream>

#include "doctest.h"
#include "bdmpl/estimate.hpp"
#include "bdmpl/sampler.hpp"
#include "support.hpp"

using namespace bdmpl;

namespace {

// Chain on p=3 that holds (G with e, W=3) and then (G without e, W=1).
ChainTrace toy_trace() {
  UndirectedGraph start(3);
  start.add_edge(Edge{0, 1});
  ChainTrace t(start, 0);
  const EdgeDelta death[] = {{Edge{0, 1}, -1}};
  const EdgeDelta birth[] = {{Edge{1, 2}, 1}};
  t.append(3.0, death);
  t.append(1.0, birth);
  return t;
}

ChainTrace sampled(double scale = 1.0) {
  const auto data = testing::mrf_data(6, 150, 0.4, 31);
  SamplerConfig config;
  config.iterations = 2000;
  config.burnin = 500;
  const auto t = run(data, config);
  if (scale == 1.0) return t;
  ChainTrace scaled(t.initial_graph(), t.burnin());
  for (std::size_t m = 0; m < t.iteration_count(); ++m) scaled.append(t.records()[m].waiting_time * scale, t.deltas(m));
  return scaled;
}

}  // namespace

TEST_CASE("edge probabilities on a toy trace") {
  const auto probs = edge_inclusion_probs(toy_trace());
  CHECK(probs(0, 1) == 0.75);
  CHECK(probs(1, 0) == 0.75);
  CHECK(probs(1, 2) == 0.0);  // birth happens after the last holding period
  CHECK(probs(0, 2) == 0.0);
  CHECK(probs(2, 2) == 0.0);

  ChainTrace constant(UndirectedGraph::complete(3), 0);
  const EdgeDelta keep[] = {{Edge{0, 1}, -1}};
  constant.append(2.0, keep);
  const auto all = edge_inclusion_probs(constant);
  CHECK(all(1, 2) == 1.0);

  ChainTrace empty_after(UndirectedGraph(3), 5);
  empty_after.append(1.0, {});
  CHECK_THROWS(edge_inclusion_probs(empty_after));
}

TEST_CASE("median graph thresholding") {
  EdgeProbMatrix probs(3);
  probs.set(Edge{0, 1}, 0.6);
  probs.set(Edge{0, 2}, 0.4);
  CHECK(median_graph(probs).edges() == std::vector<Edge>{{0, 1}});
  probs.set(Edge{0, 2}, 0.5);
  CHECK(median_graph(probs).edge_count() == 1);
  CHECK(median_graph(EdgeProbMatrix(4)).edge_count() == 0);
  CHECK(median_graph(probs, 0.55).edge_count() == 1);
  CHECK(median_graph(probs, 0.65).edge_count() == 0);
  CHECK_THROWS(median_graph(probs, 1.0));
  CHECK_THROWS(probs.set(Edge{0, 1}, 1.5));
}

TEST_CASE("graph posterior") {
  const auto post = graph_posterior(toy_trace());
  REQUIRE(post.size() == 2);
  UndirectedGraph with(3);
  with.add_edge(Edge{0, 1});
  CHECK(post.at(graph_key(with)) == 0.75);
  CHECK(post.at(graph_key(UndirectedGraph(3))) == 0.25);

  ChainTrace single(UndirectedGraph(4), 0);
  single.append(2.5, {});
  CHECK(graph_posterior(single).begin()->second == 1.0);

  ChainTrace big(UndirectedGraph(30), 0);
  big.append(1.0, {});
  CHECK_THROWS(graph_posterior(big));
  CHECK(graph_posterior(big, true, true).size() == 1);
}

TEST_CASE("graph posterior marginalizes to edge probabilities") {
  const auto t = sampled();
  const auto probs = edge_inclusion_probs(t);
  const auto post = graph_posterior(t);
  double total = 0.0;
  EdgeProbMatrix folded(6);
  std::vector<double> sums(pair_count(6), 0.0);
  for (const auto& [key, pr] : post) {
    total += pr;
    for (auto idx : key) sums[idx] += pr;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t idx = 0; idx < sums.size(); ++idx) CHECK(sums[idx] == doctest::Approx(probs.at(idx)).epsilon(1e-10));
}

TEST_CASE("edge probabilities are invariant to rescaling waiting times") {
  const auto a = edge_inclusion_probs(sampled());
  const auto b = edge_inclusion_probs(sampled(8.0));
  for (std::size_t idx = 0; idx < a.upper().size(); ++idx) CHECK(a.at(idx) == doctest::Approx(b.at(idx)).epsilon(1e-12));
  CHECK(a.total() >= 0.0);
  CHECK(a.total() <= static_cast<double>(pair_count(6)));
}

TEST_CASE("convergence trace") {
  ChainTrace flat(UndirectedGraph::complete(4), 0);
  for (int k = 0; k < 5; ++k) flat.append(1.0 + k, {});
  for (const auto& pt : convergence_trace(flat)) {
    CHECK(pt.edge_prob_sum == doctest::Approx(6.0));
    CHECK(pt.edge_count == 6);
  }

  auto t = sampled();
  t.set_burnin(0);
  const auto points = convergence_trace(t);
  REQUIRE(points.size() == t.iteration_count());
  CHECK(points.front().iteration == 1);
  CHECK(points.back().edge_prob_sum == doctest::Approx(edge_inclusion_probs(t, false).total()).epsilon(1e-10));

  // From the empty start the running statistic rises early on.
  CHECK(points[50].edge_prob_sum > points[0].edge_prob_sum);
}

TEST_CASE("csv outputs") {
  EdgeProbMatrix probs(3);
  probs.set(Edge{0, 1}, 0.75);
  probs.set(Edge{1, 2}, 0.125);
  std::stringstream ss;
  write_edge_probs_csv(ss, probs);
  CHECK(ss.str() == "#p=3\ni,j,prob\n0,1,0.75\n0,2,0\n1,2,0.125\n");
  const auto back = read_edge_probs_csv(ss);
  CHECK(back.upper() == probs.upper());

  std::ostringstream dense;
  write_dense_matrix_csv(dense, probs);
  CHECK(dense.str() == "0,0.75,0\n0.75,0,0.125\n0,0.125,0\n");
}
