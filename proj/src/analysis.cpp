#include "bdmpl/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "bdmpl/trace.hpp"

namespace bdmpl {

std::vector<std::size_t> degree(const UndirectedGraph& g) {
  std::vector<std::size_t> out(g.vertex_count());
  for (std::size_t v = 0; v < out.size(); ++v) out[v] = g.degree(static_cast<Vertex>(v));
  return out;
}

namespace {

// BFS from s filling distances (-1 unreachable), visit order, path counts and
// predecessor lists.
struct Bfs {
  std::vector<int> dist;
  std::vector<Vertex> order;
  std::vector<double> sigma;
  std::vector<std::vector<Vertex>> pred;

  explicit Bfs(std::size_t p) : dist(p), sigma(p), pred(p) { order.reserve(p); }

  void run(const UndirectedGraph& g, Vertex s, bool track_paths) {
    std::fill(dist.begin(), dist.end(), -1);
    order.clear();
    if (track_paths) {
      std::fill(sigma.begin(), sigma.end(), 0.0);
      for (auto& pr : pred) pr.clear();
      sigma[static_cast<std::size_t>(s)] = 1.0;
    }
    dist[static_cast<std::size_t>(s)] = 0;
    order.push_back(s);
    for (std::size_t head = 0; head < order.size(); ++head) {
      const Vertex v = order[head];
      const int dv = dist[static_cast<std::size_t>(v)];
      for (Vertex w : g.neighbors(v)) {
        const auto wi = static_cast<std::size_t>(w);
        if (dist[wi] < 0) {
          dist[wi] = dv + 1;
          order.push_back(w);
        }
        if (track_paths && dist[wi] == dv + 1) {
          sigma[wi] += sigma[static_cast<std::size_t>(v)];
          pred[wi].push_back(v);
        }
      }
    }
  }
};

}  // namespace

std::vector<double> closeness(const UndirectedGraph& g, int threads) {
  const std::size_t p = g.vertex_count();
  std::vector<double> out(p, 0.0);
  const auto count = static_cast<std::ptrdiff_t>(p);
#pragma omp parallel num_threads(std::max(1, threads))
  {
    Bfs bfs(p);
#pragma omp for schedule(dynamic, 8)
    for (std::ptrdiff_t s = 0; s < count; ++s) {
      bfs.run(g, static_cast<Vertex>(s), false);
      double sum = 0.0;
      for (std::size_t k = 1; k < bfs.order.size(); ++k)
        sum += 1.0 / bfs.dist[static_cast<std::size_t>(bfs.order[k])];
      out[static_cast<std::size_t>(s)] = sum;
    }
  }
  return out;
}

std::vector<double> betweenness(const UndirectedGraph& g, int threads) {
  const std::size_t p = g.vertex_count();
  const auto count = static_cast<std::ptrdiff_t>(p);
  // Per-source contributions are kept separately and summed in source order
  // so the result does not depend on the thread count.
  std::vector<std::vector<double>> per_source(p);
#pragma omp parallel num_threads(std::max(1, threads))
  {
    Bfs bfs(p);
    std::vector<double> delta(p);
#pragma omp for schedule(dynamic, 8)
    for (std::ptrdiff_t s = 0; s < count; ++s) {
      bfs.run(g, static_cast<Vertex>(s), true);
      std::fill(delta.begin(), delta.end(), 0.0);
      auto& contrib = per_source[static_cast<std::size_t>(s)];
      contrib.assign(p, 0.0);
      for (std::size_t k = bfs.order.size(); k-- > 1;) {
        const auto w = static_cast<std::size_t>(bfs.order[k]);
        for (Vertex v : bfs.pred[w]) {
          const auto vi = static_cast<std::size_t>(v);
          delta[vi] += bfs.sigma[vi] / bfs.sigma[w] * (1.0 + delta[w]);
        }
        contrib[w] = delta[w];
      }
    }
  }
  std::vector<double> out(p, 0.0);
  for (const auto& contrib : per_source)
    for (std::size_t v = 0; v < p; ++v) out[v] += contrib[v];
  for (double& x : out) x /= 2.0;
  return out;
}

PageRankResult pagerank(const UndirectedGraph& g, double damping, double tol, std::size_t max_iterations) {
  if (!(damping >= 0.0 && damping < 1.0)) throw std::invalid_argument("pagerank: damping must be in [0,1)");
  if (!(tol > 0.0)) throw std::invalid_argument("pagerank: tolerance must be positive");
  const std::size_t p = g.vertex_count();
  PageRankResult result;
  if (p == 0) {
    result.converged = true;
    return result;
  }
  const double uniform = 1.0 / static_cast<double>(p);
  std::vector<double> rank(p, uniform), next(p);
  for (std::size_t it = 1; it <= max_iterations; ++it) {
    double dangling = 0.0;
    for (std::size_t v = 0; v < p; ++v)
      if (g.degree(static_cast<Vertex>(v)) == 0) dangling += rank[v];
    const double base = (1.0 - damping) * uniform + damping * dangling * uniform;
    std::fill(next.begin(), next.end(), base);
    for (std::size_t v = 0; v < p; ++v) {
      const auto& nb = g.neighbors(static_cast<Vertex>(v));
      if (nb.empty()) continue;
      const double share = damping * rank[v] / static_cast<double>(nb.size());
      for (Vertex w : nb) next[static_cast<std::size_t>(w)] += share;
    }
    const double total = std::accumulate(next.begin(), next.end(), 0.0);
    double change = 0.0;
    for (std::size_t v = 0; v < p; ++v) {
      next[v] /= total;
      change = std::max(change, std::abs(next[v] - rank[v]));
    }
    rank.swap(next);
    result.iterations = it;
    if (change < tol) {
      result.converged = true;
      break;
    }
  }
  result.values = std::move(rank);
  return result;
}

std::string to_string(Measure m) {
  switch (m) {
    case Measure::degree: return "degree";
    case Measure::closeness: return "closeness";
    case Measure::betweenness: return "betweenness";
    case Measure::pagerank: return "pagerank";
  }
  return "?";
}

Measure parse_measure(const std::string& name) {
  for (Measure m : kMeasures)
    if (to_string(m) == name) return m;
  throw std::invalid_argument("unknown centrality measure '" + name + "'");
}

const std::vector<double>& CentralityReport::values(Measure m) const {
  switch (m) {
    case Measure::degree: return degree;
    case Measure::closeness: return closeness;
    case Measure::betweenness: return betweenness;
    case Measure::pagerank: return pagerank;
  }
  throw std::invalid_argument("unknown measure");
}

CentralityReport centrality(const UndirectedGraph& g, std::vector<std::string> labels, int threads) {
  const std::size_t p = g.vertex_count();
  if (labels.empty())
    for (std::size_t v = 0; v < p; ++v) labels.push_back(std::to_string(v));
  if (labels.size() != p) throw std::invalid_argument("centrality: one label per vertex required");
  CentralityReport r;
  r.labels = std::move(labels);
  for (std::size_t d : bdmpl::degree(g)) r.degree.push_back(static_cast<double>(d));
  r.closeness = bdmpl::closeness(g, threads);
  r.betweenness = bdmpl::betweenness(g, threads);
  auto pr = bdmpl::pagerank(g);
  r.pagerank = std::move(pr.values);
  r.pagerank_converged = pr.converged;
  return r;
}

std::vector<Vertex> top_k(const CentralityReport& report, Measure measure, std::size_t k) {
  const auto& values = report.values(measure);
  if (k < 1 || k > values.size()) throw std::invalid_argument("top_k: k must lie in [1, p]");
  std::vector<Vertex> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Vertex a, Vertex b) {
    return values[static_cast<std::size_t>(a)] > values[static_cast<std::size_t>(b)];
  });
  order.resize(k);
  return order;
}

void write_centrality_csv(std::ostream& out, const CentralityReport& r) {
  out << "vertex,label,degree,closeness,betweenness,pagerank\n";
  for (std::size_t v = 0; v < r.vertex_count(); ++v)
    out << v << ',' << r.labels[v] << ',' << static_cast<std::size_t>(r.degree[v]) << ','
        << format_real(r.closeness[v]) << ',' << format_real(r.betweenness[v]) << ',' << format_real(r.pagerank[v])
        << '\n';
}

void write_top_k_csv(std::ostream& out, const CentralityReport& r, std::size_t k) {
  out << "measure,rank,vertex,label,value\n";
  for (Measure m : kMeasures) {
    const auto top = top_k(r, m, k);
    for (std::size_t rank = 0; rank < top.size(); ++rank) {
      const auto v = static_cast<std::size_t>(top[rank]);
      out << to_string(m) << ',' << rank + 1 << ',' << v << ',' << r.labels[v] << ','
          << format_real(r.values(m)[v]) << '\n';
    }
  }
}

}  // namespace bdmpl
