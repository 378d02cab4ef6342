#include "bdmpl/estimate.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

namespace bdmpl {

EdgeProbMatrix::EdgeProbMatrix(std::size_t p) : p_(p), upper_(pair_count(p), 0.0) {}

double EdgeProbMatrix::operator()(Vertex a, Vertex b) const {
  if (a == b) return 0.0;
  return upper_.at(edge_index(make_edge(a, b), p_));
}

void EdgeProbMatrix::set(Edge e, double value) {
  if (!(value >= 0.0 && value <= 1.0)) throw std::invalid_argument("edge probability outside [0,1]");
  upper_.at(edge_index(make_edge(e.i, e.j), p_)) = value;
}

double EdgeProbMatrix::total() const {
  double sum = 0.0;
  for (double v : upper_) sum += v;
  return sum;
}

namespace {

std::size_t first_counted(const ChainTrace& trace, bool skip_burnin) {
  return skip_burnin ? std::min(trace.burnin(), trace.iteration_count()) : 0;
}

}  // namespace

EdgeProbMatrix edge_inclusion_probs(const ChainTrace& trace, bool skip_burnin) {
  const std::size_t p = trace.vertex_count();
  const std::size_t start = first_counted(trace, skip_burnin);
  if (start >= trace.iteration_count()) throw std::invalid_argument("edge_inclusion_probs: empty trace after burn-in");

  // Weights are added per present edge, so each edge's sum runs over the
  // iterations in order regardless of how the present set is laid out.
  std::vector<double> weight(pair_count(p), 0.0);
  std::vector<std::size_t> present;
  std::vector<std::size_t> slot(pair_count(p), SIZE_MAX);
  for (const Edge& e : trace.initial_graph().edges()) {
    const std::size_t idx = edge_index(e, p);
    slot[idx] = present.size();
    present.push_back(idx);
  }
  double total = 0.0;
  const auto& records = trace.records();
  for (std::size_t m = 0; m < records.size(); ++m) {
    if (m >= start) {
      const double w = records[m].waiting_time;
      total += w;
      for (std::size_t idx : present) weight[idx] += w;
    }
    for (const EdgeDelta& d : trace.deltas(m)) {
      const std::size_t idx = edge_index(d.edge, p);
      if (d.sign > 0) {
        slot[idx] = present.size();
        present.push_back(idx);
      } else {
        const std::size_t pos = slot[idx];
        present[pos] = present.back();
        slot[present[pos]] = pos;
        present.pop_back();
        slot[idx] = SIZE_MAX;
      }
    }
  }

  EdgeProbMatrix probs(p);
  for (std::size_t idx = 0; idx < weight.size(); ++idx) {
    const double prob = weight[idx] / total;
    probs.set(edge_from_index(idx, p), prob > 1.0 ? 1.0 : prob);
  }
  return probs;
}

UndirectedGraph median_graph(const EdgeProbMatrix& probs, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw std::invalid_argument("median_graph: threshold must be in (0,1)");
  const std::size_t p = probs.vertex_count();
  UndirectedGraph g(p);
  for (std::size_t idx = 0; idx < probs.upper().size(); ++idx)
    if (probs.at(idx) > threshold) g.add_edge(edge_from_index(idx, p));
  return g;
}

GraphKey graph_key(const UndirectedGraph& g) {
  GraphKey key;
  key.reserve(g.edge_count());
  for (const Edge& e : g.edges()) key.push_back(static_cast<std::uint32_t>(edge_index(e, g.vertex_count())));
  return key;
}

UndirectedGraph graph_from_key(const GraphKey& key, std::size_t p) {
  UndirectedGraph g(p);
  for (std::uint32_t idx : key) g.add_edge(edge_from_index(idx, p));
  return g;
}

std::map<GraphKey, double> graph_posterior(const ChainTrace& trace, bool skip_burnin, bool allow_large) {
  if (trace.vertex_count() > 25 && !allow_large)
    throw std::invalid_argument("graph_posterior: p > 25 requires allow_large");
  const std::size_t start = first_counted(trace, skip_burnin);
  if (start >= trace.iteration_count()) throw std::invalid_argument("graph_posterior: empty trace");
  std::map<GraphKey, double> out;
  double total = 0.0;
  trace.for_each_state([&](std::size_t m, const UndirectedGraph& g, const TraceRecord& rec) {
    if (m < start) return;
    out[graph_key(g)] += rec.waiting_time;
    total += rec.waiting_time;
  });
  for (auto& [key, weight] : out) weight /= total;
  return out;
}

std::vector<ConvergencePoint> convergence_trace(const ChainTrace& trace) {
  std::vector<ConvergencePoint> out;
  out.reserve(trace.iteration_count());
  double weighted_edges = 0.0;
  double total = 0.0;
  const auto& records = trace.records();
  for (std::size_t m = 0; m < records.size(); ++m) {
    const auto& r = records[m];
    weighted_edges += static_cast<double>(r.edge_count) * r.waiting_time;
    total += r.waiting_time;
    out.push_back(ConvergencePoint{m + 1, weighted_edges / total, r.edge_count});
  }
  return out;
}

void write_edge_probs_csv(std::ostream& out, const EdgeProbMatrix& probs) {
  const std::size_t p = probs.vertex_count();
  out << "#p=" << p << '\n' << "i,j,prob\n";
  for (std::size_t idx = 0; idx < probs.upper().size(); ++idx) {
    const Edge e = edge_from_index(idx, p);
    out << e.i << ',' << e.j << ',' << format_real(probs.at(idx)) << '\n';
  }
}

EdgeProbMatrix read_edge_probs_csv(std::istream& in) {
  std::string line;
  EdgeProbMatrix probs;
  bool have_p = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("#p=", 0) == 0) {
      probs = EdgeProbMatrix(static_cast<std::size_t>(std::stoull(line.substr(3))));
      have_p = true;
      continue;
    }
    if (line[0] == '#' || line.rfind("i,j", 0) == 0) continue;
    if (!have_p) throw std::runtime_error("edge probabilities: missing '#p=' header");
    std::stringstream ss(line);
    std::string a, b, v;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, v))
      throw std::runtime_error("edge probabilities: malformed line '" + line + "'");
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), value);
    if (ec != std::errc() || ptr != v.data() + v.size())
      throw std::runtime_error("edge probabilities: bad value '" + v + "'");
    probs.set(make_edge(std::stoi(a), std::stoi(b)), value);
  }
  if (!have_p) throw std::runtime_error("edge probabilities: missing '#p=' header");
  return probs;
}

void write_dense_matrix_csv(std::ostream& out, const EdgeProbMatrix& probs) {
  const auto p = static_cast<Vertex>(probs.vertex_count());
  for (Vertex i = 0; i < p; ++i) {
    for (Vertex j = 0; j < p; ++j) out << (j ? "," : "") << format_real(probs(i, j));
    out << '\n';
  }
}

void write_convergence_csv(std::ostream& out, const std::vector<ConvergencePoint>& points) {
  out << "iteration,edge_prob_sum,edge_count\n";
  for (const auto& pt : points)
    out << pt.iteration << ',' << format_real(pt.edge_prob_sum) << ',' << pt.edge_count << '\n';
}

}  // namespace bdmpl
