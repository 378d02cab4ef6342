#include "bdmpl/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bdmpl {

Edge make_edge(Vertex a, Vertex b) {
  if (a < 0 || b < 0) throw std::invalid_argument("negative vertex index");
  if (a == b) throw std::invalid_argument("self-loop (" + std::to_string(a) + "," + std::to_string(b) + ")");
  return a < b ? Edge{a, b} : Edge{b, a};
}

Edge edge_from_index(std::size_t index, std::size_t p) {
  if (index >= pair_count(p)) throw std::out_of_range("edge index out of range");
  std::size_t i = 0;
  std::size_t row = p - 1;
  while (index >= row) {
    index -= row;
    ++i;
    --row;
  }
  return Edge{static_cast<Vertex>(i), static_cast<Vertex>(i + 1 + index)};
}

UndirectedGraph::UndirectedGraph(std::size_t p)
    : p_(p), adjacency_(p * p, 0), neighbors_(p) {}

UndirectedGraph::UndirectedGraph(std::size_t p, std::span<const Edge> edges)
    : UndirectedGraph(p) {
  for (const Edge& e : edges) add_edge(make_edge(e.i, e.j));
}

UndirectedGraph UndirectedGraph::complete(std::size_t p) {
  UndirectedGraph g(p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j)
      g.add_edge(Edge{static_cast<Vertex>(i), static_cast<Vertex>(j)});
  return g;
}

void UndirectedGraph::check_vertex(Vertex v) const {
  if (v < 0 || static_cast<std::size_t>(v) >= p_)
    throw std::out_of_range("vertex " + std::to_string(v) + " out of range for p=" + std::to_string(p_));
}

void UndirectedGraph::check_edge(Edge e) const {
  check_vertex(e.i);
  check_vertex(e.j);
  if (e.i == e.j) throw std::invalid_argument("self-loop");
}

bool UndirectedGraph::has_edge(Vertex a, Vertex b) const {
  check_vertex(a);
  check_vertex(b);
  return adjacency_[static_cast<std::size_t>(a) * p_ + static_cast<std::size_t>(b)] != 0;
}

const std::vector<Vertex>& UndirectedGraph::neighbors(Vertex i) const {
  check_vertex(i);
  return neighbors_[static_cast<std::size_t>(i)];
}

void UndirectedGraph::add_edge(Edge e) {
  check_edge(e);
  auto& cell = adjacency_[static_cast<std::size_t>(e.i) * p_ + static_cast<std::size_t>(e.j)];
  if (cell) return;
  cell = 1;
  adjacency_[static_cast<std::size_t>(e.j) * p_ + static_cast<std::size_t>(e.i)] = 1;
  auto& ni = neighbors_[static_cast<std::size_t>(e.i)];
  auto& nj = neighbors_[static_cast<std::size_t>(e.j)];
  ni.insert(std::lower_bound(ni.begin(), ni.end(), e.j), e.j);
  nj.insert(std::lower_bound(nj.begin(), nj.end(), e.i), e.i);
  ++edge_count_;
}

void UndirectedGraph::remove_edge(Edge e) {
  check_edge(e);
  auto& cell = adjacency_[static_cast<std::size_t>(e.i) * p_ + static_cast<std::size_t>(e.j)];
  if (!cell) return;
  cell = 0;
  adjacency_[static_cast<std::size_t>(e.j) * p_ + static_cast<std::size_t>(e.i)] = 0;
  auto& ni = neighbors_[static_cast<std::size_t>(e.i)];
  auto& nj = neighbors_[static_cast<std::size_t>(e.j)];
  ni.erase(std::lower_bound(ni.begin(), ni.end(), e.j));
  nj.erase(std::lower_bound(nj.begin(), nj.end(), e.i));
  --edge_count_;
}

bool UndirectedGraph::toggle(Edge e) {
  e = make_edge(e.i, e.j);
  if (has_edge(e)) {
    remove_edge(e);
    return false;
  }
  add_edge(e);
  return true;
}

std::vector<Edge> UndirectedGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (std::size_t i = 0; i < p_; ++i)
    for (Vertex j : neighbors_[i])
      if (static_cast<std::size_t>(j) > i) out.push_back(Edge{static_cast<Vertex>(i), j});
  return out;
}

UndirectedGraph toggle_edge(const UndirectedGraph& g, Edge e) {
  UndirectedGraph out = g;
  out.toggle(e);
  return out;
}

UndirectedGraph complement(const UndirectedGraph& g) {
  const std::size_t p = g.vertex_count();
  UndirectedGraph out(p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j)
      if (!g.has_edge(static_cast<Vertex>(i), static_cast<Vertex>(j)))
        out.add_edge(Edge{static_cast<Vertex>(i), static_cast<Vertex>(j)});
  return out;
}

GraphPrior::GraphPrior(double beta) : beta_(beta) {
  if (!(beta > 0.0 && beta < 1.0))
    throw std::invalid_argument("graph prior beta must lie in (0,1), got " + std::to_string(beta));
  log_odds_ = std::log(beta) - std::log1p(-beta);
}

double GraphPrior::log_prior_ratio(int delta) const {
  if (delta != 1 && delta != -1) throw std::invalid_argument("delta must be +1 or -1");
  return delta == 1 ? log_odds_ : -log_odds_;
}

UndirectedGraph read_edge_list(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  UndirectedGraph g;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!have_header) {
      if (line.rfind("p=", 0) != 0)
        throw std::runtime_error("edge list: expected 'p=<count>' header at line " + std::to_string(line_no));
      std::size_t pos = 0;
      long long p = -1;
      try {
        p = std::stoll(line.substr(2), &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (p <= 0 || pos + 2 != line.size())
        throw std::runtime_error("edge list: bad header '" + line + "'");
      g = UndirectedGraph(static_cast<std::size_t>(p));
      have_header = true;
      continue;
    }
    std::istringstream fields(line);
    long long a = -1, b = -1;
    std::string rest;
    if (!(fields >> a >> b) || (fields >> rest))
      throw std::runtime_error("edge list: malformed line " + std::to_string(line_no) + ": '" + line + "'");
    const auto p = static_cast<long long>(g.vertex_count());
    if (a < 0 || b < 0 || a >= p || b >= p || a == b)
      throw std::runtime_error("edge list: invalid edge at line " + std::to_string(line_no));
    g.add_edge(make_edge(static_cast<Vertex>(a), static_cast<Vertex>(b)));
  }
  if (!have_header) throw std::runtime_error("edge list: missing 'p=<count>' header");
  return g;
}

void write_edge_list(std::ostream& out, const UndirectedGraph& g) {
  out << "p=" << g.vertex_count() << '\n';
  for (const Edge& e : g.edges()) out << e.i << ' ' << e.j << '\n';
}

UndirectedGraph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list '" + path + "'");
  return read_edge_list(in);
}

void save_edge_list(const std::string& path, const UndirectedGraph& g) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write edge list '" + path + "'");
  write_edge_list(out, g);
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace bdmpl
