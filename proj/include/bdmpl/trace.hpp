#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "bdmpl/graph.hpp"

namespace bdmpl {

// Edge flipped by a jump: sign +1 for a birth, -1 for a death.
struct EdgeDelta {
  Edge edge;
  int sign = 1;

  friend bool operator==(const EdgeDelta&, const EdgeDelta&) = default;
};

// One iteration of the chain. The chain spends `waiting_time` in the graph
// G^(m) (edge_count edges) and then applies the deltas to jump out of it.
struct TraceRecord {
  double waiting_time = 0.0;
  double jump_time = 0.0;
  std::size_t edge_count = 0;
  std::uint32_t delta_begin = 0;
  std::uint32_t delta_count = 0;
};

// Sampler output stored as the initial graph plus per-iteration edge deltas.
// Graph G^(m) for iteration m (1-based) is the initial graph with the deltas
// of iterations 1..m-1 applied.
class ChainTrace {
 public:
  ChainTrace() = default;
  ChainTrace(UndirectedGraph initial, std::size_t burnin);

  std::size_t vertex_count() const { return initial_.vertex_count(); }
  const UndirectedGraph& initial_graph() const { return initial_; }
  std::size_t burnin() const { return burnin_; }
  void set_burnin(std::size_t burnin) { burnin_ = burnin; }

  std::size_t iteration_count() const { return records_.size(); }
  const std::vector<TraceRecord>& records() const { return records_; }
  std::span<const EdgeDelta> deltas(std::size_t iteration_index) const;

  // Appends the record for the graph currently at the end of the trace.
  // Throws if waiting_time <= 0 or a delta disagrees with the running graph.
  void append(double waiting_time, std::span<const EdgeDelta> deltas);

  // Graph after every recorded delta has been applied.
  const UndirectedGraph& final_graph() const { return current_; }

  // Calls f(index, graph, record) for each iteration, in order, with the
  // graph the chain occupied during that iteration (0-based index).
  template <typename F>
  void for_each_state(F&& f) const {
    UndirectedGraph g = initial_;
    for (std::size_t m = 0; m < records_.size(); ++m) {
      f(m, static_cast<const UndirectedGraph&>(g), records_[m]);
      for (const EdgeDelta& d : deltas(m)) g.toggle(d.edge);
    }
  }

  friend bool operator==(const ChainTrace& a, const ChainTrace& b);

 private:
  UndirectedGraph initial_;
  UndirectedGraph current_;
  std::size_t burnin_ = 0;
  std::vector<TraceRecord> records_;
  std::vector<EdgeDelta> deltas_;
};

// CSV trace: "#p=", "#burnin=", "#initial=" comment headers followed by
//   iteration,jump_time,waiting_time,delta_edge_i,delta_edge_j,delta_sign,edge_count
// with one row per delta; a multiple-edge iteration spans several rows with
// the same iteration number. Reals are written in shortest round-trip form.
void write_trace_csv(std::ostream& out, const ChainTrace& trace);
ChainTrace read_trace_csv(std::istream& in);

// Little-endian binary trace with magic "BDTRACE1".
void write_trace_binary(std::ostream& out, const ChainTrace& trace);
ChainTrace read_trace_binary(std::istream& in);

enum class TraceFormat { csv, binary };
void save_trace(const std::string& path, const ChainTrace& trace, TraceFormat format);
// Detects the format from the file's first bytes.
ChainTrace load_trace(const std::string& path);

// Shortest decimal representation that parses back to the same double.
std::string format_real(double value);

}  // namespace bdmpl
