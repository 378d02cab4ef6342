#include "bdmpl/trace.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bdmpl {

ChainTrace::ChainTrace(UndirectedGraph initial, std::size_t burnin)
    : initial_(initial), current_(std::move(initial)), burnin_(burnin) {}

std::span<const EdgeDelta> ChainTrace::deltas(std::size_t iteration_index) const {
  const TraceRecord& r = records_.at(iteration_index);
  return std::span<const EdgeDelta>(deltas_).subspan(r.delta_begin, r.delta_count);
}

void ChainTrace::append(double waiting_time, std::span<const EdgeDelta> deltas) {
  if (!(waiting_time > 0.0)) throw std::invalid_argument("trace: waiting time must be positive");
  TraceRecord rec;
  rec.waiting_time = waiting_time;
  rec.jump_time = (records_.empty() ? 0.0 : records_.back().jump_time) + waiting_time;
  rec.edge_count = current_.edge_count();
  rec.delta_begin = static_cast<std::uint32_t>(deltas_.size());
  rec.delta_count = static_cast<std::uint32_t>(deltas.size());
  for (const EdgeDelta& d : deltas) {
    const Edge e = make_edge(d.edge.i, d.edge.j);
    const bool present = current_.has_edge(e);
    if ((d.sign == 1 && present) || (d.sign == -1 && !present) || (d.sign != 1 && d.sign != -1))
      throw std::invalid_argument("trace: delta inconsistent with current graph");
    current_.toggle(e);
    deltas_.push_back(EdgeDelta{e, d.sign});
  }
  records_.push_back(rec);
}

bool operator==(const ChainTrace& a, const ChainTrace& b) {
  if (!(a.initial_ == b.initial_) || a.burnin_ != b.burnin_ || a.deltas_ != b.deltas_) return false;
  if (a.records_.size() != b.records_.size()) return false;
  for (std::size_t m = 0; m < a.records_.size(); ++m) {
    const auto& x = a.records_[m];
    const auto& y = b.records_[m];
    if (x.waiting_time != y.waiting_time || x.jump_time != y.jump_time || x.edge_count != y.edge_count ||
        x.delta_begin != y.delta_begin || x.delta_count != y.delta_count)
      return false;
  }
  return true;
}

std::string format_real(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw std::runtime_error("format_real failed");
  return std::string(buf.data(), ptr);
}

namespace {

double parse_real(const std::string& s) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw std::runtime_error("trace: bad number '" + s + "'");
  return value;
}

long long parse_integer(const std::string& s) {
  long long value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw std::runtime_error("trace: bad integer '" + s + "'");
  return value;
}

constexpr char kMagic[8] = {'B', 'D', 'T', 'R', 'A', 'C', 'E', '1'};

template <typename T>
void put(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<unsigned char, sizeof(T)> bytes{};
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) throw std::runtime_error("trace: truncated file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace

void write_trace_csv(std::ostream& out, const ChainTrace& trace) {
  out << "#p=" << trace.vertex_count() << '\n';
  out << "#burnin=" << trace.burnin() << '\n';
  out << "#initial=";
  bool first = true;
  for (const Edge& e : trace.initial_graph().edges()) {
    out << (first ? "" : " ") << e.i << '-' << e.j;
    first = false;
  }
  out << '\n';
  out << "iteration,jump_time,waiting_time,delta_edge_i,delta_edge_j,delta_sign,edge_count\n";
  const auto& records = trace.records();
  for (std::size_t m = 0; m < records.size(); ++m) {
    const auto& r = records[m];
    const std::string prefix =
        std::to_string(m + 1) + ',' + format_real(r.jump_time) + ',' + format_real(r.waiting_time) + ',';
    for (const EdgeDelta& d : trace.deltas(m))
      out << prefix << d.edge.i << ',' << d.edge.j << ',' << d.sign << ',' << r.edge_count << '\n';
  }
}

ChainTrace read_trace_csv(std::istream& in) {
  std::string line;
  long long p = -1;
  long long burnin = 0;
  std::vector<Edge> initial;
  bool header_seen = false;
  ChainTrace trace;
  bool constructed = false;

  long long pending_iteration = -1;
  double pending_wait = 0.0;
  double pending_jump = 0.0;
  long long pending_edges = 0;
  std::vector<EdgeDelta> pending;
  auto flush = [&] {
    if (pending_iteration < 0) return;
    if (static_cast<std::size_t>(pending_iteration) != trace.iteration_count() + 1)
      throw std::runtime_error("trace: iterations out of order");
    trace.append(pending_wait, pending);
    // Jump times and edge counts are derived data; they must agree with the
    // deltas, which is exact since reals round-trip through the text.
    const TraceRecord& rec = trace.records().back();
    if (rec.jump_time != pending_jump) throw std::runtime_error("trace: jump_time disagrees with waiting times");
    if (static_cast<long long>(rec.edge_count) != pending_edges)
      throw std::runtime_error("trace: edge_count disagrees with deltas");
    pending.clear();
    pending_iteration = -1;
  };

  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("#p=", 0) == 0) p = parse_integer(line.substr(3));
      else if (line.rfind("#burnin=", 0) == 0) burnin = parse_integer(line.substr(8));
      else if (line.rfind("#initial=", 0) == 0) {
        std::istringstream edges(line.substr(9));
        std::string token;
        while (edges >> token) {
          const auto dash = token.find('-');
          if (dash == std::string::npos) throw std::runtime_error("trace: bad initial edge '" + token + "'");
          initial.push_back(make_edge(static_cast<Vertex>(parse_integer(token.substr(0, dash))),
                                      static_cast<Vertex>(parse_integer(token.substr(dash + 1)))));
        }
      }
      continue;
    }
    if (!header_seen) {
      if (line.rfind("iteration,", 0) != 0) throw std::runtime_error("trace: missing column header");
      if (p <= 0) throw std::runtime_error("trace: missing '#p=' header");
      trace = ChainTrace(UndirectedGraph(static_cast<std::size_t>(p), initial), static_cast<std::size_t>(burnin));
      constructed = true;
      header_seen = true;
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 7) throw std::runtime_error("trace: expected 7 columns");
    const long long iteration = parse_integer(fields[0]);
    if (iteration != pending_iteration) {
      flush();
      pending_iteration = iteration;
      pending_jump = parse_real(fields[1]);
      pending_wait = parse_real(fields[2]);
      pending_edges = parse_integer(fields[6]);
    }
    pending.push_back(EdgeDelta{make_edge(static_cast<Vertex>(parse_integer(fields[3])),
                                          static_cast<Vertex>(parse_integer(fields[4]))),
                                static_cast<int>(parse_integer(fields[5]))});
  }
  flush();
  if (!constructed) {
    if (p <= 0) throw std::runtime_error("trace: missing '#p=' header");
    trace = ChainTrace(UndirectedGraph(static_cast<std::size_t>(p), initial), static_cast<std::size_t>(burnin));
  }
  return trace;
}

void write_trace_binary(std::ostream& out, const ChainTrace& trace) {
  out.write(kMagic, sizeof(kMagic));
  put<std::uint64_t>(out, trace.vertex_count());
  put<std::uint64_t>(out, trace.burnin());
  const auto initial = trace.initial_graph().edges();
  put<std::uint64_t>(out, initial.size());
  for (const Edge& e : initial) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(e.i));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(e.j));
  }
  put<std::uint64_t>(out, trace.iteration_count());
  for (std::size_t m = 0; m < trace.iteration_count(); ++m) {
    const auto deltas = trace.deltas(m);
    put<double>(out, trace.records()[m].waiting_time);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(deltas.size()));
    for (const EdgeDelta& d : deltas) {
      put<std::uint32_t>(out, static_cast<std::uint32_t>(d.edge.i));
      put<std::uint32_t>(out, static_cast<std::uint32_t>(d.edge.j));
      put<std::int8_t>(out, static_cast<std::int8_t>(d.sign));
    }
  }
}

ChainTrace read_trace_binary(std::istream& in) {
  char magic[sizeof(kMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("trace: not a binary trace");
  const auto p = get<std::uint64_t>(in);
  const auto burnin = get<std::uint64_t>(in);
  const auto initial_count = get<std::uint64_t>(in);
  std::vector<Edge> initial;
  for (std::uint64_t k = 0; k < initial_count; ++k) {
    const auto a = get<std::uint32_t>(in);
    const auto b = get<std::uint32_t>(in);
    initial.push_back(make_edge(static_cast<Vertex>(a), static_cast<Vertex>(b)));
  }
  ChainTrace trace(UndirectedGraph(p, initial), burnin);
  const auto iterations = get<std::uint64_t>(in);
  std::vector<EdgeDelta> deltas;
  for (std::uint64_t m = 0; m < iterations; ++m) {
    const auto wait = get<double>(in);
    const auto count = get<std::uint32_t>(in);
    deltas.clear();
    for (std::uint32_t k = 0; k < count; ++k) {
      const auto a = get<std::uint32_t>(in);
      const auto b = get<std::uint32_t>(in);
      const auto sign = get<std::int8_t>(in);
      deltas.push_back(EdgeDelta{make_edge(static_cast<Vertex>(a), static_cast<Vertex>(b)), sign});
    }
    trace.append(wait, deltas);
  }
  return trace;
}

void save_trace(const std::string& path, const ChainTrace& trace, TraceFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write trace '" + path + "'");
  if (format == TraceFormat::csv) write_trace_csv(out, trace);
  else write_trace_binary(out, trace);
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

ChainTrace load_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open trace '" + path + "'");
  char head[sizeof(kMagic)] = {};
  in.read(head, sizeof(head));
  const bool binary = in.gcount() == static_cast<std::streamsize>(sizeof(head)) &&
                      std::memcmp(head, kMagic, sizeof(kMagic)) == 0;
  in.clear();
  in.seekg(0);
  return binary ? read_trace_binary(in) : read_trace_csv(in);
}

}  // namespace bdmpl
