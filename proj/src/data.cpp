#include "bdmpl/data.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace bdmpl {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
bool parse_int(std::string_view s, T& value) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  return ec == std::errc() && ptr == end && !s.empty();
}

[[noreturn]] void parse_error(const std::string& what, std::size_t line_no) {
  throw std::runtime_error(what + " at line " + std::to_string(line_no));
}

}  // namespace

CategoricalDataset::CategoricalDataset(std::vector<int> cardinalities, std::vector<Cell> cells)
    : cardinalities_(std::move(cardinalities)) {
  const std::size_t p = cardinalities_.size();
  for (int r : cardinalities_) {
    if (r < 2) throw std::invalid_argument("cardinality must be >= 2");
    if (r > 65536) throw std::invalid_argument("cardinality exceeds 65536");
  }
  for (const Cell& c : cells) {
    if (c.levels.size() != p) throw std::invalid_argument("cell width does not match variable count");
    if (c.count == 0) throw std::invalid_argument("cell counts must be positive");
    for (std::size_t v = 0; v < p; ++v)
      if (static_cast<int>(c.levels[v]) >= cardinalities_[v])
        throw std::invalid_argument("level " + std::to_string(c.levels[v]) + " out of range for variable " +
                                    std::to_string(v));
  }
  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) { return a.levels < b.levels; });
  for (std::size_t c = 1; c < cells.size(); ++c)
    if (cells[c].levels == cells[c - 1].levels) throw std::invalid_argument("duplicate cell configuration");

  columns_.assign(p, std::vector<Level>(cells.size()));
  counts_.resize(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (std::size_t v = 0; v < p; ++v) columns_[v][c] = cells[c].levels[v];
    counts_[c] = cells[c].count;
    n_ += cells[c].count;
  }
}

int CategoricalDataset::max_cardinality() const {
  return cardinalities_.empty() ? 0 : *std::max_element(cardinalities_.begin(), cardinalities_.end());
}

std::vector<Level> CategoricalDataset::cell_levels(std::size_t cell) const {
  std::vector<Level> out(variable_count());
  for (std::size_t v = 0; v < out.size(); ++v) out[v] = columns_[v].at(cell);
  return out;
}

void CategoricalDataset::set_names(std::vector<std::string> names) {
  if (!names.empty() && names.size() != variable_count())
    throw std::invalid_argument("name count does not match variable count");
  names_ = std::move(names);
}

std::string CategoricalDataset::name(Vertex v) const {
  if (names_.empty()) return "X" + std::to_string(v);
  return names_.at(static_cast<std::size_t>(v));
}

std::vector<std::vector<Level>> CategoricalDataset::expand_rows() const {
  std::vector<std::vector<Level>> rows;
  rows.reserve(n_);
  for (std::size_t c = 0; c < cell_count(); ++c) {
    const auto levels = cell_levels(c);
    for (std::uint64_t k = 0; k < counts_[c]; ++k) rows.push_back(levels);
  }
  return rows;
}

CategoricalDataset from_rows(const std::vector<std::vector<int>>& rows, std::optional<std::vector<int>> cardinalities) {
  if (rows.empty()) throw std::invalid_argument("from_rows: no rows");
  const std::size_t p = rows.front().size();
  if (p == 0) throw std::invalid_argument("from_rows: zero-width rows");
  std::map<std::vector<Level>, std::uint64_t> tally;
  std::vector<int> max_level(p, 0);
  for (const auto& row : rows) {
    if (row.size() != p) throw std::invalid_argument("from_rows: ragged rows");
    std::vector<Level> levels(p);
    for (std::size_t v = 0; v < p; ++v) {
      if (row[v] < 0) throw std::invalid_argument("from_rows: negative level");
      if (row[v] > 65535) throw std::invalid_argument("from_rows: level too large");
      levels[v] = static_cast<Level>(row[v]);
      max_level[v] = std::max(max_level[v], row[v]);
    }
    ++tally[levels];
  }
  std::vector<int> card;
  if (cardinalities) {
    if (cardinalities->size() != p) throw std::invalid_argument("from_rows: cardinality count mismatch");
    card = *cardinalities;
  } else {
    card.resize(p);
    for (std::size_t v = 0; v < p; ++v) card[v] = std::max(2, max_level[v] + 1);
  }
  std::vector<Cell> cells;
  cells.reserve(tally.size());
  for (auto& [levels, count] : tally) cells.push_back(Cell{levels, count});
  return CategoricalDataset(std::move(card), std::move(cells));
}

CellPartition partition_cells(const CategoricalDataset& data, std::span<const Vertex> vertices) {
  CellPartition part;
  part.group.assign(data.cell_count(), 0);
  part.group_count = data.cell_count() > 0 ? 1 : 0;
  std::vector<std::int32_t> scratch;
  for (Vertex v : vertices) refine_partition(data, part, v, scratch);
  return part;
}

void refine_partition(const CategoricalDataset& data, CellPartition& part, Vertex v,
                      std::vector<std::int32_t>& scratch) {
  const auto column = data.column(v);
  const auto r = static_cast<std::size_t>(data.cardinality(v));
  scratch.assign(static_cast<std::size_t>(part.group_count) * r, -1);
  std::int32_t next = 0;
  for (std::size_t c = 0; c < column.size(); ++c) {
    auto& slot = scratch[static_cast<std::size_t>(part.group[c]) * r + column[c]];
    if (slot < 0) slot = next++;
    part.group[c] = static_cast<std::uint32_t>(slot);
  }
  part.group_count = static_cast<std::uint32_t>(next);
}

std::uint64_t ConditionalCounts::marginal(std::size_t l) const {
  std::uint64_t total = 0;
  for (int k = 0; k < levels; ++k) total += count(l, k);
  return total;
}

std::optional<std::size_t> ConditionalCounts::find(std::span<const Level> configuration) const {
  for (std::size_t l = 0; l < configurations.size(); ++l)
    if (std::equal(configurations[l].begin(), configurations[l].end(), configuration.begin(), configuration.end()))
      return l;
  return std::nullopt;
}

ConditionalCounts count_config(const CategoricalDataset& data, Vertex i, std::span<const Vertex> nbd) {
  const auto p = static_cast<Vertex>(data.variable_count());
  if (i < 0 || i >= p) throw std::invalid_argument("count_config: vertex out of range");
  std::vector<Vertex> sorted(nbd.begin(), nbd.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("count_config: repeated neighbor");
  for (Vertex v : sorted) {
    if (v < 0 || v >= p) throw std::invalid_argument("count_config: neighbor out of range");
    if (v == i) throw std::invalid_argument("count_config: vertex is in its own neighborhood");
  }

  const CellPartition part = partition_cells(data, sorted);
  ConditionalCounts out;
  out.vertex = i;
  out.neighborhood = sorted;
  out.levels = data.cardinality(i);
  out.configurations.assign(part.group_count, {});
  out.table.assign(static_cast<std::size_t>(part.group_count) * static_cast<std::size_t>(out.levels), 0);
  const auto self = data.column(i);
  const auto counts = data.counts();
  for (std::size_t c = 0; c < data.cell_count(); ++c) {
    const auto g = part.group[c];
    auto& config = out.configurations[g];
    if (config.empty() && !sorted.empty()) {
      config.reserve(sorted.size());
      for (Vertex v : sorted) config.push_back(data.column(v)[c]);
    }
    out.table[static_cast<std::size_t>(g) * static_cast<std::size_t>(out.levels) + self[c]] += counts[c];
  }
  return out;
}

CategoricalDataset read_sparse_binary(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  long long p = -1;
  std::vector<Cell> cells;
  std::map<std::vector<Level>, std::size_t> seen;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty()) continue;
    if (p < 0) {
      if (text.rfind("#p=", 0) != 0) parse_error("sparse table: expected '#p=<count>' header", line_no);
      if (!parse_int(std::string_view(text).substr(3), p) || p <= 0)
        parse_error("sparse table: bad header", line_no);
      continue;
    }
    if (text[0] == '#') continue;
    const auto bar = text.find('|');
    if (bar == std::string::npos || text.find('|', bar + 1) != std::string::npos)
      parse_error("sparse table: malformed line", line_no);
    std::uint64_t count = 0;
    const std::string count_text = trim(std::string_view(text).substr(bar + 1));
    long long signed_count = 0;
    if (!parse_int(count_text, signed_count)) parse_error("sparse table: malformed count", line_no);
    if (signed_count <= 0) parse_error("sparse table: count must be positive", line_no);
    count = static_cast<std::uint64_t>(signed_count);

    std::vector<Level> levels(static_cast<std::size_t>(p), 0);
    const std::string index_text = trim(std::string_view(text).substr(0, bar));
    if (!index_text.empty()) {
      for (const std::string& field : split(index_text, ',')) {
        long long idx = -1;
        if (!parse_int(field, idx) || idx < 0) parse_error("sparse table: malformed index", line_no);
        if (idx >= p) parse_error("sparse table: index " + field + " >= p", line_no);
        auto& level = levels[static_cast<std::size_t>(idx)];
        if (level) parse_error("sparse table: repeated index " + field, line_no);
        level = 1;
      }
    }
    if (!seen.emplace(levels, line_no).second) parse_error("sparse table: duplicate pattern", line_no);
    cells.push_back(Cell{std::move(levels), count});
  }
  if (p < 0) throw std::runtime_error("sparse table: missing '#p=<count>' header");
  return CategoricalDataset(std::vector<int>(static_cast<std::size_t>(p), 2), std::move(cells));
}

CategoricalDataset load_sparse_binary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open sparse table '" + path + "'");
  return read_sparse_binary(in);
}

void write_sparse_binary(std::ostream& out, const CategoricalDataset& data) {
  for (int r : data.cardinalities())
    if (r != 2) throw std::invalid_argument("sparse binary format requires binary variables");
  out << "#p=" << data.variable_count() << '\n';
  const auto counts = data.counts();
  for (std::size_t c = 0; c < data.cell_count(); ++c) {
    bool first = true;
    for (std::size_t v = 0; v < data.variable_count(); ++v) {
      if (data.column(static_cast<Vertex>(v))[c] == 0) continue;
      if (!first) out << ',';
      out << v;
      first = false;
    }
    out << '|' << counts[c] << '\n';
  }
}

CategoricalDataset read_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) header = split(line, ',');
  }
  if (header.empty()) throw std::runtime_error("csv: missing header row");
  const bool weighted = header.back() == "count";
  if (weighted) header.pop_back();
  const std::size_t p = header.size();
  if (p == 0) throw std::runtime_error("csv: no variable columns");

  std::map<std::vector<Level>, std::uint64_t> tally;
  std::vector<int> max_level(p, 0);
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != p + (weighted ? 1 : 0)) parse_error("csv: wrong field count", line_no);
    std::vector<Level> levels(p);
    for (std::size_t v = 0; v < p; ++v) {
      int level = -1;
      if (!parse_int(fields[v], level) || level < 0 || level > 65535) parse_error("csv: bad level", line_no);
      levels[v] = static_cast<Level>(level);
      max_level[v] = std::max(max_level[v], level);
    }
    std::uint64_t weight = 1;
    if (weighted) {
      long long w = 0;
      if (!parse_int(fields[p], w) || w <= 0) parse_error("csv: count must be a positive integer", line_no);
      weight = static_cast<std::uint64_t>(w);
    }
    tally[levels] += weight;
  }
  if (tally.empty()) throw std::runtime_error("csv: no observations");
  std::vector<int> card(p);
  for (std::size_t v = 0; v < p; ++v) card[v] = std::max(2, max_level[v] + 1);
  std::vector<Cell> cells;
  cells.reserve(tally.size());
  for (auto& [levels, count] : tally) cells.push_back(Cell{levels, count});
  CategoricalDataset data(std::move(card), std::move(cells));
  data.set_names(std::move(header));
  return data;
}

CategoricalDataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open csv '" + path + "'");
  return read_csv(in);
}

void write_csv(std::ostream& out, const CategoricalDataset& data) {
  const std::size_t p = data.variable_count();
  for (std::size_t v = 0; v < p; ++v) out << data.name(static_cast<Vertex>(v)) << ',';
  out << "count\n";
  const auto counts = data.counts();
  for (std::size_t c = 0; c < data.cell_count(); ++c) {
    for (std::size_t v = 0; v < p; ++v) out << data.column(static_cast<Vertex>(v))[c] << ',';
    out << counts[c] << '\n';
  }
}

CategoricalDataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset '" + path + "'");
  std::string line;
  while (std::getline(in, line)) {
    const std::string text = trim(line);
    if (text.empty()) continue;
    in.clear();
    in.seekg(0);
    if (text.rfind("#p=", 0) == 0) return read_sparse_binary(in);
    return read_csv(in);
  }
  throw std::runtime_error("dataset '" + path + "' is empty");
}

}  // namespace bdmpl
