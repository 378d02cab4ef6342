#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bdmpl/graph.hpp"

namespace bdmpl {

using Level = std::uint16_t;

// One nonzero cell of a contingency table: a full level configuration and
// its positive count.
struct Cell {
  std::vector<Level> levels;
  std::uint64_t count = 0;
};

// Categorical observations stored as a sparse contingency table.
//
// Only cells with positive counts are kept, in ascending lexicographic order
// of their configuration. Levels are stored column-wise so that a scan over
// one variable touches contiguous memory.
class CategoricalDataset {
 public:
  CategoricalDataset() = default;

  // Throws std::invalid_argument when a cardinality is < 2, a level is out of
  // range, a count is zero, or the same configuration appears twice.
  CategoricalDataset(std::vector<int> cardinalities, std::vector<Cell> cells);

  std::size_t variable_count() const { return cardinalities_.size(); }
  std::size_t cell_count() const { return counts_.size(); }
  std::uint64_t sample_count() const { return n_; }

  int cardinality(Vertex v) const { return cardinalities_.at(static_cast<std::size_t>(v)); }
  std::span<const int> cardinalities() const { return cardinalities_; }
  int max_cardinality() const;

  std::span<const Level> column(Vertex v) const { return columns_.at(static_cast<std::size_t>(v)); }
  std::span<const std::uint64_t> counts() const { return counts_; }
  std::vector<Level> cell_levels(std::size_t cell) const;

  const std::vector<std::string>& names() const { return names_; }
  void set_names(std::vector<std::string> names);
  std::string name(Vertex v) const;

  // Multiset of observations, one row per unit of count, cells in order.
  std::vector<std::vector<Level>> expand_rows() const;

 private:
  std::vector<int> cardinalities_;
  std::vector<std::vector<Level>> columns_;
  std::vector<std::uint64_t> counts_;
  std::vector<std::string> names_;
  std::uint64_t n_ = 0;
};

// Builds a dataset whose cell counts are row multiplicities. Cardinalities are
// max level + 1 (at least 2) unless supplied.
CategoricalDataset from_rows(const std::vector<std::vector<int>>& rows,
                             std::optional<std::vector<int>> cardinalities = std::nullopt);

// Cells of a dataset grouped by the configuration they take on a vertex set.
// Groups are numbered in order of first appearance over the (sorted) cells,
// which makes the numbering a function of the vertex set alone.
struct CellPartition {
  std::vector<std::uint32_t> group;  // per cell
  std::uint32_t group_count = 0;
};

CellPartition partition_cells(const CategoricalDataset& data, std::span<const Vertex> vertices);

// Splits every group of `part` by the level of `v`. `scratch` is reused
// between calls to avoid reallocation.
void refine_partition(const CategoricalDataset& data, CellPartition& part, Vertex v,
                      std::vector<std::int32_t>& scratch);

// Counts n_{i,kl} of a vertex against the observed configurations l of its
// neighborhood. Configurations never observed are absent.
struct ConditionalCounts {
  Vertex vertex = 0;
  std::vector<Vertex> neighborhood;                 // ascending
  int levels = 0;                                   // r_i
  std::vector<std::vector<Level>> configurations;   // one per observed l
  std::vector<std::uint64_t> table;                 // configurations.size() x levels

  std::size_t configuration_count() const { return configurations.size(); }
  std::uint64_t count(std::size_t l, int k) const {
    return table[l * static_cast<std::size_t>(levels) + static_cast<std::size_t>(k)];
  }
  std::uint64_t marginal(std::size_t l) const;
  std::optional<std::size_t> find(std::span<const Level> configuration) const;
};

// Throws std::invalid_argument if i is in nbd or any index is invalid.
ConditionalCounts count_config(const CategoricalDataset& data, Vertex i, std::span<const Vertex> nbd);

// Sparse binary pattern file: "#p=<count>" header, then one cell per line as
// "<comma-separated indices at level 1>|<count>".
CategoricalDataset read_sparse_binary(std::istream& in);
CategoricalDataset load_sparse_binary(const std::string& path);
void write_sparse_binary(std::ostream& out, const CategoricalDataset& data);

// Dense CSV: header of variable names, one row per observation, with an
// optional trailing "count" column for weighted rows. Writing always emits
// one row per cell plus the count column.
CategoricalDataset read_csv(std::istream& in);
CategoricalDataset load_csv(const std::string& path);
void write_csv(std::ostream& out, const CategoricalDataset& data);

// Dispatches on the first non-empty line: "#p=" means sparse binary.
CategoricalDataset load_dataset(const std::string& path);

}  // namespace bdmpl
