#include <algorithm>
#include <map>
#include <sstream>

#include "doctest.h"
#include "bdmpl/data.hpp"
#include "support.hpp"

using namespace bdmpl;

namespace {

CategoricalDataset uniform4() { return from_rows({{0, 0}, {0, 1}, {1, 0}, {1, 1}}); }

// Brute-force n_{i,kl} straight from expanded rows.
std::map<std::pair<std::vector<Level>, int>, std::uint64_t> brute_counts(const CategoricalDataset& data, Vertex i,
                                                                         const std::vector<Vertex>& nbd) {
  std::map<std::pair<std::vector<Level>, int>, std::uint64_t> out;
  for (const auto& row : data.expand_rows()) {
    std::vector<Level> config;
    for (Vertex v : nbd) config.push_back(row[static_cast<std::size_t>(v)]);
    ++out[{config, row[static_cast<std::size_t>(i)]}];
  }
  return out;
}

}  // namespace

TEST_CASE("from_rows counts multiplicities") {
  const auto d = from_rows({{0, 1}, {0, 1}, {1, 0}});
  REQUIRE(d.cell_count() == 2);
  CHECK(d.sample_count() == 3);
  CHECK(d.cell_levels(0) == std::vector<Level>{0, 1});
  CHECK(d.counts()[0] == 2);
  CHECK(d.cell_levels(1) == std::vector<Level>{1, 0});
  CHECK(d.counts()[1] == 1);

  const auto single = from_rows({{2, 0, 1}});
  CHECK(single.cell_count() == 1);
  CHECK(single.counts()[0] == 1);
  CHECK(single.cardinality(0) == 3);
  CHECK(single.cardinality(1) == 2);

  CHECK_THROWS(from_rows({}));
  CHECK_THROWS(from_rows({{0, 1}, {1}}));
  CHECK_THROWS(from_rows({{0, -1}}));
}

TEST_CASE("dataset validation") {
  CHECK_THROWS(CategoricalDataset({1, 2}, {Cell{{0, 0}, 1}}));
  CHECK_THROWS(CategoricalDataset({2, 2}, {Cell{{0, 2}, 1}}));
  CHECK_THROWS(CategoricalDataset({2, 2}, {Cell{{0, 1}, 0}}));
  CHECK_THROWS(CategoricalDataset({2, 2}, {Cell{{0, 1}, 1}, Cell{{0, 1}, 3}}));
  CHECK_THROWS(CategoricalDataset({2, 2}, {Cell{{0}, 1}}));
}

TEST_CASE("count_config examples") {
  const auto d = uniform4();
  const Vertex nbd1[] = {1};
  const auto cc = count_config(d, 0, nbd1);
  REQUIRE(cc.configuration_count() == 2);
  for (std::size_t l = 0; l < 2; ++l)
    for (int k = 0; k < 2; ++k) CHECK(cc.count(l, k) == 1);

  const auto marg = count_config(d, 1, {});
  REQUIRE(marg.configuration_count() == 1);
  CHECK(marg.count(0, 0) == 2);
  CHECK(marg.count(0, 1) == 2);

  const auto three = from_rows({{0, 0}, {0, 0}, {1, 1}});
  const auto c3 = count_config(three, 0, nbd1);
  REQUIRE(c3.configuration_count() == 2);
  const Level zero[] = {0}, one[] = {1};
  const auto l0 = c3.find(zero), l1 = c3.find(one);
  REQUIRE(l0.has_value());
  REQUIRE(l1.has_value());
  CHECK(c3.count(*l0, 0) == 2);
  CHECK(c3.count(*l0, 1) == 0);
  CHECK(c3.count(*l1, 1) == 1);
  CHECK(c3.count(*l1, 0) == 0);

  const Vertex self[] = {0};
  CHECK_THROWS_AS(count_config(d, 0, self), std::invalid_argument);
  const Vertex out_of_range[] = {5};
  CHECK_THROWS_AS(count_config(d, 0, out_of_range), std::invalid_argument);
  CHECK_THROWS_AS(count_config(d, 4, nbd1), std::invalid_argument);
}

TEST_CASE("count_config agrees with brute force and marginalizes consistently") {
  RandomStream rng = root_stream(21);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t p = 3 + rng.below(5);
    const int levels = 2 + static_cast<int>(rng.below(3));
    const auto data = testing::noise_data(p, 20 + rng.below(80), levels, rng);
    const auto i = static_cast<Vertex>(rng.below(p));
    std::vector<Vertex> nbd;
    for (Vertex v = 0; v < static_cast<Vertex>(p); ++v)
      if (v != i && rng.bernoulli(0.5)) nbd.push_back(v);

    const auto cc = count_config(data, i, nbd);
    const auto brute = brute_counts(data, i, nbd);
    std::uint64_t total = 0;
    for (std::size_t l = 0; l < cc.configuration_count(); ++l) {
      std::uint64_t row = 0;
      for (int k = 0; k < levels; ++k) {
        const auto it = brute.find({cc.configurations[l], k});
        CHECK(cc.count(l, k) == (it == brute.end() ? 0 : it->second));
        row += cc.count(l, k);
      }
      CHECK(row == cc.marginal(l));
      CHECK(row > 0);
      total += row;
    }
    CHECK(total == data.sample_count());

    // Summing the full table over the last neighbor gives the reduced table.
    if (!nbd.empty()) {
      std::vector<Vertex> reduced(nbd.begin(), nbd.end() - 1);
      const auto small = count_config(data, i, reduced);
      std::map<std::pair<std::vector<Level>, int>, std::uint64_t> folded;
      for (std::size_t l = 0; l < cc.configuration_count(); ++l) {
        std::vector<Level> key(cc.configurations[l].begin(), cc.configurations[l].end() - 1);
        for (int k = 0; k < levels; ++k) folded[{key, k}] += cc.count(l, k);
      }
      for (std::size_t l = 0; l < small.configuration_count(); ++l)
        for (int k = 0; k < levels; ++k) CHECK(small.count(l, k) == folded[{small.configurations[l], k}]);
    }
  }
}

TEST_CASE("rows round trip as a multiset") {
  RandomStream rng = root_stream(5);
  std::vector<std::vector<int>> rows(60, std::vector<int>(4));
  for (auto& r : rows)
    for (auto& x : r) x = static_cast<int>(rng.below(3));
  const auto d = from_rows(rows);
  std::vector<std::vector<int>> back;
  for (const auto& r : d.expand_rows()) back.emplace_back(r.begin(), r.end());
  std::sort(rows.begin(), rows.end());
  std::sort(back.begin(), back.end());
  CHECK(rows == back);
}

TEST_CASE("sparse binary format") {
  std::istringstream in("#p=20\n3,17|12\n|58929\n");
  const auto d = read_sparse_binary(in);
  CHECK(d.variable_count() == 20);
  CHECK(d.sample_count() == 12 + 58929);
  REQUIRE(d.cell_count() == 2);
  // Cells are sorted: the all-zero configuration comes first.
  CHECK(d.counts()[0] == 58929);
  const auto levels = d.cell_levels(1);
  for (std::size_t v = 0; v < 20; ++v) CHECK(levels[v] == (v == 3 || v == 17 ? 1 : 0));
  CHECK(d.counts()[1] == 12);

  std::stringstream out;
  write_sparse_binary(out, d);
  const auto again = read_sparse_binary(out);
  CHECK(again.sample_count() == d.sample_count());
  CHECK(again.cell_levels(1) == d.cell_levels(1));

  for (const char* bad : {"#p=4\n1,2|3\n2,1|4\n", "#p=4\n1|0\n", "#p=4\n4|1\n", "#p=4\n1,x|2\n", "1|2\n",
                          "#p=4\n1|-3\n", "#p=4\n1,1|2\n"}) {
    std::istringstream s(bad);
    CHECK_THROWS(read_sparse_binary(s));
  }
}

TEST_CASE("csv format") {
  std::istringstream plain("a,b,c\n0,1,2\n0,1,2\n1,0,0\n");
  const auto d = read_csv(plain);
  CHECK(d.variable_count() == 3);
  CHECK(d.sample_count() == 3);
  CHECK(d.name(2) == "c");

  std::istringstream weighted("a,b,count\n0,1,5\n1,1,2\n");
  const auto w = read_csv(weighted);
  CHECK(w.variable_count() == 2);
  CHECK(w.sample_count() == 7);

  std::stringstream out;
  write_csv(out, d);
  const auto back = read_csv(out);
  CHECK(back.sample_count() == d.sample_count());
  CHECK(back.cell_count() == d.cell_count());
  CHECK(back.names() == d.names());

  std::istringstream ragged("a,b\n0,1\n1\n");
  CHECK_THROWS(read_csv(ragged));
}
