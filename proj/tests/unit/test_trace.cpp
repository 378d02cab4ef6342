#include <cstdio>
#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "bdmpl/sampler.hpp"
#include "bdmpl/trace.hpp"
#include "support.hpp"

using namespace bdmpl;

namespace {

ChainTrace sample_trace(std::size_t multi) {
  const auto data = testing::mrf_data(8, 200, 0.3, 5);
  SamplerConfig config;
  config.iterations = 120;
  config.burnin = 20;
  config.multi_edges = multi;
  RandomStream rng = root_stream(1);
  config.initial = testing::random_graph(8, 0.3, rng);
  return run(data, config);
}

}  // namespace

TEST_CASE("append maintains jump times and graph") {
  ChainTrace t(UndirectedGraph(3), 0);
  const EdgeDelta birth[] = {{Edge{0, 1}, 1}};
  const EdgeDelta death[] = {{Edge{0, 1}, -1}};
  t.append(0.5, birth);
  t.append(0.25, death);
  CHECK(t.records()[0].jump_time == 0.5);
  CHECK(t.records()[1].jump_time == 0.75);
  CHECK(t.records()[0].edge_count == 0);
  CHECK(t.records()[1].edge_count == 1);
  CHECK(t.final_graph().edge_count() == 0);

  CHECK_THROWS(t.append(0.0, birth));
  CHECK_THROWS(t.append(1.0, death));  // edge absent
}

TEST_CASE("jump times strictly increase in sampled traces") {
  const auto t = sample_trace(0);
  double last = 0.0;
  for (const auto& r : t.records()) {
    CHECK(r.waiting_time > 0.0);
    CHECK(r.jump_time > last);
    last = r.jump_time;
  }
}

TEST_CASE("csv and binary round trips") {
  for (std::size_t multi : {0u, 3u}) {
    const auto t = sample_trace(multi);
    std::stringstream csv;
    write_trace_csv(csv, t);
    CHECK(read_trace_csv(csv) == t);

    std::stringstream bin(std::ios::in | std::ios::out | std::ios::binary);
    write_trace_binary(bin, t);
    CHECK(read_trace_binary(bin) == t);

    const auto dir = std::filesystem::temp_directory_path();
    const auto csv_path = (dir / "bdmpl_trace_test.csv").string();
    const auto bin_path = (dir / "bdmpl_trace_test.bin").string();
    save_trace(csv_path, t, TraceFormat::csv);
    save_trace(bin_path, t, TraceFormat::binary);
    CHECK(load_trace(csv_path) == t);
    CHECK(load_trace(bin_path) == t);
    std::filesystem::remove(csv_path);
    std::filesystem::remove(bin_path);
  }
}

TEST_CASE("csv layout") {
  ChainTrace t(UndirectedGraph(3), 1);
  const EdgeDelta first[] = {{Edge{0, 2}, 1}, {Edge{1, 2}, 1}};
  t.append(0.1, first);
  std::ostringstream out;
  write_trace_csv(out, t);
  const std::string text = out.str();
  CHECK(text.find("iteration,jump_time,waiting_time,delta_edge_i,delta_edge_j,delta_sign,edge_count\n") !=
        std::string::npos);
  CHECK(text.find("1,0.1,0.1,0,2,1,0\n1,0.1,0.1,1,2,1,0\n") != std::string::npos);
}

TEST_CASE("format_real round trips") {
  RandomStream rng = root_stream(9);
  for (int k = 0; k < 1000; ++k) {
    const double x = std::ldexp(rng.uniform(), static_cast<int>(rng.below(200)) - 100);
    CHECK(std::stod(format_real(x)) == x);
  }
  CHECK(format_real(0.75) == "0.75");
}

TEST_CASE("malformed traces are rejected") {
  std::istringstream bad("#p=3\n#burnin=0\n#initial=\niteration,jump_time\n1,x,0.1,0,1,1,0\n");
  CHECK_THROWS(read_trace_csv(bad));
  std::istringstream junk("NOTATRACE");
  CHECK_THROWS(read_trace_binary(junk));
}
