// bdmpl: command-line driver for simulation, sampling, estimation, the
// hill-climbing baseline, centrality analysis and the simulation benchmark.
//
// Every command writes <out>.manifest.json before its other outputs and
// rewrites it with the end timestamp once they are complete. Errors go to
// stderr as a single JSON line and the exit code is nonzero.

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bdmpl/analysis.hpp"
#include "bdmpl/data.hpp"
#include "bdmpl/estimate.hpp"
#include "bdmpl/graph.hpp"
#include "bdmpl/hillclimb.hpp"
#include "bdmpl/rng.hpp"
#include "bdmpl/sampler.hpp"
#include "bdmpl/simbench.hpp"
#include "bdmpl/trace.hpp"

#ifndef BDMPL_VERSION
#define BDMPL_VERSION "unknown"
#endif

using json = nlohmann::json;
using namespace bdmpl;

namespace {

constexpr const char* kEnvPrefix = "BDMPL_";

// ---------------------------------------------------------------------------
// JSON configuration files

// Accepts three layouts:
//   {"iters": 1000, ...}                      keys for the active subcommand
//   {"sample": {"iters": 1000}, ...}          one object per subcommand
//   a run manifest                            {"command": ..., "config": {...}}
class JsonConfig : public CLI::Config {
 public:
  JsonConfig(std::set<std::string> subcommands, std::string active)
      : subcommands_(std::move(subcommands)), active_(std::move(active)) {}

  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}"; }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json root;
    try {
      root = json::parse(input);
    } catch (const json::exception& e) {
      throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
    std::vector<CLI::ConfigItem> items;
    if (root.contains("command") && root.contains("config") && root["config"].is_object()) {
      add_section(items, root["command"].get<std::string>(), root["config"]);
      return items;
    }
    for (const auto& [key, value] : root.items()) {
      if (subcommands_.count(key) && value.is_object()) {
        add_section(items, key, value);
      } else {
        json single = json::object();
        single[key] = value;
        add_section(items, active_, single);
      }
    }
    return items;
  }

 private:
  static std::string scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static void add_section(std::vector<CLI::ConfigItem>& items, const std::string& section, const json& object) {
    for (const auto& [key, value] : object.items()) {
      if (value.is_null()) continue;
      CLI::ConfigItem item;
      if (!section.empty()) item.parents = {section};
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
  }

  std::set<std::string> subcommands_;
  std::string active_;
};

// ---------------------------------------------------------------------------
// Manifest

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw std::runtime_error("sha256 init failed");
  std::vector<char> buffer(1 << 16);
  while (in) {
    in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buffer.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &length);
  std::ostringstream hex;
  for (unsigned int k = 0; k < length; ++k) hex << std::hex << std::setw(2) << std::setfill('0') << int{digest[k]};
  return hex.str();
}

bool is_flag(const CLI::Option* opt) { return opt->get_expected_max() == 0; }

// Merged configuration of a subcommand: every option's final value, whether
// it came from a flag, the config file, the environment or the default.
json config_echo(const CLI::App* sub) {
  json out = json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "config") continue;
    if (is_flag(opt)) {
      out[name] = opt->count() > 0 ? "true" : "false";
      continue;
    }
    std::string value;
    if (opt->count() > 0) {
      const auto& results = opt->results();
      for (std::size_t k = 0; k < results.size(); ++k) value += (k ? "," : "") + results[k];
    } else {
      value = opt->get_default_str();
    }
    if (!value.empty()) out[name] = value;
  }
  return out;
}

class Run {
 public:
  Run(const CLI::App* sub, std::string prefix, std::uint64_t seed, std::vector<std::string> inputs)
      : prefix_(std::move(prefix)) {
    manifest_["command"] = sub->get_name();
    manifest_["version"] = BDMPL_VERSION;
    manifest_["seed"] = seed;
    manifest_["config"] = config_echo(sub);
    json digests = json::array();
    for (const auto& path : inputs) digests.push_back({{"path", path}, {"sha256", sha256_file(path)}});
    manifest_["inputs"] = digests;
    manifest_["started"] = utc_timestamp();
    manifest_["finished"] = nullptr;
    manifest_["outputs"] = json::array();
    write_manifest();
  }

  std::string path(const std::string& suffix) const { return prefix_ + suffix; }

  // Writes one output file through `fill`, failing loudly if the stream
  // cannot be opened or goes bad.
  void write(const std::string& suffix, const std::function<void(std::ostream&)>& fill,
             std::ios::openmode mode = std::ios::out) {
    const std::string p = path(suffix);
    std::ofstream out(p, mode | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + p + "'");
    fill(out);
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + p + "'");
    manifest_["outputs"].push_back(p);
  }

  json& extra() { return manifest_["results"]; }

  void finish() {
    manifest_["finished"] = utc_timestamp();
    write_manifest();
  }

 private:
  void write_manifest() const {
    const std::string p = prefix_ + ".manifest.json";
    std::ofstream out(p, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + p + "'");
    out << manifest_.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed for '" + p + "'");
  }

  std::string prefix_;
  json manifest_;
};

// ---------------------------------------------------------------------------
// Commands

struct SimulateArgs {
  std::string kind = "random";
  std::size_t p = 10;
  double beta = 0.4;
  std::size_t attachment = 1;
  std::size_t components = 0;
  std::size_t n = 1000;
  double wmin = 0.5;
  double wmax = 1.0;
  std::size_t burnin_sweeps = 1000;
  std::size_t thinning = 10;
  std::size_t sparse_cells = 0;
  std::uint64_t total = 0;
  std::string format = "csv";
  std::uint64_t seed = 1;
  std::string out = "simulate";
};

void cmd_simulate(const CLI::App* sub, const SimulateArgs& a) {
  Run run(sub, a.out, a.seed, {});
  CategoricalDataset data;
  if (a.sparse_cells > 0) {
    data = gen_sparse_table(a.p, a.sparse_cells, a.total > 0 ? a.total : a.n, a.seed);
  } else {
    GraphSpec spec{parse_graph_kind(a.kind), a.p, a.beta, a.attachment, a.components};
    const UndirectedGraph g = gen_graph(spec, a.seed);
    const MrfModel model = random_mrf(g, a.wmin, a.wmax, a.seed);
    data = gen_data(model, a.n, a.seed, GibbsOptions{a.burnin_sweeps, a.thinning});
    run.write(".graph.txt", [&](std::ostream& o) { write_edge_list(o, g); });
    run.write(".weights.csv", [&](std::ostream& o) {
      o << "i,j,weight\n";
      const auto edges = g.edges();
      for (std::size_t k = 0; k < edges.size(); ++k)
        o << edges[k].i << ',' << edges[k].j << ',' << format_real(model.weights[k]) << '\n';
    });
  }
  if (a.format == "sparse") {
    run.write(".data.txt", [&](std::ostream& o) { write_sparse_binary(o, data); });
  } else {
    run.write(".data.csv", [&](std::ostream& o) { write_csv(o, data); });
  }
  run.extra() = {{"variables", data.variable_count()}, {"cells", data.cell_count()}, {"samples", data.sample_count()}};
  run.finish();
}

struct SampleArgs {
  std::string data;
  std::size_t iters = 100000;
  std::size_t burnin = 60000;
  double beta = 0.5;
  double alpha = 0.5;
  std::size_t n0 = 0;
  int threads = 1;
  std::uint64_t seed = 1;
  std::string start = "empty";
  std::string trace_format = "csv";
  std::size_t cache = std::size_t{1} << 20;
  std::size_t log_every = 0;
  std::string out = "sample";
};

UndirectedGraph start_graph(const std::string& start, std::size_t p, double beta, std::uint64_t seed) {
  if (start == "empty") return UndirectedGraph(p);
  if (start == "full") return UndirectedGraph::complete(p);
  if (start == "prior") {
    RandomStream rng = root_stream(seed).substream("start");
    UndirectedGraph g(p);
    for (std::size_t idx = 0; idx < pair_count(p); ++idx)
      if (rng.bernoulli(beta)) g.add_edge(edge_from_index(idx, p));
    return g;
  }
  UndirectedGraph g = load_edge_list(start);
  if (g.vertex_count() != p) throw std::runtime_error("start graph has " + std::to_string(g.vertex_count()) +
                                                      " vertices, data has " + std::to_string(p));
  return g;
}

bool is_start_keyword(const std::string& s) { return s == "empty" || s == "full" || s == "prior"; }

void cmd_sample(const CLI::App* sub, const SampleArgs& a) {
  std::vector<std::string> inputs{a.data};
  if (!is_start_keyword(a.start)) inputs.push_back(a.start);
  Run run(sub, a.out, a.seed, inputs);
  const CategoricalDataset data = load_dataset(a.data);

  SamplerConfig config;
  config.iterations = a.iters;
  config.burnin = a.burnin;
  config.prior = GraphPrior(a.beta);
  config.hyper = DirichletHyper(a.alpha);
  config.seed = a.seed;
  config.multi_edges = a.n0;
  config.threads = a.threads;
  config.cache_capacity = a.cache;
  config.initial = start_graph(a.start, data.variable_count(), a.beta, a.seed);

  const auto started = std::chrono::steady_clock::now();
  ProgressCallback progress;
  if (a.log_every > 0) {
    progress = [&](std::size_t m, const RateEngine& engine) {
      if (m % a.log_every != 0) return;
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
      std::cerr << "iteration " << m << " edges " << engine.graph().edge_count() << " log_posterior "
                << format_real(engine.log_posterior()) << " elapsed_s " << format_real(secs) << '\n';
    };
  }
  const ChainTrace trace = bdmpl::run(data, config, progress);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  if (a.trace_format == "binary") {
    run.write(".trace.bin", [&](std::ostream& o) { write_trace_binary(o, trace); }, std::ios::out | std::ios::binary);
  } else {
    run.write(".trace.csv", [&](std::ostream& o) { write_trace_csv(o, trace); });
  }
  run.write(".final.txt", [&](std::ostream& o) { write_edge_list(o, trace.final_graph()); });
  run.extra() = {{"iterations", trace.iteration_count()},
                 {"final_edges", trace.final_graph().edge_count()},
                 {"seconds", seconds}};
  run.finish();
}

struct EstimateArgs {
  std::string trace;
  double threshold = 0.5;
  bool include_burnin = false;
  bool graph_posterior = false;
  std::string out = "estimate";
};

void cmd_estimate(const CLI::App* sub, const EstimateArgs& a) {
  Run run(sub, a.out, 0, {a.trace});
  const ChainTrace trace = load_trace(a.trace);
  const EdgeProbMatrix probs = edge_inclusion_probs(trace, !a.include_burnin);
  const UndirectedGraph median = median_graph(probs, a.threshold);
  run.write(".edge_probs.csv", [&](std::ostream& o) { write_edge_probs_csv(o, probs); });
  run.write(".matrix.csv", [&](std::ostream& o) { write_dense_matrix_csv(o, probs); });
  run.write(".median.txt", [&](std::ostream& o) { write_edge_list(o, median); });
  run.write(".convergence.csv", [&](std::ostream& o) { write_convergence_csv(o, convergence_trace(trace)); });
  if (a.graph_posterior) {
    const auto post = graph_posterior(trace, !a.include_burnin);
    std::vector<std::pair<double, GraphKey>> sorted;
    for (const auto& [key, pr] : post) sorted.emplace_back(pr, key);
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
    run.write(".graph_posterior.csv", [&](std::ostream& o) {
      o << "probability,edges\n";
      for (const auto& [pr, key] : sorted) {
        o << format_real(pr) << ',';
        for (std::size_t k = 0; k < key.size(); ++k) {
          const Edge e = edge_from_index(key[k], trace.vertex_count());
          o << (k ? " " : "") << e.i << '-' << e.j;
        }
        o << '\n';
      }
    });
  }
  run.extra() = {{"median_edges", median.edge_count()}, {"expected_edges", probs.total()}};
  run.finish();
}

struct HcArgs {
  std::string data;
  double alpha = 0.5;
  double beta = 0.5;
  bool no_prior = false;
  int threads = 1;
  std::string out = "hc";
};

void cmd_hc(const CLI::App* sub, const HcArgs& a) {
  Run run(sub, a.out, 0, {a.data});
  const CategoricalDataset data = load_dataset(a.data);
  HcOptions opts;
  opts.hyper = DirichletHyper(a.alpha);
  opts.prior = a.no_prior ? std::nullopt : std::optional<GraphPrior>(GraphPrior(a.beta));
  opts.threads = a.threads;
  const HcResult result = hc_search(data, opts);
  run.write(".or.txt", [&](std::ostream& o) { write_edge_list(o, result.or_graph); });
  run.write(".and.txt", [&](std::ostream& o) { write_edge_list(o, result.and_graph); });
  run.write(".neighborhoods.csv", [&](std::ostream& o) {
    o << "vertex,objective,neighbors\n";
    for (std::size_t v = 0; v < result.neighborhoods.size(); ++v) {
      o << v << ',' << format_real(result.local_scores[v]) << ',';
      const auto& nbd = result.neighborhoods[v];
      for (std::size_t k = 0; k < nbd.size(); ++k) o << (k ? " " : "") << nbd[k];
      o << '\n';
    }
  });
  run.extra() = {{"or_edges", result.or_graph.edge_count()}, {"and_edges", result.and_graph.edge_count()}};
  run.finish();
}

struct CentralityArgs {
  std::string graph;
  std::string labels;
  std::size_t top = 10;
  int threads = 1;
  std::string out = "centrality";
};

std::vector<std::string> read_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::vector<std::string> labels;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_of(",\"") != std::string::npos)
      throw std::runtime_error("label '" + line + "' contains a comma or quote");
    labels.push_back(line);
  }
  return labels;
}

void cmd_centrality(const CLI::App* sub, const CentralityArgs& a) {
  std::vector<std::string> inputs{a.graph};
  if (!a.labels.empty()) inputs.push_back(a.labels);
  Run run(sub, a.out, 0, inputs);
  const UndirectedGraph g = load_edge_list(a.graph);
  std::vector<std::string> labels;
  if (!a.labels.empty()) labels = read_labels(a.labels);
  const CentralityReport report = centrality(g, labels, a.threads);
  const std::size_t k = std::min(a.top, g.vertex_count());
  run.write(".centrality.csv", [&](std::ostream& o) { write_centrality_csv(o, report); });
  run.write(".top.csv", [&](std::ostream& o) { write_top_k_csv(o, report, k); });
  run.extra() = {{"pagerank_converged", report.pagerank_converged}};
  run.finish();
  if (!report.pagerank_converged) std::cerr << "warning: pagerank did not converge\n";
}

struct MetricsArgs {
  std::string truth;
  std::string estimate;
  std::string probs;
  std::string out = "metrics";
};

void cmd_metrics(const CLI::App* sub, const MetricsArgs& a) {
  std::vector<std::string> inputs{a.truth, a.estimate};
  if (!a.probs.empty()) inputs.push_back(a.probs);
  Run run(sub, a.out, 0, inputs);
  const UndirectedGraph truth = load_edge_list(a.truth);
  const UndirectedGraph est = load_edge_list(a.estimate);
  const Confusion c = confusion(truth, est);
  json result = {{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"tn", c.tn},
                 {"f1", f1_score(truth, est)}, {"shd", shd(truth, est)}};
  std::optional<RocCurve> roc;
  if (!a.probs.empty()) {
    std::ifstream in(a.probs);
    if (!in) throw std::runtime_error("cannot read '" + a.probs + "'");
    roc = roc_points(read_edge_probs_csv(in), truth);
    result["auc"] = roc->auc;
    result["roc_degenerate"] = roc->degenerate;
  }
  run.write(".metrics.csv", [&](std::ostream& o) {
    o << "metric,value\n";
    o << "tp," << c.tp << "\nfp," << c.fp << "\nfn," << c.fn << "\ntn," << c.tn << '\n';
    o << "f1," << format_real(result["f1"].get<double>()) << "\nshd," << result["shd"].get<std::size_t>() << '\n';
    if (roc) o << "auc," << format_real(roc->auc) << '\n';
  });
  if (roc) {
    run.write(".roc.csv", [&](std::ostream& o) {
      o << "fpr,tpr\n";
      for (const auto& [x, y] : roc->points) o << format_real(x) << ',' << format_real(y) << '\n';
    });
  }
  run.extra() = result;
  run.finish();
  std::cout << result.dump() << '\n';
}

struct BenchArgs {
  std::vector<std::string> kinds{"random", "cluster", "scalefree"};
  std::vector<std::size_t> ps{10, 20};
  std::vector<std::size_t> ns{200, 500, 1000};
  std::size_t reps = 50;
  std::size_t iters = 100000;
  std::size_t burnin = 60000;
  double wmin = 0.5;
  double wmax = 1.0;
  double alpha = 0.5;
  double beta = 0.5;
  std::size_t burnin_sweeps = 1000;
  std::size_t thinning = 10;
  std::uint64_t seed = 1;
  int threads = 1;
  bool quiet = false;
  std::string out = "bench";
};

void cmd_bench(const CLI::App* sub, const BenchArgs& a) {
  Run run(sub, a.out, a.seed, {});
  BenchmarkProtocol protocol;
  protocol.kinds.clear();
  for (const auto& k : a.kinds) protocol.kinds.push_back(parse_graph_kind(k));
  protocol.ps = a.ps;
  protocol.ns = a.ns;
  protocol.replicates = a.reps;
  protocol.iterations = a.iters;
  protocol.burnin = a.burnin;
  protocol.weight_min = a.wmin;
  protocol.weight_max = a.wmax;
  protocol.alpha = a.alpha;
  protocol.prior_beta = a.beta;
  protocol.gibbs = GibbsOptions{a.burnin_sweeps, a.thinning};
  protocol.seed = a.seed;
  protocol.threads = a.threads;

  std::size_t done = 0;
  const std::size_t total = protocol.kinds.size() * protocol.ps.size() * protocol.ns.size() * protocol.replicates;
  const auto result = run_benchmark(protocol, [&](const ReplicateResult& r) {
    ++done;
    if (!a.quiet)
      std::cerr << "[" << done << "/" << total << "] " << to_string(r.kind) << " p=" << r.p << " n=" << r.n
                << " rep=" << r.replicate << " f1=" << format_real(r.f1[0]) << '\n';
  });
  run.write(".summary.csv", [&](std::ostream& o) { write_summary_csv(o, result.summary); });
  run.write(".replicates.csv", [&](std::ostream& o) { write_replicates_csv(o, result.replicates); });
  for (GraphKind kind : protocol.kinds)
    for (std::size_t p : protocol.ps)
      for (std::size_t n : protocol.ns) {
        const std::string suffix = ".roc_" + to_string(kind) + "_p" + std::to_string(p) + "_n" + std::to_string(n) + ".csv";
        run.write(suffix, [&](std::ostream& o) { write_roc_csv(o, result.replicates, kind, p, n); });
      }
  run.finish();
}

// ---------------------------------------------------------------------------

void error_line(const std::string& command, const std::string& kind, const std::string& message) {
  std::cerr << json{{"error", kind}, {"command", command}, {"message", message}}.dump() << '\n';
}

std::string upper_snake(std::string name) {
  for (char& c : name) c = c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return name;
}

// Gives every long option of `sub` the environment fallback BDMPL_<NAME>.
void add_env_fallbacks(CLI::App* sub) {
  for (CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name.size() == 1) continue;
    opt->envname(kEnvPrefix + upper_snake(name));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian structure learning for discrete graphical models with a birth-death sampler"};
  app.set_version_flag("--version", BDMPL_VERSION);
  app.require_subcommand(1);
  app.fallthrough();

  const std::set<std::string> names{"simulate", "sample", "estimate", "hc", "centrality", "metrics", "bench"};
  std::string active;
  for (int k = 1; k < argc; ++k)
    if (names.count(argv[k])) {
      active = argv[k];
      break;
    }
  app.config_formatter(std::make_shared<JsonConfig>(names, active));
  app.set_config("--config", "", "JSON configuration file (flat keys, per-command sections, or a run manifest)");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a graph and a binary dataset from a pairwise MRF");
  simulate->add_option("--kind", sim.kind, "Graph kind")->check(CLI::IsMember({"random", "cluster", "scalefree"}))->capture_default_str();
  simulate->add_option("--p", sim.p, "Number of variables")->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--beta", sim.beta, "Edge probability inside a block (random, cluster)")->capture_default_str();
  simulate->add_option("--m", sim.attachment, "Links per new vertex (scalefree)")->capture_default_str();
  simulate->add_option("--components", sim.components, "Number of blocks; 0 uses the kind's default")->capture_default_str();
  simulate->add_option("--n", sim.n, "Sample size")->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--wmin", sim.wmin, "Smallest interaction magnitude")->capture_default_str();
  simulate->add_option("--wmax", sim.wmax, "Largest interaction magnitude")->capture_default_str();
  simulate->add_option("--burnin-sweeps", sim.burnin_sweeps, "Gibbs burn-in sweeps")->capture_default_str();
  simulate->add_option("--thin", sim.thinning, "Gibbs sweeps between samples")->capture_default_str();
  simulate->add_option("--sparse-cells", sim.sparse_cells, "Generate a hyper-sparse table with this many cells instead")->capture_default_str();
  simulate->add_option("--total", sim.total, "Total count of the sparse table (defaults to --n)")->capture_default_str();
  simulate->add_option("--format", sim.format, "Dataset format")->check(CLI::IsMember({"csv", "sparse"}))->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Root seed")->capture_default_str();
  simulate->add_option("--out", sim.out, "Output path prefix")->capture_default_str();

  SampleArgs smp;
  auto* sample = app.add_subcommand("sample", "Run the birth-death chain on a dataset");
  sample->add_option("--data", smp.data, "Dataset (CSV or sparse pattern file)")->required()->check(CLI::ExistingFile);
  sample->add_option("--iters", smp.iters, "Iterations")->check(CLI::PositiveNumber)->capture_default_str();
  sample->add_option("--burnin", smp.burnin, "Burn-in iterations (kept in the trace, flagged)")->capture_default_str();
  sample->add_option("--beta", smp.beta, "Graph prior edge probability")->capture_default_str();
  sample->add_option("--alpha", smp.alpha, "Dirichlet pseudo-count per cell")->capture_default_str();
  sample->add_option("--n0", smp.n0, "Edges toggled per iteration; >= 2 enables multiple-edge mode")->capture_default_str();
  sample->add_option("--threads", smp.threads, "Worker threads for rate updates")->check(CLI::PositiveNumber)->capture_default_str();
  sample->add_option("--seed", smp.seed, "Root seed")->capture_default_str();
  sample->add_option("--start", smp.start, "empty, full, prior, or an edge-list file")->capture_default_str();
  sample->add_option("--trace-format", smp.trace_format, "Trace format")->check(CLI::IsMember({"csv", "binary"}))->capture_default_str();
  sample->add_option("--cache", smp.cache, "Local-score cache entries (0 disables)")->capture_default_str();
  sample->add_option("--log-every", smp.log_every, "Progress line on stderr every k iterations (0: silent)")->capture_default_str();
  sample->add_option("--out", smp.out, "Output path prefix")->capture_default_str();

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "Posterior summaries from a trace");
  estimate->add_option("--trace", est.trace, "Trace file (CSV or binary)")->required()->check(CLI::ExistingFile);
  estimate->add_option("--threshold", est.threshold, "Median-graph threshold")->capture_default_str();
  estimate->add_flag("--include-burnin", est.include_burnin, "Count burn-in iterations in the estimates");
  estimate->add_flag("--graph-posterior", est.graph_posterior, "Also write graph-level posterior probabilities");
  estimate->add_option("--out", est.out, "Output path prefix")->capture_default_str();

  HcArgs hca;
  auto* hc = app.add_subcommand("hc", "Hill-climbing baseline");
  hc->add_option("--data", hca.data, "Dataset")->required()->check(CLI::ExistingFile);
  hc->add_option("--alpha", hca.alpha, "Dirichlet pseudo-count per cell")->capture_default_str();
  hc->add_option("--beta", hca.beta, "Graph prior edge probability")->capture_default_str();
  hc->add_flag("--no-prior", hca.no_prior, "Drop the per-neighbor prior term");
  hc->add_option("--threads", hca.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  hc->add_option("--out", hca.out, "Output path prefix")->capture_default_str();

  CentralityArgs cen;
  auto* cent = app.add_subcommand("centrality", "Centrality measures of a graph");
  cent->add_option("--graph", cen.graph, "Edge-list file")->required()->check(CLI::ExistingFile);
  cent->add_option("--labels", cen.labels, "Vertex labels, one per line")->check(CLI::ExistingFile);
  cent->add_option("--top", cen.top, "Size of the top-k rankings")->check(CLI::PositiveNumber)->capture_default_str();
  cent->add_option("--threads", cen.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  cent->add_option("--out", cen.out, "Output path prefix")->capture_default_str();

  MetricsArgs met;
  auto* metrics = app.add_subcommand("metrics", "Compare an estimated graph with the truth");
  metrics->add_option("--truth", met.truth, "True graph edge list")->required()->check(CLI::ExistingFile);
  metrics->add_option("--estimate", met.estimate, "Estimated graph edge list")->required()->check(CLI::ExistingFile);
  metrics->add_option("--probs", met.probs, "Edge probabilities CSV for the ROC curve")->check(CLI::ExistingFile);
  metrics->add_option("--out", met.out, "Output path prefix")->capture_default_str();

  BenchArgs bch;
  auto* bench = app.add_subcommand("bench", "Simulation benchmark: BDMCMC vs HC(or) vs HC(and)");
  bench->add_option("--kinds", bch.kinds, "Graph kinds")->delimiter(',')->check(CLI::IsMember({"random", "cluster", "scalefree"}))->capture_default_str();
  bench->add_option("--ps", bch.ps, "Variable counts")->delimiter(',')->capture_default_str();
  bench->add_option("--ns", bch.ns, "Sample sizes")->delimiter(',')->capture_default_str();
  bench->add_option("--reps", bch.reps, "Replicates per cell")->check(CLI::PositiveNumber)->capture_default_str();
  bench->add_option("--iters", bch.iters, "Chain iterations")->capture_default_str();
  bench->add_option("--burnin", bch.burnin, "Chain burn-in")->capture_default_str();
  bench->add_option("--wmin", bch.wmin, "Smallest interaction magnitude")->capture_default_str();
  bench->add_option("--wmax", bch.wmax, "Largest interaction magnitude")->capture_default_str();
  bench->add_option("--alpha", bch.alpha, "Dirichlet pseudo-count per cell")->capture_default_str();
  bench->add_option("--beta", bch.beta, "Graph prior edge probability")->capture_default_str();
  bench->add_option("--burnin-sweeps", bch.burnin_sweeps, "Gibbs burn-in sweeps")->capture_default_str();
  bench->add_option("--thin", bch.thinning, "Gibbs sweeps between samples")->capture_default_str();
  bench->add_option("--seed", bch.seed, "Root seed")->capture_default_str();
  bench->add_option("--threads", bch.threads, "Parallel replicate jobs")->check(CLI::PositiveNumber)->capture_default_str();
  bench->add_flag("--quiet", bch.quiet, "No per-replicate progress");
  bench->add_option("--out", bch.out, "Output path prefix")->capture_default_str();

  for (CLI::App* sub : app.get_subcommands({})) add_env_fallbacks(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    error_line(active, "usage", e.what());
    return 2;
  }

  try {
    if (*simulate) cmd_simulate(simulate, sim);
    else if (*sample) cmd_sample(sample, smp);
    else if (*estimate) cmd_estimate(estimate, est);
    else if (*hc) cmd_hc(hc, hca);
    else if (*cent) cmd_centrality(cent, cen);
    else if (*metrics) cmd_metrics(metrics, met);
    else if (*bench) cmd_bench(bench, bch);
  } catch (const std::exception& e) {
    error_line(active, "runtime", e.what());
    return 1;
  }
  return 0;
}
