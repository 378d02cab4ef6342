#include "bdmpl/simbench.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <stdexcept>
#include <tuple>

#include "bdmpl/hillclimb.hpp"
#include "bdmpl/sampler.hpp"

namespace bdmpl {

std::string to_string(GraphKind kind) {
  switch (kind) {
    case GraphKind::random: return "random";
    case GraphKind::cluster: return "cluster";
    case GraphKind::scalefree: return "scalefree";
  }
  return "?";
}

GraphKind parse_graph_kind(const std::string& name) {
  if (name == "random") return GraphKind::random;
  if (name == "cluster") return GraphKind::cluster;
  if (name == "scalefree" || name == "scale-free") return GraphKind::scalefree;
  throw std::invalid_argument("unknown graph kind '" + name + "'");
}

std::string to_string(Method method) {
  switch (method) {
    case Method::bdmcmc: return "BDMCMC";
    case Method::hc_or: return "HC(or)";
    case Method::hc_and: return "HC(and)";
  }
  return "?";
}

std::size_t GraphSpec::block_count() const {
  if (components != 0) return components;
  return kind == GraphKind::cluster ? 2 : 1;
}

void GraphSpec::validate() const {
  if (p == 0) throw std::invalid_argument("graph spec: p must be positive");
  if (block_count() > p) throw std::invalid_argument("graph spec: more components than vertices");
  if (kind != GraphKind::scalefree && !(beta >= 0.0 && beta <= 1.0))
    throw std::invalid_argument("graph spec: beta must lie in [0,1]");
  if (kind == GraphKind::scalefree && attachment == 0)
    throw std::invalid_argument("graph spec: attachment count must be positive");
}

namespace {

void barabasi_albert(UndirectedGraph& g, Vertex first, std::size_t size, std::size_t m, RandomStream& rng) {
  if (size < 2) return;
  // Each vertex appears in `ends` once per incident edge, so a uniform draw
  // from `ends` is a draw proportional to degree.
  std::vector<Vertex> ends;
  g.add_edge(Edge{first, first + 1});
  ends.push_back(first);
  ends.push_back(first + 1);
  for (std::size_t k = 2; k < size; ++k) {
    const Vertex v = first + static_cast<Vertex>(k);
    const std::size_t links = std::min(m, k);
    std::vector<Vertex> targets;
    while (targets.size() < links) {
      const Vertex t = ends[rng.below(ends.size())];
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
    }
    for (Vertex t : targets) {
      g.add_edge(make_edge(v, t));
      ends.push_back(v);
      ends.push_back(t);
    }
  }
}

}  // namespace

UndirectedGraph gen_graph(const GraphSpec& spec, std::uint64_t seed) {
  spec.validate();
  RandomStream rng = root_stream(seed).substream("graph");
  UndirectedGraph g(spec.p);
  const std::size_t blocks = spec.block_count();
  std::size_t begin = 0;
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t size = spec.p / blocks + (b < spec.p % blocks ? 1 : 0);
    if (spec.kind == GraphKind::scalefree) {
      barabasi_albert(g, static_cast<Vertex>(begin), size, spec.attachment, rng);
    } else {
      for (std::size_t i = begin; i < begin + size; ++i)
        for (std::size_t j = i + 1; j < begin + size; ++j)
          if (rng.bernoulli(spec.beta)) g.add_edge(Edge{static_cast<Vertex>(i), static_cast<Vertex>(j)});
    }
    begin += size;
  }
  return g;
}

UndirectedGraph random_graph_with_edges(std::size_t p, std::size_t edges, RandomStream& rng) {
  const std::size_t pairs = pair_count(p);
  if (edges > pairs) throw std::invalid_argument("random_graph_with_edges: too many edges");
  std::vector<std::size_t> order(pairs);
  std::iota(order.begin(), order.end(), std::size_t{0});
  UndirectedGraph g(p);
  for (std::size_t k = 0; k < edges; ++k) {
    const std::size_t pick = k + rng.below(pairs - k);
    std::swap(order[k], order[pick]);
    g.add_edge(edge_from_index(order[k], p));
  }
  return g;
}

void MrfModel::validate() const {
  if (weights.size() != graph.edge_count()) throw std::invalid_argument("mrf: one weight per edge required");
  if (fields.size() != graph.vertex_count()) throw std::invalid_argument("mrf: one field per vertex required");
  for (double w : weights)
    if (!std::isfinite(w)) throw std::invalid_argument("mrf: non-finite weight");
  for (double h : fields)
    if (!std::isfinite(h)) throw std::invalid_argument("mrf: non-finite field");
}

MrfModel random_mrf(const UndirectedGraph& graph, double weight_min, double weight_max, std::uint64_t seed) {
  if (!(weight_min >= 0.0 && weight_max >= weight_min)) throw std::invalid_argument("mrf: bad weight range");
  RandomStream rng = root_stream(seed).substream("weights");
  MrfModel model{graph, {}, std::vector<double>(graph.vertex_count(), 0.0)};
  model.weights.reserve(graph.edge_count());
  for (std::size_t k = 0; k < graph.edge_count(); ++k) {
    const double magnitude = rng.uniform(weight_min, weight_max);
    model.weights.push_back(rng.bernoulli(0.5) ? magnitude : -magnitude);
  }
  return model;
}

CategoricalDataset gen_data(const MrfModel& model, std::size_t n, std::uint64_t seed, const GibbsOptions& gibbs) {
  model.validate();
  if (n == 0) throw std::invalid_argument("gen_data: n must be positive");
  if (gibbs.thinning == 0) throw std::invalid_argument("gen_data: thinning must be positive");
  const std::size_t p = model.graph.vertex_count();

  std::vector<std::vector<std::pair<std::size_t, double>>> coupling(p);
  const auto edges = model.graph.edges();
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto i = static_cast<std::size_t>(edges[k].i);
    const auto j = static_cast<std::size_t>(edges[k].j);
    coupling[i].emplace_back(j, model.weights[k]);
    coupling[j].emplace_back(i, model.weights[k]);
  }

  RandomStream rng = root_stream(seed).substream("gibbs");
  std::vector<int> spin(p);
  for (auto& s : spin) s = rng.bernoulli(0.5) ? 1 : -1;
  auto sweep = [&] {
    for (std::size_t v = 0; v < p; ++v) {
      double h = model.fields[v];
      for (const auto& [u, w] : coupling[v]) h += w * spin[u];
      const double prob_up = 1.0 / (1.0 + std::exp(-2.0 * h));
      spin[v] = rng.uniform() < prob_up ? 1 : -1;
    }
  };
  for (std::size_t s = 0; s < gibbs.burnin_sweeps; ++s) sweep();

  std::vector<std::vector<int>> rows;
  rows.reserve(n);
  for (std::size_t d = 0; d < n; ++d) {
    for (std::size_t s = 0; s < gibbs.thinning; ++s) sweep();
    std::vector<int> row(p);
    for (std::size_t v = 0; v < p; ++v) row[v] = spin[v] > 0 ? 1 : 0;
    rows.push_back(std::move(row));
  }
  return from_rows(rows, std::vector<int>(p, 2));
}

CategoricalDataset gen_sparse_table(std::size_t p, std::size_t cells, std::uint64_t total, std::uint64_t seed) {
  if (p < 2 || cells == 0) throw std::invalid_argument("gen_sparse_table: need p >= 2 and at least one cell");
  RandomStream rng = root_stream(seed).substream("sparse-table");

  // Latent structure: a sparse random graph plus a popularity weight per
  // variable so that some variables are active far more often than others.
  GraphSpec latent_spec{GraphKind::random, p, std::min(1.0, 6.0 / static_cast<double>(p)), 1, 1};
  const UndirectedGraph latent = gen_graph(latent_spec, rng());
  std::vector<double> popularity(p);
  for (std::size_t v = 0; v < p; ++v) popularity[v] = 1.0 / std::pow(static_cast<double>(v % 50) + 1.0, 0.8);
  std::vector<double> cumulative(p);
  std::partial_sum(popularity.begin(), popularity.end(), cumulative.begin());
  auto draw_popular = [&] {
    const double target = rng.uniform() * cumulative.back();
    return static_cast<Vertex>(std::upper_bound(cumulative.begin(), cumulative.end(), target) - cumulative.begin());
  };

  std::set<std::vector<Level>> seen;
  std::vector<Cell> out;
  out.reserve(cells);
  seen.insert(std::vector<Level>(p, 0));
  std::uint64_t used = 0;
  const std::size_t max_attempts = cells * 50;
  for (std::size_t attempt = 0; out.size() + 1 < cells && attempt < max_attempts; ++attempt) {
    std::vector<Level> levels(p, 0);
    Vertex v = draw_popular();
    levels[static_cast<std::size_t>(v)] = 1;
    std::size_t active = 1;
    while (active < p && rng.bernoulli(0.55)) {
      const auto& nbrs = latent.neighbors(v);
      if (!nbrs.empty() && rng.bernoulli(0.7)) v = nbrs[rng.below(nbrs.size())];
      else v = draw_popular();
      if (!levels[static_cast<std::size_t>(v)]) {
        levels[static_cast<std::size_t>(v)] = 1;
        ++active;
      }
    }
    if (!seen.insert(levels).second) continue;
    // Heavy-tailed count: Pareto with shape 1.5, floored at 1.
    const double u = 1.0 - rng.uniform();
    const auto count = static_cast<std::uint64_t>(std::floor(std::pow(u, -1.0 / 1.5)));
    out.push_back(Cell{std::move(levels), std::max<std::uint64_t>(count, 1)});
    used += out.back().count;
  }
  const std::uint64_t zero_count = total > used ? total - used : 1;
  out.push_back(Cell{std::vector<Level>(p, 0), zero_count});
  return CategoricalDataset(std::vector<int>(p, 2), std::move(out));
}

Confusion confusion(const UndirectedGraph& truth, const UndirectedGraph& estimate) {
  if (truth.vertex_count() != estimate.vertex_count()) throw std::invalid_argument("confusion: dimension mismatch");
  const auto p = static_cast<Vertex>(truth.vertex_count());
  Confusion c;
  for (Vertex i = 0; i < p; ++i)
    for (Vertex j = i + 1; j < p; ++j) {
      const bool t = truth.has_edge(i, j);
      const bool e = estimate.has_edge(i, j);
      if (t && e) ++c.tp;
      else if (!t && e) ++c.fp;
      else if (t && !e) ++c.fn;
      else ++c.tn;
    }
  return c;
}

double f1_score(const UndirectedGraph& truth, const UndirectedGraph& estimate) {
  const Confusion c = confusion(truth, estimate);
  const std::size_t denom = 2 * c.tp + c.fp + c.fn;
  if (denom == 0) return 1.0;
  return 2.0 * static_cast<double>(c.tp) / static_cast<double>(denom);
}

std::size_t shd(const UndirectedGraph& truth, const UndirectedGraph& estimate) {
  const Confusion c = confusion(truth, estimate);
  return c.fp + c.fn;
}

RocCurve roc_points(const EdgeProbMatrix& probs, const UndirectedGraph& truth) {
  const std::size_t p = truth.vertex_count();
  if (probs.vertex_count() != p) throw std::invalid_argument("roc_points: dimension mismatch");
  const std::size_t pairs = pair_count(p);
  std::vector<std::pair<double, bool>> scored(pairs);
  std::size_t positives = 0;
  for (std::size_t idx = 0; idx < pairs; ++idx) {
    const bool t = truth.has_edge(edge_from_index(idx, p));
    scored[idx] = {probs.at(idx), t};
    positives += t ? 1 : 0;
  }
  const std::size_t negatives = pairs - positives;
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

  RocCurve curve;
  curve.degenerate = positives == 0 || negatives == 0;
  auto rate = [](std::size_t k, std::size_t total) {
    return total == 0 ? 0.0 : static_cast<double>(k) / static_cast<double>(total);
  };
  curve.points.emplace_back(0.0, 0.0);
  std::size_t tp = 0, fp = 0;
  for (std::size_t k = 0; k < scored.size();) {
    const double threshold = scored[k].first;
    while (k < scored.size() && scored[k].first == threshold) {
      (scored[k].second ? tp : fp) += 1;
      ++k;
    }
    curve.points.emplace_back(rate(fp, negatives), rate(tp, positives));
  }
  if (curve.points.back() != std::pair<double, double>{1.0, 1.0} && !curve.degenerate)
    curve.points.emplace_back(1.0, 1.0);
  for (std::size_t k = 1; k < curve.points.size(); ++k) {
    const auto [x0, y0] = curve.points[k - 1];
    const auto [x1, y1] = curve.points[k];
    curve.auc += (x1 - x0) * (y0 + y1) / 2.0;
  }
  return curve;
}

void BenchmarkProtocol::validate() const {
  if (kinds.empty() || ps.empty() || ns.empty()) throw std::invalid_argument("benchmark: empty protocol axis");
  if (replicates == 0) throw std::invalid_argument("benchmark: replicates must be positive");
  if (burnin >= iterations) throw std::invalid_argument("benchmark: burn-in must be below iterations");
  for (std::size_t p : ps)
    if (p < 2) throw std::invalid_argument("benchmark: p must be at least 2");
  for (std::size_t n : ns)
    if (n == 0) throw std::invalid_argument("benchmark: n must be positive");
  if (!(weight_min >= 0.0 && weight_max >= weight_min)) throw std::invalid_argument("benchmark: bad weight range");
}

GraphSpec benchmark_graph_spec(GraphKind kind, std::size_t p) {
  GraphSpec spec;
  spec.kind = kind;
  spec.p = p;
  spec.attachment = 1;
  switch (kind) {
    case GraphKind::random:
      spec.beta = 0.4;
      spec.components = std::max<std::size_t>(1, p / 10);
      break;
    case GraphKind::cluster:
      spec.beta = 0.6;
      spec.components = 2;
      break;
    case GraphKind::scalefree:
      spec.components = std::max<std::size_t>(1, p / 10);
      break;
  }
  return spec;
}

namespace {

std::uint64_t job_seed(std::uint64_t root, std::string_view stream, GraphKind kind, std::size_t p, std::size_t n,
                       std::size_t replicate) {
  RandomStream s = root_stream(root).substream(stream);
  s = s.substream(static_cast<std::uint64_t>(kind)).substream(p).substream(n).substream(replicate);
  return s();
}

ReplicateResult run_job(const BenchmarkProtocol& protocol, GraphKind kind, std::size_t p, std::size_t n,
                        std::size_t replicate) {
  ReplicateResult r;
  r.kind = kind;
  r.p = p;
  r.n = n;
  r.replicate = replicate;

  const UndirectedGraph truth = gen_graph(benchmark_graph_spec(kind, p), job_seed(protocol.seed, "graph", kind, p, 0, replicate));
  const MrfModel model = random_mrf(truth, protocol.weight_min, protocol.weight_max,
                                    job_seed(protocol.seed, "weights", kind, p, 0, replicate));
  const CategoricalDataset data = gen_data(model, n, job_seed(protocol.seed, "data", kind, p, n, replicate), protocol.gibbs);
  r.true_edges = truth.edge_count();

  SamplerConfig config;
  config.iterations = protocol.iterations;
  config.burnin = protocol.burnin;
  config.prior = GraphPrior(protocol.prior_beta);
  config.hyper = DirichletHyper(protocol.alpha);
  config.seed = job_seed(protocol.seed, "chain", kind, p, n, replicate);
  config.threads = 1;
  const ChainTrace trace = run(data, config);
  const EdgeProbMatrix probs = edge_inclusion_probs(trace, true);
  const UndirectedGraph median = median_graph(probs, 0.5);

  HcOptions hc;
  hc.hyper = DirichletHyper(protocol.alpha);
  hc.prior = GraphPrior(protocol.prior_beta);
  const HcResult hc_result = hc_search(data, hc);

  const UndirectedGraph* estimates[3] = {&median, &hc_result.or_graph, &hc_result.and_graph};
  for (int m = 0; m < 3; ++m) {
    r.f1[m] = f1_score(truth, *estimates[m]);
    r.shd[m] = shd(truth, *estimates[m]);
  }
  r.roc = roc_points(probs, truth);
  return r;
}

double mean_of(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sd_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace

BenchmarkResult run_benchmark(const BenchmarkProtocol& protocol,
                              const std::function<void(const ReplicateResult&)>& on_replicate) {
  protocol.validate();
  struct Job {
    GraphKind kind;
    std::size_t p, n, replicate;
  };
  std::vector<Job> jobs;
  for (GraphKind kind : protocol.kinds)
    for (std::size_t p : protocol.ps)
      for (std::size_t n : protocol.ns)
        for (std::size_t rep = 0; rep < protocol.replicates; ++rep) jobs.push_back(Job{kind, p, n, rep});

  BenchmarkResult result;
  result.replicates.resize(jobs.size());
  const auto count = static_cast<std::ptrdiff_t>(jobs.size());
#pragma omp parallel for num_threads(std::max(1, protocol.threads)) schedule(dynamic, 1)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    const Job& job = jobs[static_cast<std::size_t>(k)];
    result.replicates[static_cast<std::size_t>(k)] = run_job(protocol, job.kind, job.p, job.n, job.replicate);
    if (on_replicate) {
#pragma omp critical(bdmpl_benchmark_progress)
      on_replicate(result.replicates[static_cast<std::size_t>(k)]);
    }
  }
  result.summary = summarize(result.replicates);
  return result;
}

std::vector<SummaryRow> summarize(const std::vector<ReplicateResult>& replicates) {
  using CellKey = std::tuple<int, std::size_t, std::size_t>;
  std::map<CellKey, std::vector<const ReplicateResult*>> cells;
  std::vector<CellKey> order;
  for (const auto& r : replicates) {
    const CellKey key{static_cast<int>(r.kind), r.p, r.n};
    auto [it, inserted] = cells.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(&r);
  }
  std::vector<SummaryRow> rows;
  for (const auto& key : order) {
    const auto& members = cells[key];
    for (int m = 0; m < 3; ++m) {
      std::vector<double> f1s, shds, aucs;
      for (const auto* r : members) {
        f1s.push_back(r->f1[m]);
        shds.push_back(static_cast<double>(r->shd[m]));
        aucs.push_back(r->roc.auc);
      }
      SummaryRow row;
      row.kind = static_cast<GraphKind>(std::get<0>(key));
      row.p = std::get<1>(key);
      row.n = std::get<2>(key);
      row.method = kMethods[m];
      row.mean_f1 = mean_of(f1s);
      row.sd_f1 = sd_of(f1s);
      row.mean_shd = mean_of(shds);
      row.sd_shd = sd_of(shds);
      row.mean_auc = m == 0 ? mean_of(aucs) : 0.0;
      row.replicates = members.size();
      rows.push_back(row);
    }
  }
  return rows;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "kind,p,n,method,mean_f1,sd_f1,mean_shd,sd_shd\n";
  for (const auto& r : rows)
    out << to_string(r.kind) << ',' << r.p << ',' << r.n << ',' << to_string(r.method) << ','
        << format_real(r.mean_f1) << ',' << format_real(r.sd_f1) << ',' << format_real(r.mean_shd) << ','
        << format_real(r.sd_shd) << '\n';
}

void write_replicates_csv(std::ostream& out, const std::vector<ReplicateResult>& replicates) {
  out << "kind,p,n,replicate,true_edges,f1_bdmcmc,f1_hc_or,f1_hc_and,shd_bdmcmc,shd_hc_or,shd_hc_and,auc\n";
  for (const auto& r : replicates)
    out << to_string(r.kind) << ',' << r.p << ',' << r.n << ',' << r.replicate << ',' << r.true_edges << ','
        << format_real(r.f1[0]) << ',' << format_real(r.f1[1]) << ',' << format_real(r.f1[2]) << ',' << r.shd[0]
        << ',' << r.shd[1] << ',' << r.shd[2] << ',' << format_real(r.roc.auc) << '\n';
}

void write_roc_csv(std::ostream& out, const std::vector<ReplicateResult>& replicates, GraphKind kind, std::size_t p,
                   std::size_t n) {
  out << "replicate,fpr,tpr\n";
  for (const auto& r : replicates) {
    if (r.kind != kind || r.p != p || r.n != n) continue;
    for (const auto& [fpr, tpr] : r.roc.points)
      out << r.replicate << ',' << format_real(fpr) << ',' << format_real(tpr) << '\n';
  }
}

}  // namespace bdmpl
