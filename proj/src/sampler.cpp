#include "bdmpl/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bdmpl {

double RateVector::rate(std::size_t index) const { return std::exp(log_rates.at(index)); }

double edge_log_rate(const CategoricalDataset& data, const UndirectedGraph& g, Edge e, const DirichletHyper& hyper,
                     const GraphPrior& prior) {
  if (g.vertex_count() != data.variable_count()) throw std::invalid_argument("edge_rate: dimension mismatch");
  e = make_edge(e.i, e.j);
  const bool present = g.has_edge(e);
  auto toggled = [&](Vertex v, Vertex u) {
    std::vector<Vertex> nbd = g.neighbors(v);
    const auto pos = std::lower_bound(nbd.begin(), nbd.end(), u);
    if (present) nbd.erase(pos);
    else nbd.insert(pos, u);
    return nbd;
  };
  const double current_i = local_log_score(data, e.i, g.neighbors(e.i), hyper);
  const double current_j = local_log_score(data, e.j, g.neighbors(e.j), hyper);
  const double star_i = local_log_score(data, e.i, toggled(e.i, e.j), hyper);
  const double star_j = local_log_score(data, e.j, toggled(e.j, e.i), hyper);
  return combine_log_rate(star_i, current_i, star_j, current_j, prior.log_prior_ratio(present ? -1 : 1));
}

double edge_rate(const CategoricalDataset& data, const UndirectedGraph& g, Edge e, const DirichletHyper& hyper,
                 const GraphPrior& prior) {
  return std::exp(edge_log_rate(data, g, e, hyper, prior));
}

RateVector full_rates(const CategoricalDataset& data, const UndirectedGraph& g, const DirichletHyper& hyper,
                      const GraphPrior& prior, int threads) {
  if (g.vertex_count() != data.variable_count()) throw std::invalid_argument("full_rates: dimension mismatch");
  LocalScorer scorer(data, hyper, 0);
  RateEngine engine(scorer, prior, g, threads);
  return engine.rates();
}

RateVector incremental_rates(const RateVector& prev, Edge toggled, const CategoricalDataset& data,
                             const UndirectedGraph& g_new, const DirichletHyper& hyper, const GraphPrior& prior) {
  const std::size_t p = g_new.vertex_count();
  if (prev.p != p || prev.size() != pair_count(p))
    throw std::invalid_argument("incremental_rates: rate vector size does not match graph");
  toggled = make_edge(toggled.i, toggled.j);
  const std::size_t flipped = edge_index(toggled, p);
  for (std::size_t idx = 0; idx < prev.size(); ++idx) {
    const bool now = g_new.has_edge(edge_from_index(idx, p));
    const bool before = prev.present[idx] != 0;
    if ((idx == flipped) == (now == before))
      throw std::invalid_argument("incremental_rates: graph does not differ from rate vector by the toggled edge");
  }
  RateVector out = prev;
  out.present[flipped] = g_new.has_edge(toggled) ? 1 : 0;
  for (Vertex endpoint : {toggled.i, toggled.j}) {
    for (std::size_t k = 0; k < p; ++k) {
      const auto v = static_cast<Vertex>(k);
      if (v == endpoint || (endpoint == toggled.j && v == toggled.i)) continue;
      const Edge e = make_edge(endpoint, v);
      out.log_rates[edge_index(e, p)] = edge_log_rate(data, g_new, e, hyper, prior);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// RateEngine

RateEngine::RateEngine(const LocalScorer& scorer, GraphPrior prior, UndirectedGraph initial, int threads)
    : scorer_(&scorer),
      prior_(prior),
      graph_(std::move(initial)),
      p_(graph_.vertex_count()),
      threads_(std::max(1, threads)) {
  if (p_ != scorer.data().variable_count()) throw std::invalid_argument("RateEngine: dimension mismatch");
  if (p_ < 2) throw std::invalid_argument("RateEngine: need at least two vertices");
  current_.assign(p_, 0.0);
  toggled_.assign(p_ * p_, 0.0);
  rates_.p = p_;
  rates_.log_rates.assign(pair_count(p_), 0.0);
  rates_.present.assign(pair_count(p_), 0);
  recompute_all();
}

void RateEngine::recompute_all() {
  for (std::size_t idx = 0; idx < rates_.size(); ++idx)
    rates_.present[idx] = graph_.has_edge(edge_from_index(idx, p_)) ? 1 : 0;
  std::vector<Vertex> all(p_);
  for (std::size_t v = 0; v < p_; ++v) all[v] = static_cast<Vertex>(v);
  refresh_rows(all);

  const auto count = static_cast<std::ptrdiff_t>(rates_.size());
#pragma omp parallel for num_threads(threads_) schedule(static)
  for (std::ptrdiff_t idx = 0; idx < count; ++idx) {
    const auto i = static_cast<std::size_t>(idx);
    refresh_rate(i, edge_from_index(i, p_));
  }
  counters_.rate_evaluations += rates_.size();
  counters_.score_lookups += 2 * rates_.size();
}

void RateEngine::refresh_rows(std::span<const Vertex> vertices) {
  // Split each row into chunks when there are fewer rows than threads.
  const std::size_t chunks_per_row =
      vertices.size() >= static_cast<std::size_t>(threads_)
          ? 1
          : (static_cast<std::size_t>(threads_) + vertices.size() - 1) / vertices.size();
  const std::size_t chunk = (p_ + chunks_per_row - 1) / chunks_per_row;
  const auto tasks = static_cast<std::ptrdiff_t>(vertices.size() * chunks_per_row);

#pragma omp parallel for num_threads(threads_) schedule(dynamic, 1)
  for (std::ptrdiff_t t = 0; t < tasks; ++t) {
    const Vertex v = vertices[static_cast<std::size_t>(t) / chunks_per_row];
    const std::size_t c = static_cast<std::size_t>(t) % chunks_per_row;
    const auto begin = static_cast<Vertex>(std::min(p_, c * chunk));
    const auto end = static_cast<Vertex>(std::min(p_, (c + 1) * chunk));
    const auto& nbd = graph_.neighbors(v);
    std::span<double> row(toggled_.data() + static_cast<std::size_t>(v) * p_, p_);
    if (c == 0) current_[static_cast<std::size_t>(v)] = scorer_->score(v, nbd);
    scorer_->toggle_scores(v, nbd, row, begin, end);
  }
}

void RateEngine::refresh_rate(std::size_t index, Edge e) {
  const auto i = static_cast<std::size_t>(e.i);
  const auto j = static_cast<std::size_t>(e.j);
  const bool present = rates_.present[index] != 0;
  rates_.log_rates[index] = combine_log_rate(toggled_[i * p_ + j], current_[i], toggled_[j * p_ + i], current_[j],
                                             prior_.log_prior_ratio(present ? -1 : 1));
}

void RateEngine::toggle(std::span<const Edge> edges) {
  std::vector<Vertex> endpoints;
  endpoints.reserve(2 * edges.size());
  for (Edge e : edges) {
    e = make_edge(e.i, e.j);
    const bool added = graph_.toggle(e);
    rates_.present[edge_index(e, p_)] = added ? 1 : 0;
    endpoints.push_back(e.i);
    endpoints.push_back(e.j);
  }
  std::sort(endpoints.begin(), endpoints.end());
  endpoints.erase(std::unique(endpoints.begin(), endpoints.end()), endpoints.end());
  refresh_rows(endpoints);

  std::vector<std::uint8_t> is_endpoint(p_, 0);
  for (Vertex v : endpoints) is_endpoint[static_cast<std::size_t>(v)] = 1;
  std::vector<std::size_t> indices;
  indices.reserve(endpoints.size() * p_);
  for (Vertex a : endpoints) {
    for (std::size_t k = 0; k < p_; ++k) {
      const auto b = static_cast<Vertex>(k);
      if (b == a || (is_endpoint[k] && b < a)) continue;
      indices.push_back(edge_index(make_edge(a, b), p_));
    }
  }
  const auto count = static_cast<std::ptrdiff_t>(indices.size());
#pragma omp parallel for num_threads(threads_) schedule(static)
  for (std::ptrdiff_t t = 0; t < count; ++t) {
    const std::size_t idx = indices[static_cast<std::size_t>(t)];
    refresh_rate(idx, edge_from_index(idx, p_));
  }
  counters_.rate_evaluations += indices.size();
  counters_.score_lookups += 2 * indices.size();
}

double RateEngine::log_posterior() const {
  double total = 0.0;
  for (double s : current_) total += s;
  return total + prior_.log_prior(graph_.edge_count());
}

// ---------------------------------------------------------------------------
// Jump selection

namespace {

double max_log_rate(const RateVector& rates) {
  if (rates.size() == 0) throw std::invalid_argument("rate vector is empty");
  double m = -std::numeric_limits<double>::infinity();
  for (double lr : rates.log_rates) m = std::max(m, lr);
  if (!std::isfinite(m)) throw std::runtime_error("all rates are zero");
  return m;
}

}  // namespace

double waiting_time(const RateVector& rates) {
  const double m = max_log_rate(rates);
  double total = 0.0;
  for (double lr : rates.log_rates) total += std::exp(lr - m);
  return std::exp(-m) / total;
}

Jump choose_jump(const RateVector& rates, double u) {
  if (!(u >= 0.0 && u < 1.0)) throw std::invalid_argument("choose_jump: u must lie in [0,1)");
  const double m = max_log_rate(rates);
  std::vector<double> weights(rates.size());
  double total = 0.0;
  for (std::size_t idx = 0; idx < rates.size(); ++idx) {
    weights[idx] = std::exp(rates.log_rates[idx] - m);
    total += weights[idx];
  }
  Jump jump;
  jump.waiting_time = std::exp(-m) / total;
  const double target = u * total;
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t idx = 0; idx < rates.size(); ++idx) {
    if (weights[idx] <= 0.0) continue;
    last_positive = idx;
    cumulative += weights[idx];
    if (target < cumulative) {
      jump.index = idx;
      return jump;
    }
  }
  jump.index = last_positive;  // rounding at the top end
  return jump;
}

std::vector<std::size_t> top_rated(const RateVector& rates, std::size_t n0, RandomStream& rng) {
  if (n0 == 0 || n0 > rates.size()) throw std::invalid_argument("top_rated: N0 out of range");
  struct Keyed {
    double log_rate;
    std::uint64_t tie;
    std::size_t index;
  };
  std::vector<Keyed> keyed(rates.size());
  for (std::size_t idx = 0; idx < rates.size(); ++idx) keyed[idx] = {rates.log_rates[idx], rng(), idx};
  auto better = [](const Keyed& a, const Keyed& b) {
    if (a.log_rate != b.log_rate) return a.log_rate > b.log_rate;
    if (a.tie != b.tie) return a.tie < b.tie;
    return a.index < b.index;
  };
  std::partial_sort(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(n0), keyed.end(), better);
  std::vector<std::size_t> out(n0);
  for (std::size_t k = 0; k < n0; ++k) out[k] = keyed[k].index;
  return out;
}

// ---------------------------------------------------------------------------
// Sampler

void SamplerConfig::validate(std::size_t p) const {
  if (p < 2) throw std::invalid_argument("sampler needs at least two variables");
  if (iterations == 0) throw std::invalid_argument("iterations must be positive");
  if (burnin >= iterations) throw std::invalid_argument("burn-in must be smaller than the iteration count");
  if (multi_edges == 1) throw std::invalid_argument("multiple-edge mode needs N0 >= 2");
  if (multi_edges > pair_count(p)) throw std::invalid_argument("N0 exceeds the number of vertex pairs");
  if (threads < 1) throw std::invalid_argument("thread count must be positive");
  if (initial && initial->vertex_count() != p) throw std::invalid_argument("initial graph has the wrong vertex count");
}

BirthDeathSampler::BirthDeathSampler(const CategoricalDataset& data, const SamplerConfig& config)
    : config_(config),
      scorer_(data, config.hyper, config.cache_capacity),
      engine_(scorer_, config.prior, config.initial.value_or(UndirectedGraph(data.variable_count())), config.threads),
      sample_stream_(root_stream(config.seed).substream("sample")),
      tie_stream_(root_stream(config.seed).substream("tie-break")) {
  config_.validate(data.variable_count());
}

StepResult BirthDeathSampler::step() {
  RandomStream rng = sample_stream_.substream(iteration_);
  const Jump jump = choose_jump(engine_.rates(), rng.uniform());
  const Edge e = edge_from_index(jump.index, engine_.vertex_count());
  StepResult result;
  result.waiting_time = jump.waiting_time;
  result.deltas.push_back(EdgeDelta{e, engine_.rates().is_birth(jump.index) ? 1 : -1});
  engine_.toggle(e);
  ++iteration_;
  return result;
}

StepResult BirthDeathSampler::multi_step(std::size_t n0) {
  if (n0 < 2) throw std::invalid_argument("multi_step: N0 must be at least 2");
  StepResult result;
  result.waiting_time = waiting_time(engine_.rates());
  RandomStream rng = tie_stream_.substream(iteration_);
  const auto chosen = top_rated(engine_.rates(), n0, rng);
  std::vector<Edge> edges;
  edges.reserve(chosen.size());
  for (std::size_t idx : chosen) {
    const Edge e = edge_from_index(idx, engine_.vertex_count());
    edges.push_back(e);
    result.deltas.push_back(EdgeDelta{e, engine_.rates().is_birth(idx) ? 1 : -1});
  }
  engine_.toggle(edges);
  ++iteration_;
  return result;
}

ChainTrace run(const CategoricalDataset& data, const SamplerConfig& config, const ProgressCallback& progress) {
  config.validate(data.variable_count());
  BirthDeathSampler sampler(data, config);
  ChainTrace trace(sampler.graph(), config.burnin);
  for (std::size_t m = 0; m < config.iterations; ++m) {
    const StepResult step = config.multi_edges >= 2 ? sampler.multi_step(config.multi_edges) : sampler.step();
    trace.append(step.waiting_time, step.deltas);
    if (progress) progress(m + 1, sampler.engine());
  }
  return trace;
}

}  // namespace bdmpl
