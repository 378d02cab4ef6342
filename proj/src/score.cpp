#include "bdmpl/score.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace bdmpl {

namespace {

double log_gamma(double x) { return boost::math::lgamma(x); }

// Sum over observed configurations l of
//   lgamma(a_+) - lgamma(a_+ + n_{+l}) + sum_k [lgamma(a + n_kl) - lgamma(a)].
// Shared by the direct and the tabulated route so the floating-point
// operation sequence is identical.
template <typename LgammaAlpha, typename LgammaPlus>
double accumulate_groups(std::span<const std::uint64_t> table, std::size_t groups, int levels, LgammaAlpha&& la,
                         LgammaPlus&& lp) {
  const auto r = static_cast<std::size_t>(levels);
  const double la0 = la(0);
  const double lp0 = lp(0);
  double total = 0.0;
  for (std::size_t g = 0; g < groups; ++g) {
    std::uint64_t n_plus = 0;
    double inner = 0.0;
    for (std::size_t k = 0; k < r; ++k) {
      const std::uint64_t n = table[g * r + k];
      if (n == 0) continue;
      n_plus += n;
      inner += la(n) - la0;
    }
    total += (lp0 - lp(n_plus)) + inner;
  }
  return total;
}

}  // namespace

DirichletHyper::DirichletHyper(double a) : alpha(a) {
  if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("Dirichlet alpha must be positive and finite");
}

double local_log_score(const ConditionalCounts& counts, const DirichletHyper& hyper) {
  const double alpha = hyper.alpha;
  const double alpha_plus = hyper.alpha_plus(counts.levels);
  return accumulate_groups(
      counts.table, counts.configuration_count(), counts.levels,
      [alpha](std::uint64_t n) { return log_gamma(alpha + static_cast<double>(n)); },
      [alpha_plus](std::uint64_t n) { return log_gamma(alpha_plus + static_cast<double>(n)); });
}

double local_log_score(const CategoricalDataset& data, Vertex i, std::span<const Vertex> nbd,
                       const DirichletHyper& hyper) {
  return local_log_score(count_config(data, i, nbd), hyper);
}

double mpl_log(const CategoricalDataset& data, const UndirectedGraph& g, const DirichletHyper& hyper) {
  if (g.vertex_count() != data.variable_count())
    throw std::invalid_argument("mpl_log: graph has " + std::to_string(g.vertex_count()) + " vertices, data has " +
                                std::to_string(data.variable_count()) + " variables");
  double total = 0.0;
  for (std::size_t i = 0; i < g.vertex_count(); ++i) {
    const auto v = static_cast<Vertex>(i);
    total += local_log_score(data, v, g.neighbors(v), hyper);
  }
  return total;
}

double log_posterior_mpl(const CategoricalDataset& data, const UndirectedGraph& g, const DirichletHyper& hyper,
                         const GraphPrior& prior) {
  return mpl_log(data, g, hyper) + prior.log_prior(g.edge_count());
}

// ---------------------------------------------------------------------------
// LocalScoreCache

namespace {

struct KeyHash {
  std::size_t operator()(const std::vector<Vertex>& key) const noexcept {
    std::uint64_t h = 0x84222325cbf29ce4ULL;
    for (Vertex v : key) {
      h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(v)) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

std::vector<Vertex> make_key(Vertex i, std::span<const Vertex> nbd) {
  std::vector<Vertex> key;
  key.reserve(nbd.size() + 1);
  key.push_back(i);
  key.insert(key.end(), nbd.begin(), nbd.end());
  return key;
}

}  // namespace

struct LocalScoreCache::Shard {
  using Entry = std::pair<std::vector<Vertex>, double>;
  std::mutex mutex;
  std::list<Entry> lru;  // most recent first
  std::unordered_map<std::vector<Vertex>, std::list<Entry>::iterator, KeyHash> index;
  std::size_t capacity = 0;
};

LocalScoreCache::LocalScoreCache(std::size_t capacity) : capacity_(capacity) {
  shards_.reserve(kShards);
  for (std::size_t s = 0; s < kShards; ++s) {
    auto shard = std::make_unique<Shard>();
    shard->capacity = (capacity + kShards - 1) / kShards;
    shards_.push_back(std::move(shard));
  }
}

LocalScoreCache::~LocalScoreCache() = default;

std::optional<double> LocalScoreCache::find(Vertex i, std::span<const Vertex> nbd) const {
  if (capacity_ == 0) {
    misses_.fetch_add(1, std::memory_order_relaxed);
    return std::nullopt;
  }
  auto key = make_key(i, nbd);
  const std::size_t h = KeyHash{}(key);
  Shard& shard = *shards_[h % kShards];
  std::lock_guard lock(shard.mutex);
  auto it = shard.index.find(key);
  if (it == shard.index.end()) {
    misses_.fetch_add(1, std::memory_order_relaxed);
    return std::nullopt;
  }
  shard.lru.splice(shard.lru.begin(), shard.lru, it->second);
  hits_.fetch_add(1, std::memory_order_relaxed);
  return it->second->second;
}

void LocalScoreCache::insert(Vertex i, std::span<const Vertex> nbd, double value) {
  if (capacity_ == 0) return;
  auto key = make_key(i, nbd);
  const std::size_t h = KeyHash{}(key);
  Shard& shard = *shards_[h % kShards];
  std::lock_guard lock(shard.mutex);
  if (shard.index.contains(key)) return;
  shard.lru.emplace_front(std::move(key), value);
  shard.index.emplace(shard.lru.front().first, shard.lru.begin());
  if (shard.lru.size() > shard.capacity) {
    shard.index.erase(shard.lru.back().first);
    shard.lru.pop_back();
  }
}

void LocalScoreCache::clear() {
  for (auto& shard : shards_) {
    std::lock_guard lock(shard->mutex);
    shard->index.clear();
    shard->lru.clear();
  }
}

std::size_t LocalScoreCache::size() const {
  std::size_t total = 0;
  for (const auto& shard : shards_) {
    std::lock_guard lock(shard->mutex);
    total += shard->lru.size();
  }
  return total;
}

// ---------------------------------------------------------------------------
// LocalScorer

LocalScorer::LocalScorer(const CategoricalDataset& data, DirichletHyper hyper, std::size_t cache_capacity)
    : data_(&data), hyper_(hyper), cache_(cache_capacity) {
  const std::uint64_t n = data.sample_count();
  lgamma_alpha_.resize(n + 1);
  for (std::uint64_t k = 0; k <= n; ++k) lgamma_alpha_[k] = log_gamma(hyper_.alpha + static_cast<double>(k));
  lgamma_alpha_plus_.resize(static_cast<std::size_t>(data.max_cardinality()) + 1);
  for (int r : data.cardinalities()) {
    auto& tab = lgamma_alpha_plus_[static_cast<std::size_t>(r)];
    if (!tab.empty()) continue;
    const double alpha_plus = hyper_.alpha_plus(r);
    tab.resize(n + 1);
    for (std::uint64_t k = 0; k <= n; ++k) tab[k] = log_gamma(alpha_plus + static_cast<double>(k));
  }
}

const std::vector<double>& LocalScorer::plus_table(int cardinality) const {
  return lgamma_alpha_plus_[static_cast<std::size_t>(cardinality)];
}

double LocalScorer::score_partition(Vertex i, const CellPartition& part, std::vector<std::uint64_t>& table) const {
  const int r = data_->cardinality(i);
  const auto ru = static_cast<std::size_t>(r);
  table.assign(static_cast<std::size_t>(part.group_count) * ru, 0);
  const auto self = data_->column(i);
  const auto counts = data_->counts();
  for (std::size_t c = 0; c < self.size(); ++c) table[static_cast<std::size_t>(part.group[c]) * ru + self[c]] += counts[c];
  computations_.fetch_add(1, std::memory_order_relaxed);
  const auto& la = lgamma_alpha_;
  const auto& lp = plus_table(r);
  return accumulate_groups(
      table, part.group_count, r, [&la](std::uint64_t n) { return la[n]; },
      [&lp](std::uint64_t n) { return lp[n]; });
}

double LocalScorer::score(Vertex i, std::span<const Vertex> nbd) const {
  if (auto hit = cache_.find(i, nbd)) return *hit;
  std::vector<std::uint64_t> table;
  const double value = score_partition(i, partition_cells(*data_, nbd), table);
  cache_.insert(i, nbd, value);
  return value;
}

void LocalScorer::toggle_scores(Vertex i, std::span<const Vertex> nbd, std::span<double> out) const {
  toggle_scores(i, nbd, out, 0, static_cast<Vertex>(data_->variable_count()));
}

void LocalScorer::toggle_scores(Vertex i, std::span<const Vertex> nbd, std::span<double> out, Vertex u_begin,
                                Vertex u_end) const {
  const auto p = static_cast<Vertex>(data_->variable_count());
  if (out.size() != static_cast<std::size_t>(p)) throw std::invalid_argument("toggle_scores: output size != p");
  if (u_begin < 0 || u_end > p || u_begin > u_end) throw std::invalid_argument("toggle_scores: bad range");

  std::optional<CellPartition> base;
  CellPartition work;
  std::vector<std::int32_t> scratch;
  std::vector<std::uint64_t> table;
  std::vector<Vertex> key;
  key.reserve(nbd.size() + 1);

  for (Vertex u = u_begin; u < u_end; ++u) {
    if (u == i) continue;
    const auto pos = std::lower_bound(nbd.begin(), nbd.end(), u);
    const bool present = pos != nbd.end() && *pos == u;
    key.assign(nbd.begin(), pos);
    if (!present) key.push_back(u);
    key.insert(key.end(), present ? pos + 1 : pos, nbd.end());

    if (auto hit = cache_.find(i, key)) {
      out[static_cast<std::size_t>(u)] = *hit;
      continue;
    }
    double value;
    if (present) {
      value = score_partition(i, partition_cells(*data_, key), table);
    } else {
      if (!base) base = partition_cells(*data_, nbd);
      work = *base;
      refine_partition(*data_, work, u, scratch);
      value = score_partition(i, work, table);
    }
    cache_.insert(i, key, value);
    out[static_cast<std::size_t>(u)] = value;
  }
}

}  // namespace bdmpl
