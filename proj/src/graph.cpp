#include "relnet/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "relnet/parallel.hpp"

namespace relnet {

MentionGraph MentionGraph::from_counts(std::vector<std::tuple<std::string, std::string, std::int64_t>> counts) {
  MentionGraph g;
  std::vector<std::string> users;
  for (const auto& [from, to, n] : counts) {
    users.push_back(from);
    users.push_back(to);
  }
  std::sort(users.begin(), users.end());
  users.erase(std::unique(users.begin(), users.end()), users.end());
  g.names_ = std::move(users);
  for (std::size_t i = 0; i < g.names_.size(); ++i) g.ids_[g.names_[i]] = static_cast<NodeId>(i);
  for (const auto& [from, to, n] : counts) {
    if (n <= 0 || from == to) continue;
    g.counts_[key(g.ids_[from], g.ids_[to])] += n;
  }
  g.neighbors_.assign(g.names_.size(), {});
  for (const auto& [k, n] : g.counts_) {
    const auto from = static_cast<NodeId>(k >> 32);
    const auto to = static_cast<NodeId>(k & 0xffffffffULL);
    if (from < to && g.counts_.count(key(to, from))) {
      g.neighbors_[static_cast<std::size_t>(from)].push_back(to);
      g.neighbors_[static_cast<std::size_t>(to)].push_back(from);
    }
  }
  for (auto& nb : g.neighbors_) std::sort(nb.begin(), nb.end());
  return g;
}

std::optional<NodeId> MentionGraph::node(const std::string& user) const {
  auto it = ids_.find(user);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::int64_t MentionGraph::count(NodeId from, NodeId to) const {
  auto it = counts_.find(key(from, to));
  return it == counts_.end() ? 0 : it->second;
}

std::vector<std::tuple<NodeId, NodeId, std::int64_t>> MentionGraph::edges() const {
  std::vector<std::tuple<NodeId, NodeId, std::int64_t>> out;
  out.reserve(counts_.size());
  for (const auto& [k, n] : counts_)
    out.emplace_back(static_cast<NodeId>(k >> 32), static_cast<NodeId>(k & 0xffffffffULL), n);
  std::sort(out.begin(), out.end());
  return out;
}

MentionGraph build_graph(const std::vector<Tweet>& tweets, int workers) {
  using PairCounts = std::map<std::pair<std::string, std::string>, std::int64_t>;
  std::vector<PairCounts> shards(chunk_count(tweets.size(), workers));
  parallel_chunks(tweets.size(), workers, [&](std::size_t c, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Tweet& t = tweets[i];
      if (classify_interaction(t) != InteractionKind::DirectedMention) continue;
      if (t.mentions.front().user_id == t.author_id) continue;
      ++shards[c][{t.author_id, t.mentions.front().user_id}];
    }
  });
  PairCounts total;
  for (auto& s : shards)
    for (auto& [k, n] : s) total[k] += n;
  std::vector<std::tuple<std::string, std::string, std::int64_t>> counts;
  counts.reserve(total.size());
  for (auto& [k, n] : total) counts.emplace_back(k.first, k.second, n);
  return MentionGraph::from_counts(std::move(counts));
}

double mention_probability(const MentionGraph& g, NodeId u, NodeId v) {
  const auto nb = g.neighbors(u);
  if (nb.empty()) throw UndefinedValueError("mention probability undefined: '" + g.name(u) + "' has no neighbors");
  std::int64_t denom = 0;
  for (NodeId w : nb) denom += g.count(u, w);
  if (!std::binary_search(nb.begin(), nb.end(), v)) denom += g.count(u, v);
  return static_cast<double>(g.count(u, v)) / static_cast<double>(denom);
}

std::optional<double> reciprocity(const MentionGraph& g, NodeId u, NodeId v) {
  const std::int64_t uv = g.count(u, v);
  const std::int64_t vu = g.count(v, u);
  if (uv < 1 || vu < 1) return std::nullopt;
  return 2.0 * static_cast<double>(std::min(uv, vu)) / static_cast<double>(uv + vu);
}

namespace {

std::size_t intersection_size(std::span<const NodeId> a, std::span<const NodeId> b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

}  // namespace

double jaccard(const MentionGraph& g, NodeId u, NodeId v) {
  const auto a = g.neighbors(u);
  const auto b = g.neighbors(v);
  const std::size_t inter = intersection_size(a, b);
  const std::size_t uni = a.size() + b.size() - inter;
  if (uni == 0) throw UndefinedValueError("jaccard undefined: both neighbor sets empty");
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double adamic_adar(const MentionGraph& g, NodeId u, NodeId v) {
  if (u == v) throw ValidationError("adamic_adar requires two distinct users");
  const auto a = g.neighbors(u);
  const auto b = g.neighbors(v);
  double sum = 0.0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      sum += 1.0 / std::log(static_cast<double>(g.degree(*i)));
      ++i;
      ++j;
    }
  }
  return sum;
}

double link_metric(const MentionGraph& g, LinkMetric metric, NodeId u, NodeId v) {
  return metric == LinkMetric::Jaccard ? jaccard(g, u, v) : adamic_adar(g, u, v);
}

std::vector<NodeId> reference_neighbors(const MentionGraph& g, NodeId u, NodeId v, std::size_t k, std::uint64_t seed) {
  std::vector<NodeId> pool;
  for (NodeId w : g.neighbors(u))
    if (w != v) pool.push_back(w);
  if (pool.size() <= k) return pool;
  std::mt19937_64 rng(derive_seed(seed, g.name(u), g.name(v)));
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(k);
  return pool;
}

std::optional<double> znorm_metric(const MentionGraph& g, NodeId u, NodeId v, LinkMetric metric,
                                   std::size_t neighbor_sample, std::uint64_t seed) {
  const auto ref = reference_neighbors(g, u, v, neighbor_sample, seed);
  if (ref.size() < 2) return std::nullopt;
  std::vector<double> values;
  values.reserve(ref.size());
  for (NodeId w : ref) values.push_back(link_metric(g, metric, u, w));
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double x : values) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : values) var += (x - mean) * (x - mean);
  const double sigma = std::sqrt(var / n);
  // Equal reference values can leave rounding residue instead of an exact zero.
  if (sigma <= 1e-12 * std::max(1.0, std::abs(mean))) return 0.0;
  return (link_metric(g, metric, u, v) - mean) / sigma;
}

DyadNetworkStats dyad_network_stats(const MentionGraph& g, const LabeledDyad& dyad, std::size_t neighbor_sample,
                                    std::uint64_t seed) {
  DyadNetworkStats s;
  const auto a = g.node(dyad.user_a);
  const auto b = g.node(dyad.user_b);
  if (!a || !b) return s;
  const NodeId ego = dyad.declarer == dyad.user_a ? *a : *b;
  const NodeId other = ego == *a ? *b : *a;
  s.jaccard_z = znorm_metric(g, ego, other, LinkMetric::Jaccard, neighbor_sample, seed);
  s.adamic_adar_z = znorm_metric(g, ego, other, LinkMetric::AdamicAdar, neighbor_sample, seed);
  if (g.degree(*a) > 0) s.mention_prob_ab = mention_probability(g, *a, *b);
  if (g.degree(*b) > 0) s.mention_prob_ba = mention_probability(g, *b, *a);
  s.reciprocity = reciprocity(g, *a, *b);
  return s;
}

std::vector<DyadNetworkStats> all_dyad_stats(const MentionGraph& g, const std::vector<LabeledDyad>& dyads,
                                             std::size_t neighbor_sample, std::uint64_t seed, int workers) {
  std::vector<DyadNetworkStats> out(dyads.size());
  parallel_for(dyads.size(), workers,
               [&](std::size_t i) { out[i] = dyad_network_stats(g, dyads[i], neighbor_sample, seed); });
  return out;
}

void write_edge_list(std::ostream& os, const MentionGraph& g, const std::string& corpus_hash) {
  os << "# relnet-graph corpus_hash=" << corpus_hash << '\n';
  std::vector<std::tuple<std::string, std::string, std::int64_t>> rows;
  for (const auto& [u, v, n] : g.edges()) rows.emplace_back(g.name(u), g.name(v), n);
  std::sort(rows.begin(), rows.end());
  for (const auto& [u, v, n] : rows) os << u << ' ' << v << ' ' << n << '\n';
}

MentionGraph read_edge_list(std::istream& is, std::string* corpus_hash) {
  std::vector<std::tuple<std::string, std::string, std::int64_t>> counts;
  std::string line;
  for (std::size_t no = 1; std::getline(is, line); ++no) {
    if (line.empty()) continue;
    if (line.front() == '#') {
      auto pos = line.find("corpus_hash=");
      if (corpus_hash && pos != std::string::npos) *corpus_hash = line.substr(pos + 12);
      continue;
    }
    std::istringstream row(line);
    std::string u, v;
    std::int64_t n = 0;
    if (!(row >> u >> v >> n) || n < 0) throw ParseError(no, "expected 'from to count'");
    counts.emplace_back(u, v, n);
  }
  return MentionGraph::from_counts(std::move(counts));
}

std::string format_optional(const std::optional<double>& v) {
  if (!v) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", *v);
  return buf;
}

std::optional<double> parse_optional(const std::string& s) {
  if (s == "NA") return std::nullopt;
  return std::stod(s);
}

std::string dyad_stats_header() {
  return "user_a\tuser_b\tcategory\tjaccard_z\tadamic_adar_z\tmention_prob_ab\tmention_prob_ba\treciprocity";
}

std::string dyad_stats_row(const LabeledDyad& d, const DyadNetworkStats& s) {
  std::string row = d.user_a + "\t" + d.user_b + "\t" + std::string(category_name(d.category));
  for (const auto& v : {s.jaccard_z, s.adamic_adar_z, s.mention_prob_ab, s.mention_prob_ba, s.reciprocity})
    row += "\t" + format_optional(v);
  return row;
}

}  // namespace relnet
