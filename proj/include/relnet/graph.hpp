#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "relnet/corpus.hpp"
#include "relnet/extract.hpp"

namespace relnet {

using NodeId = std::int32_t;

/// Directed mention counts m[u->v] from directed-mention tweets, and the
/// reciprocal neighbor sets: w in Γ(u) iff m[u->w] >= 1 and m[w->u] >= 1.
class MentionGraph {
 public:
  MentionGraph() = default;

  /// Counts are (from, to, count) triples over arbitrary string ids.
  static MentionGraph from_counts(std::vector<std::tuple<std::string, std::string, std::int64_t>> counts);

  std::size_t num_nodes() const { return names_.size(); }
  std::size_t num_edges() const { return counts_.size(); }
  std::optional<NodeId> node(const std::string& user) const;
  const std::string& name(NodeId u) const { return names_[static_cast<std::size_t>(u)]; }

  std::int64_t count(NodeId from, NodeId to) const;
  /// Sorted ascending.
  std::span<const NodeId> neighbors(NodeId u) const { return neighbors_[static_cast<std::size_t>(u)]; }
  std::size_t degree(NodeId u) const { return neighbors_[static_cast<std::size_t>(u)].size(); }

  /// All directed edges as (from, to, count), sorted by node id.
  std::vector<std::tuple<NodeId, NodeId, std::int64_t>> edges() const;

 private:
  static std::uint64_t key(NodeId a, NodeId b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
  }

  std::vector<std::string> names_;
  std::unordered_map<std::string, NodeId> ids_;
  std::unordered_map<std::uint64_t, std::int64_t> counts_;
  std::vector<std::vector<NodeId>> neighbors_;
};

/// Each directed mention from u whose first mention is v adds 1 to m[u->v].
MentionGraph build_graph(const std::vector<Tweet>& tweets, int workers = 1);

/// m[u->v] / sum of m[u->w] over w in Γ(u) ∪ {v}. Throws UndefinedValueError
/// when u has no neighbors.
double mention_probability(const MentionGraph& g, NodeId u, NodeId v);

/// 2 min(m_uv, m_vu) / (m_uv + m_vu); nullopt unless both counts are >= 1.
std::optional<double> reciprocity(const MentionGraph& g, NodeId u, NodeId v);

/// |Γ(u) ∩ Γ(v)| / |Γ(u) ∪ Γ(v)|. Throws UndefinedValueError when both are empty.
double jaccard(const MentionGraph& g, NodeId u, NodeId v);

/// Sum over mutual neighbors w of 1 / ln|Γ(w)|.
double adamic_adar(const MentionGraph& g, NodeId u, NodeId v);

enum class LinkMetric { Jaccard, AdamicAdar };

double link_metric(const MentionGraph& g, LinkMetric metric, NodeId u, NodeId v);

/// Seeded sample (without replacement) of up to `k` users from Γ(u) \ {v}.
/// The seed is derived from (seed, name(u), name(v)).
std::vector<NodeId> reference_neighbors(const MentionGraph& g, NodeId u, NodeId v, std::size_t k, std::uint64_t seed);

/// (x - μ) / σ of metric(u, v) against metric(u, w) over the reference
/// sample, population σ. nullopt with fewer than two reference users; 0 when σ = 0.
std::optional<double> znorm_metric(const MentionGraph& g, NodeId u, NodeId v, LinkMetric metric,
                                   std::size_t neighbor_sample = 10, std::uint64_t seed = 0);

struct DyadNetworkStats {
  std::optional<double> jaccard_z;
  std::optional<double> adamic_adar_z;
  std::optional<double> mention_prob_ab;
  std::optional<double> mention_prob_ba;
  std::optional<double> reciprocity;
};

/// z-scores are taken from the declarer's side of the dyad.
DyadNetworkStats dyad_network_stats(const MentionGraph& g, const LabeledDyad& dyad, std::size_t neighbor_sample,
                                    std::uint64_t seed);

std::vector<DyadNetworkStats> all_dyad_stats(const MentionGraph& g, const std::vector<LabeledDyad>& dyads,
                                             std::size_t neighbor_sample, std::uint64_t seed, int workers = 1);

/// Text edge list: "# relnet-graph corpus_hash=<hex>" then "from to count" lines.
void write_edge_list(std::ostream& os, const MentionGraph& g, const std::string& corpus_hash);
MentionGraph read_edge_list(std::istream& is, std::string* corpus_hash = nullptr);

std::string format_optional(const std::optional<double>& v);
std::optional<double> parse_optional(const std::string& s);

std::string dyad_stats_header();
std::string dyad_stats_row(const LabeledDyad& d, const DyadNetworkStats& s);

}  // namespace relnet
