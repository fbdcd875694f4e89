#pragma once

// Brute-force mention-graph metrics over a dense count matrix, for checking
// the indexed implementation.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "relnet/graph.hpp"

namespace oracle {

struct DenseGraph {
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> m;  // m(u, v) = directed count

  int size() const { return static_cast<int>(m.rows()); }
  bool linked(int u, int w) const { return u != w && m(u, w) >= 1 && m(w, u) >= 1; }
  int degree(int u) const {
    int d = 0;
    for (int w = 0; w < size(); ++w) d += linked(u, w);
    return d;
  }
};

inline std::string node_name(int i) { return "n" + std::to_string(i); }

inline DenseGraph random_graph(std::mt19937_64& rng, int max_nodes = 50) {
  const int n = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_nodes - 1));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double density = 0.05 + 0.5 * u(rng);
  DenseGraph g;
  g.m.setZero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b && u(rng) < density) g.m(a, b) = 1 + static_cast<std::int64_t>(rng() % 5);
  return g;
}

inline relnet::MentionGraph to_mention_graph(const DenseGraph& g) {
  std::vector<std::tuple<std::string, std::string, std::int64_t>> counts;
  for (int a = 0; a < g.size(); ++a)
    for (int b = 0; b < g.size(); ++b)
      if (g.m(a, b) > 0) counts.emplace_back(node_name(a), node_name(b), g.m(a, b));
  return relnet::MentionGraph::from_counts(std::move(counts));
}

/// nullopt where the metric is undefined.
inline std::optional<double> jaccard(const DenseGraph& g, int u, int v) {
  int inter = 0, uni = 0;
  for (int w = 0; w < g.size(); ++w) {
    const bool a = g.linked(u, w), b = g.linked(v, w);
    inter += a && b;
    uni += a || b;
  }
  if (uni == 0) return std::nullopt;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

inline double adamic_adar(const DenseGraph& g, int u, int v) {
  double s = 0.0;
  for (int w = 0; w < g.size(); ++w)
    if (g.linked(u, w) && g.linked(v, w)) s += 1.0 / std::log(static_cast<double>(g.degree(w)));
  return s;
}

/// Denominator: counts toward Γ(u), plus v itself when it is not a neighbor.
inline std::optional<double> mention_probability(const DenseGraph& g, int u, int v) {
  if (g.degree(u) == 0) return std::nullopt;
  std::int64_t denom = 0;
  for (int w = 0; w < g.size(); ++w)
    if (g.linked(u, w) || w == v) denom += g.m(u, w);
  return static_cast<double>(g.m(u, v)) / static_cast<double>(denom);
}

inline std::optional<double> reciprocity(const DenseGraph& g, int u, int v) {
  const auto a = g.m(u, v), b = g.m(v, u);
  if (a < 1 || b < 1) return std::nullopt;
  return 2.0 * static_cast<double>(std::min(a, b)) / static_cast<double>(a + b);
}

/// z-score of metric(u, v) against metric(u, w) over the given references.
template <typename Metric>
std::optional<double> znorm(const DenseGraph& g, int u, int v, const std::vector<int>& refs, Metric metric) {
  if (refs.size() < 2) return std::nullopt;
  long double mean = 0;
  for (int w : refs) mean += metric(g, u, w);
  mean /= static_cast<long double>(refs.size());
  long double var = 0;
  for (int w : refs) {
    const long double d = metric(g, u, w) - mean;
    var += d * d;
  }
  const long double sigma = std::sqrt(var / static_cast<long double>(refs.size()));
  if (sigma <= 1e-12L * std::max(1.0L, std::abs(mean))) return 0.0;
  return static_cast<double>((metric(g, u, v) - mean) / sigma);
}

inline std::vector<int> all_references(const DenseGraph& g, int u, int v) {
  std::vector<int> r;
  for (int w = 0; w < g.size(); ++w)
    if (w != v && g.linked(u, w)) r.push_back(w);
  return r;
}

struct Mismatch {
  std::size_t checked = 0;
  std::size_t rational_mismatches = 0;  // bitwise comparisons
  double max_real_error = 0.0;          // Adamic-Adar and z-scores
};

/// Every ordered pair of one random graph against the indexed implementation.
inline void compare_graph(const DenseGraph& dg, Mismatch& out) {
  using namespace relnet;
  const MentionGraph g = to_mention_graph(dg);
  auto id = [&](int i) { return g.node(node_name(i)); };
  auto jac = [](const DenseGraph& d, int a, int b) { return *jaccard(d, a, b); };
  auto aa = [](const DenseGraph& d, int a, int b) { return adamic_adar(d, a, b); };
  for (int u = 0; u < dg.size(); ++u)
    for (int v = 0; v < dg.size(); ++v) {
      if (u == v) continue;
      const auto gu = id(u), gv = id(v);
      if (!gu || !gv) continue;  // node with no edges at all
      ++out.checked;
      auto bitwise = [&](std::optional<double> want, auto&& got_fn) {
        std::optional<double> got;
        try {
          got = got_fn();
        } catch (const UndefinedValueError&) {
        }
        if (want.has_value() != got.has_value() || (want && *want != *got)) ++out.rational_mismatches;
      };
      bitwise(jaccard(dg, u, v), [&] { return std::optional<double>(relnet::jaccard(g, *gu, *gv)); });
      bitwise(mention_probability(dg, u, v),
              [&] { return std::optional<double>(relnet::mention_probability(g, *gu, *gv)); });
      bitwise(reciprocity(dg, u, v), [&] { return relnet::reciprocity(g, *gu, *gv); });
      out.max_real_error =
          std::max(out.max_real_error, std::abs(adamic_adar(dg, u, v) - relnet::adamic_adar(g, *gu, *gv)));

      const auto refs = all_references(dg, u, v);
      const std::pair<LinkMetric, std::optional<double>> z[] = {
          {LinkMetric::Jaccard, znorm(dg, u, v, refs, jac)}, {LinkMetric::AdamicAdar, znorm(dg, u, v, refs, aa)}};
      for (const auto& [metric, want] : z) {
        const auto got = znorm_metric(g, *gu, *gv, metric, 1000, 7);
        if (want.has_value() != got.has_value()) {
          ++out.rational_mismatches;
        } else if (want) {
          out.max_real_error = std::max(out.max_real_error, std::abs(*want - *got));
        }
      }
    }
}

}  // namespace oracle
