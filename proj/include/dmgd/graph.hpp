#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dmgd/rng.hpp"

namespace dmgd {

enum class GraphKind { ring, path, complete, star, erdos_renyi };

inline std::string to_string(GraphKind k) {
  switch (k) {
    case GraphKind::ring: return "ring";
    case GraphKind::path: return "path";
    case GraphKind::complete: return "complete";
    case GraphKind::star: return "star";
    case GraphKind::erdos_renyi: return "erdos_renyi";
  }
  return "?";
}

inline std::optional<GraphKind> parse_graph_kind(const std::string& s) {
  if (s == "ring") return GraphKind::ring;
  if (s == "path") return GraphKind::path;
  if (s == "complete") return GraphKind::complete;
  if (s == "star") return GraphKind::star;
  if (s == "erdos_renyi") return GraphKind::erdos_renyi;
  return std::nullopt;
}

// Undirected connected communication graph on nodes 0..m-1.
// Edges are stored as ordered pairs (i < l); no self-loops.
struct CommGraph {
  int m = 0;
  std::set<std::pair<int, int>> edges;
  GraphKind kind = GraphKind::path;

  bool has_edge(int i, int l) const {
    if (i == l) return false;
    if (i > l) std::swap(i, l);
    return edges.count({i, l}) > 0;
  }

  int degree(int i) const {
    int d = 0;
    for (const auto& [a, b] : edges)
      if (a == i || b == i) ++d;
    return d;
  }

  std::vector<std::vector<int>> adjacency() const {
    std::vector<std::vector<int>> adj(m);
    for (const auto& [a, b] : edges) {
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
    return adj;
  }

  bool connected() const {
    if (m <= 0) return false;
    if (m == 1) return true;
    const auto adj = adjacency();
    std::vector<char> seen(m, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int count = 1;
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      for (int w : adj[v])
        if (!seen[w]) {
          seen[w] = 1;
          ++count;
          q.push(w);
        }
    }
    return count == m;
  }
};

// Builds a connected graph of the requested family. Erdos-Renyi draws are
// resampled until connected, up to kErdosRetryCap attempts under the given
// seed; exhaustion throws.
inline constexpr int kErdosRetryCap = 1000;

inline CommGraph build_graph(GraphKind kind, int m, std::uint64_t seed,
                             double edge_prob = 0.0) {
  if (m < 1) throw std::invalid_argument("build_graph: m must be >= 1");
  CommGraph g;
  g.m = m;
  g.kind = kind;
  switch (kind) {
    case GraphKind::path:
      for (int i = 0; i + 1 < m; ++i) g.edges.insert({i, i + 1});
      break;
    case GraphKind::ring:
      for (int i = 0; i + 1 < m; ++i) g.edges.insert({i, i + 1});
      if (m > 2) g.edges.insert({0, m - 1});
      break;
    case GraphKind::complete:
      for (int i = 0; i < m; ++i)
        for (int l = i + 1; l < m; ++l) g.edges.insert({i, l});
      break;
    case GraphKind::star:
      for (int i = 1; i < m; ++i) g.edges.insert({0, i});
      break;
    case GraphKind::erdos_renyi: {
      if (!(edge_prob > 0.0 && edge_prob <= 1.0))
        throw std::invalid_argument(
            "build_graph: erdos_renyi requires edge_prob in (0, 1]");
      Rng rng(seed, 0, StreamPurpose::workload);
      for (int attempt = 0; attempt < kErdosRetryCap; ++attempt) {
        g.edges.clear();
        for (int i = 0; i < m; ++i)
          for (int l = i + 1; l < m; ++l)
            if (rng.bernoulli(edge_prob)) g.edges.insert({i, l});
        if (g.connected()) return g;
      }
      throw std::runtime_error(
          "build_graph: erdos_renyi failed to produce a connected graph "
          "after " + std::to_string(kErdosRetryCap) + " draws");
    }
  }
  if (!g.connected())
    throw std::runtime_error("build_graph: resulting graph is disconnected");
  return g;
}

}  // namespace dmgd
