#pragma once

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <string>
#include <vector>

#include "anchorlab/graph.hpp"

namespace anchorlab {

enum class CentralityKind { degree, betweenness, closeness, harmonic, load };

inline const char* to_string(CentralityKind kind) {
  switch (kind) {
    case CentralityKind::degree: return "degree";
    case CentralityKind::betweenness: return "betweenness";
    case CentralityKind::closeness: return "closeness";
    case CentralityKind::harmonic: return "harmonic";
    case CentralityKind::load: return "load";
  }
  throw std::logic_error("to_string: bad CentralityKind");
}

inline CentralityKind centrality_kind_from_string(const std::string& name) {
  if (name == "degree") return CentralityKind::degree;
  if (name == "betweenness") return CentralityKind::betweenness;
  if (name == "closeness") return CentralityKind::closeness;
  if (name == "harmonic") return CentralityKind::harmonic;
  if (name == "load") return CentralityKind::load;
  throw std::invalid_argument("unknown centrality '" + name + "'");
}

struct ScoreVector {
  CentralityKind kind;
  std::vector<double> scores;
};

namespace detail {

/// One BFS from s recording hop distance, shortest-path counts and the
/// distance-ordered visit sequence (the pieces Brandes' accumulation needs).
struct ShortestPathTree {
  std::vector<int> dist;
  std::vector<double> sigma;  // number of shortest s->v paths
  std::vector<int> order;     // visited nodes in nondecreasing distance
};

inline ShortestPathTree bfs_tree(const Graph& g, int s) {
  ShortestPathTree t;
  t.dist.assign(g.n, -1);
  t.sigma.assign(g.n, 0.0);
  t.order.reserve(g.n);
  t.dist[s] = 0;
  t.sigma[s] = 1.0;
  std::deque<int> queue(1, s);
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    t.order.push_back(v);
    for (int u : g.adj[v]) {
      if (t.dist[u] < 0) {
        t.dist[u] = t.dist[v] + 1;
        queue.push_back(u);
      }
      if (t.dist[u] == t.dist[v] + 1) t.sigma[u] += t.sigma[v];
    }
  }
  return t;
}

inline std::vector<double> betweenness_scores(const Graph& g) {
  std::vector<double> cb(g.n, 0.0);
  std::vector<double> delta(g.n);
  for (int s = 0; s < g.n; ++s) {
    const ShortestPathTree t = bfs_tree(g, s);
    std::fill(delta.begin(), delta.end(), 0.0);
    for (auto it = t.order.rbegin(); it != t.order.rend(); ++it) {
      const int w = *it;
      for (int v : g.adj[w]) {
        if (t.dist[v] == t.dist[w] - 1) {
          delta[v] += t.sigma[v] / t.sigma[w] * (1.0 + delta[w]);
        }
      }
      if (w != s) cb[w] += delta[w];
    }
  }
  // Each unordered pair was accumulated from both endpoints.
  for (double& x : cb) x /= 2.0;
  return cb;
}

/// Load centrality: every ordered pair (s, v) routes one unit of flow from v
/// back to s, split equally over the shortest-path predecessors at each
/// branching; a node's load is the flow passing through it. Halved so that on
/// branch-free graphs (trees) it coincides with betweenness.
inline std::vector<double> load_scores(const Graph& g) {
  std::vector<double> load(g.n, 0.0);
  std::vector<double> carry(g.n);
  std::vector<int> preds;
  for (int s = 0; s < g.n; ++s) {
    const ShortestPathTree t = bfs_tree(g, s);
    std::fill(carry.begin(), carry.end(), 1.0);
    carry[s] = 0.0;
    for (auto it = t.order.rbegin(); it != t.order.rend(); ++it) {
      const int v = *it;
      if (v == s) continue;
      preds.clear();
      for (int u : g.adj[v]) {
        if (t.dist[u] == t.dist[v] - 1) preds.push_back(u);
      }
      const double share = carry[v] / static_cast<double>(preds.size());
      for (int u : preds) {
        carry[u] += share;
        if (u != s) load[u] += share;
      }
    }
  }
  for (double& x : load) x /= 2.0;
  return load;
}

}  // namespace detail

/// Centrality scores for every node; all variants handle disconnected graphs
/// by restricting to reachable pairs.
inline ScoreVector centrality(const Graph& g, CentralityKind kind) {
  ScoreVector out{kind, std::vector<double>(static_cast<std::size_t>(g.n), 0.0)};
  switch (kind) {
    case CentralityKind::degree:
      for (int v = 0; v < g.n; ++v) out.scores[v] = g.degree(v);
      break;
    case CentralityKind::betweenness:
      out.scores = detail::betweenness_scores(g);
      break;
    case CentralityKind::closeness:
    case CentralityKind::harmonic:
      for (int v = 0; v < g.n; ++v) {
        const detail::ShortestPathTree t = detail::bfs_tree(g, v);
        long long total = 0;
        int reachable = 0;
        double harm = 0.0;
        for (int u = 0; u < g.n; ++u) {
          if (t.dist[u] > 0) {
            total += t.dist[u];
            ++reachable;
            harm += 1.0 / t.dist[u];
          }
        }
        if (kind == CentralityKind::harmonic) {
          out.scores[v] = harm;
        } else {
          out.scores[v] = total > 0 ? static_cast<double>(reachable) / static_cast<double>(total) : 0.0;
        }
      }
      break;
    case CentralityKind::load:
      out.scores = detail::load_scores(g);
      break;
  }
  return out;
}

/// Indices of the k highest scores, lowest id winning ties, returned sorted
/// ascending.
inline std::vector<int> top_k_by_score(const ScoreVector& sv, int k) {
  const int n = static_cast<int>(sv.scores.size());
  if (k < 1 || k > n) {
    throw std::invalid_argument("top_k_by_score: k=" + std::to_string(k) +
                                " outside [1," + std::to_string(n) + "]");
  }
  std::vector<int> ids(n);
  for (int i = 0; i < n; ++i) ids[i] = i;
  std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) {
    if (sv.scores[a] != sv.scores[b]) return sv.scores[a] > sv.scores[b];
    return a < b;
  });
  ids.resize(k);
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace anchorlab
