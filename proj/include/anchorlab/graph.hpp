#pragma once

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "anchorlab/matrix.hpp"

namespace anchorlab {

/// Simple undirected graph. Edges are stored once, canonicalized as (u, v)
/// with u < v and sorted lexicographically; `adj` mirrors them per endpoint.
/// `features` may be empty (featureless graph) or n x d; `community` is either
/// empty or one label per node.
struct Graph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;
  std::vector<std::vector<int>> adj;
  Matrix features;
  std::vector<int> community;

  int degree(int v) const { return static_cast<int>(adj[v].size()); }

  bool has_edge(int u, int v) const {
    if (u > v) std::swap(u, v);
    return std::binary_search(edges.begin(), edges.end(), std::make_pair(u, v));
  }

  std::size_t edge_count() const { return edges.size(); }
};

/// Build a graph from a raw edge list, canonicalizing order and rejecting
/// self-loops, duplicates, and out-of-range endpoints.
inline Graph make_graph(int n, std::vector<std::pair<int, int>> raw_edges) {
  if (n < 0) throw std::invalid_argument("make_graph: negative node count");
  Graph g;
  g.n = n;
  g.adj.resize(n);
  for (auto& [u, v] : raw_edges) {
    if (u < 0 || u >= n || v < 0 || v >= n) {
      throw std::invalid_argument("make_graph: edge (" + std::to_string(u) + "," +
                                  std::to_string(v) + ") outside node range [0," +
                                  std::to_string(n) + ")");
    }
    if (u == v) {
      throw std::invalid_argument("make_graph: self-loop at node " + std::to_string(u));
    }
    if (u > v) std::swap(u, v);
  }
  std::sort(raw_edges.begin(), raw_edges.end());
  auto last = std::unique(raw_edges.begin(), raw_edges.end());
  if (last != raw_edges.end()) {
    throw std::invalid_argument("make_graph: duplicate edge in input");
  }
  g.edges = std::move(raw_edges);
  for (auto [u, v] : g.edges) {
    g.adj[u].push_back(v);
    g.adj[v].push_back(u);
  }
  for (auto& nbrs : g.adj) std::sort(nbrs.begin(), nbrs.end());
  return g;
}

/// Connected caveman graph: c cliques of s nodes each. In clique i the edge
/// (i*s, i*s+1) is removed and replaced by a bridge (i*s, ((i+1) mod c)*s + 1),
/// which keeps every node at degree s-1 and the whole graph connected.
/// Community label of node v is v / s.
inline Graph gen_caveman(int c, int s) {
  if (c < 2) throw std::invalid_argument("gen_caveman: need at least 2 cliques, got " + std::to_string(c));
  if (s < 3) throw std::invalid_argument("gen_caveman: need clique size >= 3, got " + std::to_string(s));
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < c; ++i) {
    const int base = i * s;
    for (int a = 0; a < s; ++a) {
      for (int b = a + 1; b < s; ++b) {
        if (a == 0 && b == 1) continue;  // rewired below
        edges.emplace_back(base + a, base + b);
      }
    }
    edges.emplace_back(base, ((i + 1) % c) * s + 1);
  }
  Graph g = make_graph(c * s, std::move(edges));
  g.community.resize(g.n);
  for (int v = 0; v < g.n; ++v) g.community[v] = v / s;
  return g;
}

/// rows x cols lattice with 4-neighborhood connectivity. Node (r, c) has
/// index r*cols + c.
inline Graph gen_grid(int rows, int cols) {
  if (rows < 1 || cols < 1) {
    throw std::invalid_argument("gen_grid: dimensions must be positive, got " +
                                std::to_string(rows) + "x" + std::to_string(cols));
  }
  std::vector<std::pair<int, int>> edges;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int v = r * cols + c;
      if (c + 1 < cols) edges.emplace_back(v, v + 1);
      if (r + 1 < rows) edges.emplace_back(v, v + cols);
    }
  }
  return make_graph(rows * cols, std::move(edges));
}

struct EdgeListLoad {
  Graph graph;
  int dropped_self_loops = 0;
  int dropped_duplicates = 0;
};

/// Text edge list: first non-comment line is the node count, every following
/// line is "u v". Lines starting with '#' and blank lines are skipped.
/// Self-loops and duplicate edges are dropped (counted in the result);
/// malformed lines and out-of-range endpoints raise with the line number.
inline EdgeListLoad load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_edge_list: cannot open " + path);
  EdgeListLoad out;
  std::string line;
  int line_no = 0;
  long n = -1;
  std::vector<std::pair<int, int>> edges;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    if (n < 0) {
      if (!(ls >> n) || n < 0) {
        throw std::runtime_error("load_edge_list: " + path + ":" + std::to_string(line_no) +
                                 ": expected node count");
      }
      continue;
    }
    long u, v;
    if (!(ls >> u >> v)) {
      throw std::runtime_error("load_edge_list: " + path + ":" + std::to_string(line_no) +
                               ": expected 'u v'");
    }
    std::string trailing;
    if (ls >> trailing) {
      throw std::runtime_error("load_edge_list: " + path + ":" + std::to_string(line_no) +
                               ": trailing token '" + trailing + "'");
    }
    if (u < 0 || u >= n || v < 0 || v >= n) {
      throw std::runtime_error("load_edge_list: " + path + ":" + std::to_string(line_no) +
                               ": endpoint outside [0," + std::to_string(n) + ")");
    }
    if (u == v) {
      ++out.dropped_self_loops;
      continue;
    }
    if (u > v) std::swap(u, v);
    edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
  }
  if (n < 0) throw std::runtime_error("load_edge_list: " + path + ": missing node count");
  std::sort(edges.begin(), edges.end());
  const auto last = std::unique(edges.begin(), edges.end());
  out.dropped_duplicates = static_cast<int>(edges.end() - last);
  edges.erase(last, edges.end());
  out.graph = make_graph(static_cast<int>(n), std::move(edges));
  return out;
}

inline void save_edge_list(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_edge_list: cannot open " + path);
  out << g.n << "\n";
  for (auto [u, v] : g.edges) out << u << " " << v << "\n";
  if (!out) throw std::runtime_error("save_edge_list: write failed on " + path);
}

/// Hop distances from each of `sources` to every node, row-major n x k
/// (node-major). Unreachable pairs read as n, which is one past the largest
/// possible hop count and keeps the gate input 1/(1+d) well defined.
struct DistanceField {
  int n = 0;
  int unreachable = 0;
  std::vector<int> sources;
  std::vector<int> dist;  // n * sources.size(), node-major

  int k() const { return static_cast<int>(sources.size()); }
  int at(int node, int source_index) const {
    return dist[static_cast<std::size_t>(node) * sources.size() + source_index];
  }
};

inline DistanceField bfs_distances(const Graph& g, const std::vector<int>& sources) {
  DistanceField f;
  f.n = g.n;
  f.unreachable = g.n;
  f.sources = sources;
  f.dist.assign(static_cast<std::size_t>(g.n) * sources.size(), g.n);
  std::vector<int> d(g.n);
  std::deque<int> queue;
  for (std::size_t j = 0; j < sources.size(); ++j) {
    const int s = sources[j];
    if (s < 0 || s >= g.n) {
      throw std::invalid_argument("bfs_distances: source " + std::to_string(s) +
                                  " outside [0," + std::to_string(g.n) + ")");
    }
    std::fill(d.begin(), d.end(), -1);
    d[s] = 0;
    queue.assign(1, s);
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      for (int u : g.adj[v]) {
        if (d[u] < 0) {
          d[u] = d[v] + 1;
          queue.push_back(u);
        }
      }
    }
    for (int v = 0; v < g.n; ++v) {
      if (d[v] >= 0) f.dist[static_cast<std::size_t>(v) * sources.size() + j] = d[v];
    }
  }
  return f;
}

/// Graph whose edges connect all pairs at hop distance in [1, k] of the input.
inline Graph khop_closure(const Graph& g, int k) {
  if (k < 1) throw std::invalid_argument("khop_closure: k must be >= 1, got " + std::to_string(k));
  std::vector<std::pair<int, int>> edges;
  std::vector<int> d(g.n);
  std::deque<int> queue;
  for (int s = 0; s < g.n; ++s) {
    std::fill(d.begin(), d.end(), -1);
    d[s] = 0;
    queue.assign(1, s);
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      if (d[v] == k) continue;
      for (int u : g.adj[v]) {
        if (d[u] < 0) {
          d[u] = d[v] + 1;
          queue.push_back(u);
        }
      }
    }
    for (int v = s + 1; v < g.n; ++v) {
      if (d[v] > 0) edges.emplace_back(s, v);
    }
  }
  return make_graph(g.n, std::move(edges));
}

/// True when every node is within k hops of at least one anchor.
inline bool coverage_check(const Graph& g, const std::vector<int>& anchors, int k) {
  if (anchors.empty()) throw std::invalid_argument("coverage_check: empty anchor set");
  if (k < 0) throw std::invalid_argument("coverage_check: negative radius");
  const DistanceField f = bfs_distances(g, anchors);
  for (int v = 0; v < g.n; ++v) {
    bool covered = false;
    for (int j = 0; j < f.k() && !covered; ++j) covered = f.at(v, j) <= k;
    if (!covered) return false;
  }
  return true;
}

/// Greedy k-hop dominating set: repeatedly pick the node covering the most
/// still-uncovered nodes (lowest id on ties) until everything is covered.
/// Result is sorted ascending.
inline std::vector<int> greedy_dominating_set(const Graph& g, int k) {
  if (g.n == 0) throw std::invalid_argument("greedy_dominating_set: empty graph");
  if (k < 0) throw std::invalid_argument("greedy_dominating_set: negative radius");
  // Precompute each node's coverage ball via one truncated BFS per node.
  std::vector<std::vector<int>> ball(g.n);
  std::vector<int> d(g.n);
  std::deque<int> queue;
  for (int s = 0; s < g.n; ++s) {
    std::fill(d.begin(), d.end(), -1);
    d[s] = 0;
    queue.assign(1, s);
    ball[s].push_back(s);
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      if (d[v] == k) continue;
      for (int u : g.adj[v]) {
        if (d[u] < 0) {
          d[u] = d[v] + 1;
          ball[s].push_back(u);
          queue.push_back(u);
        }
      }
    }
  }
  std::vector<char> covered(g.n, 0);
  int remaining = g.n;
  std::vector<int> chosen;
  while (remaining > 0) {
    int best = -1;
    int best_gain = 0;
    for (int v = 0; v < g.n; ++v) {
      int gain = 0;
      for (int u : ball[v]) gain += !covered[u];
      if (gain > best_gain) {
        best_gain = gain;
        best = v;
      }
    }
    // Every uncovered node covers at least itself, so progress is guaranteed.
    chosen.push_back(best);
    for (int u : ball[best]) {
      if (!covered[u]) {
        covered[u] = 1;
        --remaining;
      }
    }
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

inline bool is_connected(const Graph& g) {
  if (g.n == 0) return true;
  const DistanceField f = bfs_distances(g, {0});
  for (int v = 0; v < g.n; ++v) {
    if (f.at(v, 0) >= f.unreachable) return false;
  }
  return true;
}

}  // namespace anchorlab
