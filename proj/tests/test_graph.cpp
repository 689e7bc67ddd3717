#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "anchorlab/graph.hpp"

using namespace anchorlab;

namespace {

constexpr int kInf = 1 << 28;

/// Independent all-pairs oracle: Floyd-Warshall on the adjacency matrix.
std::vector<std::vector<int>> floyd_warshall(const Graph& g) {
  std::vector<std::vector<int>> d(g.n, std::vector<int>(g.n, kInf));
  for (int v = 0; v < g.n; ++v) d[v][v] = 0;
  for (auto [u, v] : g.edges) d[u][v] = d[v][u] = 1;
  for (int m = 0; m < g.n; ++m) {
    for (int i = 0; i < g.n; ++i) {
      for (int j = 0; j < g.n; ++j) {
        if (d[i][m] + d[m][j] < d[i][j]) d[i][j] = d[i][m] + d[m][j];
      }
    }
  }
  return d;
}

/// Independent k-hop oracle: boolean closure of I + A up to the k-th power.
std::set<std::pair<int, int>> khop_by_matrix_power(const Graph& g, int k) {
  std::vector<std::vector<bool>> a(g.n, std::vector<bool>(g.n, false));
  std::vector<std::vector<bool>> reach(g.n, std::vector<bool>(g.n, false));
  for (auto [u, v] : g.edges) a[u][v] = a[v][u] = true;
  for (int v = 0; v < g.n; ++v) reach[v][v] = true;
  for (int step = 0; step < k; ++step) {
    std::vector<std::vector<bool>> next = reach;
    for (int i = 0; i < g.n; ++i) {
      for (int m = 0; m < g.n; ++m) {
        if (!reach[i][m]) continue;
        for (int j = 0; j < g.n; ++j) {
          if (a[m][j]) next[i][j] = true;
        }
      }
    }
    reach = std::move(next);
  }
  std::set<std::pair<int, int>> pairs;
  for (int u = 0; u < g.n; ++u) {
    for (int v = u + 1; v < g.n; ++v) {
      if (reach[u][v]) pairs.insert({u, v});
    }
  }
  return pairs;
}

Graph random_graph(int n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (coin(rng)) edges.emplace_back(u, v);
    }
  }
  return make_graph(n, std::move(edges));
}

std::string write_temp(const std::string& contents) {
  std::string path = std::string("graph_io_test_") +
                     std::to_string(std::random_device{}()) + ".txt";
  std::ofstream out(path);
  out << contents;
  return path;
}

}  // namespace

TEST_CASE("caveman generator: exact small instance") {
  const Graph g = gen_caveman(2, 3);
  REQUIRE(g.n == 6);
  const std::vector<std::pair<int, int>> expected = {
      {0, 2}, {0, 4}, {1, 2}, {1, 3}, {3, 5}, {4, 5}};
  REQUIRE(g.edges == expected);
  REQUIRE(g.community == std::vector<int>{0, 0, 0, 1, 1, 1});
}

TEST_CASE("caveman generator: structural invariants across sizes") {
  for (int c = 2; c <= 8; ++c) {
    for (int s = 3; s <= 10; ++s) {
      const Graph g = gen_caveman(c, s);
      INFO("c=" << c << " s=" << s);
      REQUIRE(g.n == c * s);
      REQUIRE(g.edge_count() == static_cast<std::size_t>(c) * s * (s - 1) / 2);
      for (int v = 0; v < g.n; ++v) {
        REQUIRE(g.degree(v) == s - 1);
        REQUIRE(g.community[v] == v / s);
      }
      REQUIRE(is_connected(g));
    }
  }
  REQUIRE_THROWS_AS(gen_caveman(1, 5), std::invalid_argument);
  REQUIRE_THROWS_AS(gen_caveman(3, 2), std::invalid_argument);
}

TEST_CASE("grid generator") {
  const Graph g = gen_grid(2, 3);
  const std::vector<std::pair<int, int>> expected = {
      {0, 1}, {0, 3}, {1, 2}, {1, 4}, {2, 5}, {3, 4}, {4, 5}};
  REQUIRE(g.edges == expected);

  const Graph big = gen_grid(16, 16);
  REQUIRE(big.n == 256);
  REQUIRE(big.edge_count() == 480);  // 16*15 horizontal + 15*16 vertical
  REQUIRE(is_connected(big));

  const Graph single = gen_grid(1, 1);
  REQUIRE(single.n == 1);
  REQUIRE(single.edge_count() == 0);

  REQUIRE_THROWS_AS(gen_grid(0, 4), std::invalid_argument);
}

TEST_CASE("make_graph rejects malformed input") {
  REQUIRE_THROWS_AS(make_graph(3, {{0, 0}}), std::invalid_argument);
  REQUIRE_THROWS_AS(make_graph(3, {{0, 3}}), std::invalid_argument);
  REQUIRE_THROWS_AS(make_graph(3, {{0, 1}, {1, 0}}), std::invalid_argument);
  const Graph g = make_graph(3, {{2, 0}, {1, 2}});
  REQUIRE(g.edges == std::vector<std::pair<int, int>>{{0, 2}, {1, 2}});
}

TEST_CASE("bfs distances match Floyd-Warshall on random graphs") {
  std::mt19937_64 rng(7001);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 63);
    const Graph g = random_graph(n, 0.08 + 0.3 * (trial % 4), rng);
    const auto oracle = floyd_warshall(g);
    std::vector<int> sources(g.n);
    for (int v = 0; v < g.n; ++v) sources[v] = v;
    const DistanceField f = bfs_distances(g, sources);
    REQUIRE(f.unreachable == g.n);
    for (int v = 0; v < g.n; ++v) {
      for (int s = 0; s < g.n; ++s) {
        const int expected = oracle[s][v] >= kInf ? g.n : oracle[s][v];
        REQUIRE(f.at(v, s) == expected);
      }
    }
  }
}

TEST_CASE("bfs distances: unreachable nodes read as n") {
  const Graph g = make_graph(5, {{0, 1}, {3, 4}});
  const DistanceField f = bfs_distances(g, {0});
  REQUIRE(f.at(1, 0) == 1);
  REQUIRE(f.at(2, 0) == 5);
  REQUIRE(f.at(3, 0) == 5);
  REQUIRE_THROWS_AS(bfs_distances(g, {5}), std::invalid_argument);
}

TEST_CASE("khop closure matches boolean matrix powers") {
  const Graph p4 = make_graph(4, {{0, 1}, {1, 2}, {2, 3}});
  const Graph two = khop_closure(p4, 2);
  const std::vector<std::pair<int, int>> expected = {{0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 3}};
  REQUIRE(two.edges == expected);

  std::mt19937_64 rng(7002);
  for (int trial = 0; trial < 15; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 20);
    const Graph g = random_graph(n, 0.2, rng);
    for (int k = 1; k <= 4; ++k) {
      const Graph closed = khop_closure(g, k);
      std::set<std::pair<int, int>> got(closed.edges.begin(), closed.edges.end());
      REQUIRE(got == khop_by_matrix_power(g, k));
    }
  }
  REQUIRE_THROWS_AS(khop_closure(p4, 0), std::invalid_argument);
}

TEST_CASE("greedy dominating set covers every graph it is given") {
  std::mt19937_64 rng(7003);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 40);
    const Graph g = random_graph(n, 0.1, rng);  // often disconnected
    for (int k = 0; k <= 2; ++k) {
      const std::vector<int> dom = greedy_dominating_set(g, k);
      REQUIRE(coverage_check(g, dom, k));
      REQUIRE(std::is_sorted(dom.begin(), dom.end()));
    }
  }
}

TEST_CASE("greedy dominating set: known instances") {
  // Star: the hub alone dominates at radius 1.
  const Graph star = make_graph(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  REQUIRE(greedy_dominating_set(star, 1) == std::vector<int>{0});
  // Ties break to the lowest id: an edgeless pair needs both nodes, 0 first.
  const Graph isolated = make_graph(2, {});
  REQUIRE(greedy_dominating_set(isolated, 1) == std::vector<int>{0, 1});
  REQUIRE_FALSE(coverage_check(isolated, {0}, 1));
  REQUIRE_THROWS_AS(coverage_check(isolated, {}, 1), std::invalid_argument);
}

TEST_CASE("edge list round trip") {
  const Graph g = gen_caveman(3, 4);
  const std::string path = write_temp("");
  save_edge_list(g, path);
  const EdgeListLoad loaded = load_edge_list(path);
  REQUIRE(loaded.graph.n == g.n);
  REQUIRE(loaded.graph.edges == g.edges);
  REQUIRE(loaded.dropped_self_loops == 0);
  REQUIRE(loaded.dropped_duplicates == 0);
  std::remove(path.c_str());
}

TEST_CASE("edge list loader: comments, duplicates, self-loops") {
  const std::string path = write_temp(
      "# header comment\n"
      "4\n"
      "0 1\n"
      "1 0\n"
      "\n"
      "2 2\n"
      "2 3\n");
  const EdgeListLoad loaded = load_edge_list(path);
  REQUIRE(loaded.graph.n == 4);
  REQUIRE(loaded.graph.edges == std::vector<std::pair<int, int>>{{0, 1}, {2, 3}});
  REQUIRE(loaded.dropped_duplicates == 1);
  REQUIRE(loaded.dropped_self_loops == 1);
  std::remove(path.c_str());
}

TEST_CASE("edge list loader: malformed input names the line") {
  const std::string path = write_temp("3\n0 1\n0 x\n");
  REQUIRE_THROWS_WITH(load_edge_list(path), Catch::Matchers::ContainsSubstring(":3"));
  std::remove(path.c_str());

  const std::string path2 = write_temp("3\n0 7\n");
  REQUIRE_THROWS_WITH(load_edge_list(path2), Catch::Matchers::ContainsSubstring(":2"));
  std::remove(path2.c_str());

  REQUIRE_THROWS_AS(load_edge_list("does_not_exist_anywhere.txt"), std::runtime_error);
}
