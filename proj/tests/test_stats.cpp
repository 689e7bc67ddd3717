#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "anchorlab/stats.hpp"

using namespace anchorlab;

namespace {

/// Independent exact Wilcoxon oracle: enumerate all 2^n sign assignments of
/// the absolute differences and count rank sums at or beyond the observed one.
/// Ranks are recomputed here from scratch (sort-based midpoint ranks).
double enumerate_wilcoxon_p(const std::vector<double>& diffs) {
  const int n = static_cast<int>(diffs.size());
  std::vector<double> abs_d(n);
  for (int i = 0; i < n; ++i) abs_d[i] = std::fabs(diffs[i]);
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return abs_d[a] < abs_d[b]; });
  std::vector<double> rank(n);
  int i = 0;
  while (i < n) {
    int j = i;
    while (j + 1 < n && abs_d[order[j + 1]] == abs_d[order[i]]) ++j;
    for (int t = i; t <= j; ++t) rank[order[t]] = (i + 1 + j + 1) / 2.0;
    i = j + 1;
  }
  double observed = 0.0;
  for (int v = 0; v < n; ++v) {
    if (diffs[v] > 0.0) observed += rank[v];
  }
  long at_or_below = 0, at_or_above = 0;
  const long total = 1L << n;
  for (long mask = 0; mask < total; ++mask) {
    double w = 0.0;
    for (int v = 0; v < n; ++v) {
      if (mask & (1L << v)) w += rank[v];
    }
    if (w <= observed + 1e-12) ++at_or_below;
    if (w >= observed - 1e-12) ++at_or_above;
  }
  const double tail = static_cast<double>(std::min(at_or_below, at_or_above)) / total;
  return std::min(1.0, 2.0 * tail);
}

}  // namespace

TEST_CASE("average_ranks with ties") {
  REQUIRE(average_ranks({10, 20, 20, 30}) == std::vector<double>{1.0, 2.5, 2.5, 4.0});
  REQUIRE(average_ranks({5, 5, 5}) == std::vector<double>{2.0, 2.0, 2.0});
  REQUIRE(average_ranks({3, 1, 2}) == std::vector<double>{3.0, 1.0, 2.0});
}

TEST_CASE("wilcoxon: exact p matches full sign enumeration") {
  std::mt19937_64 rng(13001);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 9);
    std::vector<double> a(n), b(n);
    for (int i = 0; i < n; ++i) {
      // Integer-ish values force tied absolute differences regularly.
      a[i] = static_cast<double>(rng() % 7);
      b[i] = static_cast<double>(rng() % 7);
      if (a[i] == b[i]) a[i] += 1.0;  // keep this oracle zero-free
    }
    std::vector<double> diffs(n);
    for (int i = 0; i < n; ++i) diffs[i] = a[i] - b[i];
    const WilcoxonResult r = wilcoxon_signed_rank(a, b);
    REQUIRE(r.exact);
    REQUIRE(r.n_effective == n);
    REQUIRE_THAT(r.p_value, Catch::Matchers::WithinAbs(enumerate_wilcoxon_p(diffs), 1e-12));
  }
}

TEST_CASE("wilcoxon: hand example") {
  const WilcoxonResult r = wilcoxon_signed_rank({1, 2, 3}, {2, 3, 4});
  REQUIRE(r.exact);
  REQUIRE(r.n_effective == 3);
  REQUIRE_THAT(r.statistic, Catch::Matchers::WithinAbs(0.0, 1e-12));
  REQUIRE_THAT(r.p_value, Catch::Matchers::WithinAbs(0.25, 1e-12));
}

TEST_CASE("wilcoxon: zero differences drop out; all-zero is degenerate") {
  const WilcoxonResult r = wilcoxon_signed_rank({1, 5, 3, 4}, {2, 5, 3, 1});
  REQUIRE(r.n_effective == 2);
  const WilcoxonResult z = wilcoxon_signed_rank({1, 2, 3}, {1, 2, 3});
  REQUIRE(z.degenerate);
  REQUIRE(z.p_value == 1.0);
  REQUIRE(z.n_effective == 0);
}

TEST_CASE("wilcoxon: swapping the samples mirrors the statistic, keeps p") {
  std::mt19937_64 rng(13002);
  std::vector<double> a(12), b(12);
  for (int i = 0; i < 12; ++i) {
    a[i] = std::normal_distribution<double>(0, 1)(rng);
    b[i] = std::normal_distribution<double>(0.4, 1)(rng);
  }
  const WilcoxonResult ab = wilcoxon_signed_rank(a, b);
  const WilcoxonResult ba = wilcoxon_signed_rank(b, a);
  REQUIRE_THAT(ab.p_value, Catch::Matchers::WithinAbs(ba.p_value, 1e-12));
  const double n = ab.n_effective;
  REQUIRE_THAT(ab.statistic + ba.statistic, Catch::Matchers::WithinAbs(n * (n + 1) / 2.0, 1e-9));
}

TEST_CASE("wilcoxon: normal approximation beyond 20 pairs") {
  std::vector<double> a(30), b(30);
  for (int i = 0; i < 30; ++i) {
    a[i] = i;
    b[i] = i + 1.0;  // constant shift, fully tied |d|; tie correction applies
  }
  const WilcoxonResult r = wilcoxon_signed_rank(a, b);
  REQUIRE_FALSE(r.exact);
  REQUIRE_FALSE(r.degenerate);
  REQUIRE(r.statistic == 0.0);
  REQUIRE(r.p_value < 1e-6);

  // A null-consistent sample should not produce extreme p-values.
  std::mt19937_64 rng(13003);
  for (int i = 0; i < 30; ++i) {
    a[i] = std::normal_distribution<double>(0, 1)(rng);
    b[i] = std::normal_distribution<double>(0, 1)(rng);
  }
  const WilcoxonResult null_r = wilcoxon_signed_rank(a, b);
  REQUIRE(null_r.p_value > 0.001);
  REQUIRE(null_r.p_value <= 1.0);
}

TEST_CASE("wilcoxon: input validation") {
  REQUIRE_THROWS_AS(wilcoxon_signed_rank({1, 2}, {1}), std::invalid_argument);
  REQUIRE_THROWS_AS(wilcoxon_signed_rank({}, {}), std::invalid_argument);
}

TEST_CASE("spearman: hand values") {
  REQUIRE_THAT(spearman({1, 2, 3}, {1, 3, 2}).value, Catch::Matchers::WithinAbs(0.5, 1e-12));
  REQUIRE_THAT(spearman({1, 2, 3}, {10, 20, 30}).value, Catch::Matchers::WithinAbs(1.0, 1e-12));
  REQUIRE_THAT(spearman({1, 2, 3}, {3, 2, 1}).value, Catch::Matchers::WithinAbs(-1.0, 1e-12));
  // Tied input: ranks of x are (1.5, 1.5, 3).
  REQUIRE_THAT(spearman({1, 1, 2}, {1, 2, 3}).value,
               Catch::Matchers::WithinAbs(std::sqrt(3.0) / 2.0, 1e-12));
  REQUIRE(spearman({4, 4, 4}, {1, 2, 3}).degenerate);
  REQUIRE_THROWS_AS(spearman({1}, {1}), std::invalid_argument);
  REQUIRE_THROWS_AS(spearman({1, 2}, {1, 2, 3}), std::invalid_argument);
}

TEST_CASE("spearman: invariant under monotone transforms") {
  std::mt19937_64 rng(13004);
  std::vector<double> x(25), y(25), wx(25);
  for (int i = 0; i < 25; ++i) {
    x[i] = std::normal_distribution<double>(0, 1)(rng);
    y[i] = std::normal_distribution<double>(0, 1)(rng);
    wx[i] = std::exp(x[i]);
  }
  REQUIRE_THAT(spearman(x, y).value, Catch::Matchers::WithinAbs(spearman(wx, y).value, 1e-12));
}

TEST_CASE("kendall: hand values including tau-b tie correction") {
  REQUIRE_THAT(kendall({1, 2, 3}, {1, 3, 2}).value,
               Catch::Matchers::WithinAbs(1.0 / 3.0, 1e-12));
  REQUIRE_THAT(kendall({1, 2, 3}, {4, 5, 6}).value, Catch::Matchers::WithinAbs(1.0, 1e-12));
  REQUIRE_THAT(kendall({1, 2, 3}, {6, 5, 4}).value, Catch::Matchers::WithinAbs(-1.0, 1e-12));
  // x ties one pair, y ties one pair: C=4, D=0, tau-b = 4 / sqrt(5 * 5).
  REQUIRE_THAT(kendall({1, 1, 2, 3}, {1, 2, 2, 3}).value,
               Catch::Matchers::WithinAbs(0.8, 1e-12));
  REQUIRE(kendall({2, 2, 2}, {1, 2, 3}).degenerate);
  REQUIRE_THROWS_AS(kendall({1}, {1}), std::invalid_argument);
}
