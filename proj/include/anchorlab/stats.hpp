#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace anchorlab {

/// 1-based ranks with ties replaced by the mean rank of the tied block.
inline std::vector<double> average_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<int> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return values[a] < values[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double mean_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

struct WilcoxonResult {
  double statistic = 0.0;  // W+, the rank sum of positive differences
  double p_value = 1.0;    // two-sided
  int n_effective = 0;     // pairs remaining after zero differences drop out
  bool exact = false;      // exact signed-rank null vs normal approximation
  bool degenerate = false; // every difference was zero
};

namespace detail {

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace detail

/// Paired two-sided Wilcoxon signed-rank test. Zero differences are dropped.
/// Up to 20 effective pairs the p-value enumerates the exact conditional null
/// (a subset-sum count over doubled ranks, so midpoint ranks from ties stay
/// integral); beyond that it falls back to the normal approximation with tie
/// correction. Fewer than ~6 effective pairs cannot reach p < 0.05 at all, so
/// interpret small-sample results accordingly.
inline WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a,
                                           const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("wilcoxon_signed_rank: length mismatch " +
                                std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  if (a.empty()) throw std::invalid_argument("wilcoxon_signed_rank: empty input");
  std::vector<double> diff;
  diff.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d != 0.0) diff.push_back(d);
  }
  WilcoxonResult r;
  r.n_effective = static_cast<int>(diff.size());
  if (diff.empty()) {
    r.degenerate = true;
    r.exact = true;
    return r;
  }
  std::vector<double> abs_diff(diff.size());
  for (std::size_t i = 0; i < diff.size(); ++i) abs_diff[i] = std::fabs(diff[i]);
  const std::vector<double> ranks = average_ranks(abs_diff);
  double w_plus = 0.0;
  for (std::size_t i = 0; i < diff.size(); ++i) {
    if (diff[i] > 0.0) w_plus += ranks[i];
  }
  r.statistic = w_plus;
  const int n = r.n_effective;
  if (n <= 20) {
    // Exact: count sign assignments by doubled rank sum. Doubled average
    // ranks are integers, total mass is 2^n which fits comfortably in 64 bits.
    std::vector<int> r2(diff.size());
    int total = 0;
    for (std::size_t i = 0; i < diff.size(); ++i) {
      r2[i] = static_cast<int>(std::llround(2.0 * ranks[i]));
      total += r2[i];
    }
    std::vector<std::uint64_t> count(static_cast<std::size_t>(total) + 1, 0);
    count[0] = 1;
    for (int rv : r2) {
      for (int s = total; s >= rv; --s) count[s] += count[s - rv];
    }
    const int w2 = static_cast<int>(std::llround(2.0 * w_plus));
    std::uint64_t le = 0, ge = 0;
    for (int s = 0; s <= total; ++s) {
      if (s <= w2) le += count[s];
      if (s >= w2) ge += count[s];
    }
    const double denom = std::pow(2.0, n);
    const double tail = std::min(static_cast<double>(le), static_cast<double>(ge)) / denom;
    r.p_value = std::min(1.0, 2.0 * tail);
    r.exact = true;
  } else {
    const double mean = n * (n + 1) / 4.0;
    double var = n * (n + 1) * (2.0 * n + 1.0) / 24.0;
    // Tie correction: subtract (t^3 - t) / 48 per tied block of size t.
    std::vector<double> sorted_abs = abs_diff;
    std::sort(sorted_abs.begin(), sorted_abs.end());
    std::size_t i = 0;
    while (i < sorted_abs.size()) {
      std::size_t j = i;
      while (j + 1 < sorted_abs.size() && sorted_abs[j + 1] == sorted_abs[i]) ++j;
      const double t = static_cast<double>(j - i + 1);
      var -= (t * t * t - t) / 48.0;
      i = j + 1;
    }
    if (var <= 0.0) {
      r.degenerate = true;
      return r;
    }
    const double z = (w_plus - mean) / std::sqrt(var);
    r.p_value = std::min(1.0, 2.0 * (1.0 - detail::normal_cdf(std::fabs(z))));
  }
  return r;
}

struct CorrelationResult {
  double value = 0.0;
  bool degenerate = false;  // at least one side constant; value meaningless
};

/// Spearman rank correlation: Pearson correlation of average ranks.
inline CorrelationResult spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("spearman: length mismatch " + std::to_string(x.size()) +
                                " vs " + std::to_string(y.size()));
  }
  if (x.size() < 2) throw std::invalid_argument("spearman: need at least 2 samples");
  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  CorrelationResult r;
  if (sxx == 0.0 || syy == 0.0) {
    r.degenerate = true;
    return r;
  }
  r.value = sxy / std::sqrt(sxx * syy);
  return r;
}

inline long long count_tie_pairs(const std::vector<double>& v) {
  std::vector<double> s = v;
  std::sort(s.begin(), s.end());
  long long pairs = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t j = i;
    while (j + 1 < s.size() && s[j + 1] == s[i]) ++j;
    const long long t = static_cast<long long>(j - i + 1);
    pairs += t * (t - 1) / 2;
    i = j + 1;
  }
  return pairs;
}

/// Kendall tau-b with tie correction in the denominator.
inline CorrelationResult kendall(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("kendall: length mismatch " + std::to_string(x.size()) +
                                " vs " + std::to_string(y.size()));
  }
  if (x.size() < 2) throw std::invalid_argument("kendall: need at least 2 samples");
  long long concordant = 0, discordant = 0, ties_x = 0, ties_y = 0;
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0.0 && dy == 0.0) continue;
      if (dx == 0.0) ++ties_x;
      else if (dy == 0.0) ++ties_y;
      else if ((dx > 0.0) == (dy > 0.0)) ++concordant;
      else ++discordant;
    }
  }
  CorrelationResult r;
  const double n0 = static_cast<double>(n) * (n - 1) / 2.0;
  const double denom_x = n0 - static_cast<double>(count_tie_pairs(x));
  const double denom_y = n0 - static_cast<double>(count_tie_pairs(y));
  if (denom_x <= 0.0 || denom_y <= 0.0) {
    r.degenerate = true;
    return r;
  }
  r.value = static_cast<double>(concordant - discordant) / std::sqrt(denom_x * denom_y);
  return r;
}

}  // namespace anchorlab
