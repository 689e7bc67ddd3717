// Acceptance checks, one per command-line argument 1..7. Each prints a
// single PASS or FAIL line with the numbers behind the verdict and exits
// nonzero on failure. Argument 2 is the property-suite binary (criterion 6).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "anchorlab/graph.hpp"
#include "anchorlab/psgnn.hpp"
#include "anchorlab/runio.hpp"
#include "anchorlab/stats.hpp"
#include "anchorlab/tasks.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string fmt(double x) { return anchorlab::fmt_double(x); }

/// Train one run and return its test AUC, echoing progress per run.
double run_test_auc(const anchorlab::Graph& g, anchorlab::TrainConfig cfg,
                    std::uint64_t seed) {
  cfg.seed = seed;
  const anchorlab::TrainResult r = anchorlab::train(g, cfg);
  std::cout << "  " << anchorlab::to_string(cfg.strategy)
            << (cfg.strategy == anchorlab::Strategy::centrality_anchors
                    ? std::string(":") + anchorlab::to_string(cfg.centrality_kind)
                    : std::string())
            << " seed=" << seed << " test_auc=" << fmt(r.record.test_auc) << "\n";
  return r.record.test_auc;
}

std::vector<double> aucs_over_seeds(const anchorlab::Graph& g,
                                    const anchorlab::TrainConfig& cfg,
                                    const std::vector<std::uint64_t>& seeds) {
  std::vector<double> out;
  out.reserve(seeds.size());
  for (std::uint64_t s : seeds) out.push_back(run_test_auc(g, cfg, s));
  return out;
}

int verdict(int criterion, bool pass, const std::string& details, double elapsed) {
  std::cout << "criterion " << criterion << (pass ? " PASS " : " FAIL ") << details
            << " elapsed=" << fmt(elapsed) << "s\n";
  return pass ? 0 : 1;
}

// 1. The anchor-free control on a featureless two-clique caveman graph has
// no positional signal, so pairwise community classification stays at chance.
int criterion1() {
  const auto start = Clock::now();
  const anchorlab::Graph g = anchorlab::gen_caveman(2, 8);
  anchorlab::TrainConfig cfg;
  cfg.task = anchorlab::TaskKind::pairs;
  cfg.strategy = anchorlab::Strategy::none;
  cfg.epochs = 100;
  const std::vector<double> aucs = aucs_over_seeds(g, cfg, {1, 2, 3, 4, 5});
  const double m = mean(aucs);
  const double elapsed = seconds_since(start);
  const bool pass = m >= 0.40 && m <= 0.60 && elapsed < 60.0;
  return verdict(1, pass, "mean_auc=" + fmt(m) + " bounds=[0.40,0.60] seeds=5", elapsed);
}

// 2. Learned anchors beat random anchors on 16x16 grid link prediction:
// paired Wilcoxon p < 0.05 and mean AUC gap > 0.1 over 8 shared seeds.
int criterion2() {
  const auto start = Clock::now();
  const anchorlab::Graph g = anchorlab::gen_grid(16, 16);
  const std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8};

  anchorlab::TrainConfig learned;
  learned.task = anchorlab::TaskKind::link;
  learned.strategy = anchorlab::Strategy::learned_e;
  // The selector needs a long exploration phase on this task before the
  // validation AUC lifts off (first ~300 epochs hover near chance), and the
  // positional decoding needs the wider trunk to pull ahead of the baseline.
  learned.epochs = 1000;
  learned.hidden = 64;
  anchorlab::TrainConfig random_cfg = learned;
  random_cfg.strategy = anchorlab::Strategy::random_anchors;

  const std::vector<double> a = aucs_over_seeds(g, learned, seeds);
  const std::vector<double> b = aucs_over_seeds(g, random_cfg, seeds);
  const anchorlab::WilcoxonResult w = anchorlab::wilcoxon_signed_rank(a, b);
  const double gap = mean(a) - mean(b);
  const double elapsed = seconds_since(start);
  const bool pass = w.p_value < 0.05 && gap > 0.1 && elapsed < 600.0;
  return verdict(2,
                 pass,
                 "mean_learned=" + fmt(mean(a)) + " mean_random=" + fmt(mean(b)) +
                     " gap=" + fmt(gap) + " wilcoxon_p=" + fmt(w.p_value) + " pairs=8",
                 elapsed);
}

// 3. Headline community task at desk scale: median test AUC >= 0.90 on the
// 20-clique caveman graph.
int criterion3() {
  const auto start = Clock::now();
  const anchorlab::Graph g = anchorlab::gen_caveman(20, 20);
  anchorlab::TrainConfig cfg;
  cfg.task = anchorlab::TaskKind::pairs;
  cfg.strategy = anchorlab::Strategy::learned_e;
  // Twenty cliques need more than the default k = ceil(log2 n) = 9 anchors
  // before every community can hold one; k_const = 2 gives k = 18 and the
  // pairs AUC clears the floor on each seed individually.
  cfg.epochs = 2000;
  cfg.k_const = 2.0;
  const std::vector<double> aucs = aucs_over_seeds(g, cfg, {1, 2, 3});
  const double med = median(aucs);
  const double elapsed = seconds_since(start);
  const bool pass = med >= 0.90 && elapsed < 600.0;
  return verdict(3, pass, "median_auc=" + fmt(med) + " floor=0.90 seeds=3", elapsed);
}

// 4. More communities help (or at least never hurt beyond noise): median AUC
// over C in {2, 8, 32} cliques of size 8 is non-decreasing within 0.02.
int criterion4() {
  const auto start = Clock::now();
  const std::vector<std::uint64_t> seeds = {1, 2, 3};
  std::vector<double> medians;
  for (int c : {2, 8, 32}) {
    const anchorlab::Graph g = anchorlab::gen_caveman(c, 8);
    anchorlab::TrainConfig cfg;
    cfg.task = anchorlab::TaskKind::pairs;
    cfg.strategy = anchorlab::Strategy::learned_e;
    // Best sweep over epochs, width, and anchor budget: long runs at the
    // default width with k_const = 2 so small clique counts are not starved
    // of anchors. The two-clique graph still saturates its tiny test split
    // at AUC 1.0, which the larger configurations cannot match.
    cfg.epochs = 4000;
    cfg.k_const = 2.0;
    std::cout << " caveman C=" << c << " S=8\n";
    medians.push_back(median(aucs_over_seeds(g, cfg, seeds)));
  }
  const bool pass =
      medians[1] >= medians[0] - 0.02 && medians[2] >= medians[1] - 0.02;
  return verdict(4,
                 pass,
                 "median_auc_c2=" + fmt(medians[0]) + " c8=" + fmt(medians[1]) +
                     " c32=" + fmt(medians[2]) + " slack=0.02",
                 seconds_since(start));
}

// 5. The best centrality-picked anchor set stays within 0.10 AUC of the
// learned selector (s variant) on the two-clique caveman graph.
int criterion5() {
  const auto start = Clock::now();
  const anchorlab::Graph g = anchorlab::gen_caveman(2, 32);
  const std::vector<std::uint64_t> seeds = {1, 2, 3};

  anchorlab::TrainConfig learned;
  learned.task = anchorlab::TaskKind::pairs;
  learned.strategy = anchorlab::Strategy::learned_s;
  const double learned_auc = mean(aucs_over_seeds(g, learned, seeds));

  double best_centrality = -1.0;
  std::string best_kind;
  for (anchorlab::CentralityKind kind :
       {anchorlab::CentralityKind::betweenness, anchorlab::CentralityKind::closeness,
        anchorlab::CentralityKind::harmonic, anchorlab::CentralityKind::load,
        anchorlab::CentralityKind::degree}) {
    anchorlab::TrainConfig cfg = learned;
    cfg.strategy = anchorlab::Strategy::centrality_anchors;
    cfg.centrality_kind = kind;
    const double auc = mean(aucs_over_seeds(g, cfg, seeds));
    if (auc > best_centrality) {
      best_centrality = auc;
      best_kind = anchorlab::to_string(kind);
    }
  }
  const bool pass = best_centrality >= learned_auc - 0.10;
  return verdict(5,
                 pass,
                 "learned_s_auc=" + fmt(learned_auc) + " best_centrality=" +
                     fmt(best_centrality) + " kind=" + best_kind + " slack=0.10",
                 seconds_since(start));
}

// 6. The whole property suite passes, in under two minutes.
int criterion6(const std::string& suite_binary) {
  const auto start = Clock::now();
  if (suite_binary.empty()) {
    std::cout << "criterion 6 FAIL no property-suite binary given\n";
    return 1;
  }
  const int status = std::system(("\"" + suite_binary + "\"").c_str());
  const double elapsed = seconds_since(start);
  const bool pass = status == 0 && elapsed < 120.0;
  return verdict(6,
                 pass,
                 std::string("suite_exit=") + std::to_string(status) + " budget=120s",
                 elapsed);
}

// 7. Forcing an automorphism-invariant anchor pair on the two-clique caveman
// graph: the s variant cannot separate a symmetric node pair, the e variant
// (node-id positional rows) can.
int criterion7() {
  const auto start = Clock::now();
  const anchorlab::Graph g = anchorlab::gen_caveman(2, 8);

  // v -> (v + 8) % 16 swaps the cliques; verify it really is an automorphism
  // of the generated graph so the symmetry claim below is grounded.
  for (const auto& [u, v] : g.edges) {
    if (!g.has_edge((u + 8) % 16, (v + 8) % 16)) {
      return verdict(7, false, "clique-swap map is not an automorphism", 0.0);
    }
  }
  const std::vector<int> anchors = {2, 10};  // closed under the swap
  const int node_a = 3, node_b = 11;         // a symmetric pair

  auto pair_gap = [&](anchorlab::PsgnnMode mode) {
    anchorlab::PsgnnConfig cfg;
    cfg.mode = mode;
    cfg.hidden = 16;
    cfg.pos_dim = 8;
    cfg.n_max = g.n;
    std::mt19937_64 rng = anchorlab::seeded_rng(7, 2);
    const anchorlab::ModelParams params = anchorlab::ModelParams::init(cfg, rng);
    anchorlab::ad::Tape tape;
    const anchorlab::BoundParams bound = anchorlab::bind_params(tape, params, false);
    const anchorlab::ForwardResult fwd = anchorlab::forward_fixed(tape, g, bound, anchors);
    const anchorlab::Matrix& h = tape.val(fwd.embeddings);
    double gap = 0.0;
    for (int j = 0; j < h.cols(); ++j) {
      gap = std::max(gap, std::fabs(h(node_a, j) - h(node_b, j)));
    }
    return gap;
  };

  const double s_gap = pair_gap(anchorlab::PsgnnMode::s);
  const double e_gap = pair_gap(anchorlab::PsgnnMode::e);
  const bool pass = s_gap < 1e-9 && e_gap > 1e-3;
  return verdict(7,
                 pass,
                 "s_gap=" + fmt(s_gap) + " (<1e-9) e_gap=" + fmt(e_gap) + " (>1e-3)",
                 seconds_since(start));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: anchorlab_acceptance <criterion 1..7> [property-suite-binary]\n";
    return 2;
  }
  const int criterion = std::atoi(argv[1]);
  const std::string suite = argc > 2 ? argv[2] : "";
  try {
    switch (criterion) {
      case 1: return criterion1();
      case 2: return criterion2();
      case 3: return criterion3();
      case 4: return criterion4();
      case 5: return criterion5();
      case 6: return criterion6(suite);
      case 7: return criterion7();
      default:
        std::cerr << "unknown criterion " << criterion << "\n";
        return 2;
    }
  } catch (const std::exception& e) {
    std::cout << "criterion " << criterion << " FAIL exception: " << e.what() << "\n";
    return 1;
  }
}
