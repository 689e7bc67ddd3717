#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "anchorlab/centrality.hpp"
#include "anchorlab/graph.hpp"
#include "anchorlab/optim.hpp"
#include "anchorlab/psgnn.hpp"
#include "anchorlab/stats.hpp"

namespace anchorlab {

/// link: predict held-out edges against sampled non-edges; message passing
/// sees only the training edges. pairs: classify same-community versus
/// cross-community node pairs on the full graph.
enum class TaskKind { link, pairs };

inline const char* to_string(TaskKind t) { return t == TaskKind::link ? "link" : "pairs"; }

inline TaskKind task_kind_from_string(const std::string& s) {
  if (s == "link") return TaskKind::link;
  if (s == "pairs") return TaskKind::pairs;
  throw std::invalid_argument("unknown task '" + s + "'");
}

struct LabeledPair {
  int u = 0;
  int v = 0;
  double label = 0.0;  // 1 = positive, 0 = negative
};

struct SplitData {
  std::vector<LabeledPair> train, valid, test;
  Graph message_graph;
};

namespace detail {

/// k distinct values from [0, n) by partial Fisher-Yates, returned ascending.
inline std::vector<int> sample_without_replacement(int n, int k, std::mt19937_64& rng) {
  if (k < 1 || k > n) {
    throw std::invalid_argument("sample_without_replacement: k=" + std::to_string(k) +
                                " outside [1," + std::to_string(n) + "]");
  }
  std::vector<int> ids(n);
  for (int i = 0; i < n; ++i) ids[i] = i;
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(ids[i], ids[pick(rng)]);
  }
  ids.resize(k);
  std::sort(ids.begin(), ids.end());
  return ids;
}

inline void append_pairs(std::vector<LabeledPair>& out,
                         const std::vector<std::pair<int, int>>& pairs,
                         std::size_t from, std::size_t count, double label) {
  for (std::size_t i = from; i < from + count; ++i) {
    out.push_back(LabeledPair{pairs[i].first, pairs[i].second, label});
  }
}

}  // namespace detail

/// 80/10/10 edge split (floor for valid/test). Positives are held-out edges;
/// negatives are uniformly sampled non-edges of the full graph, one per
/// positive, disjoint across splits and never colliding with a true edge.
/// The message graph keeps only the training positives.
inline SplitData split_link(const Graph& g, std::uint64_t seed) {
  const std::size_t m = g.edge_count();
  const std::size_t m_eval = m / 10;
  if (m_eval == 0) {
    throw std::invalid_argument("split_link: need at least 10 edges, got " + std::to_string(m));
  }
  const std::size_t m_train = m - 2 * m_eval;
  std::mt19937_64 rng = seeded_rng(seed, 101);
  std::vector<std::pair<int, int>> edges = g.edges;
  std::shuffle(edges.begin(), edges.end(), rng);
  // Non-edges of the full graph, enumerated so the draw is exactly uniform.
  std::vector<std::pair<int, int>> non_edges;
  for (int u = 0; u < g.n; ++u) {
    for (int v = u + 1; v < g.n; ++v) {
      if (!g.has_edge(u, v)) non_edges.emplace_back(u, v);
    }
  }
  if (non_edges.size() < m) {
    throw std::invalid_argument("split_link: graph too dense, only " +
                                std::to_string(non_edges.size()) + " non-edges for " +
                                std::to_string(m) + " negatives");
  }
  std::shuffle(non_edges.begin(), non_edges.end(), rng);
  SplitData out;
  detail::append_pairs(out.train, edges, 0, m_train, 1.0);
  detail::append_pairs(out.train, non_edges, 0, m_train, 0.0);
  detail::append_pairs(out.valid, edges, m_train, m_eval, 1.0);
  detail::append_pairs(out.valid, non_edges, m_train, m_eval, 0.0);
  detail::append_pairs(out.test, edges, m_train + m_eval, m_eval, 1.0);
  detail::append_pairs(out.test, non_edges, m_train + m_eval, m_eval, 0.0);
  std::vector<std::pair<int, int>> train_edges(edges.begin(), edges.begin() + m_train);
  out.message_graph = make_graph(g.n, std::move(train_edges));
  out.message_graph.features = g.features;
  out.message_graph.community = g.community;
  return out;
}

/// Balanced same/cross community pairs, disjoint across splits, sampled
/// uniformly from the full pair population. The shared budget is capped by
/// the edge count so workloads stay comparable to link prediction; each eval
/// split gets a tenth of the budget but at least 10 pairs when available.
/// Message passing uses the full graph.
inline SplitData split_pairs(const Graph& g, std::uint64_t seed) {
  if (g.community.empty()) {
    throw std::invalid_argument("split_pairs: graph has no community labels");
  }
  std::vector<std::pair<int, int>> same, cross;
  for (int u = 0; u < g.n; ++u) {
    for (int v = u + 1; v < g.n; ++v) {
      (g.community[u] == g.community[v] ? same : cross).emplace_back(u, v);
    }
  }
  const std::size_t budget =
      std::min({g.edge_count(), same.size(), cross.size()});
  const std::size_t m_eval =
      std::max(budget / 10, std::min<std::size_t>(10, budget / 3));
  if (m_eval == 0) {
    throw std::invalid_argument("split_pairs: graph too small to form a split");
  }
  const std::size_t m_train = budget - 2 * m_eval;
  if (m_train == 0) {
    throw std::invalid_argument("split_pairs: graph too small to form a split");
  }
  std::mt19937_64 rng = seeded_rng(seed, 102);
  std::shuffle(same.begin(), same.end(), rng);
  std::shuffle(cross.begin(), cross.end(), rng);
  SplitData out;
  detail::append_pairs(out.train, same, 0, m_train, 1.0);
  detail::append_pairs(out.train, cross, 0, m_train, 0.0);
  detail::append_pairs(out.valid, same, m_train, m_eval, 1.0);
  detail::append_pairs(out.valid, cross, m_train, m_eval, 0.0);
  detail::append_pairs(out.test, same, m_train + m_eval, m_eval, 1.0);
  detail::append_pairs(out.test, cross, m_train + m_eval, m_eval, 0.0);
  out.message_graph = g;
  return out;
}

inline SplitData build_split(const Graph& g, TaskKind task, std::uint64_t seed) {
  return task == TaskKind::link ? split_link(g, seed) : split_pairs(g, seed);
}

/// sigmoid(h_u . h_v) from a plain embedding matrix.
inline double pair_score(const Matrix& embeddings, int u, int v) {
  double dot = 0.0;
  for (int j = 0; j < embeddings.cols(); ++j) dot += embeddings(u, j) * embeddings(v, j);
  if (dot >= 0.0) return 1.0 / (1.0 + std::exp(-dot));
  const double e = std::exp(dot);
  return e / (1.0 + e);
}

/// Rank-statistic ROC AUC with average ranks for tied scores; needs at least
/// one positive and one negative.
inline double roc_auc(const std::vector<double>& scores, const std::vector<double>& labels) {
  if (scores.size() != labels.size()) {
    throw std::invalid_argument("roc_auc: length mismatch " + std::to_string(scores.size()) +
                                " vs " + std::to_string(labels.size()));
  }
  std::size_t pos = 0;
  for (double y : labels) {
    if (y != 0.0 && y != 1.0) throw std::invalid_argument("roc_auc: labels must be 0 or 1");
    if (y == 1.0) ++pos;
  }
  const std::size_t neg = labels.size() - pos;
  if (pos == 0 || neg == 0) {
    throw std::invalid_argument("roc_auc: need both classes, got " + std::to_string(pos) +
                                " positives of " + std::to_string(labels.size()));
  }
  const std::vector<double> ranks = average_ranks(scores);
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 1.0) rank_sum += ranks[i];
  }
  const double p = static_cast<double>(pos);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(neg));
}

enum class Strategy { learned_s, learned_e, random_anchors, centrality_anchors, none };

inline const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::learned_s: return "learned-s";
    case Strategy::learned_e: return "learned-e";
    case Strategy::random_anchors: return "random";
    case Strategy::centrality_anchors: return "centrality";
    case Strategy::none: return "none";
  }
  throw std::logic_error("to_string: bad Strategy");
}

inline Strategy strategy_from_string(const std::string& s) {
  if (s == "learned-s") return Strategy::learned_s;
  if (s == "learned-e") return Strategy::learned_e;
  if (s == "random") return Strategy::random_anchors;
  if (s == "centrality") return Strategy::centrality_anchors;
  if (s == "none") return Strategy::none;
  throw std::invalid_argument("unknown strategy '" + s + "'");
}

struct TrainConfig {
  TaskKind task = TaskKind::link;
  Strategy strategy = Strategy::learned_e;
  CentralityKind centrality_kind = CentralityKind::degree;  // strategy == centrality only
  double alpha = 0.5;    // selection noise scale during training; eval uses 0
  double k_const = 1.0;  // anchors = ceil(k_const * log2 n)
  double lr = 1e-3;
  int epochs = 200;
  int hidden = 32;
  int pos_dim = 16;
  std::uint64_t seed = 0;
};

struct EpochStat {
  int epoch = 0;  // 1-based
  double loss = 0.0;
  double valid_auc = 0.0;
  std::vector<int> anchors;         // anchors used for this epoch's update
  std::vector<double> likelihood;   // learned strategies only, aligned with anchors
};

struct RunRecord {
  TrainConfig config;
  int n = 0;
  std::size_t edge_count = 0;  // message-graph edges
  int k = 0;                   // anchors per forward (0 for strategy none)
  std::vector<EpochStat> curve;
  int best_epoch = 0;
  double best_valid_auc = 0.0;
  double test_auc = 0.0;
  bool selector_degenerate = false;  // any epoch hit the l2 degenerate guard
};

struct TrainResult {
  RunRecord record;
  ModelParams best_params;
  std::vector<int> best_anchors;  // anchor set active at the best epoch
};

namespace detail {

/// On-tape pair logits (the dot products feeding pair_score's sigmoid).
inline ad::Value batch_logits(ad::Tape& t, ad::Value embeddings,
                              const std::vector<LabeledPair>& pairs) {
  std::vector<int> us, vs;
  us.reserve(pairs.size());
  vs.reserve(pairs.size());
  for (const LabeledPair& p : pairs) {
    us.push_back(p.u);
    vs.push_back(p.v);
  }
  const ad::Value prod = t.mul(t.select_rows(embeddings, us), t.select_rows(embeddings, vs));
  return t.row_sum(prod);
}

/// On-tape batch scores (probability space).
inline ad::Value batch_scores(ad::Tape& t, ad::Value embeddings,
                              const std::vector<LabeledPair>& pairs) {
  return t.sigmoid(batch_logits(t, embeddings, pairs));
}

inline Matrix labels_of(const std::vector<LabeledPair>& pairs) {
  Matrix y(static_cast<int>(pairs.size()), 1);
  for (std::size_t i = 0; i < pairs.size(); ++i) y(static_cast<int>(i), 0) = pairs[i].label;
  return y;
}

inline double auc_of(const Matrix& embeddings, const std::vector<LabeledPair>& pairs) {
  std::vector<double> scores, labels;
  scores.reserve(pairs.size());
  labels.reserve(pairs.size());
  for (const LabeledPair& p : pairs) {
    scores.push_back(pair_score(embeddings, p.u, p.v));
    labels.push_back(p.label);
  }
  return roc_auc(scores, labels);
}

struct EvalForward {
  Matrix embeddings;
  std::vector<int> anchors;
};

/// Inference pass: alpha = 0, no gradient buffers. For learned strategies the
/// anchors are re-selected from the current scores; fixed strategies reuse
/// the supplied set.
inline EvalForward eval_forward(const Graph& g, const ModelParams& params, Strategy strategy,
                                int k, const std::vector<int>& fixed_anchors) {
  ad::Tape t;
  const BoundParams bp = bind_params(t, params, false);
  EvalForward out;
  if (strategy == Strategy::learned_s || strategy == Strategy::learned_e) {
    std::mt19937_64 unused(0);
    const ForwardResult r = forward_learned(t, g, bp, k, 0.0, unused);
    out.embeddings = t.val(r.embeddings);
    out.anchors = r.selection.anchors;
  } else if (strategy == Strategy::none) {
    const ForwardResult r = forward_plain(t, g, bp);
    out.embeddings = t.val(r.embeddings);
  } else {
    const ForwardResult r = forward_fixed(t, g, bp, fixed_anchors);
    out.embeddings = t.val(r.embeddings);
    out.anchors = r.selection.anchors;
  }
  return out;
}

}  // namespace detail

/// Full-batch training. Per epoch: one forward on the message graph (learned
/// strategies add selection noise alpha, random strategies resample their
/// anchor set), BCE over the training pairs, backward, one Adam step, then a
/// noise-free evaluation pass for the validation AUC. The best-validation
/// weight snapshot is scored on the test split at the end, through exactly
/// the evaluation path transfer_eval uses; the random strategy scores with a
/// freshly drawn anchor set rather than the one the snapshot happened to see.
inline TrainResult train(const Graph& g, const TrainConfig& cfg) {
  if (cfg.epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
  if (cfg.alpha < 0.0) throw std::invalid_argument("train: alpha must be >= 0");
  const SplitData split = build_split(g, cfg.task, mix_seed(cfg.seed, 1));
  const Graph& mg = split.message_graph;

  PsgnnConfig mcfg;
  mcfg.mode = cfg.strategy == Strategy::learned_e ? PsgnnMode::e : PsgnnMode::s;
  mcfg.input_dim = mg.features.empty() ? 1 : mg.features.cols();
  mcfg.hidden = cfg.hidden;
  mcfg.pos_dim = cfg.pos_dim;
  mcfg.n_max = mg.n;
  std::mt19937_64 init_rng = seeded_rng(cfg.seed, 2);
  std::mt19937_64 noise_rng = seeded_rng(cfg.seed, 3);
  std::mt19937_64 anchor_rng = seeded_rng(cfg.seed, 4);
  ModelParams params = ModelParams::init(mcfg, init_rng);

  const int k = cfg.strategy == Strategy::none ? 0 : anchor_count(mg.n, cfg.k_const);
  std::vector<int> centrality_anchors;
  if (cfg.strategy == Strategy::centrality_anchors) {
    centrality_anchors = top_k_by_score(centrality(mg, cfg.centrality_kind), k);
  }

  Adam adam(AdamConfig{cfg.lr, 0.9, 0.999, 1e-8});
  const Matrix train_labels = detail::labels_of(split.train);

  TrainResult result;
  result.record.config = cfg;
  result.record.n = mg.n;
  result.record.edge_count = mg.edge_count();
  result.record.k = k;
  result.record.best_valid_auc = -1.0;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    ad::Tape t;
    const BoundParams bp = bind_params(t, params, true);
    ForwardResult fr;
    std::vector<int> epoch_anchors;
    switch (cfg.strategy) {
      case Strategy::learned_s:
      case Strategy::learned_e:
        fr = forward_learned(t, mg, bp, k, cfg.alpha, noise_rng);
        epoch_anchors = fr.selection.anchors;
        break;
      case Strategy::random_anchors:
        epoch_anchors = detail::sample_without_replacement(mg.n, k, anchor_rng);
        fr = forward_fixed(t, mg, bp, epoch_anchors);
        break;
      case Strategy::centrality_anchors:
        epoch_anchors = centrality_anchors;
        fr = forward_fixed(t, mg, bp, epoch_anchors);
        break;
      case Strategy::none:
        fr = forward_plain(t, mg, bp);
        break;
    }
    result.record.selector_degenerate |= fr.selection.degenerate;

    // Loss in logit space: the fused form keeps gradients alive even when
    // dot products start out large enough to saturate the sigmoid.
    const ad::Value loss =
        t.bce_logits(detail::batch_logits(t, fr.embeddings, split.train), train_labels);
    const double loss_value = t.val(loss)(0, 0);
    if (!std::isfinite(loss_value)) {
      throw std::runtime_error("train: non-finite loss at epoch " + std::to_string(epoch));
    }
    t.backward(loss);

    std::vector<Matrix*> param_ptrs;
    std::vector<const Matrix*> grad_ptrs;
    auto named = params.named();
    for (std::size_t i = 0; i < named.size(); ++i) {
      param_ptrs.push_back(named[i].second);
      grad_ptrs.push_back(&t.grad(bp.named[i].second));
    }
    adam.step(param_ptrs, grad_ptrs);

    const detail::EvalForward ev =
        detail::eval_forward(mg, params, cfg.strategy, k, epoch_anchors);
    const double valid_auc = detail::auc_of(ev.embeddings, split.valid);

    EpochStat stat;
    stat.epoch = epoch;
    stat.loss = loss_value;
    stat.valid_auc = valid_auc;
    stat.anchors = epoch_anchors;
    stat.likelihood = fr.selection.likelihood;
    result.record.curve.push_back(std::move(stat));

    if (valid_auc > result.record.best_valid_auc) {
      result.record.best_valid_auc = valid_auc;
      result.record.best_epoch = epoch;
      result.best_params = params;
      result.best_anchors = ev.anchors;
    }
  }

  // Keeping the anchor set from the best-validation epoch would let the
  // random baseline cherry-pick the luckiest of hundreds of draws; a fresh
  // deterministic draw keeps it an honest measure of a random set.
  if (cfg.strategy == Strategy::random_anchors) {
    std::mt19937_64 test_rng = seeded_rng(cfg.seed, 5);
    result.best_anchors = detail::sample_without_replacement(mg.n, k, test_rng);
  }
  const detail::EvalForward final_ev =
      detail::eval_forward(mg, result.best_params, cfg.strategy, k, result.best_anchors);
  result.record.test_auc = detail::auc_of(final_ev.embeddings, split.test);
  return result;
}

/// Checkpoint with everything transfer_eval needs.
inline Checkpoint make_run_checkpoint(const TrainResult& r) {
  Checkpoint ck = to_checkpoint(r.best_params, r.best_anchors);
  const TrainConfig& cfg = r.record.config;
  ck.meta["task"] = to_string(cfg.task);
  ck.meta["strategy"] = to_string(cfg.strategy);
  ck.meta["centrality"] = to_string(cfg.centrality_kind);
  ck.meta["k_const"] = std::to_string(cfg.k_const);
  ck.meta["seed"] = std::to_string(cfg.seed);
  ck.meta["best_epoch"] = std::to_string(r.record.best_epoch);
  return ck;
}

/// Frozen-parameter evaluation on a (possibly different) graph: rebuild the
/// task split from the given seed, run the noise-free forward, report test
/// AUC. Learned strategies re-select anchors on the target graph (e mode
/// caps the target size at the positional table); centrality anchors are
/// recomputed on the target; random anchors reuse the stored set, which must
/// fit the target graph.
inline RunRecord transfer_eval(const Checkpoint& ck, const Graph& g, std::uint64_t seed) {
  const ModelParams params = params_from_checkpoint(ck);
  if (params.cfg.mode == PsgnnMode::e && g.n > params.cfg.n_max) {
    throw std::runtime_error("transfer_eval: target graph has " + std::to_string(g.n) +
                             " nodes but the positional table covers only " +
                             std::to_string(params.cfg.n_max));
  }
  const Strategy strategy = strategy_from_string(ck.meta_at("strategy"));
  const TaskKind task = task_kind_from_string(ck.meta_at("task"));
  const double k_const = std::stod(ck.meta_at("k_const"));
  const SplitData split = build_split(g, task, mix_seed(seed, 1));
  const Graph& mg = split.message_graph;

  const int k = strategy == Strategy::none ? 0 : anchor_count(mg.n, k_const);
  std::vector<int> fixed;
  if (strategy == Strategy::centrality_anchors) {
    fixed = top_k_by_score(centrality(mg, centrality_kind_from_string(ck.meta_at("centrality"))), k);
  } else if (strategy == Strategy::random_anchors) {
    fixed = ck.anchors;
    for (int a : fixed) {
      if (a < 0 || a >= mg.n) {
        throw std::runtime_error("transfer_eval: stored anchor " + std::to_string(a) +
                                 " does not exist in the target graph");
      }
    }
  }
  const detail::EvalForward ev = detail::eval_forward(mg, params, strategy, k, fixed);

  RunRecord rec;
  rec.config.task = task;
  rec.config.strategy = strategy;
  rec.config.k_const = k_const;
  rec.config.seed = seed;
  rec.n = mg.n;
  rec.edge_count = mg.edge_count();
  rec.k = k;
  rec.test_auc = detail::auc_of(ev.embeddings, split.test);
  return rec;
}

}  // namespace anchorlab
