#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "anchorlab/autodiff.hpp"
#include "anchorlab/checkpoint.hpp"
#include "anchorlab/graph.hpp"
#include "anchorlab/matrix.hpp"

namespace anchorlab {

/// S: anchors are represented purely by their aggregated structure embedding.
/// E: anchor representations additionally concatenate a learned per-node-id
/// positional row before a linear remap, which breaks ties between
/// structurally indistinguishable anchors.
enum class PsgnnMode { s, e };

inline const char* to_string(PsgnnMode m) { return m == PsgnnMode::s ? "s" : "e"; }

inline PsgnnMode psgnn_mode_from_string(const std::string& s) {
  if (s == "s") return PsgnnMode::s;
  if (s == "e") return PsgnnMode::e;
  throw std::invalid_argument("unknown model mode '" + s + "'");
}

struct PsgnnConfig {
  PsgnnMode mode = PsgnnMode::s;
  int input_dim = 1;
  int hidden = 32;
  int pos_dim = 16;  // e mode only
  int n_max = 0;     // positional table rows; e mode only
};

/// Number of anchors for an n-node graph: ceil(k_const * log2 n), clamped to
/// [1, n].
inline int anchor_count(int n, double k_const) {
  if (n < 1) throw std::invalid_argument("anchor_count: empty graph");
  const int k = static_cast<int>(std::ceil(k_const * std::log2(static_cast<double>(n))));
  return std::max(1, std::min(n, k));
}

/// All learnable tensors. Weights and biases are drawn N(0, 1/sqrt(fan_in))
/// where fan_in is the layer input width; the positional table uses
/// N(0, 0.1^2). The mode-shared tensors are drawn first in a fixed order, so
/// the same seed yields the same trunk in both modes.
struct ModelParams {
  PsgnnConfig cfg;

  // Anchor-score selector: GCN input layer, two residual GCN layers, then a
  // mode-specific scoring head. s scores every node through one shared linear
  // map, so it stays size-agnostic and transferable but cannot tell
  // structurally symmetric nodes apart. e gives node i its own scoring row
  // and bias (one head output per node id), so training can raise or lower
  // each node's likelihood independently even on featureless regular graphs.
  Matrix sel_in_w, sel_in_b;
  Matrix sel_res1_w, sel_res1_b;
  Matrix sel_res2_w, sel_res2_b;
  Matrix sel_score_w, sel_score_b;  // s mode head

  // Structure encoder: three mean-aggregation layers.
  Matrix enc1_w, enc1_b, enc2_w, enc2_b, enc3_w, enc3_b;

  // Distance gate, shared across update layers.
  Matrix gate_w, gate_b;

  // Per-layer fusion of (self, anchor message).
  Matrix fuse1_w, fuse1_b, fuse2_w, fuse2_b, fuse3_w, fuse3_b;

  // e mode only: id-keyed scoring head and the positional table.
  Matrix sel_id_w, sel_id_b;
  Matrix pos_table, pos_w, pos_b;

  static ModelParams init(const PsgnnConfig& cfg, std::mt19937_64& rng) {
    if (cfg.input_dim < 1 || cfg.hidden < 1) {
      throw std::invalid_argument("ModelParams::init: input_dim and hidden must be positive");
    }
    if (cfg.mode == PsgnnMode::e && (cfg.pos_dim < 1 || cfg.n_max < 1)) {
      throw std::invalid_argument("ModelParams::init: e mode needs pos_dim and n_max");
    }
    ModelParams p;
    p.cfg = cfg;
    const int d = cfg.input_dim, h = cfg.hidden;
    auto layer = [&rng](int in, int out, Matrix& w, Matrix& b) {
      const double s = 1.0 / std::sqrt(static_cast<double>(in));
      w = Matrix::gaussian(in, out, s, rng);
      b = Matrix::gaussian(1, out, s, rng);
    };
    layer(d, h, p.sel_in_w, p.sel_in_b);
    layer(h, h, p.sel_res1_w, p.sel_res1_b);
    layer(h, h, p.sel_res2_w, p.sel_res2_b);
    layer(d, h, p.enc1_w, p.enc1_b);
    layer(h, h, p.enc2_w, p.enc2_b);
    layer(h, h, p.enc3_w, p.enc3_b);
    layer(1, h, p.gate_w, p.gate_b);
    layer(2 * h, h, p.fuse1_w, p.fuse1_b);
    layer(2 * h, h, p.fuse2_w, p.fuse2_b);
    layer(2 * h, h, p.fuse3_w, p.fuse3_b);
    if (cfg.mode == PsgnnMode::s) {
      layer(h, 1, p.sel_score_w, p.sel_score_b);
    } else {
      const double s = 1.0 / std::sqrt(static_cast<double>(h));
      p.sel_id_w = Matrix::gaussian(cfg.n_max, h, s, rng);
      p.sel_id_b = Matrix::gaussian(cfg.n_max, 1, s, rng);
      p.pos_table = Matrix::gaussian(cfg.n_max, cfg.pos_dim, 0.1, rng);
      layer(h + cfg.pos_dim, h, p.pos_w, p.pos_b);
    }
    return p;
  }

  /// Stable name -> tensor view, the canonical order for the optimizer and
  /// checkpoints.
  std::vector<std::pair<std::string, Matrix*>> named() {
    std::vector<std::pair<std::string, Matrix*>> out = {
        {"sel_in_w", &sel_in_w},     {"sel_in_b", &sel_in_b},
        {"sel_res1_w", &sel_res1_w}, {"sel_res1_b", &sel_res1_b},
        {"sel_res2_w", &sel_res2_w}, {"sel_res2_b", &sel_res2_b},
        {"enc1_w", &enc1_w},         {"enc1_b", &enc1_b},
        {"enc2_w", &enc2_w},         {"enc2_b", &enc2_b},
        {"enc3_w", &enc3_w},         {"enc3_b", &enc3_b},
        {"gate_w", &gate_w},         {"gate_b", &gate_b},
        {"fuse1_w", &fuse1_w},       {"fuse1_b", &fuse1_b},
        {"fuse2_w", &fuse2_w},       {"fuse2_b", &fuse2_b},
        {"fuse3_w", &fuse3_w},       {"fuse3_b", &fuse3_b},
    };
    if (cfg.mode == PsgnnMode::s) {
      out.emplace_back("sel_score_w", &sel_score_w);
      out.emplace_back("sel_score_b", &sel_score_b);
    } else {
      out.emplace_back("sel_id_w", &sel_id_w);
      out.emplace_back("sel_id_b", &sel_id_b);
      out.emplace_back("pos_table", &pos_table);
      out.emplace_back("pos_w", &pos_w);
      out.emplace_back("pos_b", &pos_b);
    }
    return out;
  }

  std::vector<std::pair<std::string, const Matrix*>> named() const {
    auto mutable_view = const_cast<ModelParams*>(this)->named();
    std::vector<std::pair<std::string, const Matrix*>> out;
    out.reserve(mutable_view.size());
    for (auto& [name, m] : mutable_view) out.emplace_back(name, m);
    return out;
  }
};

/// Tape-resident view of the parameters: one leaf per tensor, created once
/// per forward pass so the optimizer can read back every gradient.
struct BoundParams {
  PsgnnConfig cfg;
  ad::Value sel_in_w{}, sel_in_b{};
  ad::Value sel_res1_w{}, sel_res1_b{};
  ad::Value sel_res2_w{}, sel_res2_b{};
  ad::Value sel_score_w{}, sel_score_b{};
  ad::Value enc1_w{}, enc1_b{}, enc2_w{}, enc2_b{}, enc3_w{}, enc3_b{};
  ad::Value gate_w{}, gate_b{};
  ad::Value fuse1_w{}, fuse1_b{}, fuse2_w{}, fuse2_b{}, fuse3_w{}, fuse3_b{};
  ad::Value sel_id_w{}, sel_id_b{};
  ad::Value pos_table{}, pos_w{}, pos_b{};
  std::vector<std::pair<std::string, ad::Value>> named;  // mirrors ModelParams::named()
};

/// Load every tensor onto the tape. Pass trainable=false for inference-only
/// passes; no gradient buffers are ever touched then.
inline BoundParams bind_params(ad::Tape& t, const ModelParams& p, bool trainable = true) {
  BoundParams b;
  b.cfg = p.cfg;
  std::vector<ad::Value*> slots = {
      &b.sel_in_w,   &b.sel_in_b,  &b.sel_res1_w, &b.sel_res1_b, &b.sel_res2_w,
      &b.sel_res2_b, &b.enc1_w,    &b.enc1_b,     &b.enc2_w,     &b.enc2_b,
      &b.enc3_w,     &b.enc3_b,    &b.gate_w,     &b.gate_b,     &b.fuse1_w,
      &b.fuse1_b,    &b.fuse2_w,   &b.fuse2_b,    &b.fuse3_w,    &b.fuse3_b,
  };
  if (p.cfg.mode == PsgnnMode::s) {
    slots.insert(slots.end(), {&b.sel_score_w, &b.sel_score_b});
  } else {
    slots.insert(slots.end(),
                 {&b.sel_id_w, &b.sel_id_b, &b.pos_table, &b.pos_w, &b.pos_b});
  }
  const auto named = p.named();
  for (std::size_t i = 0; i < named.size(); ++i) {
    *slots[i] = t.leaf(*named[i].second, trainable);
    b.named.emplace_back(named[i].first, *slots[i]);
  }
  return b;
}

/// Outcome of one anchor-selection pass. `likelihood[i]` is the normalized
/// score of `anchors[i]`; `o` stays valid while the tape is alive.
struct AnchorSelection {
  std::vector<int> anchors;        // ascending
  std::vector<double> likelihood;  // normalized scores, aligned with anchors
  ad::Value o{};                   // n x 1 normalized score vector on tape
  bool degenerate = false;         // raw scores had near-zero l2 norm
};

namespace detail {

inline Matrix input_features(const Graph& g, const PsgnnConfig& cfg) {
  if (g.features.empty()) {
    if (cfg.input_dim != 1) {
      throw std::invalid_argument("forward: featureless graph but model expects input_dim " +
                                  std::to_string(cfg.input_dim));
    }
    return Matrix::filled(g.n, 1, 1.0);
  }
  if (g.features.cols() != cfg.input_dim) {
    throw std::invalid_argument("forward: feature width " + std::to_string(g.features.cols()) +
                                " vs model input_dim " + std::to_string(cfg.input_dim));
  }
  return g.features;
}

}  // namespace detail

/// Raw (pre-normalization) anchor scores, n x 1: a GCN input layer plus two
/// residual GCN layers and the mode-specific head. The GCN trunk is
/// permutation-equivariant, so in s mode score differences can only come
/// from structural differences; the e head scores node i against its own
/// table row, which is what lets training separate structurally identical
/// nodes.
inline ad::Value selector_scores(ad::Tape& t, const Graph& g, const BoundParams& p) {
  const ad::Value x = t.leaf(detail::input_features(g, p.cfg), false);
  ad::Value h = t.relu(t.add_rowvec(t.matmul(t.graph_gcn(x, g), p.sel_in_w), p.sel_in_b));
  h = t.add(h, t.relu(t.add_rowvec(t.matmul(t.graph_gcn(h, g), p.sel_res1_w), p.sel_res1_b)));
  h = t.add(h, t.relu(t.add_rowvec(t.matmul(t.graph_gcn(h, g), p.sel_res2_w), p.sel_res2_b)));
  ad::Value scores{};
  if (p.cfg.mode == PsgnnMode::s) {
    scores = t.add_rowvec(t.matmul(h, p.sel_score_w), p.sel_score_b);
  } else {
    if (g.n > p.cfg.n_max) {
      throw std::runtime_error("selector_scores: graph has " + std::to_string(g.n) +
                               " nodes but the id-keyed head covers only " +
                               std::to_string(p.cfg.n_max));
    }
    std::vector<int> ids(g.n);
    for (int v = 0; v < g.n; ++v) ids[v] = v;
    scores = t.add(t.row_sum(t.mul(h, t.select_rows(p.sel_id_w, ids))),
                   t.select_rows(p.sel_id_b, ids));
  }
  if (ad::has_nan(t.val(scores))) {
    throw std::runtime_error("selector_scores: non-finite scores");
  }
  return scores;
}

/// Score, normalize, perturb, and pick the top-k anchor ids. The hard top-k
/// is taken on o + alpha * eps with standard normal eps; ties break to the
/// lowest id. Gradients flow through the returned `o`, not the discrete pick.
inline AnchorSelection select_anchors(ad::Tape& t, const Graph& g, const BoundParams& p,
                                      int k, double alpha, std::mt19937_64& rng) {
  if (k < 1 || k > g.n) {
    throw std::invalid_argument("select_anchors: k=" + std::to_string(k) + " outside [1," +
                                std::to_string(g.n) + "]");
  }
  AnchorSelection sel;
  sel.o = t.l2_normalize(selector_scores(t, g, p));
  sel.degenerate = t.l2_degenerate();
  const Matrix& o = t.val(sel.o);
  std::vector<double> perturbed(g.n);
  if (alpha != 0.0) {
    std::normal_distribution<double> noise(0.0, 1.0);
    for (int v = 0; v < g.n; ++v) perturbed[v] = o(v, 0) + alpha * noise(rng);
  } else {
    for (int v = 0; v < g.n; ++v) perturbed[v] = o(v, 0);
  }
  std::vector<int> ids(g.n);
  for (int v = 0; v < g.n; ++v) ids[v] = v;
  std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) {
    if (perturbed[a] != perturbed[b]) return perturbed[a] > perturbed[b];
    return a < b;
  });
  ids.resize(k);
  std::sort(ids.begin(), ids.end());
  sel.anchors = std::move(ids);
  sel.likelihood.reserve(k);
  for (int a : sel.anchors) sel.likelihood.push_back(o(a, 0));
  return sel;
}

/// Three mean-aggregation message-passing layers over the input features;
/// this is both the initial node state and the source of anchor embeddings.
/// The last layer is linear so the encoded state (and with it every anchor
/// message) cannot collapse to exact zeros when narrow relu layers go dead.
inline ad::Value encode_nodes(ad::Tape& t, const Graph& g, const BoundParams& p) {
  const ad::Value x = t.leaf(detail::input_features(g, p.cfg), false);
  ad::Value h = t.relu(t.add_rowvec(t.matmul(t.graph_mean(x, g), p.enc1_w), p.enc1_b));
  h = t.relu(t.add_rowvec(t.matmul(t.graph_mean(h, g), p.enc2_w), p.enc2_b));
  h = t.add_rowvec(t.matmul(t.graph_mean(h, g), p.enc3_w), p.enc3_b);
  return h;
}

/// Anchor representations (k x hidden) gathered from encoded node states; in
/// e mode each row is remapped from concat(structure, positional row).
/// Anchor ids must fit the positional table in e mode.
inline ad::Value embed_anchors(ad::Tape& t, const BoundParams& p, ad::Value encoded,
                               const std::vector<int>& anchors) {
  ad::Value ea = t.select_rows(encoded, anchors);
  if (p.cfg.mode == PsgnnMode::e) {
    for (int a : anchors) {
      if (a >= p.cfg.n_max) {
        throw std::runtime_error("embed_anchors: anchor id " + std::to_string(a) +
                                 " exceeds positional table of " + std::to_string(p.cfg.n_max) +
                                 " rows; e-mode models do not transfer to larger graphs");
      }
    }
    const ad::Value pos = t.select_rows(p.pos_table, anchors);
    ea = t.add_rowvec(t.matmul(t.concat_cols(ea, pos), p.pos_w), p.pos_b);
  }
  return ea;
}

struct ForwardResult {
  ad::Value embeddings{};     // n x hidden
  AnchorSelection selection;  // empty anchor list for the plain encoder path
};

namespace detail {

/// Shared core: three gated update layers on top of the encoder state.
/// `o_scale` (if set) multiplies anchor j's message by the 1 x 1 normalized
/// score of that anchor, the differentiable surrogate for the hard pick.
inline ad::Value gated_update_stack(ad::Tape& t, const Graph& g, const BoundParams& p,
                                    ad::Value encoded, const std::vector<int>& anchors,
                                    const ad::Value* o_scale) {
  const DistanceField dists = bfs_distances(g, anchors);
  const int k = static_cast<int>(anchors.size());
  const ad::Value ea = embed_anchors(t, p, encoded, anchors);
  // Gate input per anchor: column of 1 / (1 + hop distance), so closer
  // anchors gate stronger and unreachable ones decay smoothly.
  std::vector<ad::Value> dcol(k);
  for (int j = 0; j < k; ++j) {
    Matrix d(g.n, 1);
    for (int v = 0; v < g.n; ++v) d(v, 0) = 1.0 / (1.0 + dists.at(v, j));
    dcol[j] = t.leaf(d, false);
  }
  const ad::Value fw[3] = {p.fuse1_w, p.fuse2_w, p.fuse3_w};
  const ad::Value fb[3] = {p.fuse1_b, p.fuse2_b, p.fuse3_b};
  ad::Value h = encoded;
  for (int layer = 0; layer < 3; ++layer) {
    std::vector<ad::Value> msgs;
    msgs.reserve(k);
    for (int j = 0; j < k; ++j) {
      // The gate transform stays linear: a relu here can zero out every
      // message for unlucky draws of the 1 x h gate weights, severing the
      // anchor signal (and its gradient) for the whole run.
      const ad::Value gate = t.add_rowvec(t.matmul(dcol[j], p.gate_w), p.gate_b);
      ad::Value msg = t.mul_rowvec(gate, t.select_rows(ea, {j}));
      if (o_scale != nullptr) {
        msg = t.scale_by(msg, t.select_rows(*o_scale, {anchors[j]}));
      }
      msgs.push_back(msg);
    }
    const ad::Value mixed = t.concat_cols(h, t.mean_list(msgs));
    h = t.relu(t.add_rowvec(t.matmul(mixed, fw[layer]), fb[layer]));
  }
  return h;
}

}  // namespace detail

/// Full learned-anchor forward pass: select, embed, update.
inline ForwardResult forward_learned(ad::Tape& t, const Graph& g, const BoundParams& p,
                                     int k, double alpha, std::mt19937_64& rng) {
  ForwardResult r;
  r.selection = select_anchors(t, g, p, k, alpha, rng);
  const ad::Value encoded = encode_nodes(t, g, p);
  r.embeddings = detail::gated_update_stack(t, g, p, encoded, r.selection.anchors, &r.selection.o);
  return r;
}

/// Forward pass with an externally fixed anchor set (random, centrality, or
/// forced anchors); no likelihood scaling, no selector involvement.
inline ForwardResult forward_fixed(ad::Tape& t, const Graph& g, const BoundParams& p,
                                   const std::vector<int>& anchors) {
  if (anchors.empty()) throw std::invalid_argument("forward_fixed: empty anchor set");
  for (int a : anchors) {
    if (a < 0 || a >= g.n) {
      throw std::invalid_argument("forward_fixed: anchor " + std::to_string(a) +
                                  " outside [0," + std::to_string(g.n) + ")");
    }
  }
  ForwardResult r;
  r.selection.anchors = anchors;
  std::sort(r.selection.anchors.begin(), r.selection.anchors.end());
  const ad::Value encoded = encode_nodes(t, g, p);
  r.embeddings = detail::gated_update_stack(t, g, p, encoded, r.selection.anchors, nullptr);
  return r;
}

/// Anchor-free baseline: plain encoder output.
inline ForwardResult forward_plain(ad::Tape& t, const Graph& g, const BoundParams& p) {
  ForwardResult r;
  r.embeddings = encode_nodes(t, g, p);
  return r;
}

/// Checkpoint bridge. Model geometry travels in meta; callers may add their
/// own keys (strategy, seed, ...) before saving.
inline Checkpoint to_checkpoint(const ModelParams& p, const std::vector<int>& anchors) {
  Checkpoint ck;
  ck.meta["mode"] = to_string(p.cfg.mode);
  ck.meta["input_dim"] = std::to_string(p.cfg.input_dim);
  ck.meta["hidden"] = std::to_string(p.cfg.hidden);
  ck.meta["pos_dim"] = std::to_string(p.cfg.pos_dim);
  ck.meta["n_max"] = std::to_string(p.cfg.n_max);
  ck.anchors = anchors;
  for (const auto& [name, m] : p.named()) ck.tensors.emplace_back(name, *m);
  return ck;
}

inline ModelParams params_from_checkpoint(const Checkpoint& ck) {
  ModelParams p;
  p.cfg.mode = psgnn_mode_from_string(ck.meta_at("mode"));
  p.cfg.input_dim = std::stoi(ck.meta_at("input_dim"));
  p.cfg.hidden = std::stoi(ck.meta_at("hidden"));
  p.cfg.pos_dim = std::stoi(ck.meta_at("pos_dim"));
  p.cfg.n_max = std::stoi(ck.meta_at("n_max"));
  for (auto& [name, m] : p.named()) *m = ck.tensor(name);
  return p;
}

}  // namespace anchorlab
