#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "anchorlab/graph.hpp"
#include "anchorlab/matrix.hpp"

namespace anchorlab::ad {

/// Opaque handle into a Tape. Valid only for the tape that produced it.
struct Value {
  int id = -1;
};

inline bool has_nan(const Matrix& m) {
  for (double x : m.raw()) {
    if (std::isnan(x) || std::isinf(x)) return true;
  }
  return false;
}

/// Reverse-mode tape. Operations append nodes in construction order, which is
/// already topological (an op can only reference previously built values), so
/// backward() is a single reverse sweep with additive gradient accumulation.
/// Gradient buffers are allocated lazily; inference-only passes never touch
/// them. The tape owns all intermediate values; referenced Graphs must outlive
/// the tape.
class Tape {
public:
  /// Parameter or constant input. Gradient flows back only when
  /// requires_grad is set.
  Value leaf(const Matrix& m, bool requires_grad) {
    Node n;
    n.op = Op::leaf;
    n.val = m;
    n.needs_grad = requires_grad;
    return push(std::move(n));
  }

  Value matmul(Value a, Value b) {
    const Matrix& A = val(a);
    const Matrix& B = val(b);
    if (A.cols() != B.rows()) {
      throw std::invalid_argument("matmul: lhs " + A.shape() + " rhs " + B.shape());
    }
    Node n = binary(Op::matmul, a, b);
    n.val = Matrix(A.rows(), B.cols());
    multiply_into(n.val, A, B, false, false);
    return push(std::move(n));
  }

  Value add(Value a, Value b) {
    const Matrix& A = val(a);
    const Matrix& B = val(b);
    require_same_shape(A, B, "add");
    Node n = binary(Op::add, a, b);
    n.val = A;
    for (std::size_t i = 0; i < n.val.size(); ++i) n.val.raw()[i] += B.raw()[i];
    return push(std::move(n));
  }

  /// A + broadcast of a 1 x c row (bias addition).
  Value add_rowvec(Value a, Value b) {
    const Matrix& A = val(a);
    const Matrix& B = val(b);
    check_rowvec(A, B, "add_rowvec");
    Node n = binary(Op::add_rowvec, a, b);
    n.val = A;
    for (int i = 0; i < A.rows(); ++i) {
      for (int j = 0; j < A.cols(); ++j) n.val(i, j) += B(0, j);
    }
    return push(std::move(n));
  }

  Value mul(Value a, Value b) {
    const Matrix& A = val(a);
    const Matrix& B = val(b);
    require_same_shape(A, B, "mul");
    Node n = binary(Op::mul, a, b);
    n.val = A;
    for (std::size_t i = 0; i < n.val.size(); ++i) n.val.raw()[i] *= B.raw()[i];
    return push(std::move(n));
  }

  /// A with every row scaled elementwise by a 1 x c row.
  Value mul_rowvec(Value a, Value b) {
    const Matrix& A = val(a);
    const Matrix& B = val(b);
    check_rowvec(A, B, "mul_rowvec");
    Node n = binary(Op::mul_rowvec, a, b);
    n.val = A;
    for (int i = 0; i < A.rows(); ++i) {
      for (int j = 0; j < A.cols(); ++j) n.val(i, j) *= B(0, j);
    }
    return push(std::move(n));
  }

  Value scale(Value a, double factor) {
    Node n = unary(Op::scale, a);
    n.scalar = factor;
    n.val = val(a);
    for (double& x : n.val.raw()) x *= factor;
    return push(std::move(n));
  }

  /// A scaled by a 1 x 1 tape value; gradient reaches both operands.
  Value scale_by(Value a, Value s) {
    const Matrix& S = val(s);
    if (S.rows() != 1 || S.cols() != 1) {
      throw std::invalid_argument("scale_by: scale operand must be 1x1, got " + S.shape());
    }
    Node n = binary(Op::scale_by, a, s);
    n.val = val(a);
    for (double& x : n.val.raw()) x *= S(0, 0);
    return push(std::move(n));
  }

  Value relu(Value a) {
    Node n = unary(Op::relu, a);
    n.val = val(a);
    for (double& x : n.val.raw()) x = x > 0.0 ? x : 0.0;
    return push(std::move(n));
  }

  Value sigmoid(Value a) {
    Node n = unary(Op::sigmoid, a);
    n.val = val(a);
    for (double& x : n.val.raw()) x = stable_sigmoid(x);
    return push(std::move(n));
  }

  Value concat_cols(Value a, Value b) {
    const Matrix& A = val(a);
    const Matrix& B = val(b);
    if (A.rows() != B.rows()) {
      throw std::invalid_argument("concat_cols: row mismatch " + A.shape() + " vs " + B.shape());
    }
    Node n = binary(Op::concat_cols, a, b);
    n.val = Matrix(A.rows(), A.cols() + B.cols());
    for (int i = 0; i < A.rows(); ++i) {
      for (int j = 0; j < A.cols(); ++j) n.val(i, j) = A(i, j);
      for (int j = 0; j < B.cols(); ++j) n.val(i, A.cols() + j) = B(i, j);
    }
    return push(std::move(n));
  }

  /// Gather rows by index; repeated indices accumulate gradient additively.
  Value select_rows(Value a, std::vector<int> rows) {
    const Matrix& A = val(a);
    for (int r : rows) {
      if (r < 0 || r >= A.rows()) {
        throw std::invalid_argument("select_rows: row " + std::to_string(r) +
                                    " outside " + A.shape());
      }
    }
    Node n = unary(Op::select_rows, a);
    n.rows = std::move(rows);
    n.val = Matrix(static_cast<int>(n.rows.size()), A.cols());
    for (int i = 0; i < n.val.rows(); ++i) {
      for (int j = 0; j < A.cols(); ++j) n.val(i, j) = A(n.rows[i], j);
    }
    return push(std::move(n));
  }

  Value row_sum(Value a) {
    const Matrix& A = val(a);
    Node n = unary(Op::row_sum, a);
    n.val = Matrix(A.rows(), 1);
    for (int i = 0; i < A.rows(); ++i) {
      double s = 0.0;
      for (int j = 0; j < A.cols(); ++j) s += A(i, j);
      n.val(i, 0) = s;
    }
    return push(std::move(n));
  }

  Value sum_all(Value a) {
    Node n = unary(Op::sum_all, a);
    n.val = Matrix(1, 1);
    double s = 0.0;
    for (double x : val(a).raw()) s += x;
    n.val(0, 0) = s;
    return push(std::move(n));
  }

  /// Elementwise mean of same-shaped values.
  Value mean_list(const std::vector<Value>& items) {
    if (items.empty()) throw std::invalid_argument("mean_list: empty input");
    Node n;
    n.op = Op::mean_list;
    for (Value v : items) {
      require_same_shape(val(items[0]), val(v), "mean_list");
      n.extra_parents.push_back(v.id);
      n.needs_grad = n.needs_grad || node(v.id).needs_grad;
    }
    n.val = val(items[0]);
    for (std::size_t t = 1; t < items.size(); ++t) {
      const auto& raw = val(items[t]).raw();
      for (std::size_t i = 0; i < raw.size(); ++i) n.val.raw()[i] += raw[i];
    }
    const double inv = 1.0 / static_cast<double>(items.size());
    for (double& x : n.val.raw()) x *= inv;
    return push(std::move(n));
  }

  /// v / ||v||_2 for a vector-shaped input. Near-zero norm (< 1e-12) yields a
  /// zero vector with zero gradient and raises the degenerate flag; otherwise
  /// backward applies the full Jacobian (I - y y^T) / ||v||, so gradient on
  /// any output entry reaches every input entry.
  Value l2_normalize(Value a) {
    const Matrix& A = val(a);
    if (A.rows() != 1 && A.cols() != 1) {
      throw std::invalid_argument("l2_normalize: expected a vector, got " + A.shape());
    }
    Node n = unary(Op::l2_normalize, a);
    double sq = 0.0;
    for (double x : A.raw()) sq += x * x;
    const double norm = std::sqrt(sq);
    n.val = A;
    if (norm < kL2Epsilon) {
      n.scalar = 0.0;
      n.val.fill(0.0);
      l2_degenerate_ = true;
    } else {
      n.scalar = norm;
      for (double& x : n.val.raw()) x /= norm;
    }
    return push(std::move(n));
  }

  /// Mean binary cross-entropy of sigmoid outputs against {0,1} labels.
  /// Predictions are clamped to [1e-7, 1 - 1e-7]; clamped entries get zero
  /// gradient.
  Value bce(Value pred, const Matrix& labels) {
    const Matrix& P = val(pred);
    require_same_shape(P, labels, "bce");
    if (P.cols() != 1) {
      throw std::invalid_argument("bce: expected column vectors, got " + P.shape());
    }
    if (P.rows() == 0) throw std::invalid_argument("bce: empty batch");
    for (double y : labels.raw()) {
      if (y != 0.0 && y != 1.0) {
        throw std::invalid_argument("bce: labels must be 0 or 1");
      }
    }
    Node n = unary(Op::bce, pred);
    n.aux = labels;
    n.val = Matrix(1, 1);
    double total = 0.0;
    for (int i = 0; i < P.rows(); ++i) {
      const double p = clamp_prob(P(i, 0));
      const double y = labels(i, 0);
      total += -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
    }
    n.val(0, 0) = total / P.rows();
    return push(std::move(n));
  }

  /// Mean binary cross-entropy taking raw logits, fused with the sigmoid.
  /// Numerically safe at any magnitude: the forward uses the softplus form
  /// and the gradient is (sigmoid(z) - y) / m, which stays informative for
  /// confidently wrong predictions where the probability-space path clamps
  /// to zero gradient and can freeze training.
  Value bce_logits(Value logits, const Matrix& labels) {
    const Matrix& Z = val(logits);
    require_same_shape(Z, labels, "bce_logits");
    if (Z.cols() != 1) {
      throw std::invalid_argument("bce_logits: expected column vectors, got " + Z.shape());
    }
    if (Z.rows() == 0) throw std::invalid_argument("bce_logits: empty batch");
    for (double y : labels.raw()) {
      if (y != 0.0 && y != 1.0) {
        throw std::invalid_argument("bce_logits: labels must be 0 or 1");
      }
    }
    Node n = unary(Op::bce_logits, logits);
    n.aux = labels;
    n.val = Matrix(1, 1);
    double total = 0.0;
    for (int i = 0; i < Z.rows(); ++i) {
      const double z = Z(i, 0);
      const double y = labels(i, 0);
      total += std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
    }
    n.val(0, 0) = total / Z.rows();
    return push(std::move(n));
  }

  /// Closed-neighborhood mean aggregation: row v of the output is the mean of
  /// row v and its neighbors' rows. Linear and self-adjoint up to the degree
  /// weights, so backward is the transposed pass.
  Value graph_mean(Value a, const Graph& g) {
    check_graph_rows(a, g, "graph_mean");
    Node n = unary(Op::graph_mean, a);
    n.graph = &g;
    n.val = propagate_mean(val(a), g);
    return push(std::move(n));
  }

  /// Symmetrically normalized propagation with self-loops:
  /// out_v = sum over u in N(v) u {v} of in_u / sqrt((1+deg v)(1+deg u)).
  Value graph_gcn(Value a, const Graph& g) {
    check_graph_rows(a, g, "graph_gcn");
    Node n = unary(Op::graph_gcn, a);
    n.graph = &g;
    n.val = propagate_gcn(val(a), g);
    return push(std::move(n));
  }

  const Matrix& val(Value v) const { return node(v.id).val; }

  /// Accumulated gradient; zero-shaped matrix when backward never reached it.
  const Matrix& grad(Value v) const { return node(v.id).grad; }

  bool l2_degenerate() const { return l2_degenerate_; }
  std::size_t size() const { return nodes_.size(); }

  /// Reverse sweep from a 1 x 1 loss. May be called once per tape.
  void backward(Value loss) {
    Node& top = node(loss.id);
    if (top.val.rows() != 1 || top.val.cols() != 1) {
      throw std::invalid_argument("backward: loss must be 1x1, got " + top.val.shape());
    }
    if (!top.needs_grad) {
      throw std::invalid_argument("backward: loss does not depend on any parameter");
    }
    grad_buf(loss.id)(0, 0) += 1.0;
    for (int i = loss.id; i >= 0; --i) backward_node(i);
  }

private:
  enum class Op {
    leaf, matmul, add, add_rowvec, mul, mul_rowvec, scale, scale_by, relu,
    sigmoid, concat_cols, select_rows, row_sum, sum_all, mean_list,
    l2_normalize, bce, bce_logits, graph_mean, graph_gcn
  };

  struct Node {
    Op op = Op::leaf;
    int a = -1;
    int b = -1;
    std::vector<int> extra_parents;  // mean_list only
    std::vector<int> rows;           // select_rows only
    double scalar = 0.0;             // scale factor / cached l2 norm
    Matrix aux;                      // bce labels
    const Graph* graph = nullptr;
    Matrix val;
    Matrix grad;
    bool needs_grad = false;
  };

  static constexpr double kL2Epsilon = 1e-12;
  static constexpr double kProbClamp = 1e-7;

  static double clamp_prob(double p) {
    if (p < kProbClamp) return kProbClamp;
    if (p > 1.0 - kProbClamp) return 1.0 - kProbClamp;
    return p;
  }

  static double stable_sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
  }

  /// C += (ta ? A^T : A) * (tb ? B^T : B); loop order keeps the inner stride 1.
  static void multiply_into(Matrix& C, const Matrix& A, const Matrix& B, bool ta, bool tb) {
    const int m = C.rows(), p = C.cols();
    const int inner = ta ? A.rows() : A.cols();
    for (int i = 0; i < m; ++i) {
      for (int k = 0; k < inner; ++k) {
        const double a = ta ? A(k, i) : A(i, k);
        if (a == 0.0) continue;
        if (tb) {
          for (int j = 0; j < p; ++j) C(i, j) += a * B(j, k);
        } else {
          for (int j = 0; j < p; ++j) C(i, j) += a * B(k, j);
        }
      }
    }
  }

  static Matrix propagate_mean(const Matrix& X, const Graph& g) {
    Matrix out(X.rows(), X.cols());
    for (int v = 0; v < g.n; ++v) {
      const double inv = 1.0 / (1.0 + g.degree(v));
      for (int j = 0; j < X.cols(); ++j) out(v, j) = X(v, j) * inv;
      for (int u : g.adj[v]) {
        for (int j = 0; j < X.cols(); ++j) out(v, j) += X(u, j) * inv;
      }
    }
    return out;
  }

  static Matrix propagate_gcn(const Matrix& X, const Graph& g) {
    Matrix out(X.rows(), X.cols());
    std::vector<double> w(g.n);
    for (int v = 0; v < g.n; ++v) w[v] = 1.0 / std::sqrt(1.0 + g.degree(v));
    for (int v = 0; v < g.n; ++v) {
      const double wv = w[v];
      for (int j = 0; j < X.cols(); ++j) out(v, j) = X(v, j) * wv * wv;
      for (int u : g.adj[v]) {
        const double c = wv * w[u];
        for (int j = 0; j < X.cols(); ++j) out(v, j) += X(u, j) * c;
      }
    }
    return out;
  }

  static void check_rowvec(const Matrix& A, const Matrix& B, const char* what) {
    if (B.rows() != 1 || B.cols() != A.cols()) {
      throw std::invalid_argument(std::string(what) + ": expected 1x" +
                                  std::to_string(A.cols()) + " row, got " + B.shape());
    }
  }

  void check_graph_rows(Value a, const Graph& g, const char* what) const {
    if (val(a).rows() != g.n) {
      throw std::invalid_argument(std::string(what) + ": " + std::to_string(g.n) +
                                  " nodes vs input " + val(a).shape());
    }
  }

  Node unary(Op op, Value a) {
    Node n;
    n.op = op;
    n.a = a.id;
    n.needs_grad = node(a.id).needs_grad;
    return n;
  }

  Node binary(Op op, Value a, Value b) {
    Node n = unary(op, a);
    n.op = op;
    n.b = b.id;
    n.needs_grad = n.needs_grad || node(b.id).needs_grad;
    return n;
  }

  Value push(Node&& n) {
    nodes_.push_back(std::move(n));
    return Value{static_cast<int>(nodes_.size()) - 1};
  }

  Node& node(int id) {
    if (id < 0 || id >= static_cast<int>(nodes_.size())) {
      throw std::out_of_range("Tape: bad value handle " + std::to_string(id));
    }
    return nodes_[id];
  }
  const Node& node(int id) const {
    if (id < 0 || id >= static_cast<int>(nodes_.size())) {
      throw std::out_of_range("Tape: bad value handle " + std::to_string(id));
    }
    return nodes_[id];
  }

  Matrix& grad_buf(int id) {
    Node& n = nodes_[id];
    if (n.grad.empty()) n.grad = Matrix(n.val.rows(), n.val.cols());
    return n.grad;
  }

  void backward_node(int id) {
    Node& n = nodes_[id];
    if (!n.needs_grad || n.grad.empty()) return;
    const Matrix& G = n.grad;
    switch (n.op) {
      case Op::leaf:
        break;
      case Op::matmul: {
        const Matrix& A = nodes_[n.a].val;
        const Matrix& B = nodes_[n.b].val;
        if (nodes_[n.a].needs_grad) multiply_into(grad_buf(n.a), G, B, false, true);
        if (nodes_[n.b].needs_grad) multiply_into(grad_buf(n.b), A, G, true, false);
        break;
      }
      case Op::add: {
        accumulate(n.a, G);
        accumulate(n.b, G);
        break;
      }
      case Op::add_rowvec: {
        accumulate(n.a, G);
        if (nodes_[n.b].needs_grad) {
          Matrix& db = grad_buf(n.b);
          for (int i = 0; i < G.rows(); ++i) {
            for (int j = 0; j < G.cols(); ++j) db(0, j) += G(i, j);
          }
        }
        break;
      }
      case Op::mul: {
        const Matrix& A = nodes_[n.a].val;
        const Matrix& B = nodes_[n.b].val;
        if (nodes_[n.a].needs_grad) {
          Matrix& da = grad_buf(n.a);
          for (std::size_t i = 0; i < G.size(); ++i) da.raw()[i] += G.raw()[i] * B.raw()[i];
        }
        if (nodes_[n.b].needs_grad) {
          Matrix& db = grad_buf(n.b);
          for (std::size_t i = 0; i < G.size(); ++i) db.raw()[i] += G.raw()[i] * A.raw()[i];
        }
        break;
      }
      case Op::mul_rowvec: {
        const Matrix& A = nodes_[n.a].val;
        const Matrix& B = nodes_[n.b].val;
        if (nodes_[n.a].needs_grad) {
          Matrix& da = grad_buf(n.a);
          for (int i = 0; i < G.rows(); ++i) {
            for (int j = 0; j < G.cols(); ++j) da(i, j) += G(i, j) * B(0, j);
          }
        }
        if (nodes_[n.b].needs_grad) {
          Matrix& db = grad_buf(n.b);
          for (int i = 0; i < G.rows(); ++i) {
            for (int j = 0; j < G.cols(); ++j) db(0, j) += G(i, j) * A(i, j);
          }
        }
        break;
      }
      case Op::scale: {
        if (nodes_[n.a].needs_grad) {
          Matrix& da = grad_buf(n.a);
          for (std::size_t i = 0; i < G.size(); ++i) da.raw()[i] += G.raw()[i] * n.scalar;
        }
        break;
      }
      case Op::scale_by: {
        const Matrix& A = nodes_[n.a].val;
        const double s = nodes_[n.b].val(0, 0);
        if (nodes_[n.a].needs_grad) {
          Matrix& da = grad_buf(n.a);
          for (std::size_t i = 0; i < G.size(); ++i) da.raw()[i] += G.raw()[i] * s;
        }
        if (nodes_[n.b].needs_grad) {
          double acc = 0.0;
          for (std::size_t i = 0; i < G.size(); ++i) acc += G.raw()[i] * A.raw()[i];
          grad_buf(n.b)(0, 0) += acc;
        }
        break;
      }
      case Op::relu: {
        if (nodes_[n.a].needs_grad) {
          const Matrix& A = nodes_[n.a].val;
          Matrix& da = grad_buf(n.a);
          for (std::size_t i = 0; i < G.size(); ++i) {
            if (A.raw()[i] > 0.0) da.raw()[i] += G.raw()[i];
          }
        }
        break;
      }
      case Op::sigmoid: {
        if (nodes_[n.a].needs_grad) {
          Matrix& da = grad_buf(n.a);
          for (std::size_t i = 0; i < G.size(); ++i) {
            const double y = n.val.raw()[i];
            da.raw()[i] += G.raw()[i] * y * (1.0 - y);
          }
        }
        break;
      }
      case Op::concat_cols: {
        const int ca = nodes_[n.a].val.cols();
        if (nodes_[n.a].needs_grad) {
          Matrix& da = grad_buf(n.a);
          for (int i = 0; i < G.rows(); ++i) {
            for (int j = 0; j < ca; ++j) da(i, j) += G(i, j);
          }
        }
        if (nodes_[n.b].needs_grad) {
          Matrix& db = grad_buf(n.b);
          for (int i = 0; i < G.rows(); ++i) {
            for (int j = 0; j < db.cols(); ++j) db(i, j) += G(i, ca + j);
          }
        }
        break;
      }
      case Op::select_rows: {
        if (nodes_[n.a].needs_grad) {
          Matrix& da = grad_buf(n.a);
          for (std::size_t i = 0; i < n.rows.size(); ++i) {
            for (int j = 0; j < G.cols(); ++j) da(n.rows[i], j) += G(static_cast<int>(i), j);
          }
        }
        break;
      }
      case Op::row_sum: {
        if (nodes_[n.a].needs_grad) {
          Matrix& da = grad_buf(n.a);
          for (int i = 0; i < da.rows(); ++i) {
            for (int j = 0; j < da.cols(); ++j) da(i, j) += G(i, 0);
          }
        }
        break;
      }
      case Op::sum_all: {
        if (nodes_[n.a].needs_grad) {
          Matrix& da = grad_buf(n.a);
          const double g = G(0, 0);
          for (double& x : da.raw()) x += g;
        }
        break;
      }
      case Op::mean_list: {
        const double inv = 1.0 / static_cast<double>(n.extra_parents.size());
        for (int pid : n.extra_parents) {
          if (!nodes_[pid].needs_grad) continue;
          Matrix& dp = grad_buf(pid);
          for (std::size_t i = 0; i < G.size(); ++i) dp.raw()[i] += G.raw()[i] * inv;
        }
        break;
      }
      case Op::l2_normalize: {
        if (nodes_[n.a].needs_grad && n.scalar > 0.0) {
          // dv = (g - y (y . g)) / ||v||
          double dot = 0.0;
          for (std::size_t i = 0; i < G.size(); ++i) dot += G.raw()[i] * n.val.raw()[i];
          Matrix& da = grad_buf(n.a);
          for (std::size_t i = 0; i < G.size(); ++i) {
            da.raw()[i] += (G.raw()[i] - n.val.raw()[i] * dot) / n.scalar;
          }
        }
        break;
      }
      case Op::bce: {
        if (nodes_[n.a].needs_grad) {
          const Matrix& P = nodes_[n.a].val;
          Matrix& da = grad_buf(n.a);
          const double g = G(0, 0) / P.rows();
          for (int i = 0; i < P.rows(); ++i) {
            const double p = P(i, 0);
            if (p <= kProbClamp || p >= 1.0 - kProbClamp) continue;
            const double y = n.aux(i, 0);
            da(i, 0) += g * (p - y) / (p * (1.0 - p));
          }
        }
        break;
      }
      case Op::bce_logits: {
        if (nodes_[n.a].needs_grad) {
          const Matrix& Z = nodes_[n.a].val;
          Matrix& da = grad_buf(n.a);
          const double g = G(0, 0) / Z.rows();
          for (int i = 0; i < Z.rows(); ++i) {
            da(i, 0) += g * (stable_sigmoid(Z(i, 0)) - n.aux(i, 0));
          }
        }
        break;
      }
      case Op::graph_mean: {
        if (nodes_[n.a].needs_grad) {
          // Transpose of the forward operator: scatter g_v / (1 + deg v) to
          // v and its neighbors.
          const Graph& g = *n.graph;
          Matrix& da = grad_buf(n.a);
          for (int v = 0; v < g.n; ++v) {
            const double inv = 1.0 / (1.0 + g.degree(v));
            for (int j = 0; j < G.cols(); ++j) {
              const double gv = G(v, j) * inv;
              da(v, j) += gv;
            }
            for (int u : g.adj[v]) {
              for (int j = 0; j < G.cols(); ++j) da(u, j) += G(v, j) * inv;
            }
          }
        }
        break;
      }
      case Op::graph_gcn: {
        if (nodes_[n.a].needs_grad) {
          // The normalized operator is symmetric, so backward reapplies it.
          Matrix contrib = propagate_gcn(G, *n.graph);
          Matrix& da = grad_buf(n.a);
          for (std::size_t i = 0; i < contrib.size(); ++i) da.raw()[i] += contrib.raw()[i];
        }
        break;
      }
    }
  }

  void accumulate(int id, const Matrix& G) {
    if (!nodes_[id].needs_grad) return;
    Matrix& d = grad_buf(id);
    for (std::size_t i = 0; i < G.size(); ++i) d.raw()[i] += G.raw()[i];
  }

  std::vector<Node> nodes_;
  bool l2_degenerate_ = false;
};

}  // namespace anchorlab::ad
