#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "anchorlab/matrix.hpp"

namespace anchorlab {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam with bias correction over a fixed list of parameter tensors. The
/// state is initialized from the parameter shapes on the first step and the
/// shapes must stay stable afterwards.
class Adam {
public:
  explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}

  const AdamConfig& config() const { return cfg_; }
  long steps() const { return t_; }

  void step(const std::vector<Matrix*>& params, const std::vector<const Matrix*>& grads) {
    if (params.size() != grads.size()) {
      throw std::invalid_argument("Adam::step: parameter/gradient count mismatch");
    }
    if (m_.empty()) {
      for (const Matrix* p : params) {
        m_.emplace_back(p->rows(), p->cols());
        v_.emplace_back(p->rows(), p->cols());
      }
    }
    if (m_.size() != params.size()) {
      throw std::invalid_argument("Adam::step: parameter count changed between steps");
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
      Matrix& p = *params[i];
      const Matrix& g = *grads[i];
      require_same_shape(p, m_[i], "Adam::step");
      // An empty gradient means backward never reached this parameter; treat
      // it as all-zero (moments still decay).
      const bool has_grad = !g.empty();
      if (has_grad) require_same_shape(p, g, "Adam::step");
      for (std::size_t j = 0; j < p.size(); ++j) {
        const double gj = has_grad ? g.raw()[j] : 0.0;
        double& mj = m_[i].raw()[j];
        double& vj = v_[i].raw()[j];
        mj = cfg_.beta1 * mj + (1.0 - cfg_.beta1) * gj;
        vj = cfg_.beta2 * vj + (1.0 - cfg_.beta2) * gj * gj;
        const double mhat = mj / bc1;
        const double vhat = vj / bc2;
        p.raw()[j] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
      }
    }
  }

private:
  AdamConfig cfg_;
  long t_ = 0;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
};

}  // namespace anchorlab
