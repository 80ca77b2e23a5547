#include "w2t/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace w2t {

OptimizerConfig OptimizerConfig::momentum_sgd(double lr, double momentum) {
  if (lr <= 0.0) throw std::invalid_argument("optimizer: learning rate must be > 0");
  if (momentum < 0.0 || momentum >= 1.0) throw std::invalid_argument("optimizer: momentum must be in [0, 1)");
  OptimizerConfig c;
  c.kind = OptimizerKind::MomentumSgd;
  c.learning_rate = lr;
  c.momentum = momentum;
  return c;
}

OptimizerConfig OptimizerConfig::adam(double lr, double beta1, double beta2, double eps) {
  if (lr <= 0.0) throw std::invalid_argument("optimizer: learning rate must be > 0");
  if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) {
    throw std::invalid_argument("optimizer: adam betas must be in [0, 1)");
  }
  if (eps <= 0.0) throw std::invalid_argument("optimizer: adam eps must be > 0");
  OptimizerConfig c;
  c.kind = OptimizerKind::Adam;
  c.learning_rate = lr;
  c.beta1 = beta1;
  c.beta2 = beta2;
  c.eps = eps;
  return c;
}

void Optimizer::step(ParameterSet& params) {
  // Buffers for frozen parameters are dropped so the invariant
  // "moment buffers exist only for non-frozen parameters" holds.
  for (const std::string& path : params.frozen_paths()) {
    m1_.erase(path);
    m2_.erase(path);
  }

  ++step_count_;
  const double lr = cfg_.learning_rate;

  for (const auto& [path, param] : params.all()) {
    if (params.is_frozen(path)) continue;
    Tensor t = param;  // shallow handle
    if (!t.has_grad()) {
      throw std::runtime_error(strf("optimizer: missing gradient on non-frozen parameter '%s'", path.c_str()));
    }
    t.check_finite_grad("optimizer");
    const auto& g = t.grad();
    auto& v = t.values();
    const size_t n = v.size();

    if (cfg_.kind == OptimizerKind::MomentumSgd) {
      auto& vel = m1_[path];
      if (vel.size() != n) vel.assign(n, 0.0);
      for (size_t i = 0; i < n; ++i) {
        vel[i] = cfg_.momentum * vel[i] - lr * g[i];
        v[i] += vel[i];
      }
    } else {
      auto& m = m1_[path];
      auto& s = m2_[path];
      if (m.size() != n) m.assign(n, 0.0);
      if (s.size() != n) s.assign(n, 0.0);
      const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_count_));
      const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_count_));
      for (size_t i = 0; i < n; ++i) {
        m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g[i];
        s[i] = cfg_.beta2 * s[i] + (1.0 - cfg_.beta2) * g[i] * g[i];
        const double mhat = m[i] / c1;
        const double shat = s[i] / c2;
        v[i] -= lr * mhat / (std::sqrt(shat) + cfg_.eps);
      }
    }
    t.check_finite_values("optimizer");
  }

  for (const auto& [path, param] : params.all()) {
    Tensor t = param;
    t.zero_grad();
  }
}

OptimizerSnapshot Optimizer::snapshot() const {
  OptimizerSnapshot snap;
  snap.config = cfg_;
  snap.step_count = step_count_;
  for (const auto& [path, m] : m1_) {
    auto it = m2_.find(path);
    snap.buffers[path] = {m, it != m2_.end() ? it->second : std::vector<double>{}};
  }
  return snap;
}

void Optimizer::restore(const OptimizerSnapshot& snap) {
  cfg_ = snap.config;
  step_count_ = snap.step_count;
  m1_.clear();
  m2_.clear();
  for (const auto& [path, bufs] : snap.buffers) {
    m1_[path] = bufs.first;
    if (!bufs.second.empty()) m2_[path] = bufs.second;
  }
}

}  // namespace w2t
