#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "w2t/params.hpp"

namespace w2t {

enum class OptimizerKind : uint8_t { MomentumSgd = 1, Adam = 2 };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::MomentumSgd;
  double learning_rate = 0.01;
  double momentum = 0.9;     // momentum-sgd only
  double beta1 = 0.9;        // adam only
  double beta2 = 0.999;
  double eps = 1e-8;

  static OptimizerConfig momentum_sgd(double lr, double momentum);
  static OptimizerConfig adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
};

// Serializable optimizer state, stored inside checkpoints.
struct OptimizerSnapshot {
  OptimizerConfig config;
  int64_t step_count = 0;
  // path -> first moment (velocity for momentum-sgd), second moment (adam).
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> buffers;
};

// Applies gradient updates to all non-frozen parameters and clears all
// gradients afterward. Moment buffers are kept only for non-frozen
// parameters; frozen parameters are left bit-identical.
class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig cfg) : cfg_(cfg) {}

  void step(ParameterSet& params);

  const OptimizerConfig& config() const { return cfg_; }
  int64_t step_count() const { return step_count_; }

  OptimizerSnapshot snapshot() const;
  void restore(const OptimizerSnapshot& snap);

 private:
  OptimizerConfig cfg_;
  int64_t step_count_ = 0;
  std::map<std::string, std::vector<double>> m1_;  // velocity / first moment
  std::map<std::string, std::vector<double>> m2_;  // adam second moment
};

}  // namespace w2t
