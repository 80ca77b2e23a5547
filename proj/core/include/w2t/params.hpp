#pragma once

#include <map>
#include <set>
#include <string>

#include "w2t/common.hpp"
#include "w2t/tensor.hpp"

namespace w2t {

// Named model parameters. Paths are dot-separated (e.g. "conv1.weight");
// frozen paths are excluded from optimizer updates but still receive
// gradients. Ordered storage keeps iteration deterministic.
class ParameterSet {
 public:
  void add(const std::string& path, Tensor t);
  bool has(const std::string& path) const { return params_.count(path) > 0; }
  Tensor& get(const std::string& path);
  const Tensor& get(const std::string& path) const;

  const std::map<std::string, Tensor>& all() const { return params_; }

  void freeze(const std::string& path);
  // Freezes every parameter whose path starts with `prefix`.
  void freeze_prefix(const std::string& prefix);
  void unfreeze_all() { frozen_.clear(); }
  bool is_frozen(const std::string& path) const { return frozen_.count(path) > 0; }
  const std::set<std::string>& frozen_paths() const { return frozen_; }

  void zero_grads();
  // Divides every populated gradient by `n`; used for gradient averaging
  // across a batch of utterances.
  void scale_grads(double factor);

  int64_t total_parameters() const;
  int64_t frozen_parameter_count() const;

 private:
  std::map<std::string, Tensor> params_;
  std::set<std::string> frozen_;
};

// Uniform init in +/- sqrt(6 / (fan_in + fan_out)).
Tensor glorot_uniform(Rng& rng, Shape shape, int64_t fan_in, int64_t fan_out);

}  // namespace w2t
