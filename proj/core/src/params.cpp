#include "w2t/params.hpp"

#include <cmath>
#include <stdexcept>

namespace w2t {

void ParameterSet::add(const std::string& path, Tensor t) {
  if (!t.defined()) throw std::invalid_argument(strf("ParameterSet::add: undefined tensor for '%s'", path.c_str()));
  if (params_.count(path) > 0) throw std::invalid_argument(strf("ParameterSet::add: duplicate path '%s'", path.c_str()));
  t.set_requires_grad(true);
  params_.emplace(path, std::move(t));
}

Tensor& ParameterSet::get(const std::string& path) {
  auto it = params_.find(path);
  if (it == params_.end()) throw std::out_of_range(strf("ParameterSet: unknown parameter '%s'", path.c_str()));
  return it->second;
}

const Tensor& ParameterSet::get(const std::string& path) const {
  auto it = params_.find(path);
  if (it == params_.end()) throw std::out_of_range(strf("ParameterSet: unknown parameter '%s'", path.c_str()));
  return it->second;
}

void ParameterSet::freeze(const std::string& path) {
  if (params_.count(path) == 0) throw std::invalid_argument(strf("ParameterSet::freeze: unknown parameter '%s'", path.c_str()));
  frozen_.insert(path);
}

void ParameterSet::freeze_prefix(const std::string& prefix) {
  bool any = false;
  for (const auto& [path, t] : params_) {
    if (path.rfind(prefix, 0) == 0) {
      frozen_.insert(path);
      any = true;
    }
  }
  if (!any) throw std::invalid_argument(strf("ParameterSet::freeze_prefix: no parameter matches '%s'", prefix.c_str()));
}

void ParameterSet::zero_grads() {
  for (auto& [path, t] : params_) t.zero_grad();
}

void ParameterSet::scale_grads(double factor) {
  for (auto& [path, t] : params_) {
    if (!t.has_grad()) continue;
    for (double& g : t.grad()) g *= factor;
  }
}

int64_t ParameterSet::total_parameters() const {
  int64_t n = 0;
  for (const auto& [path, t] : params_) n += t.numel();
  return n;
}

int64_t ParameterSet::frozen_parameter_count() const {
  int64_t n = 0;
  for (const std::string& path : frozen_) n += params_.at(path).numel();
  return n;
}

Tensor glorot_uniform(Rng& rng, Shape shape, int64_t fan_in, int64_t fan_out) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Tensor t = Tensor::zeros(std::move(shape));
  for (double& v : t.values()) v = rng.uniform(-bound, bound);
  return t;
}

}  // namespace w2t
