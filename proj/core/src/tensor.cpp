#include "w2t/tensor.hpp"

#include <cmath>
#include <stdexcept>

#include "w2t/common.hpp"

namespace w2t {

int64_t shape_numel(const Shape& shape) {
  int64_t n = 1;
  for (int64_t d : shape) n *= d;
  return n;
}

std::string shape_str(const Shape& shape) {
  std::string s = "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

static void validate_shape(const Shape& shape) {
  if (shape.empty()) throw std::invalid_argument("Tensor: shape must have at least one extent");
  for (int64_t d : shape) {
    if (d <= 0) throw std::invalid_argument(strf("Tensor: non-positive extent in shape %s", shape_str(shape).c_str()));
  }
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  return full(std::move(shape), 0.0, requires_grad);
}

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
  validate_shape(shape);
  Tensor t;
  t.s_ = std::make_shared<Storage>();
  t.s_->values.assign(static_cast<size_t>(shape_numel(shape)), value);
  t.s_->shape = std::move(shape);
  t.s_->requires_grad = requires_grad;
  return t;
}

Tensor Tensor::from(Shape shape, std::vector<double> values, bool requires_grad) {
  validate_shape(shape);
  if (shape_numel(shape) != static_cast<int64_t>(values.size())) {
    throw std::invalid_argument(strf("Tensor: shape %s wants %lld values, got %zu", shape_str(shape).c_str(),
                                     (long long)shape_numel(shape), values.size()));
  }
  Tensor t;
  t.s_ = std::make_shared<Storage>();
  t.s_->shape = std::move(shape);
  t.s_->values = std::move(values);
  t.s_->requires_grad = requires_grad;
  return t;
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  return from({1}, {value}, requires_grad);
}

double Tensor::item() const {
  if (numel() != 1) throw std::invalid_argument(strf("Tensor::item: tensor has %lld elements", (long long)numel()));
  return s_->values[0];
}

std::vector<double>& Tensor::grad() {
  if (s_->grad.empty()) s_->grad.assign(s_->values.size(), 0.0);
  return s_->grad;
}

void Tensor::zero_grad() {
  if (!s_->grad.empty()) s_->grad.assign(s_->values.size(), 0.0);
}

Tensor Tensor::clone() const {
  Tensor t;
  t.s_ = std::make_shared<Storage>();
  t.s_->shape = s_->shape;
  t.s_->values = s_->values;
  t.s_->requires_grad = s_->requires_grad;
  return t;
}

void Tensor::check_finite_values(const char* where) const {
  for (double v : s_->values) {
    if (!std::isfinite(v)) throw std::runtime_error(strf("%s: produced a non-finite value", where));
  }
}

void Tensor::check_finite_grad(const char* where) const {
  for (double v : s_->grad) {
    if (!std::isfinite(v)) throw std::runtime_error(strf("%s: produced a non-finite gradient", where));
  }
}

}  // namespace w2t
