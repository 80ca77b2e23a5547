#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace w2t {

using Shape = std::vector<int64_t>;

int64_t shape_numel(const Shape& shape);
std::string shape_str(const Shape& shape);

// A dense fp64 array with an optional same-shape gradient slot. Copies are
// shallow: a Tensor is a handle onto shared storage, which is what lets
// recorded backward closures see parameter updates and accumulate gradients.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<double> values, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  bool defined() const { return s_ != nullptr; }
  const Shape& shape() const { return s_->shape; }
  int64_t ndim() const { return static_cast<int64_t>(s_->shape.size()); }
  int64_t size(int64_t dim) const { return s_->shape[static_cast<size_t>(dim)]; }
  int64_t numel() const { return static_cast<int64_t>(s_->values.size()); }

  std::vector<double>& values() { return s_->values; }
  const std::vector<double>& values() const { return s_->values; }
  double item() const;

  bool requires_grad() const { return s_->requires_grad; }
  void set_requires_grad(bool v) { s_->requires_grad = v; }

  bool has_grad() const { return !s_->grad.empty(); }
  // Allocates the gradient slot (zero-filled) if absent.
  std::vector<double>& grad();
  const std::vector<double>& grad() const { return s_->grad; }
  void zero_grad();
  void drop_grad() { s_->grad.clear(); }

  // Deep copy of values (gradient slot not copied).
  Tensor clone() const;

  // Storage identity, for tape bookkeeping.
  const void* id() const { return s_.get(); }

  // Throws if any value is non-finite; `where` names the producing op.
  void check_finite_values(const char* where) const;
  void check_finite_grad(const char* where) const;

 private:
  struct Storage {
    Shape shape;
    std::vector<double> values;
    std::vector<double> grad;  // empty = absent
    bool requires_grad = false;
  };
  std::shared_ptr<Storage> s_;
};

}  // namespace w2t
