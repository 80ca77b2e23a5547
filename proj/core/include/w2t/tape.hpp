#pragma once

#include <cstdint>
#include <functional>
#include <unordered_set>
#include <vector>

#include "w2t/tensor.hpp"

namespace w2t {

// Records one step's computation graph for reverse-mode differentiation.
// A tape is built, backpropagated, and discarded; parameters outlive it and
// accumulate gradients across backward() calls until explicitly cleared.
//
// Single-threaded per tape. Independent tapes over disjoint data may run in
// parallel as long as no shared parameter is being mutated.
class Tape {
 public:
  explicit Tape(bool recording = true) : recording_(recording) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const { return recording_; }
  size_t num_recorded() const { return steps_.size(); }

  // ---- operations ----

  // Valid (no padding) cross-correlation. input: [C_in x L],
  // kernels: [C_out x C_in x F], bias: [C_out]. Output length
  // L_out = floor((L - F) / stride) + 1.
  Tensor conv1d(const Tensor& input, const Tensor& kernels, const Tensor& bias, int64_t stride);

  // Elementwise max(x, leakiness * x); the subgradient at 0 is leakiness.
  Tensor lrelu(const Tensor& x, double leakiness);

  Tensor tanh(const Tensor& x);
  Tensor sigmoid(const Tensor& x);

  // 1-D, max-subtracted for stability; output sums to 1.
  Tensor softmax(const Tensor& x);

  // Elementwise; shapes must match exactly (no broadcasting).
  Tensor add(const Tensor& a, const Tensor& b);
  Tensor mul(const Tensor& a, const Tensor& b);

  // Shape-dispatched product: [m,k]x[k,n] -> [m,n]; [m,k]x[k] -> [m];
  // [k]x[k,n] -> [n]; [k]x[k] -> scalar.
  Tensor matmul(const Tensor& a, const Tensor& b);

  // Concatenation along the last axis; all leading extents must agree.
  Tensor concat(const std::vector<Tensor>& parts);
  Tensor concat(const Tensor& a, const Tensor& b);

  // [C x L] -> [C], arithmetic mean over the time axis.
  Tensor mean_pool_time(const Tensor& x);

  // table: [V x E]; returns row `index` as an [E] tensor.
  Tensor embedding(const Tensor& table, int64_t index);

  // T same-length vectors -> [T x K] matrix.
  Tensor stack_rows(const std::vector<Tensor>& rows);

  Tensor sum_all(const Tensor& x);

  // Mean over rows, sum over columns of the squared difference. 1-D inputs
  // are treated as a single row.
  Tensor mse_loss(const Tensor& pred, const Tensor& target);

  // logits: [T x V]; mean over T of per-step negative log-likelihood,
  // computed with a max-subtracted log-softmax.
  Tensor cross_entropy(const Tensor& logits, const std::vector<int64_t>& targets);

  // Seeds d(loss)/d(loss) = 1 and runs recorded steps in reverse. Gradients
  // of intermediates are reset per call; gradients of leaf tensors
  // (parameters, inputs) accumulate across calls.
  void backward(const Tensor& loss);

 private:
  struct Step {
    std::function<void()> fn;
    Tensor out;
  };

  bool is_node(const Tensor& t) const { return node_ids_.count(t.id()) > 0; }
  // Registers `out` as a recorded node when the tape is recording and any
  // input requires grad; returns true if the caller must supply a closure.
  bool should_record(std::initializer_list<const Tensor*> inputs) const;
  void record(const Tensor& out, std::function<void()> fn);

  bool recording_;
  std::vector<Step> steps_;
  std::unordered_set<const void*> node_ids_;
};

}  // namespace w2t
