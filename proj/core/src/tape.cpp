#include "w2t/tape.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "w2t/common.hpp"

namespace w2t {

namespace {

bool any_requires(std::initializer_list<const Tensor*> ts) {
  for (const Tensor* t : ts) {
    if (t->requires_grad()) return true;
  }
  return false;
}

void require_defined(std::initializer_list<const Tensor*> ts, const char* op) {
  for (const Tensor* t : ts) {
    if (!t->defined()) throw std::invalid_argument(strf("%s: undefined tensor argument", op));
  }
}

}  // namespace

bool Tape::should_record(std::initializer_list<const Tensor*> inputs) const {
  return recording_ && any_requires(inputs);
}

void Tape::record(const Tensor& out, std::function<void()> fn) {
  node_ids_.insert(out.id());
  steps_.push_back(Step{std::move(fn), out});
}

// ---- conv1d ---------------------------------------------------------------

Tensor Tape::conv1d(const Tensor& input, const Tensor& kernels, const Tensor& bias, int64_t stride) {
  require_defined({&input, &kernels, &bias}, "conv1d");
  if (input.ndim() != 2) throw std::invalid_argument(strf("conv1d: input must be [C_in x L], got %s", shape_str(input.shape()).c_str()));
  if (kernels.ndim() != 3) throw std::invalid_argument(strf("conv1d: kernels must be [C_out x C_in x F], got %s", shape_str(kernels.shape()).c_str()));
  if (bias.ndim() != 1) throw std::invalid_argument(strf("conv1d: bias must be [C_out], got %s", shape_str(bias.shape()).c_str()));
  if (stride < 1) throw std::invalid_argument(strf("conv1d: stride must be >= 1, got %lld", (long long)stride));

  const int64_t c_in = input.size(0), len = input.size(1);
  const int64_t c_out = kernels.size(0), filt = kernels.size(2);
  if (kernels.size(1) != c_in) {
    throw std::invalid_argument(strf("conv1d: kernels expect C_in=%lld but input has C_in=%lld", (long long)kernels.size(1), (long long)c_in));
  }
  if (bias.size(0) != c_out) {
    throw std::invalid_argument(strf("conv1d: bias has %lld channels but kernels produce C_out=%lld", (long long)bias.size(0), (long long)c_out));
  }
  if (len < filt) {
    throw std::invalid_argument(strf("conv1d: input shorter than filter (L=%lld, F=%lld)", (long long)len, (long long)filt));
  }

  const int64_t l_out = (len - filt) / stride + 1;
  Tensor out = Tensor::zeros({c_out, l_out});

  {
    const double* in = input.values().data();
    const double* k = kernels.values().data();
    const double* b = bias.values().data();
    double* o = out.values().data();
    for (int64_t co = 0; co < c_out; ++co) {
      double* orow = o + co * l_out;
      std::fill(orow, orow + l_out, b[co]);
      const double* kc = k + co * c_in * filt;
      for (int64_t ci = 0; ci < c_in; ++ci) {
        const double* irow = in + ci * len;
        const double* kv = kc + ci * filt;
        for (int64_t f = 0; f < filt; ++f) {
          const double kf = kv[f];
          const double* ip = irow + f;
          for (int64_t p = 0; p < l_out; ++p) orow[p] += kf * ip[p * stride];
        }
      }
    }
  }
  out.check_finite_values("conv1d");

  if (should_record({&input, &kernels, &bias})) {
    out.set_requires_grad(true);
    Tensor in_t = input, k_t = kernels, b_t = bias, out_t = out;
    record(out, [in_t, k_t, b_t, out_t, stride, c_in, c_out, len, filt, l_out]() mutable {
      const double* og = out_t.grad().data();
      if (in_t.requires_grad()) {
        double* ig = in_t.grad().data();
        const double* k = k_t.values().data();
        for (int64_t co = 0; co < c_out; ++co) {
          const double* ogrow = og + co * l_out;
          const double* kc = k + co * c_in * filt;
          for (int64_t ci = 0; ci < c_in; ++ci) {
            double* igrow = ig + ci * len;
            const double* kv = kc + ci * filt;
            for (int64_t f = 0; f < filt; ++f) {
              const double kf = kv[f];
              double* ip = igrow + f;
              for (int64_t p = 0; p < l_out; ++p) ip[p * stride] += kf * ogrow[p];
            }
          }
        }
      }
      if (k_t.requires_grad()) {
        double* kg = k_t.grad().data();
        const double* in = in_t.values().data();
        for (int64_t co = 0; co < c_out; ++co) {
          const double* ogrow = og + co * l_out;
          double* kc = kg + co * c_in * filt;
          for (int64_t ci = 0; ci < c_in; ++ci) {
            const double* irow = in + ci * len;
            double* kv = kc + ci * filt;
            for (int64_t f = 0; f < filt; ++f) {
              const double* ip = irow + f;
              double acc = 0.0;
              for (int64_t p = 0; p < l_out; ++p) acc += ogrow[p] * ip[p * stride];
              kv[f] += acc;
            }
          }
        }
      }
      if (b_t.requires_grad()) {
        double* bg = b_t.grad().data();
        for (int64_t co = 0; co < c_out; ++co) {
          const double* ogrow = og + co * l_out;
          double acc = 0.0;
          for (int64_t p = 0; p < l_out; ++p) acc += ogrow[p];
          bg[co] += acc;
        }
      }
    });
  }
  return out;
}

// ---- elementwise activations ----------------------------------------------

Tensor Tape::lrelu(const Tensor& x, double leakiness) {
  require_defined({&x}, "lrelu");
  if (leakiness < 0.0 || leakiness >= 1.0) {
    throw std::invalid_argument(strf("lrelu: leakiness must be in [0, 1), got %g", leakiness));
  }
  Tensor out = Tensor::zeros(x.shape());
  const auto& xv = x.values();
  auto& ov = out.values();
  for (size_t i = 0; i < xv.size(); ++i) ov[i] = xv[i] > 0.0 ? xv[i] : leakiness * xv[i];
  out.check_finite_values("lrelu");

  if (should_record({&x})) {
    out.set_requires_grad(true);
    Tensor x_t = x, out_t = out;
    record(out, [x_t, out_t, leakiness]() mutable {
      if (!x_t.requires_grad()) return;
      const auto& xv = x_t.values();
      const auto& og = out_t.grad();
      auto& xg = x_t.grad();
      for (size_t i = 0; i < xv.size(); ++i) xg[i] += (xv[i] > 0.0 ? 1.0 : leakiness) * og[i];
    });
  }
  return out;
}

Tensor Tape::tanh(const Tensor& x) {
  require_defined({&x}, "tanh");
  Tensor out = Tensor::zeros(x.shape());
  const auto& xv = x.values();
  auto& ov = out.values();
  for (size_t i = 0; i < xv.size(); ++i) ov[i] = std::tanh(xv[i]);
  out.check_finite_values("tanh");

  if (should_record({&x})) {
    out.set_requires_grad(true);
    Tensor x_t = x, out_t = out;
    record(out, [x_t, out_t]() mutable {
      if (!x_t.requires_grad()) return;
      const auto& ov = out_t.values();
      const auto& og = out_t.grad();
      auto& xg = x_t.grad();
      for (size_t i = 0; i < ov.size(); ++i) xg[i] += (1.0 - ov[i] * ov[i]) * og[i];
    });
  }
  return out;
}

Tensor Tape::sigmoid(const Tensor& x) {
  require_defined({&x}, "sigmoid");
  Tensor out = Tensor::zeros(x.shape());
  const auto& xv = x.values();
  auto& ov = out.values();
  for (size_t i = 0; i < xv.size(); ++i) {
    // Split by sign to avoid overflow in exp.
    const double v = xv[i];
    ov[i] = v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
  }
  out.check_finite_values("sigmoid");

  if (should_record({&x})) {
    out.set_requires_grad(true);
    Tensor x_t = x, out_t = out;
    record(out, [x_t, out_t]() mutable {
      if (!x_t.requires_grad()) return;
      const auto& ov = out_t.values();
      const auto& og = out_t.grad();
      auto& xg = x_t.grad();
      for (size_t i = 0; i < ov.size(); ++i) xg[i] += ov[i] * (1.0 - ov[i]) * og[i];
    });
  }
  return out;
}

Tensor Tape::softmax(const Tensor& x) {
  require_defined({&x}, "softmax");
  if (x.ndim() != 1) throw std::invalid_argument(strf("softmax: expects a 1-D tensor, got %s", shape_str(x.shape()).c_str()));
  const auto& xv = x.values();
  Tensor out = Tensor::zeros(x.shape());
  auto& ov = out.values();
  const double mx = *std::max_element(xv.begin(), xv.end());
  double sum = 0.0;
  for (size_t i = 0; i < xv.size(); ++i) {
    ov[i] = std::exp(xv[i] - mx);
    sum += ov[i];
  }
  for (double& v : ov) v /= sum;
  out.check_finite_values("softmax");

  if (should_record({&x})) {
    out.set_requires_grad(true);
    Tensor x_t = x, out_t = out;
    record(out, [x_t, out_t]() mutable {
      if (!x_t.requires_grad()) return;
      const auto& y = out_t.values();
      const auto& og = out_t.grad();
      auto& xg = x_t.grad();
      double dot = 0.0;
      for (size_t i = 0; i < y.size(); ++i) dot += og[i] * y[i];
      for (size_t i = 0; i < y.size(); ++i) xg[i] += y[i] * (og[i] - dot);
    });
  }
  return out;
}

// ---- elementwise binary ----------------------------------------------------

Tensor Tape::add(const Tensor& a, const Tensor& b) {
  require_defined({&a, &b}, "add");
  if (a.shape() != b.shape()) {
    throw std::invalid_argument(strf("add: shape mismatch %s vs %s", shape_str(a.shape()).c_str(), shape_str(b.shape()).c_str()));
  }
  Tensor out = Tensor::zeros(a.shape());
  const auto& av = a.values();
  const auto& bv = b.values();
  auto& ov = out.values();
  for (size_t i = 0; i < av.size(); ++i) ov[i] = av[i] + bv[i];
  out.check_finite_values("add");

  if (should_record({&a, &b})) {
    out.set_requires_grad(true);
    Tensor a_t = a, b_t = b, out_t = out;
    record(out, [a_t, b_t, out_t]() mutable {
      const auto& og = out_t.grad();
      if (a_t.requires_grad()) {
        auto& ag = a_t.grad();
        for (size_t i = 0; i < og.size(); ++i) ag[i] += og[i];
      }
      if (b_t.requires_grad()) {
        auto& bg = b_t.grad();
        for (size_t i = 0; i < og.size(); ++i) bg[i] += og[i];
      }
    });
  }
  return out;
}

Tensor Tape::mul(const Tensor& a, const Tensor& b) {
  require_defined({&a, &b}, "mul");
  if (a.shape() != b.shape()) {
    throw std::invalid_argument(strf("mul: shape mismatch %s vs %s", shape_str(a.shape()).c_str(), shape_str(b.shape()).c_str()));
  }
  Tensor out = Tensor::zeros(a.shape());
  const auto& av = a.values();
  const auto& bv = b.values();
  auto& ov = out.values();
  for (size_t i = 0; i < av.size(); ++i) ov[i] = av[i] * bv[i];
  out.check_finite_values("mul");

  if (should_record({&a, &b})) {
    out.set_requires_grad(true);
    Tensor a_t = a, b_t = b, out_t = out;
    record(out, [a_t, b_t, out_t]() mutable {
      const auto& og = out_t.grad();
      if (a_t.requires_grad()) {
        auto& ag = a_t.grad();
        const auto& bv = b_t.values();
        for (size_t i = 0; i < og.size(); ++i) ag[i] += bv[i] * og[i];
      }
      if (b_t.requires_grad()) {
        auto& bg = b_t.grad();
        const auto& av = a_t.values();
        for (size_t i = 0; i < og.size(); ++i) bg[i] += av[i] * og[i];
      }
    });
  }
  return out;
}

// ---- matmul -----------------------------------------------------------------

Tensor Tape::matmul(const Tensor& a, const Tensor& b) {
  require_defined({&a, &b}, "matmul");
  const int64_t ar = a.ndim(), br = b.ndim();
  if ((ar != 1 && ar != 2) || (br != 1 && br != 2)) {
    throw std::invalid_argument(strf("matmul: operands must be 1-D or 2-D, got %s and %s", shape_str(a.shape()).c_str(),
                                     shape_str(b.shape()).c_str()));
  }
  const int64_t m = ar == 2 ? a.size(0) : 1;
  const int64_t k = ar == 2 ? a.size(1) : a.size(0);
  const int64_t kb = br == 2 ? b.size(0) : b.size(0);
  const int64_t n = br == 2 ? b.size(1) : 1;
  if (k != kb) {
    throw std::invalid_argument(strf("matmul: inner dimensions differ, %s vs %s", shape_str(a.shape()).c_str(),
                                     shape_str(b.shape()).c_str()));
  }

  Shape out_shape;
  if (ar == 2 && br == 2) out_shape = {m, n};
  else if (ar == 2) out_shape = {m};
  else if (br == 2) out_shape = {n};
  else out_shape = {1};

  Tensor out = Tensor::zeros(out_shape);
  {
    const double* av = a.values().data();
    const double* bv = b.values().data();
    double* ov = out.values().data();
    for (int64_t i = 0; i < m; ++i) {
      const double* arow = av + i * k;
      double* orow = ov + i * n;
      for (int64_t kk = 0; kk < k; ++kk) {
        const double aik = arow[kk];
        const double* brow = bv + kk * n;
        for (int64_t j = 0; j < n; ++j) orow[j] += aik * brow[j];
      }
    }
  }
  out.check_finite_values("matmul");

  if (should_record({&a, &b})) {
    out.set_requires_grad(true);
    Tensor a_t = a, b_t = b, out_t = out;
    record(out, [a_t, b_t, out_t, m, k, n]() mutable {
      const double* og = out_t.grad().data();
      if (a_t.requires_grad()) {
        // dA = dOut * B^T
        double* ag = a_t.grad().data();
        const double* bv = b_t.values().data();
        for (int64_t i = 0; i < m; ++i) {
          const double* ogrow = og + i * n;
          double* agrow = ag + i * k;
          for (int64_t kk = 0; kk < k; ++kk) {
            const double* brow = bv + kk * n;
            double acc = 0.0;
            for (int64_t j = 0; j < n; ++j) acc += ogrow[j] * brow[j];
            agrow[kk] += acc;
          }
        }
      }
      if (b_t.requires_grad()) {
        // dB = A^T * dOut
        double* bg = b_t.grad().data();
        const double* av = a_t.values().data();
        for (int64_t i = 0; i < m; ++i) {
          const double* arow = av + i * k;
          const double* ogrow = og + i * n;
          for (int64_t kk = 0; kk < k; ++kk) {
            const double aik = arow[kk];
            double* bgrow = bg + kk * n;
            for (int64_t j = 0; j < n; ++j) bgrow[j] += aik * ogrow[j];
          }
        }
      }
    });
  }
  return out;
}

// ---- concat / stack ---------------------------------------------------------

Tensor Tape::concat(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat: needs at least one tensor");
  for (const Tensor& p : parts) require_defined({&p}, "concat");
  const int64_t rank = parts[0].ndim();
  Shape lead(parts[0].shape().begin(), parts[0].shape().end() - 1);
  int64_t last_total = 0;
  for (const Tensor& p : parts) {
    if (p.ndim() != rank) throw std::invalid_argument("concat: rank mismatch between parts");
    Shape plead(p.shape().begin(), p.shape().end() - 1);
    if (plead != lead) {
      throw std::invalid_argument(strf("concat: leading extents differ, %s vs %s", shape_str(parts[0].shape()).c_str(),
                                       shape_str(p.shape()).c_str()));
    }
    last_total += p.shape().back();
  }
  Shape out_shape = lead;
  out_shape.push_back(last_total);
  Tensor out = Tensor::zeros(out_shape);

  const int64_t outer = shape_numel(lead);
  {
    auto& ov = out.values();
    int64_t offset = 0;
    for (const Tensor& p : parts) {
      const int64_t w = p.shape().back();
      const auto& pv = p.values();
      for (int64_t r = 0; r < outer; ++r) {
        std::copy(pv.begin() + r * w, pv.begin() + (r + 1) * w, ov.begin() + r * last_total + offset);
      }
      offset += w;
    }
  }

  bool rec = recording_;
  if (rec) {
    rec = false;
    for (const Tensor& p : parts) rec = rec || p.requires_grad();
  }
  if (rec) {
    out.set_requires_grad(true);
    std::vector<Tensor> parts_t = parts;
    Tensor out_t = out;
    record(out, [parts_t, out_t, outer, last_total]() mutable {
      const auto& og = out_t.grad();
      int64_t offset = 0;
      for (Tensor& p : parts_t) {
        const int64_t w = p.shape().back();
        if (p.requires_grad()) {
          auto& pg = p.grad();
          for (int64_t r = 0; r < outer; ++r) {
            for (int64_t j = 0; j < w; ++j) pg[r * w + j] += og[r * last_total + offset + j];
          }
        }
        offset += w;
      }
    });
  }
  return out;
}

Tensor Tape::concat(const Tensor& a, const Tensor& b) { return concat(std::vector<Tensor>{a, b}); }

Tensor Tape::stack_rows(const std::vector<Tensor>& rows) {
  if (rows.empty()) throw std::invalid_argument("stack_rows: needs at least one row");
  for (const Tensor& r : rows) {
    require_defined({&r}, "stack_rows");
    if (r.ndim() != 1) throw std::invalid_argument(strf("stack_rows: rows must be 1-D, got %s", shape_str(r.shape()).c_str()));
  }
  const int64_t width = rows[0].size(0);
  for (const Tensor& r : rows) {
    if (r.size(0) != width) {
      throw std::invalid_argument(strf("stack_rows: row width %lld differs from first row width %lld", (long long)r.size(0),
                                       (long long)width));
    }
  }
  const int64_t t = static_cast<int64_t>(rows.size());
  Tensor out = Tensor::zeros({t, width});
  auto& ov = out.values();
  for (int64_t i = 0; i < t; ++i) {
    const auto& rv = rows[static_cast<size_t>(i)].values();
    std::copy(rv.begin(), rv.end(), ov.begin() + i * width);
  }

  bool rec = recording_;
  if (rec) {
    rec = false;
    for (const Tensor& r : rows) rec = rec || r.requires_grad();
  }
  if (rec) {
    out.set_requires_grad(true);
    std::vector<Tensor> rows_t = rows;
    Tensor out_t = out;
    record(out, [rows_t, out_t, width]() mutable {
      const auto& og = out_t.grad();
      for (size_t i = 0; i < rows_t.size(); ++i) {
        if (!rows_t[i].requires_grad()) continue;
        auto& rg = rows_t[i].grad();
        for (int64_t j = 0; j < width; ++j) rg[j] += og[i * width + j];
      }
    });
  }
  return out;
}

// ---- reductions and lookups ---------------------------------------------------

Tensor Tape::mean_pool_time(const Tensor& x) {
  require_defined({&x}, "mean_pool_time");
  if (x.ndim() != 2) throw std::invalid_argument(strf("mean_pool_time: expects [C x L], got %s", shape_str(x.shape()).c_str()));
  const int64_t c = x.size(0), l = x.size(1);
  Tensor out = Tensor::zeros({c});
  const auto& xv = x.values();
  auto& ov = out.values();
  for (int64_t i = 0; i < c; ++i) {
    double acc = 0.0;
    for (int64_t j = 0; j < l; ++j) acc += xv[i * l + j];
    ov[i] = acc / static_cast<double>(l);
  }
  out.check_finite_values("mean_pool_time");

  if (should_record({&x})) {
    out.set_requires_grad(true);
    Tensor x_t = x, out_t = out;
    record(out, [x_t, out_t, c, l]() mutable {
      if (!x_t.requires_grad()) return;
      const auto& og = out_t.grad();
      auto& xg = x_t.grad();
      const double inv = 1.0 / static_cast<double>(l);
      for (int64_t i = 0; i < c; ++i) {
        const double g = og[i] * inv;
        for (int64_t j = 0; j < l; ++j) xg[i * l + j] += g;
      }
    });
  }
  return out;
}

Tensor Tape::embedding(const Tensor& table, int64_t index) {
  require_defined({&table}, "embedding");
  if (table.ndim() != 2) throw std::invalid_argument(strf("embedding: table must be [V x E], got %s", shape_str(table.shape()).c_str()));
  const int64_t v = table.size(0), e = table.size(1);
  if (index < 0 || index >= v) {
    throw std::invalid_argument(strf("embedding: index %lld out of range [0, %lld)", (long long)index, (long long)v));
  }
  Tensor out = Tensor::zeros({e});
  const auto& tv = table.values();
  std::copy(tv.begin() + index * e, tv.begin() + (index + 1) * e, out.values().begin());

  if (should_record({&table})) {
    out.set_requires_grad(true);
    Tensor table_t = table, out_t = out;
    record(out, [table_t, out_t, index, e]() mutable {
      if (!table_t.requires_grad()) return;
      const auto& og = out_t.grad();
      auto& tg = table_t.grad();
      for (int64_t j = 0; j < e; ++j) tg[index * e + j] += og[j];
    });
  }
  return out;
}

Tensor Tape::sum_all(const Tensor& x) {
  require_defined({&x}, "sum_all");
  double acc = 0.0;
  for (double v : x.values()) acc += v;
  Tensor out = Tensor::scalar(acc);
  out.check_finite_values("sum_all");

  if (should_record({&x})) {
    out.set_requires_grad(true);
    Tensor x_t = x, out_t = out;
    record(out, [x_t, out_t]() mutable {
      if (!x_t.requires_grad()) return;
      const double g = out_t.grad()[0];
      auto& xg = x_t.grad();
      for (double& v : xg) v += g;
    });
  }
  return out;
}

// ---- losses -------------------------------------------------------------------

Tensor Tape::mse_loss(const Tensor& pred, const Tensor& target) {
  require_defined({&pred, &target}, "mse_loss");
  if (pred.shape() != target.shape()) {
    throw std::invalid_argument(strf("mse_loss: shape mismatch %s vs %s", shape_str(pred.shape()).c_str(),
                                     shape_str(target.shape()).c_str()));
  }
  if (pred.ndim() > 2) throw std::invalid_argument("mse_loss: expects a 1-D or 2-D tensor");
  const int64_t rows = pred.ndim() == 2 ? pred.size(0) : 1;
  const auto& pv = pred.values();
  const auto& tv = target.values();
  double acc = 0.0;
  for (size_t i = 0; i < pv.size(); ++i) {
    const double d = pv[i] - tv[i];
    acc += d * d;
  }
  Tensor out = Tensor::scalar(acc / static_cast<double>(rows));
  out.check_finite_values("mse_loss");

  if (should_record({&pred, &target})) {
    out.set_requires_grad(true);
    Tensor p_t = pred, t_t = target, out_t = out;
    record(out, [p_t, t_t, out_t, rows]() mutable {
      const double g = out_t.grad()[0] * 2.0 / static_cast<double>(rows);
      const auto& pv = p_t.values();
      const auto& tv = t_t.values();
      if (p_t.requires_grad()) {
        auto& pg = p_t.grad();
        for (size_t i = 0; i < pv.size(); ++i) pg[i] += g * (pv[i] - tv[i]);
      }
      if (t_t.requires_grad()) {
        auto& tg = t_t.grad();
        for (size_t i = 0; i < pv.size(); ++i) tg[i] -= g * (pv[i] - tv[i]);
      }
    });
  }
  return out;
}

Tensor Tape::cross_entropy(const Tensor& logits, const std::vector<int64_t>& targets) {
  require_defined({&logits}, "cross_entropy");
  if (logits.ndim() != 2) throw std::invalid_argument(strf("cross_entropy: logits must be [T x V], got %s", shape_str(logits.shape()).c_str()));
  const int64_t t_steps = logits.size(0), vocab = logits.size(1);
  if (static_cast<int64_t>(targets.size()) != t_steps) {
    throw std::invalid_argument(strf("cross_entropy: %zu targets for %lld logit rows", targets.size(), (long long)t_steps));
  }
  for (int64_t y : targets) {
    if (y < 0 || y >= vocab) {
      throw std::invalid_argument(strf("cross_entropy: target index %lld out of range [0, %lld)", (long long)y, (long long)vocab));
    }
  }

  const auto& lv = logits.values();
  double loss = 0.0;
  for (int64_t t = 0; t < t_steps; ++t) {
    const double* row = lv.data() + t * vocab;
    const double mx = *std::max_element(row, row + vocab);
    double sum = 0.0;
    for (int64_t j = 0; j < vocab; ++j) sum += std::exp(row[j] - mx);
    loss -= row[targets[static_cast<size_t>(t)]] - mx - std::log(sum);
  }
  Tensor out = Tensor::scalar(loss / static_cast<double>(t_steps));
  out.check_finite_values("cross_entropy");

  if (should_record({&logits})) {
    out.set_requires_grad(true);
    Tensor l_t = logits, out_t = out;
    std::vector<int64_t> tg = targets;
    record(out, [l_t, out_t, tg, t_steps, vocab]() mutable {
      if (!l_t.requires_grad()) return;
      const double g = out_t.grad()[0] / static_cast<double>(t_steps);
      const auto& lv = l_t.values();
      auto& lg = l_t.grad();
      for (int64_t t = 0; t < t_steps; ++t) {
        const double* row = lv.data() + t * vocab;
        double* grow = lg.data() + t * vocab;
        const double mx = *std::max_element(row, row + vocab);
        double sum = 0.0;
        for (int64_t j = 0; j < vocab; ++j) sum += std::exp(row[j] - mx);
        for (int64_t j = 0; j < vocab; ++j) {
          const double p = std::exp(row[j] - mx) / sum;
          grow[j] += g * (p - (j == tg[static_cast<size_t>(t)] ? 1.0 : 0.0));
        }
      }
    });
  }
  return out;
}

// ---- backward -------------------------------------------------------------------

void Tape::backward(const Tensor& loss) {
  if (!loss.defined() || loss.numel() != 1) {
    throw std::invalid_argument("backward: loss must be a defined scalar tensor");
  }
  if (!is_node(loss)) {
    throw std::invalid_argument("backward: loss was not produced by operations recorded on this tape");
  }
  // Intermediates get fresh adjoints each call; leaf gradients accumulate.
  for (Step& s : steps_) {
    s.out.grad();
    s.out.zero_grad();
  }
  Tensor seed = loss;
  seed.grad()[0] = 1.0;
  for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) it->fn();
  for (Step& s : steps_) s.out.check_finite_grad("backward");
}

}  // namespace w2t
