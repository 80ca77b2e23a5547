#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace w2t::testing {

std::vector<double> naive_conv1d(const std::vector<double>& input, int64_t c_in, int64_t len,
                                 const std::vector<double>& kernels, int64_t c_out, int64_t filt,
                                 const std::vector<double>& bias, int64_t stride) {
  const int64_t l_out = (len - filt) / stride + 1;
  std::vector<double> out(static_cast<size_t>(c_out * l_out), 0.0);
  for (int64_t co = 0; co < c_out; ++co) {
    for (int64_t p = 0; p < l_out; ++p) {
      double acc = bias[static_cast<size_t>(co)];
      for (int64_t ci = 0; ci < c_in; ++ci) {
        for (int64_t f = 0; f < filt; ++f) {
          acc += input[static_cast<size_t>(ci * len + p * stride + f)] *
                 kernels[static_cast<size_t>((co * c_in + ci) * filt + f)];
        }
      }
      out[static_cast<size_t>(co * l_out + p)] = acc;
    }
  }
  return out;
}

std::vector<double> direct_softmax(const std::vector<double>& x) {
  std::vector<double> out(x.size());
  double sum = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    out[i] = std::exp(x[i]);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

double naive_mse(const std::vector<double>& pred, const std::vector<double>& target, int64_t rows, int64_t cols) {
  double total = 0.0;
  for (int64_t s = 0; s < rows; ++s) {
    for (int64_t d = 0; d < cols; ++d) {
      const double diff = pred[static_cast<size_t>(s * cols + d)] - target[static_cast<size_t>(s * cols + d)];
      total += diff * diff;
    }
  }
  return total / static_cast<double>(rows);
}

double naive_cross_entropy(const std::vector<double>& logits, int64_t t_steps, int64_t vocab,
                           const std::vector<int64_t>& targets) {
  double total = 0.0;
  for (int64_t t = 0; t < t_steps; ++t) {
    double denom = 0.0;
    for (int64_t j = 0; j < vocab; ++j) denom += std::exp(logits[static_cast<size_t>(t * vocab + j)]);
    const double p = std::exp(logits[static_cast<size_t>(t * vocab + targets[static_cast<size_t>(t)])]) / denom;
    total -= std::log(p);
  }
  return total / static_cast<double>(t_steps);
}

namespace {

double sigmoid_ref(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::vector<double> affine_ref(const std::vector<double>& w_x, const std::vector<double>& w_h,
                               const std::vector<double>& b, int64_t in_dim, int64_t units, const std::vector<double>& x,
                               const std::vector<double>& h) {
  std::vector<double> out(static_cast<size_t>(units), 0.0);
  for (int64_t u = 0; u < units; ++u) {
    double acc = b[static_cast<size_t>(u)];
    for (int64_t j = 0; j < in_dim; ++j) acc += w_x[static_cast<size_t>(u * in_dim + j)] * x[static_cast<size_t>(j)];
    for (int64_t j = 0; j < units; ++j) acc += w_h[static_cast<size_t>(u * units + j)] * h[static_cast<size_t>(j)];
    out[static_cast<size_t>(u)] = acc;
  }
  return out;
}

}  // namespace

void lstm_cell_reference(const LstmRefWeights& w, int64_t in_dim, int64_t units, const std::vector<double>& x,
                         const std::vector<double>& h_prev, const std::vector<double>& c_prev, std::vector<double>& h_out,
                         std::vector<double>& c_out) {
  const auto i_pre = affine_ref(w.wx_i, w.wh_i, w.b_i, in_dim, units, x, h_prev);
  const auto f_pre = affine_ref(w.wx_f, w.wh_f, w.b_f, in_dim, units, x, h_prev);
  const auto g_pre = affine_ref(w.wx_g, w.wh_g, w.b_g, in_dim, units, x, h_prev);
  const auto o_pre = affine_ref(w.wx_o, w.wh_o, w.b_o, in_dim, units, x, h_prev);
  h_out.assign(static_cast<size_t>(units), 0.0);
  c_out.assign(static_cast<size_t>(units), 0.0);
  for (int64_t u = 0; u < units; ++u) {
    const double i = sigmoid_ref(i_pre[static_cast<size_t>(u)]);
    const double f = sigmoid_ref(f_pre[static_cast<size_t>(u)]);
    const double g = std::tanh(g_pre[static_cast<size_t>(u)]);
    const double o = sigmoid_ref(o_pre[static_cast<size_t>(u)]);
    const double c = f * c_prev[static_cast<size_t>(u)] + i * g;
    c_out[static_cast<size_t>(u)] = c;
    h_out[static_cast<size_t>(u)] = o * std::tanh(c);
  }
}

ScalarTrace adam_scalar_recurrence(double p0, const std::function<double(double)>& grad, int64_t steps, double lr,
                                   double beta1, double beta2, double eps) {
  ScalarTrace trace;
  double p = p0, m = 0.0, v = 0.0;
  for (int64_t t = 1; t <= steps; ++t) {
    const double g = grad(p);
    m = beta1 * m + (1.0 - beta1) * g;
    v = beta2 * v + (1.0 - beta2) * g * g;
    const double mhat = m / (1.0 - std::pow(beta1, static_cast<double>(t)));
    const double vhat = v / (1.0 - std::pow(beta2, static_cast<double>(t)));
    p -= lr * mhat / (std::sqrt(vhat) + eps);
    trace.values.push_back(p);
  }
  return trace;
}

ScalarTrace momentum_scalar_recurrence(double p0, const std::function<double(double)>& grad, int64_t steps, double lr,
                                       double momentum) {
  ScalarTrace trace;
  double p = p0, vel = 0.0;
  for (int64_t t = 0; t < steps; ++t) {
    const double g = grad(p);
    vel = momentum * vel - lr * g;
    p += vel;
    trace.values.push_back(p);
  }
  return trace;
}

namespace {

int64_t memo_rec(const std::vector<int64_t>& a, const std::vector<int64_t>& b, size_t i, size_t j,
                 std::map<std::pair<size_t, size_t>, int64_t>& memo) {
  if (i == a.size()) return static_cast<int64_t>(b.size() - j);
  if (j == b.size()) return static_cast<int64_t>(a.size() - i);
  const auto key = std::make_pair(i, j);
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;
  int64_t best;
  if (a[i] == b[j]) {
    best = memo_rec(a, b, i + 1, j + 1, memo);
  } else {
    const int64_t sub = memo_rec(a, b, i + 1, j + 1, memo);
    const int64_t del = memo_rec(a, b, i + 1, j, memo);
    const int64_t ins = memo_rec(a, b, i, j + 1, memo);
    best = 1 + std::min({sub, del, ins});
  }
  memo[key] = best;
  return best;
}

}  // namespace

int64_t edit_distance_memo(const std::vector<int64_t>& a, const std::vector<int64_t>& b) {
  std::map<std::pair<size_t, size_t>, int64_t> memo;
  return memo_rec(a, b, 0, 0, memo);
}

ExhaustiveBest exhaustive_best_sequence(int64_t vocab, int64_t eos, int64_t max_len,
                                        const std::function<double(const std::vector<int64_t>&)>& log_prob) {
  ExhaustiveBest best;
  bool have_best = false;

  std::vector<int64_t> prefix;
  std::function<void()> visit = [&]() {
    // Complete the prefix with eos.
    std::vector<int64_t> candidate = prefix;
    candidate.push_back(eos);
    if (static_cast<int64_t>(candidate.size()) <= max_len) {
      const double lp = log_prob(candidate);
      const double norm = lp / static_cast<double>(candidate.size());
      bool take = false;
      if (!have_best) {
        take = true;
      } else if (norm != best.normalized) {
        take = norm > best.normalized;
      } else if (candidate.size() != best.symbols.size()) {
        take = candidate.size() < best.symbols.size();
      } else {
        take = candidate < best.symbols;
      }
      if (take) {
        best.symbols = candidate;
        best.log_prob = lp;
        best.normalized = norm;
        have_best = true;
      }
    }
    if (static_cast<int64_t>(prefix.size()) + 1 >= max_len) return;
    for (int64_t y = 0; y < vocab; ++y) {
      if (y == eos) continue;
      prefix.push_back(y);
      visit();
      prefix.pop_back();
    }
  };
  visit();
  return best;
}

std::vector<double> naive_dct2(const std::vector<double>& x, int64_t keep) {
  const int64_t d = static_cast<int64_t>(x.size());
  std::vector<double> out(static_cast<size_t>(keep), 0.0);
  for (int64_t k = 0; k < keep; ++k) {
    double acc = 0.0;
    for (int64_t n = 0; n < d; ++n) {
      acc += x[static_cast<size_t>(n)] *
             std::cos(M_PI / static_cast<double>(d) * (static_cast<double>(n) + 0.5) * static_cast<double>(k));
    }
    const double scale = k == 0 ? std::sqrt(1.0 / static_cast<double>(d)) : std::sqrt(2.0 / static_cast<double>(d));
    out[static_cast<size_t>(k)] = scale * acc;
  }
  return out;
}

}  // namespace w2t::testing
