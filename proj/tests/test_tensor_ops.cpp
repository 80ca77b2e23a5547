#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support/finite_diff.hpp"
#include "support/oracles.hpp"
#include "w2t/common.hpp"
#include "w2t/tape.hpp"

using namespace w2t;
using namespace w2t::testing;

namespace {

Tensor rand_tensor(Rng& rng, Shape shape, bool requires_grad = false, double lo = -1.0, double hi = 1.0) {
  Tensor t = Tensor::zeros(std::move(shape), requires_grad);
  for (double& v : t.values()) v = rng.uniform(lo, hi);
  return t;
}

// Probes an op's Jacobian: loss = sum(w .* op(inputs)) with constant
// weights, analytic gradients vs central differences on every input entry.
double check_op_gradients(const std::function<Tensor(Tape&, const std::vector<Tensor>&)>& apply,
                          std::vector<Tensor> inputs, Rng& rng) {
  Tape tape;
  Tensor out = apply(tape, inputs);
  Tensor weights = rand_tensor(rng, out.shape());
  Tensor loss = tape.sum_all(tape.mul(out, weights));
  tape.backward(loss);

  auto forward = [&]() {
    Tape t(false);
    Tensor o = apply(t, inputs);
    double acc = 0.0;
    for (size_t i = 0; i < o.values().size(); ++i) acc += o.values()[i] * weights.values()[i];
    return acc;
  };

  double worst = 0.0;
  for (Tensor& input : inputs) {
    if (!input.requires_grad()) continue;
    worst = std::max(worst, fd_check_all(forward, input, input.grad()));
  }
  return worst;
}

}  // namespace

TEST_CASE("conv1d output length and zero-input bias passthrough") {
  Tape tape;
  // 400 samples, 80-wide filter, stride 4 -> 81 positions.
  Rng rng(1);
  Tensor input = Tensor::zeros({1, 400});
  Tensor kernels = rand_tensor(rng, {128, 1, 80});
  Tensor bias = rand_tensor(rng, {128});
  Tensor out = tape.conv1d(input, kernels, bias, 4);
  REQUIRE(out.shape() == Shape{128, 81});

  // Zero input leaves only the bias, per channel at every position.
  for (int64_t co = 0; co < 128; ++co) {
    for (int64_t p = 0; p < 81; ++p) {
      CHECK(out.values()[co * 81 + p] == doctest::Approx(bias.values()[co]).epsilon(1e-12));
    }
  }
}

TEST_CASE("conv1d length formula by enumeration") {
  for (int64_t len = 1; len <= 64; ++len) {
    for (int64_t filt = 1; filt <= 8 && filt <= len; ++filt) {
      for (int64_t stride = 1; stride <= 4; ++stride) {
        Tape tape;
        Tensor input = Tensor::zeros({1, len});
        Tensor kernels = Tensor::zeros({1, 1, filt});
        Tensor bias = Tensor::zeros({1});
        Tensor out = tape.conv1d(input, kernels, bias, stride);
        CHECK(out.size(1) == (len - filt) / stride + 1);
      }
    }
  }
}

TEST_CASE("conv1d matches the naive triple loop") {
  for (uint64_t seed = 0; seed < 12; ++seed) {
    Rng rng(seed);
    Tensor input = rand_tensor(rng, {1, 8});
    Tensor kernels = rand_tensor(rng, {1, 1, 3});
    Tensor bias = rand_tensor(rng, {1});
    Tape tape;
    Tensor out = tape.conv1d(input, kernels, bias, 1);
    const auto expect = naive_conv1d(input.values(), 1, 8, kernels.values(), 1, 3, bias.values(), 1);
    REQUIRE(out.values().size() == expect.size());
    for (size_t i = 0; i < expect.size(); ++i) CHECK(out.values()[i] == doctest::Approx(expect[i]).epsilon(1e-12));
  }

  // A wider case with strides and multiple channels.
  Rng rng(99);
  Tensor input = rand_tensor(rng, {3, 20});
  Tensor kernels = rand_tensor(rng, {4, 3, 5});
  Tensor bias = rand_tensor(rng, {4});
  Tape tape;
  Tensor out = tape.conv1d(input, kernels, bias, 2);
  const auto expect = naive_conv1d(input.values(), 3, 20, kernels.values(), 4, 5, bias.values(), 2);
  for (size_t i = 0; i < expect.size(); ++i) CHECK(out.values()[i] == doctest::Approx(expect[i]).epsilon(1e-12));
}

TEST_CASE("conv1d rejects bad shapes with the offending dimension named") {
  Tape tape;
  Tensor input = Tensor::zeros({2, 10});
  Tensor kernels = Tensor::zeros({1, 3, 4});  // expects C_in=3
  Tensor bias = Tensor::zeros({1});
  CHECK_THROWS_WITH_AS(tape.conv1d(input, kernels, bias, 1), doctest::Contains("C_in"), std::invalid_argument);

  Tensor short_input = Tensor::zeros({1, 3});
  Tensor k2 = Tensor::zeros({1, 1, 5});
  CHECK_THROWS_WITH_AS(tape.conv1d(short_input, k2, bias, 1), doctest::Contains("input shorter than filter"),
                       std::invalid_argument);
}

TEST_CASE("lrelu values, degenerate relu, and kink gradients") {
  Tape tape;
  Tensor x = Tensor::from({2}, {2.0, -2.0}, true);
  Tensor y = tape.lrelu(x, 0.1);
  CHECK(y.values()[0] == doctest::Approx(2.0));
  CHECK(y.values()[1] == doctest::Approx(-0.2));

  Tensor z = tape.lrelu(x, 0.0);  // plain relu
  CHECK(z.values()[0] == doctest::Approx(2.0));
  CHECK(z.values()[1] == doctest::Approx(0.0));

  // Gradient of sum(lrelu(x)) at [3, -5] is [1, 0.1]; finite differences
  // agree to 1e-6 away from the kink.
  Tensor x2 = Tensor::from({2}, {3.0, -5.0}, true);
  Tape tape2;
  Tensor loss = tape2.sum_all(tape2.lrelu(x2, 0.1));
  tape2.backward(loss);
  CHECK(x2.grad()[0] == doctest::Approx(1.0));
  CHECK(x2.grad()[1] == doctest::Approx(0.1));
  auto forward = [&]() {
    Tape t(false);
    Tensor o = t.lrelu(x2, 0.1);
    return o.values()[0] + o.values()[1];
  };
  for (int64_t i = 0; i < 2; ++i) {
    const double saved = x2.values()[i];
    x2.values()[i] = saved + 1e-5;
    const double fp = forward();
    x2.values()[i] = saved - 1e-5;
    const double fm = forward();
    x2.values()[i] = saved;
    CHECK(std::fabs((fp - fm) / 2e-5 - x2.grad()[i]) < 1e-6);
  }

  // Subgradient exactly at zero is the leakiness.
  Tensor x0 = Tensor::from({1}, {0.0}, true);
  Tape tape3;
  tape3.backward(tape3.sum_all(tape3.lrelu(x0, 0.1)));
  CHECK(x0.grad()[0] == doctest::Approx(0.1));

  CHECK_THROWS_AS(tape.lrelu(x, 1.0), std::invalid_argument);
}

TEST_CASE("softmax symmetry, stability, and direct-formula agreement") {
  Tape tape;
  Tensor flat = tape.softmax(Tensor::from({3}, {0.0, 0.0, 0.0}));
  for (double v : flat.values()) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  Tensor hot = tape.softmax(Tensor::from({2}, {1000.0, 0.0}));
  CHECK(hot.values()[0] == doctest::Approx(1.0));
  CHECK(hot.values()[1] == doctest::Approx(0.0));

  for (uint64_t seed = 0; seed < 12; ++seed) {
    Rng rng(seed);
    Tensor x = rand_tensor(rng, {5}, false, -3.0, 3.0);
    Tensor y = tape.softmax(x);
    const auto expect = direct_softmax(x.values());
    for (size_t i = 0; i < expect.size(); ++i) CHECK(std::fabs(y.values()[i] - expect[i]) < 1e-12);
  }

  // Sum-to-one within 1e-9 including large-magnitude inputs.
  for (uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed + 100);
    Tensor x = rand_tensor(rng, {7}, false, -1e3, 1e3);
    Tensor y = tape.softmax(x);
    double sum = 0.0;
    for (double v : y.values()) {
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(std::fabs(sum - 1.0) < 1e-9);
  }
}

TEST_CASE("matmul dispatches and identity") {
  Rng rng(7);
  Tape tape;

  // Identity leaves the operand unchanged.
  Tensor eye = Tensor::zeros({4, 4});
  for (int64_t i = 0; i < 4; ++i) eye.values()[i * 4 + i] = 1.0;
  Tensor v = rand_tensor(rng, {4});
  Tensor mv = tape.matmul(eye, v);
  for (int64_t i = 0; i < 4; ++i) CHECK(mv.values()[i] == doctest::Approx(v.values()[i]));

  // [m,k]x[k,n]
  Tensor a = rand_tensor(rng, {2, 3});
  Tensor b = rand_tensor(rng, {3, 4});
  Tensor ab = tape.matmul(a, b);
  REQUIRE(ab.shape() == Shape{2, 4});
  for (int64_t i = 0; i < 2; ++i) {
    for (int64_t j = 0; j < 4; ++j) {
      double acc = 0.0;
      for (int64_t k = 0; k < 3; ++k) acc += a.values()[i * 3 + k] * b.values()[k * 4 + j];
      CHECK(ab.values()[i * 4 + j] == doctest::Approx(acc).epsilon(1e-12));
    }
  }

  // [k]x[k,n] and [k]x[k]
  Tensor row = rand_tensor(rng, {3});
  Tensor vb = tape.matmul(row, b);
  REQUIRE(vb.shape() == Shape{4});
  Tensor u = rand_tensor(rng, {3});
  Tensor dot = tape.matmul(row, u);
  REQUIRE(dot.shape() == Shape{1});
  double acc = 0.0;
  for (int64_t k = 0; k < 3; ++k) acc += row.values()[k] * u.values()[k];
  CHECK(dot.item() == doctest::Approx(acc).epsilon(1e-12));

  CHECK_THROWS_AS(tape.matmul(a, u), std::invalid_argument);  // inner mismatch: 3 vs ... a is 2x3, u len 3 OK; use bad one
  Tensor bad = rand_tensor(rng, {5});
  CHECK_THROWS_AS(tape.matmul(a, bad), std::invalid_argument);
}

TEST_CASE("concat joins the last axis and splits gradients back") {
  Tape tape;
  Tensor a = Tensor::from({3}, {1.0, 2.0, 3.0}, true);
  Tensor b = Tensor::from({2}, {4.0, 5.0}, true);
  Tensor joined = tape.concat(a, b);
  REQUIRE(joined.shape() == Shape{5});
  CHECK(joined.values() == std::vector<double>{1, 2, 3, 4, 5});

  Rng rng(3);
  const double err = check_op_gradients(
      [](Tape& t, const std::vector<Tensor>& in) { return t.concat(in); },
      {Tensor::from({3}, {1.0, 2.0, 3.0}, true), Tensor::from({2}, {4.0, 5.0}, true)}, rng);
  CHECK(err < 1e-4);

  // 2-D concat along last axis (used to build matrices from columns).
  Tensor m1 = Tensor::from({2, 2}, {1, 2, 3, 4});
  Tensor m2 = Tensor::from({2, 1}, {9, 9});
  Tensor m = tape.concat(m1, m2);
  REQUIRE(m.shape() == Shape{2, 3});
  CHECK(m.values() == std::vector<double>{1, 2, 9, 3, 4, 9});

  CHECK_THROWS_AS(tape.concat(m1, Tensor::from({3, 1}, {1, 2, 3})), std::invalid_argument);
}

TEST_CASE("mean_pool_time of a constant is the constant") {
  Tape tape;
  Tensor x = Tensor::full({3, 7}, 2.5);
  Tensor pooled = tape.mean_pool_time(x);
  REQUIRE(pooled.shape() == Shape{3});
  for (double v : pooled.values()) CHECK(v == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("embedding looks up a row and scatters its gradient") {
  Tape tape;
  Rng rng(5);
  Tensor table = rand_tensor(rng, {6, 4}, true);
  Tensor row = tape.embedding(table, 3);
  for (int64_t j = 0; j < 4; ++j) CHECK(row.values()[j] == table.values()[3 * 4 + j]);

  Tensor loss = tape.sum_all(row);
  tape.backward(loss);
  for (int64_t i = 0; i < 6; ++i) {
    for (int64_t j = 0; j < 4; ++j) {
      CHECK(table.grad()[i * 4 + j] == doctest::Approx(i == 3 ? 1.0 : 0.0));
    }
  }
  CHECK_THROWS_AS(tape.embedding(table, 6), std::invalid_argument);
  CHECK_THROWS_AS(tape.embedding(table, -1), std::invalid_argument);
}

TEST_CASE("mse_loss hand values and naive-loop agreement") {
  Tape tape;
  Tensor p = Tensor::from({1, 2}, {1.0, 2.0});
  Tensor t0 = Tensor::from({1, 2}, {0.0, 0.0});
  CHECK(tape.mse_loss(p, p).item() == doctest::Approx(0.0));
  CHECK(tape.mse_loss(p, t0).item() == doctest::Approx(5.0).epsilon(1e-12));

  for (uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    Tensor pred = rand_tensor(rng, {3, 4});
    Tensor target = rand_tensor(rng, {3, 4});
    const double expect = naive_mse(pred.values(), target.values(), 3, 4);
    CHECK(std::fabs(tape.mse_loss(pred, target).item() - expect) < 1e-12);
  }

  CHECK_THROWS_AS(tape.mse_loss(p, Tensor::zeros({2, 2})), std::invalid_argument);
}

TEST_CASE("cross_entropy hand values and naive agreement") {
  Tape tape;
  // Logits that force p(target) ~ 1.
  Tensor sure = Tensor::from({1, 3}, {100.0, 0.0, 0.0});
  CHECK(tape.cross_entropy(sure, {0}).item() == doctest::Approx(0.0).epsilon(1e-12));

  // Uniform logits over 32 symbols: loss is ln 32 per step.
  Tensor uniform = Tensor::zeros({4, 32});
  CHECK(tape.cross_entropy(uniform, {0, 5, 31, 7}).item() == doctest::Approx(std::log(32.0)).epsilon(1e-12));

  for (uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    Tensor logits = rand_tensor(rng, {3, 5}, false, -2.0, 2.0);
    std::vector<int64_t> targets = {static_cast<int64_t>(seed % 5), 0, 4};
    const double expect = naive_cross_entropy(logits.values(), 3, 5, targets);
    CHECK(std::fabs(tape.cross_entropy(logits, targets).item() - expect) < 1e-12);
  }

  CHECK_THROWS_AS(tape.cross_entropy(uniform, {0, 1, 2, 32}), std::invalid_argument);
  CHECK_THROWS_AS(tape.cross_entropy(uniform, {0}), std::invalid_argument);
}

TEST_CASE("backward on sum gives ones; errors on misuse") {
  Tape tape;
  Tensor x = Tensor::from({4}, {1.0, -2.0, 3.0, 0.5}, true);
  Tensor loss = tape.sum_all(x);
  tape.backward(loss);
  for (double g : x.grad()) CHECK(g == doctest::Approx(1.0));

  CHECK_THROWS_AS(tape.backward(x), std::invalid_argument);  // non-scalar
  Tape other;
  Tensor detached = Tensor::scalar(1.0, true);
  CHECK_THROWS_AS(other.backward(detached), std::invalid_argument);  // not recorded
}

TEST_CASE("backward accumulates without reset and repeats identically with reset") {
  Rng rng(11);
  Tensor x = rand_tensor(rng, {1, 8}, true);
  Tensor k = rand_tensor(rng, {1, 1, 3}, true);
  Tensor b = rand_tensor(rng, {1}, true);
  Tensor target = rand_tensor(rng, {1, 6});

  Tape tape;
  Tensor loss = tape.mse_loss(tape.conv1d(x, k, b, 1), target);
  tape.backward(loss);
  const std::vector<double> gx = x.grad();
  const std::vector<double> gk = k.grad();

  // Second call without reset doubles leaf gradients.
  tape.backward(loss);
  for (size_t i = 0; i < gx.size(); ++i) CHECK(x.grad()[i] == doctest::Approx(2.0 * gx[i]).epsilon(1e-12));
  for (size_t i = 0; i < gk.size(); ++i) CHECK(k.grad()[i] == doctest::Approx(2.0 * gk[i]).epsilon(1e-12));

  // Reset and rerun: bitwise identical to the first run.
  x.zero_grad();
  k.zero_grad();
  b.zero_grad();
  tape.backward(loss);
  for (size_t i = 0; i < gx.size(); ++i) CHECK(x.grad()[i] == gx[i]);
  for (size_t i = 0; i < gk.size(); ++i) CHECK(k.grad()[i] == gk[i]);
}

TEST_CASE("conv1d + mse gradients match finite differences") {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    Tensor x = rand_tensor(rng, {2, 12}, true);
    Tensor k = rand_tensor(rng, {3, 2, 4}, true);
    Tensor b = rand_tensor(rng, {3}, true);
    Tensor target = rand_tensor(rng, {3, 5});

    Tape tape;
    Tensor loss = tape.mse_loss(tape.conv1d(x, k, b, 2), target);
    tape.backward(loss);

    auto forward = [&]() {
      Tape t(false);
      return t.mse_loss(t.conv1d(x, k, b, 2), target).item();
    };
    CHECK(fd_check_all(forward, x, x.grad()) < 1e-4);
    CHECK(fd_check_all(forward, k, k.grad()) < 1e-4);
    CHECK(fd_check_all(forward, b, b.grad()) < 1e-4);
  }
}

TEST_CASE("every differentiable op passes finite-difference checks over 10+ seeds") {
  for (uint64_t seed = 0; seed < 12; ++seed) {
    Rng rng(seed * 7919 + 1);

    auto unary = [&](const char* name, const std::function<Tensor(Tape&, const Tensor&)>& op) {
      Rng local(rng.next_u64());
      const double err = check_op_gradients(
          [&op](Tape& t, const std::vector<Tensor>& in) { return op(t, in[0]); },
          {rand_tensor(local, {3, 4}, true, -2.0, 2.0)}, local);
      INFO(name);
      CHECK(err < 1e-4);
    };
    unary("tanh", [](Tape& t, const Tensor& x) { return t.tanh(x); });
    unary("sigmoid", [](Tape& t, const Tensor& x) { return t.sigmoid(x); });
    unary("lrelu", [](Tape& t, const Tensor& x) { return t.lrelu(x, 0.1); });
    unary("mean_pool_time", [](Tape& t, const Tensor& x) { return t.mean_pool_time(x); });

    {
      Rng local(rng.next_u64());
      const double err = check_op_gradients(
          [](Tape& t, const std::vector<Tensor>& in) { return t.softmax(in[0]); },
          {rand_tensor(local, {6}, true, -2.0, 2.0)}, local);
      CHECK(err < 1e-4);
    }
    {
      Rng local(rng.next_u64());
      const double err = check_op_gradients(
          [](Tape& t, const std::vector<Tensor>& in) { return t.add(in[0], in[1]); },
          {rand_tensor(local, {3, 3}, true), rand_tensor(local, {3, 3}, true)}, local);
      CHECK(err < 1e-4);
    }
    {
      Rng local(rng.next_u64());
      const double err = check_op_gradients(
          [](Tape& t, const std::vector<Tensor>& in) { return t.mul(in[0], in[1]); },
          {rand_tensor(local, {3, 3}, true), rand_tensor(local, {3, 3}, true)}, local);
      CHECK(err < 1e-4);
    }
    {
      Rng local(rng.next_u64());
      const double err = check_op_gradients(
          [](Tape& t, const std::vector<Tensor>& in) { return t.matmul(in[0], in[1]); },
          {rand_tensor(local, {3, 4}, true), rand_tensor(local, {4, 2}, true)}, local);
      CHECK(err < 1e-4);
    }
    {
      Rng local(rng.next_u64());
      const double err = check_op_gradients(
          [](Tape& t, const std::vector<Tensor>& in) { return t.matmul(in[0], in[1]); },
          {rand_tensor(local, {4}, true), rand_tensor(local, {4, 3}, true)}, local);
      CHECK(err < 1e-4);
    }
    {
      Rng local(rng.next_u64());
      const double err = check_op_gradients(
          [](Tape& t, const std::vector<Tensor>& in) { return t.stack_rows({in[0], in[1], in[2]}); },
          {rand_tensor(local, {5}, true), rand_tensor(local, {5}, true), rand_tensor(local, {5}, true)}, local);
      CHECK(err < 1e-4);
    }
    {
      Rng local(rng.next_u64());
      const double err = check_op_gradients(
          [](Tape& t, const std::vector<Tensor>& in) { return t.conv1d(in[0], in[1], in[2], 1); },
          {rand_tensor(local, {2, 9}, true), rand_tensor(local, {2, 2, 3}, true), rand_tensor(local, {2}, true)}, local);
      CHECK(err < 1e-4);
    }
    {
      // Loss ops probed directly (already scalar).
      Rng local(rng.next_u64());
      Tensor pred = rand_tensor(local, {3, 4}, true);
      Tensor target = rand_tensor(local, {3, 4});
      Tape tape;
      Tensor loss = tape.mse_loss(pred, target);
      tape.backward(loss);
      auto forward = [&]() {
        Tape t(false);
        return t.mse_loss(pred, target).item();
      };
      CHECK(fd_check_all(forward, pred, pred.grad()) < 1e-4);
    }
    {
      Rng local(rng.next_u64());
      Tensor logits = rand_tensor(local, {4, 6}, true, -2.0, 2.0);
      const std::vector<int64_t> targets = {1, 0, 5, 3};
      Tape tape;
      Tensor loss = tape.cross_entropy(logits, targets);
      tape.backward(loss);
      auto forward = [&]() {
        Tape t(false);
        return t.cross_entropy(logits, targets).item();
      };
      CHECK(fd_check_all(forward, logits, logits.grad()) < 1e-4);
    }
  }
}

TEST_CASE("non-finite results are rejected") {
  Tape tape;
  Tensor big = Tensor::full({2}, 1e308);
  CHECK_THROWS_AS(tape.add(big, big), std::runtime_error);
  CHECK_THROWS_AS(tape.mul(big, big), std::runtime_error);
}
