#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "w2t/optim.hpp"
#include "w2t/tape.hpp"

using namespace w2t;
using namespace w2t::testing;

TEST_CASE("zero gradient with zero momentum buffers leaves parameters unchanged") {
  ParameterSet params;
  params.add("p", Tensor::from({3}, {1.0, 2.0, 3.0}));
  params.get("p").grad();  // zero-filled

  Optimizer opt(OptimizerConfig::momentum_sgd(0.1, 0.9));
  opt.step(params);
  CHECK(params.get("p").values() == std::vector<double>{1.0, 2.0, 3.0});
}

TEST_CASE("single momentum step without momentum moves by -lr*g") {
  ParameterSet params;
  params.add("p", Tensor::scalar(1.0));
  params.get("p").grad()[0] = 1.0;

  Optimizer opt(OptimizerConfig::momentum_sgd(0.1, 0.0));
  opt.step(params);
  CHECK(params.get("p").item() == doctest::Approx(0.9).epsilon(1e-15));
  // Gradients are cleared afterward.
  CHECK(params.get("p").grad()[0] == 0.0);
}

TEST_CASE("momentum trajectory matches the scalar recurrence") {
  ParameterSet params;
  params.add("p", Tensor::scalar(1.0));
  Optimizer opt(OptimizerConfig::momentum_sgd(0.05, 0.9));

  auto grad_of = [](double p) { return 2.0 * p; };  // d/dp of p^2
  const ScalarTrace expect = momentum_scalar_recurrence(1.0, grad_of, 50, 0.05, 0.9);

  for (int64_t t = 0; t < 50; ++t) {
    Tensor p = params.get("p");
    p.grad()[0] = grad_of(p.item());
    opt.step(params);
    CHECK(params.get("p").item() == doctest::Approx(expect.values[static_cast<size_t>(t)]).epsilon(1e-12));
  }
}

TEST_CASE("100 adam steps on p^2 shrink the parameter and the loss") {
  ParameterSet params;
  params.add("p", Tensor::scalar(1.0));
  Optimizer opt(OptimizerConfig::adam(0.05));

  auto grad_of = [](double p) { return 2.0 * p; };
  const ScalarTrace expect = adam_scalar_recurrence(1.0, grad_of, 100, 0.05, 0.9, 0.999, 1e-8);

  for (int64_t t = 0; t < 100; ++t) {
    Tensor p = params.get("p");
    p.grad()[0] = grad_of(p.item());
    opt.step(params);
    CHECK(params.get("p").item() == doctest::Approx(expect.values[static_cast<size_t>(t)]).epsilon(1e-12));
  }

  const double p_final = params.get("p").item();
  CHECK(std::fabs(p_final) < 1.0);
  CHECK(p_final * p_final < 1e-2);
}

TEST_CASE("frozen parameters stay bit-identical and keep no buffers") {
  ParameterSet params;
  params.add("trunk.w", Tensor::from({2}, {0.5, -0.25}));
  params.add("head.w", Tensor::from({2}, {1.0, 1.0}));
  params.freeze("trunk.w");

  const std::vector<double> frozen_before = params.get("trunk.w").values();

  Optimizer opt(OptimizerConfig::adam(0.01));
  for (int step = 0; step < 5; ++step) {
    // Gradients land on both tensors; the optimizer must ignore the frozen one.
    for (auto& [path, t] : params.all()) {
      Tensor h = t;
      h.grad()[0] = 0.3;
      h.grad()[1] = -0.7;
    }
    opt.step(params);
  }

  const std::vector<double>& frozen_after = params.get("trunk.w").values();
  for (size_t i = 0; i < frozen_before.size(); ++i) {
    // Bitwise comparison.
    CHECK(std::memcmp(&frozen_before[i], &frozen_after[i], sizeof(double)) == 0);
  }
  CHECK(params.get("head.w").values()[0] != 1.0);

  const OptimizerSnapshot snap = opt.snapshot();
  CHECK(snap.buffers.count("trunk.w") == 0);
  CHECK(snap.buffers.count("head.w") == 1);
}

TEST_CASE("missing gradient on a non-frozen parameter is an error") {
  ParameterSet params;
  params.add("p", Tensor::scalar(1.0));
  Optimizer opt(OptimizerConfig::momentum_sgd(0.1, 0.9));
  CHECK_THROWS_WITH_AS(opt.step(params), doctest::Contains("missing gradient"), std::runtime_error);
}

TEST_CASE("optimizer snapshot restores the exact state") {
  ParameterSet params;
  params.add("p", Tensor::from({2}, {1.0, -1.0}));
  Optimizer opt(OptimizerConfig::adam(0.01));
  for (int step = 0; step < 3; ++step) {
    Tensor p = params.get("p");
    p.grad()[0] = 0.5;
    p.grad()[1] = -0.5;
    opt.step(params);
  }
  const OptimizerSnapshot snap = opt.snapshot();

  Optimizer restored(OptimizerConfig::adam(0.01));
  restored.restore(snap);
  CHECK(restored.step_count() == opt.step_count());

  // Both continue identically.
  ParameterSet params2;
  params2.add("p", params.get("p").clone());
  for (int step = 0; step < 3; ++step) {
    Tensor a = params.get("p");
    a.grad()[0] = 0.1;
    a.grad()[1] = 0.2;
    opt.step(params);
    Tensor b = params2.get("p");
    b.grad()[0] = 0.1;
    b.grad()[1] = 0.2;
    restored.step(params2);
  }
  CHECK(params.get("p").values() == params2.get("p").values());
}

TEST_CASE("parameter set enforces unique paths and known freezes") {
  ParameterSet params;
  params.add("a.w", Tensor::scalar(1.0));
  CHECK_THROWS_AS(params.add("a.w", Tensor::scalar(2.0)), std::invalid_argument);
  CHECK_THROWS_AS(params.freeze("missing"), std::invalid_argument);
  CHECK_THROWS_AS(params.freeze_prefix("nope."), std::invalid_argument);
  params.freeze_prefix("a.");
  CHECK(params.is_frozen("a.w"));
  CHECK(params.frozen_parameter_count() == 1);
  params.unfreeze_all();
  CHECK_FALSE(params.is_frozen("a.w"));
}
