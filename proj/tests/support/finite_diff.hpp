#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "w2t/tensor.hpp"

namespace w2t::testing {

// Relative error with a small-magnitude floor, so near-zero gradients are
// compared on an absolute scale.
inline double rel_error(double a, double b) {
  return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-3});
}

// Central finite differences against already-computed analytic gradients.
// `forward` must re-evaluate the scalar loss from current tensor values.
// Returns the max relative error over the checked indices.
inline double fd_check(const std::function<double()>& forward, Tensor param, const std::vector<double>& analytic,
                       const std::vector<int64_t>& indices, double h = 1e-5) {
  double worst = 0.0;
  auto& v = param.values();
  for (int64_t idx : indices) {
    const double saved = v[static_cast<size_t>(idx)];
    v[static_cast<size_t>(idx)] = saved + h;
    const double f_plus = forward();
    v[static_cast<size_t>(idx)] = saved - h;
    const double f_minus = forward();
    v[static_cast<size_t>(idx)] = saved;
    const double numeric = (f_plus - f_minus) / (2.0 * h);
    worst = std::max(worst, rel_error(analytic[static_cast<size_t>(idx)], numeric));
  }
  return worst;
}

// Checks every index of a tensor.
inline double fd_check_all(const std::function<double()>& forward, Tensor param, const std::vector<double>& analytic,
                           double h = 1e-5) {
  std::vector<int64_t> idxs(static_cast<size_t>(param.numel()));
  for (size_t i = 0; i < idxs.size(); ++i) idxs[i] = static_cast<int64_t>(i);
  return fd_check(forward, param, analytic, idxs, h);
}

}  // namespace w2t::testing
