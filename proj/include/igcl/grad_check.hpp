// SPDX-FileCopyrightText: © 2026 igcl contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "igcl/tensor.hpp"

namespace igcl {

/// Scalar-valued function of the tensor under test. It must build its graph
/// on the tape it receives.
using ScalarFn = std::function<Tensor(Tape&, const Tensor&)>;

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  std::size_t checked = 0;
  std::vector<double> analytic;  // full analytic gradient of x
};

/// Compares reverse-mode gradients with central differences. Error per
/// coordinate is |analytic - numeric| / max(1, |analytic|). When `coords` is
/// empty every coordinate is checked. `x` is perturbed in place and restored.
GradCheckResult grad_check_detailed(const ScalarFn& f, Tensor x, double eps,
                                    std::span<const std::size_t> coords = {});

inline double grad_check(const ScalarFn& f, Tensor x, double eps = 1e-6) {
  return grad_check_detailed(f, std::move(x), eps).max_rel_error;
}

}  // namespace igcl
