// SPDX-FileCopyrightText: © 2026 igcl contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "igcl/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace igcl {

GradCheckResult grad_check_detailed(const ScalarFn& f, Tensor x, double eps, std::span<const std::size_t> coords) {
  if (eps < 1e-7 || eps > 1e-3) throw DomainError("grad_check eps must lie in [1e-7, 1e-3]");
  const bool had_flag = x.requires_grad();
  x.set_requires_grad(true);
  x.zero_grad();

  GradCheckResult result;
  {
    Tape tape;
    Tensor y = f(tape, x);
    tape.backward(y);
  }
  result.analytic.assign(x.grad_buffer().begin(), x.grad_buffer().end());
  x.zero_grad();
  x.set_requires_grad(had_flag);

  auto eval = [&]() {
    Tape frozen(false);
    return f(frozen, x).item();
  };

  std::vector<std::size_t> all;
  if (coords.empty()) {
    all.resize(x.numel());
    std::iota(all.begin(), all.end(), std::size_t{0});
    coords = all;
  }
  auto xd = x.mutable_data();
  for (std::size_t i : coords) {
    const double saved = xd[i];
    xd[i] = saved + eps;
    const double up = eval();
    xd[i] = saved - eps;
    const double down = eval();
    xd[i] = saved;
    const double numeric = (up - down) / (2.0 * eps);
    const double a = result.analytic[i];
    const double err = std::abs(a - numeric) / std::max(1.0, std::abs(a));
    if (err > result.max_rel_error || result.checked == 0) {
      result.max_rel_error = std::max(result.max_rel_error, err);
      if (err >= result.max_rel_error) result.worst_index = i;
    }
    ++result.checked;
  }
  return result;
}

}  // namespace igcl
