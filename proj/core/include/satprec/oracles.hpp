#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "satprec/nn.hpp"

namespace satprec::oracles {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct GradientCheck {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  std::size_t skipped = 0;  // near a ReLU kink
};

/// Central differences of `objective` against `analytic` (flattened in the
/// network's parameter order). Parameters whose perturbation flips any ReLU
/// unit are skipped. Relative errors use max(|fd|, |analytic|, 1e-3 · max|analytic|)
/// as the denominator.
GradientCheck finite_difference_check(nn::Mlp& net, const std::vector<double>& analytic,
                                       const std::function<double(const nn::Mlp&)>& objective,
                                       const std::function<bool(const nn::Mlp&, const nn::Mlp&)>& same_pattern,
                                       double step = 1e-5);

/// Runs every runtime self-check and prints one line per check.
std::vector<CheckResult> run_all(std::uint64_t seed);
bool report(const std::vector<CheckResult>& results, std::ostream& os);

}  // namespace satprec::oracles
