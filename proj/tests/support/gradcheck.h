#pragma once

#include <functional>
#include <string>
#include <vector>

#include "claimforge/policy/params.h"

namespace claimforge::testing {

struct GradMismatch {
  std::string param;
  long index;
  double analytic;
  double numeric;
};

struct GradCheckResult {
  std::size_t checked = 0;
  double max_rel_error = 0.0;
  std::vector<GradMismatch> failures;
};

// Central finite differences against the gradients already stored in
// `params`. Relative error is |a - n| / max(|a|, |n|, floor); the default
// floor is above the ~1e-10 rounding noise of the difference quotient.
GradCheckResult check_gradients(policy::ParamSet& params, const std::function<double()>& loss,
                                double tolerance, double step = 1e-5, double floor = 1e-6);

}  // namespace claimforge::testing
