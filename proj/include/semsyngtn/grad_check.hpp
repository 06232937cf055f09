#ifndef SEMSYNGTN_GRAD_CHECK_HPP_
#define SEMSYNGTN_GRAD_CHECK_HPP_

#include <functional>
#include <string>

#include "semsyngtn/params.hpp"
#include "semsyngtn/tape.hpp"

namespace semsyngtn {

// Builds the scalar loss for the current parameter values. Called once for
// the analytic pass and twice per parameter entry for central differences.
using LossBuilder = std::function<Var(Tape&, const ParameterStore&)>;

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_param;
  int worst_index = -1;
};

// Max over trainable parameter entries of
//   |analytic - central_difference| / max(1, |central_difference|).
GradCheckResult grad_check(const LossBuilder& f, ParameterStore& store, double eps = 1e-4);

}  // namespace semsyngtn

#endif  // SEMSYNGTN_GRAD_CHECK_HPP_
