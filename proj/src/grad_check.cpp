#include "semsyngtn/grad_check.hpp"

#include <cmath>
#include <stdexcept>

namespace semsyngtn {

namespace {
double eval_loss(const LossBuilder& f, const ParameterStore& store) {
  Tape tape;
  Var out = f(tape, store);
  const Tensor& v = tape.value(out);
  if (v.numel() != 1) throw std::invalid_argument("grad_check: loss must be scalar");
  return v[0];
}
}  // namespace

GradCheckResult grad_check(const LossBuilder& f, ParameterStore& store, double eps) {
  GradMap analytic;
  {
    Tape tape;
    Var out = f(tape, store);
    if (tape.value(out).numel() != 1) {
      throw std::invalid_argument("grad_check: loss must be scalar");
    }
    tape.backward(out);
    analytic = tape.parameter_grads();
  }
  GradCheckResult result;
  for (const std::string& name : store.names()) {
    ParameterStore::Entry& e = store.entry(name);
    if (!e.trainable) continue;
    const Tensor* a = nullptr;
    auto it = analytic.find(name);
    if (it != analytic.end()) a = &it->second;
    for (int i = 0; i < e.value.numel(); ++i) {
      double saved = e.value[i];
      e.value[i] = saved + eps;
      double up = eval_loss(f, store);
      e.value[i] = saved - eps;
      double down = eval_loss(f, store);
      e.value[i] = saved;
      if (!std::isfinite(up) || !std::isfinite(down)) {
        throw std::runtime_error("grad_check: non-finite loss while perturbing " + name);
      }
      double numeric = (up - down) / (2.0 * eps);
      double exact = a ? (*a)[i] : 0.0;
      double rel = std::fabs(exact - numeric) / std::max(1.0, std::fabs(numeric));
      if (rel > result.max_rel_error) {
        result.max_rel_error = rel;
        result.worst_param = name;
        result.worst_index = i;
      }
    }
  }
  return result;
}

}  // namespace semsyngtn
