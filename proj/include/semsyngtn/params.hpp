#ifndef SEMSYNGTN_PARAMS_HPP_
#define SEMSYNGTN_PARAMS_HPP_

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "semsyngtn/tape.hpp"
#include "semsyngtn/tensor.hpp"

namespace semsyngtn {

// All trainable arrays plus per-parameter Adam state, addressable by name.
// Shapes are fixed once added. Frozen entries (pretrained tables) are carried
// in checkpoints but never updated and never finite-difference-checked.
class ParameterStore {
 public:
  struct Entry {
    Tensor value;
    Tensor adam_m;
    Tensor adam_v;
    bool trainable = true;
  };

  void add(const std::string& name, Tensor value, bool trainable = true);
  bool contains(const std::string& name) const { return entries_.count(name) > 0; }
  Tensor& value(const std::string& name);
  const Tensor& value(const std::string& name) const;
  Entry& entry(const std::string& name);
  const Entry& entry(const std::string& name) const;
  std::vector<std::string> names() const;  // sorted
  size_t size() const { return entries_.size(); }

  // Bind a parameter onto a tape: frozen entries enter as constants so no
  // gradient ever flows to them.
  Var on(Tape& tape, const std::string& name) const;

  std::int64_t step_count() const { return step_count_; }
  void set_step_count(std::int64_t t) { step_count_ = t; }

  bool operator==(const ParameterStore& o) const;

 private:
  friend void adam_step(ParameterStore&, const GradMap&, const struct AdamConfig&);
  std::map<std::string, Entry> entries_;
  std::int64_t step_count_ = 0;
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// One Adam update with bias correction over the gradients present in `grads`.
// Frozen parameters are skipped; unknown names and shape mismatches throw.
void adam_step(ParameterStore& store, const GradMap& grads, const AdamConfig& cfg);

// Xavier-uniform for weight matrices: r = sqrt(6 / (fan_in + fan_out)) with
// fan_out = rows, fan_in = cols.
Tensor xavier_uniform(int rows, int cols, std::mt19937_64& rng);
Tensor gaussian_tensor(std::vector<int> shape, double stddev, std::mt19937_64& rng);

// ---- checkpoint file ------------------------------------------------------
// Line 1: "semsyngtn-ckpt v1"; line 2: embedded JSON string (training config
// plus vocabulary); then one block per parameter: a text line
// "<name> <T|F> <rank> <dims...>" followed by numel raw little-endian 64-bit
// floats. Round-trips bit-exactly.

void save_checkpoint(const std::string& path, const ParameterStore& store,
                     const std::string& config_json);
struct Checkpoint {
  ParameterStore store;
  std::string config_json;
};
Checkpoint load_checkpoint(const std::string& path);

}  // namespace semsyngtn

#endif  // SEMSYNGTN_PARAMS_HPP_
