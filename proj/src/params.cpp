#include "semsyngtn/params.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace semsyngtn {

void ParameterStore::add(const std::string& name, Tensor value, bool trainable) {
  if (entries_.count(name)) throw std::invalid_argument("parameter store: duplicate name " + name);
  Entry e;
  e.adam_m = Tensor::zeros(value.shape());
  e.adam_v = Tensor::zeros(value.shape());
  e.value = std::move(value);
  e.trainable = trainable;
  entries_.emplace(name, std::move(e));
}

Tensor& ParameterStore::value(const std::string& name) { return entry(name).value; }

const Tensor& ParameterStore::value(const std::string& name) const { return entry(name).value; }

ParameterStore::Entry& ParameterStore::entry(const std::string& name) {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw std::invalid_argument("parameter store: unknown name " + name);
  return it->second;
}

const ParameterStore::Entry& ParameterStore::entry(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw std::invalid_argument("parameter store: unknown name " + name);
  return it->second;
}

std::vector<std::string> ParameterStore::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [name, _] : entries_) out.push_back(name);
  return out;
}

Var ParameterStore::on(Tape& tape, const std::string& name) const {
  const Entry& e = entry(name);
  return e.trainable ? tape.parameter(name, e.value) : tape.constant(e.value);
}

bool ParameterStore::operator==(const ParameterStore& o) const {
  if (entries_.size() != o.entries_.size()) return false;
  for (const auto& [name, e] : entries_) {
    auto it = o.entries_.find(name);
    if (it == o.entries_.end()) return false;
    if (!(e.value == it->second.value) || e.trainable != it->second.trainable) return false;
  }
  return true;
}

void adam_step(ParameterStore& store, const GradMap& grads, const AdamConfig& cfg) {
  store.step_count_ += 1;
  double t = static_cast<double>(store.step_count_);
  double bc1 = 1.0 - std::pow(cfg.beta1, t);
  double bc2 = 1.0 - std::pow(cfg.beta2, t);
  for (const auto& [name, g] : grads) {
    ParameterStore::Entry& e = store.entry(name);
    if (!e.trainable) continue;
    if (!g.same_shape(e.value)) {
      throw std::invalid_argument("adam_step: gradient shape " + g.shape_str() +
                                  " does not match parameter " + name + " " + e.value.shape_str());
    }
    for (int i = 0; i < g.numel(); ++i) {
      e.adam_m[i] = cfg.beta1 * e.adam_m[i] + (1.0 - cfg.beta1) * g[i];
      e.adam_v[i] = cfg.beta2 * e.adam_v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      double mhat = e.adam_m[i] / bc1;
      double vhat = e.adam_v[i] / bc2;
      e.value[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
  }
}

Tensor xavier_uniform(int rows, int cols, std::mt19937_64& rng) {
  double r = std::sqrt(6.0 / (rows + cols));
  std::uniform_real_distribution<double> dist(-r, r);
  Tensor t({rows, cols});
  for (int i = 0; i < t.numel(); ++i) t[i] = dist(rng);
  return t;
}

Tensor gaussian_tensor(std::vector<int> shape, double stddev, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  Tensor t(std::move(shape));
  for (int i = 0; i < t.numel(); ++i) t[i] = dist(rng);
  return t;
}

void save_checkpoint(const std::string& path, const ParameterStore& store,
                     const std::string& config_json) {
  if (config_json.find('\n') != std::string::npos) {
    throw std::invalid_argument("checkpoint: embedded config JSON must be a single line");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("checkpoint: cannot write " + path);
  out << "semsyngtn-ckpt v1\n";
  out << config_json << "\n";
  for (const std::string& name : store.names()) {
    const auto& e = store.entry(name);
    out << name << ' ' << (e.trainable ? 'T' : 'F') << ' ' << e.value.rank();
    for (int d : e.value.shape()) out << ' ' << d;
    out << '\n';
    out.write(reinterpret_cast<const char*>(e.value.data().data()),
              static_cast<std::streamsize>(e.value.numel()) * 8);
  }
  if (!out) throw std::runtime_error("checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot read " + path);
  std::string line;
  if (!std::getline(in, line) || line != "semsyngtn-ckpt v1") {
    throw std::runtime_error("checkpoint: bad header in " + path);
  }
  Checkpoint ckpt;
  if (!std::getline(in, ckpt.config_json)) {
    throw std::runtime_error("checkpoint: missing config line in " + path);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream hdr(line);
    std::string name;
    char flag = 0;
    int rank = -1;
    hdr >> name >> flag >> rank;
    if (!hdr || (flag != 'T' && flag != 'F') || rank < 0) {
      throw std::runtime_error("checkpoint: malformed parameter header: " + line);
    }
    std::vector<int> shape(rank);
    for (int& d : shape) {
      hdr >> d;
      if (!hdr || d < 0) throw std::runtime_error("checkpoint: malformed shape in: " + line);
    }
    Tensor t(shape);
    in.read(reinterpret_cast<char*>(t.data().data()),
            static_cast<std::streamsize>(t.numel()) * 8);
    if (!in) throw std::runtime_error("checkpoint: truncated data for parameter " + name);
    ckpt.store.add(name, std::move(t), flag == 'T');
  }
  return ckpt;
}

}  // namespace semsyngtn
