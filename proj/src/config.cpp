#include "semsyngtn/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "semsyngtn/rng.hpp"

namespace semsyngtn {

using nlohmann::json;

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw std::invalid_argument("config: key " + key + " expects a boolean, got \"" + value + "\"");
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  size_t e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

struct Field {
  std::function<void(TrainConfig&, const std::string&)> set;
  std::function<std::string(const TrainConfig&)> get;
};

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = [] {
    std::map<std::string, Field> f;
    auto add_int = [&f](const std::string& key, int TrainConfig::* member) {
      f[key] = {[key, member](TrainConfig& c, const std::string& v) {
                  try {
                    c.*member = std::stoi(v);
                  } catch (...) {
                    throw std::invalid_argument("config: key " + key + " expects an integer");
                  }
                },
                [member](const TrainConfig& c) { return std::to_string(c.*member); }};
    };
    auto add_double = [&f](const std::string& key, double TrainConfig::* member) {
      f[key] = {[key, member](TrainConfig& c, const std::string& v) {
                  try {
                    c.*member = std::stod(v);
                  } catch (...) {
                    throw std::invalid_argument("config: key " + key + " expects a number");
                  }
                },
                [member](const TrainConfig& c) { return fmt_double(c.*member); }};
    };
    auto add_bool = [&f](const std::string& key, bool TrainConfig::* member) {
      f[key] = {[key, member](TrainConfig& c, const std::string& v) {
                  c.*member = parse_bool(key, v);
                },
                [member](const TrainConfig& c) { return (c.*member) ? "true" : "false"; }};
    };
    auto add_string = [&f](const std::string& key, std::string TrainConfig::* member) {
      f[key] = {[member](TrainConfig& c, const std::string& v) { c.*member = v; },
                [member](const TrainConfig& c) { return c.*member; }};
    };

    f["seed"] = {[](TrainConfig& c, const std::string& v) {
                   try {
                     c.seed = std::stoull(v);
                   } catch (...) {
                     throw std::invalid_argument("config: key seed expects an integer");
                   }
                 },
                 [](const TrainConfig& c) { return std::to_string(c.seed); }};
    add_int("epochs", &TrainConfig::epochs);
    add_int("batch_size", &TrainConfig::batch_size);
    add_double("lr", &TrainConfig::lr);
    add_double("beta1", &TrainConfig::beta1);
    add_double("beta2", &TrainConfig::beta2);
    add_double("eps_adam", &TrainConfig::eps_adam);
    add_int("d_dist", &TrainConfig::d_dist);
    add_int("clamp_radius", &TrainConfig::clamp_radius);
    add_int("d_len", &TrainConfig::d_len);
    add_int("len_max", &TrainConfig::len_max);
    add_int("d_h", &TrainConfig::d_h);
    add_int("att_dim", &TrainConfig::att_dim);
    add_int("ff_hidden", &TrainConfig::ff_hidden);
    add_int("gcn_hidden", &TrainConfig::gcn_hidden);
    add_int("gcn_layers", &TrainConfig::gcn_layers);
    add_int("channels", &TrainConfig::channels);
    add_int("intermediates", &TrainConfig::intermediates);
    add_int("head_hidden", &TrainConfig::head_hidden);
    add_int("disc_hidden", &TrainConfig::disc_hidden);
    add_bool("use_gtn", &TrainConfig::use_gtn);
    add_bool("use_multihop", &TrainConfig::use_multihop);
    add_bool("use_syn_custom", &TrainConfig::use_syn_custom);
    add_bool("use_sem_custom", &TrainConfig::use_sem_custom);
    add_bool("use_lstm_in_r", &TrainConfig::use_lstm_in_r);
    add_string("drop_structure", &TrainConfig::drop_structure);
    add_bool("ib.enabled", &TrainConfig::ib_enabled);
    f["use_ib"] = f.at("ib.enabled");  // accepted alias
    add_double("ib.alpha_disc", &TrainConfig::alpha_disc);
    add_string("ib.mi_source", &TrainConfig::mi_source);
    add_string("corpus", &TrainConfig::corpus);
    add_string("dev_corpus", &TrainConfig::dev_corpus);
    add_string("embeddings", &TrainConfig::embeddings);
    add_string("checkpoint", &TrainConfig::checkpoint);
    add_int("random_embeddings_dim", &TrainConfig::random_embeddings_dim);
    return f;
  }();
  return table;
}

}  // namespace

void TrainConfig::set(const std::string& key, const std::string& value) {
  auto it = fields().find(key);
  if (it == fields().end()) throw std::invalid_argument("config: unknown key " + key);
  it->second.set(*this, value);
}

TrainConfig TrainConfig::from_kv_text(const std::string& text) {
  TrainConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  " is not \"key = value\"");
    }
    cfg.set(trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
  }
  return cfg;
}

TrainConfig TrainConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_kv_text(buf.str());
}

void TrainConfig::validate() const {
  auto positive = [](int v, const char* name) {
    if (v <= 0) throw std::invalid_argument(std::string("config: ") + name + " must be positive");
  };
  if (epochs < 0) throw std::invalid_argument("config: epochs must be >= 0");
  positive(batch_size, "batch_size");
  if (lr <= 0) throw std::invalid_argument("config: lr must be positive");
  positive(d_dist, "d_dist");
  positive(clamp_radius, "clamp_radius");
  positive(d_len, "d_len");
  if (len_max < 1) throw std::invalid_argument("config: len_max must be >= 1");
  positive(d_h, "d_h");
  if (d_h % 2 != 0) throw std::invalid_argument("config: d_h must be even");
  positive(att_dim, "att_dim");
  positive(ff_hidden, "ff_hidden");
  positive(gcn_hidden, "gcn_hidden");
  positive(gcn_layers, "gcn_layers");
  positive(channels, "channels");
  positive(intermediates, "intermediates");
  positive(head_hidden, "head_hidden");
  positive(disc_hidden, "disc_hidden");
  if (drop_structure != "none" && drop_structure != "A_d" && drop_structure != "A_a" &&
      drop_structure != "A_e" && drop_structure != "A_s") {
    throw std::invalid_argument("config: drop_structure must be none|A_d|A_a|A_e|A_s");
  }
  if (mi_source != "H" && mi_source != "X" && mi_source != "E") {
    throw std::invalid_argument("config: ib.mi_source must be H|X|E");
  }
  if (alpha_disc < 0) throw std::invalid_argument("config: ib.alpha_disc must be >= 0");
  if (embeddings.empty()) positive(random_embeddings_dim, "random_embeddings_dim");
}

std::string TrainConfig::to_kv_text() const {
  std::ostringstream out;
  for (const auto& [key, field] : fields()) {
    if (key == "use_ib") continue;  // alias, not part of the canonical form
    out << key << " = " << field.get(*this) << "\n";
  }
  return out.str();
}

std::string TrainConfig::to_json_string() const {
  json j;
  for (const auto& [key, field] : fields()) {
    if (key == "use_ib") continue;
    j[key] = field.get(*this);
  }
  return j.dump();
}

TrainConfig TrainConfig::from_json_string(const std::string& json_text) {
  json j = json::parse(json_text);
  TrainConfig cfg;
  for (const auto& [key, value] : j.items()) {
    cfg.set(key, value.get<std::string>());
  }
  return cfg;
}

std::string TrainConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(to_kv_text())));
  return buf;
}

}  // namespace semsyngtn
