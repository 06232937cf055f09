#ifndef SEMSYNGTN_CONFIG_HPP_
#define SEMSYNGTN_CONFIG_HPP_

#include <cstdint>
#include <string>

namespace semsyngtn {

// Every hyperparameter and ablation switch. Serializes to a flat
// "key = value" text file (unknown keys are errors) and to JSON for metric
// output and checkpoint embedding.
struct TrainConfig {
  // training
  std::uint64_t seed = 1;
  int epochs = 200;
  int batch_size = 32;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_adam = 1e-8;

  // widths
  int d_dist = 30;
  int clamp_radius = 60;
  int d_len = 30;
  int len_max = 15;
  int d_h = 200;  // total BiLSTM width (both directions)
  int att_dim = 200;
  int ff_hidden = 200;
  int gcn_hidden = 200;
  int gcn_layers = 2;     // G
  int channels = 3;       // C
  int intermediates = 3;  // M
  int head_hidden = 200;
  int disc_hidden = 200;

  // ablation switches
  bool use_gtn = true;
  bool use_multihop = true;
  bool use_syn_custom = true;
  bool use_sem_custom = true;
  bool use_lstm_in_r = false;
  std::string drop_structure = "none";  // none | A_d | A_a | A_e | A_s

  // information bottleneck
  bool ib_enabled = true;
  double alpha_disc = 0.1;
  std::string mi_source = "H";  // H | X | E

  // paths
  std::string corpus;
  std::string dev_corpus;   // optional; empty = deterministic hash split
  std::string embeddings;   // optional pretrained file
  std::string checkpoint;   // output path for train
  int random_embeddings_dim = 50;  // used when `embeddings` is empty

  static TrainConfig from_file(const std::string& path);
  static TrainConfig from_kv_text(const std::string& text);
  void set(const std::string& key, const std::string& value);  // throws on unknown key
  void validate() const;

  std::string to_kv_text() const;  // canonical, sorted keys
  std::string to_json_string() const;
  static TrainConfig from_json_string(const std::string& json_text);

  std::string hash() const;  // hex digest of the canonical text
};

}  // namespace semsyngtn

#endif  // SEMSYNGTN_CONFIG_HPP_
