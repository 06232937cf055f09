#ifndef SEMSYNGTN_ENCODER_HPP_
#define SEMSYNGTN_ENCODER_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "semsyngtn/params.hpp"
#include "semsyngtn/tape.hpp"
#include "semsyngtn/tensor.hpp"

namespace semsyngtn {

// Pretrained (frozen) word vectors. Row 0 is UNK; token t maps to row_for(t).
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::vector<std::string> vocab, Tensor matrix);

  // Text file: first line "V d_w", then V lines "token f1 ... f_dw".
  static EmbeddingTable load(const std::string& path);
  // Deterministic per-word vectors (independent of vocabulary order); used
  // when no pretrained file is configured.
  static EmbeddingTable random_for(std::vector<std::string> vocab, int dim, std::uint64_t seed);

  int dim() const { return matrix_.cols(); }
  int vocab_size() const { return static_cast<int>(vocab_.size()); }
  int row_for(const std::string& token) const;  // 0 (UNK) when absent
  const std::vector<std::string>& vocab() const { return vocab_; }
  const Tensor& matrix() const { return matrix_; }

 private:
  std::vector<std::string> vocab_;  // row i+1 holds vocab_[i]
  std::map<std::string, int> row_of_;
  Tensor matrix_;
};

// Clamped-offset lookup indexes for a distance table of shape (2K+1, d_dist):
// token i maps to row clamp(i - anchor, -K, K) + K.
std::vector<int> distance_rows(int n, int anchor, int clamp_radius);

// x_i = [dist_cand(i-a), dist_trig(i-e), word(w_i)]; the word block is frozen.
// Uses parameters enc.dist_cand and enc.dist_trig plus the frozen emb.word.
Var embed_tokens(Tape& tape, const ParameterStore& store, const EmbeddingTable& table,
                 const std::vector<std::string>& tokens, int a, int e, int clamp_radius);

// Word rows only (the "E" sequence for the MI-source ablation).
Var lookup_words(Tape& tape, const ParameterStore& store, const EmbeddingTable& table,
                 const std::vector<std::string>& tokens);

// Bidirectional LSTM with zero initial states; h_i = [fwd_i, bwd_i].
// Parameters: enc.lstm_fwd.W/b and enc.lstm_bwd.W/b with gate order
// [input, forget, output, candidate] stacked along the output axis.
Var bilstm_encode(Tape& tape, const ParameterStore& store, Var x, int d_h);

// Parameter shapes for one LSTM direction over inputs of width d_x.
void add_lstm_params(ParameterStore& store, const std::string& prefix, int d_x, int d_half,
                     std::uint64_t seed);

}  // namespace semsyngtn

#endif  // SEMSYNGTN_ENCODER_HPP_
