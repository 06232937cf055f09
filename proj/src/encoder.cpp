#include "semsyngtn/encoder.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "semsyngtn/rng.hpp"

namespace semsyngtn {

EmbeddingTable::EmbeddingTable(std::vector<std::string> vocab, Tensor matrix)
    : vocab_(std::move(vocab)), matrix_(std::move(matrix)) {
  if (matrix_.rank() != 2 || matrix_.rows() != static_cast<int>(vocab_.size()) + 1) {
    throw std::invalid_argument("embedding table: matrix must have V+1 rows");
  }
  for (size_t i = 0; i < vocab_.size(); ++i) {
    if (!row_of_.emplace(vocab_[i], static_cast<int>(i) + 1).second) {
      throw std::invalid_argument("embedding table: duplicate token " + vocab_[i]);
    }
  }
}

EmbeddingTable EmbeddingTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read embeddings file " + path);
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("embeddings: empty file " + path);
  std::istringstream hs(header);
  int v = -1, dim = -1;
  hs >> v >> dim;
  if (!hs || v < 0 || dim <= 0) {
    throw std::runtime_error("embeddings: bad header line \"" + header + "\"");
  }
  std::vector<std::string> vocab;
  Tensor matrix({v + 1, dim});  // row 0 stays zero = UNK
  std::string line;
  for (int r = 0; r < v; ++r) {
    if (!std::getline(in, line)) {
      throw std::runtime_error("embeddings: expected " + std::to_string(v) + " rows, got " +
                               std::to_string(r));
    }
    std::istringstream ls(line);
    std::string token;
    ls >> token;
    if (token.empty()) throw std::runtime_error("embeddings: empty token on row " + std::to_string(r + 2));
    for (int c = 0; c < dim; ++c) {
      if (!(ls >> matrix.at(r + 1, c))) {
        throw std::runtime_error("embeddings: dimension mismatch on row " + std::to_string(r + 2));
      }
    }
    double extra;
    if (ls >> extra) {
      throw std::runtime_error("embeddings: dimension mismatch on row " + std::to_string(r + 2));
    }
    vocab.push_back(token);
  }
  return EmbeddingTable(std::move(vocab), std::move(matrix));
}

EmbeddingTable EmbeddingTable::random_for(std::vector<std::string> vocab, int dim,
                                          std::uint64_t seed) {
  if (dim <= 0) throw std::invalid_argument("embedding table: dim must be positive");
  std::sort(vocab.begin(), vocab.end());
  vocab.erase(std::unique(vocab.begin(), vocab.end()), vocab.end());
  Tensor matrix({static_cast<int>(vocab.size()) + 1, dim});
  {
    std::mt19937_64 rng = seeded_rng(seed, "emb:<unk>");
    std::normal_distribution<double> d(0.0, 0.1);
    for (int c = 0; c < dim; ++c) matrix.at(0, c) = d(rng);
  }
  for (size_t i = 0; i < vocab.size(); ++i) {
    std::mt19937_64 rng = seeded_rng(seed, "emb:" + vocab[i]);
    std::normal_distribution<double> d(0.0, 0.1);
    for (int c = 0; c < dim; ++c) matrix.at(static_cast<int>(i) + 1, c) = d(rng);
  }
  return EmbeddingTable(std::move(vocab), std::move(matrix));
}

int EmbeddingTable::row_for(const std::string& token) const {
  auto it = row_of_.find(token);
  return it == row_of_.end() ? 0 : it->second;
}

std::vector<int> distance_rows(int n, int anchor, int clamp_radius) {
  std::vector<int> rows(n);
  for (int i = 0; i < n; ++i) {
    int delta = std::clamp(i - anchor, -clamp_radius, clamp_radius);
    rows[i] = delta + clamp_radius;
  }
  return rows;
}

Var lookup_words(Tape& tape, const ParameterStore& store, const EmbeddingTable& table,
                 const std::vector<std::string>& tokens) {
  std::vector<int> rows;
  rows.reserve(tokens.size());
  for (const std::string& tok : tokens) rows.push_back(table.row_for(tok));
  return gather_rows(store.on(tape, "emb.word"), rows);
}

Var embed_tokens(Tape& tape, const ParameterStore& store, const EmbeddingTable& table,
                 const std::vector<std::string>& tokens, int a, int e, int clamp_radius) {
  int n = static_cast<int>(tokens.size());
  if (a < 0 || a >= n || e < 0 || e >= n) {
    throw std::invalid_argument("embed_tokens: anchor out of range");
  }
  Var dist_cand = gather_rows(store.on(tape, "enc.dist_cand"), distance_rows(n, a, clamp_radius));
  Var dist_trig = gather_rows(store.on(tape, "enc.dist_trig"), distance_rows(n, e, clamp_radius));
  Var words = lookup_words(tape, store, table, tokens);
  return concat({dist_cand, dist_trig, words}, 1);
}

namespace {

// One direction over the given time order. Gate blocks: [i, f, o, g].
std::vector<Var> lstm_direction(Tape& tape, const ParameterStore& store,
                                const std::string& prefix, Var x,
                                const std::vector<int>& order, int d_half) {
  Var w = store.on(tape, prefix + ".W");
  Var b = store.on(tape, prefix + ".b");
  Var state = tape.constant(Tensor({1, 2 * d_half}));  // [h, c], zero start
  std::vector<Var> states(order.size());
  for (int t : order) {
    state = lstm_cell(row(x, t), state, w, b);
    states[t] = slice_cols(state, 0, d_half);
  }
  return states;
}

}  // namespace

Var bilstm_encode(Tape& tape, const ParameterStore& store, Var x, int d_h) {
  if (d_h % 2 != 0) throw std::invalid_argument("bilstm_encode: d_h must be even");
  int n = tape.value(x).rows();
  int d_half = d_h / 2;
  std::vector<int> fwd_order(n), bwd_order(n);
  for (int i = 0; i < n; ++i) {
    fwd_order[i] = i;
    bwd_order[i] = n - 1 - i;
  }
  std::vector<Var> fwd = lstm_direction(tape, store, "enc.lstm_fwd", x, fwd_order, d_half);
  std::vector<Var> bwd = lstm_direction(tape, store, "enc.lstm_bwd", x, bwd_order, d_half);
  std::vector<Var> rows;
  rows.reserve(n);
  for (int i = 0; i < n; ++i) rows.push_back(concat({fwd[i], bwd[i]}, 1));
  return concat(rows, 0);
}

void add_lstm_params(ParameterStore& store, const std::string& prefix, int d_x, int d_half,
                     std::uint64_t seed) {
  std::mt19937_64 rng = seeded_rng(seed, prefix);
  store.add(prefix + ".W", xavier_uniform(4 * d_half, d_x + d_half, rng));
  store.add(prefix + ".b", Tensor({1, 4 * d_half}));
}

}  // namespace semsyngtn
