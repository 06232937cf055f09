#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include "prim_cases.hpp"
#include "semsyngtn/encoder.hpp"
#include "semsyngtn/params.hpp"
#include "semsyngtn/rng.hpp"
#include "semsyngtn/tape.hpp"

using namespace semsyngtn;
using semsyngtn_tests::rand_tensor;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  std::string path = "/tmp/semsyngtn_" + name;
  std::ofstream out(path);
  out << content;
  return path;
}

double sigmoid_ref(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Step-by-step scalar-loop LSTM, independent of the tape implementation.
// Gate layout along the 4*h2 axis: [input, forget, output, candidate].
Tensor lstm_naive(const Tensor& w, const Tensor& b, const Tensor& x,
                  const std::vector<int>& order) {
  int h2 = b.cols() / 4;
  int dx = x.cols();
  int n = x.rows();
  Tensor states({n, h2});
  std::vector<double> h(h2, 0.0), c(h2, 0.0);
  for (int t : order) {
    std::vector<double> z(dx + h2);
    for (int k = 0; k < dx; ++k) z[k] = x.at(t, k);
    for (int k = 0; k < h2; ++k) z[dx + k] = h[k];
    std::vector<double> pre(4 * h2, 0.0);
    for (int j = 0; j < 4 * h2; ++j) {
      for (size_t k = 0; k < z.size(); ++k) pre[j] += w.at(j, static_cast<int>(k)) * z[k];
      pre[j] += b.at(0, j);
    }
    for (int k = 0; k < h2; ++k) {
      double gi = sigmoid_ref(pre[k]);
      double gf = sigmoid_ref(pre[h2 + k]);
      double go = sigmoid_ref(pre[2 * h2 + k]);
      double gc = std::tanh(pre[3 * h2 + k]);
      c[k] = gf * c[k] + gi * gc;
      h[k] = go * std::tanh(c[k]);
      states.at(t, k) = h[k];
    }
  }
  return states;
}

}  // namespace

TEST_SUITE_BEGIN("encoder");

TEST_CASE("embedding file with header 2 3 loads two rows") {
  std::string path = write_temp("emb.txt", "2 3\nfoo 1 2 3\nbar 0.5 -1 2.25\n");
  EmbeddingTable table = EmbeddingTable::load(path);
  CHECK(table.vocab_size() == 2);
  CHECK(table.dim() == 3);
  CHECK(table.row_for("foo") == 1);
  CHECK(table.matrix().at(2, 2) == 2.25);
  CHECK(table.row_for("missing") == 0);  // UNK row
}

TEST_CASE("duplicate tokens and ragged rows are rejected") {
  std::string dup = write_temp("emb_dup.txt", "2 2\nfoo 1 2\nfoo 3 4\n");
  CHECK_THROWS_AS(EmbeddingTable::load(dup), std::invalid_argument);
  std::string ragged = write_temp("emb_rag.txt", "2 2\nfoo 1 2\nbar 3\n");
  CHECK_THROWS_AS(EmbeddingTable::load(ragged), std::runtime_error);
  std::string wide = write_temp("emb_wide.txt", "1 2\nfoo 1 2 3\n");
  CHECK_THROWS_AS(EmbeddingTable::load(wide), std::runtime_error);
}

TEST_CASE("random embedding rows do not depend on vocabulary order") {
  EmbeddingTable a = EmbeddingTable::random_for({"x", "y", "z"}, 4, 9);
  EmbeddingTable b = EmbeddingTable::random_for({"z", "x", "y"}, 4, 9);
  for (int c = 0; c < 4; ++c) {
    CHECK(a.matrix().at(a.row_for("y"), c) == b.matrix().at(b.row_for("y"), c));
  }
}

TEST_CASE("distance lookups clamp at the radius") {
  std::vector<int> rows = distance_rows(3, 0, 60);
  CHECK(rows == (std::vector<int>{60, 61, 62}));  // offsets 0, 1, 2
  // offset far beyond the radius lands on the boundary row
  std::vector<int> far = distance_rows(700, 0, 60);
  CHECK(far[600] == 120);
  CHECK(far[699] == 120);
  // anchor position maps to the centre row
  std::vector<int> centred = distance_rows(5, 3, 60);
  CHECK(centred[3] == 60);
}

TEST_CASE("embed_tokens produces N x (d_w + 2 d_dist)") {
  ParameterStore store;
  std::mt19937_64 rng(4);
  store.add("enc.dist_cand", rand_tensor(rng, {2 * 60 + 1, 2}, -1, 1));
  store.add("enc.dist_trig", rand_tensor(rng, {2 * 60 + 1, 2}, -1, 1));
  EmbeddingTable table = EmbeddingTable::random_for({"a", "b"}, 4, 1);
  store.add("emb.word", table.matrix(), false);
  Tape tape;
  Var x = embed_tokens(tape, store, table, {"a", "b", "oov"}, 0, 2, 60);
  CHECK(tape.value(x).rows() == 3);
  CHECK(tape.value(x).cols() == 8);
  // the OOV token picks up the UNK row in the word block
  for (int c = 0; c < 4; ++c) {
    CHECK(tape.value(x).at(2, 4 + c) == table.matrix().at(0, c));
  }
}

TEST_CASE("bilstm with zero parameters and zero input is all zero") {
  ParameterStore store;
  store.add("enc.lstm_fwd.W", Tensor({8, 7}));
  store.add("enc.lstm_fwd.b", Tensor({1, 8}));
  store.add("enc.lstm_bwd.W", Tensor({8, 7}));
  store.add("enc.lstm_bwd.b", Tensor({1, 8}));
  Tape tape;
  Var h = bilstm_encode(tape, store, tape.constant(Tensor({3, 5})), 4);
  CHECK(tape.value(h).rows() == 3);
  CHECK(tape.value(h).cols() == 4);
  CHECK(tape.value(h).max_abs() == 0.0);
}

TEST_CASE("bilstm handles a single-token sentence") {
  ParameterStore store;
  add_lstm_params(store, "enc.lstm_fwd", 3, 2, 5);
  add_lstm_params(store, "enc.lstm_bwd", 3, 2, 6);
  std::mt19937_64 rng(8);
  Tape tape;
  Var h = bilstm_encode(tape, store, tape.constant(rand_tensor(rng, {1, 3}, -1, 1)), 4);
  CHECK(tape.value(h).rows() == 1);
  CHECK(tape.value(h).cols() == 4);
}

TEST_CASE("bilstm matches an independent step-by-step loop") {
  ParameterStore store;
  add_lstm_params(store, "enc.lstm_fwd", 3, 2, 21);
  add_lstm_params(store, "enc.lstm_bwd", 3, 2, 22);
  std::mt19937_64 rng(23);
  Tensor x = rand_tensor(rng, {4, 3}, -1, 1);
  Tape tape;
  Var h = bilstm_encode(tape, store, tape.constant(x), 4);

  std::vector<int> fwd_order{0, 1, 2, 3}, bwd_order{3, 2, 1, 0};
  Tensor fwd = lstm_naive(store.value("enc.lstm_fwd.W"), store.value("enc.lstm_fwd.b"), x,
                          fwd_order);
  Tensor bwd = lstm_naive(store.value("enc.lstm_bwd.W"), store.value("enc.lstm_bwd.b"), x,
                          bwd_order);
  double max_diff = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int k = 0; k < 2; ++k) {
      max_diff = std::max(max_diff, std::fabs(tape.value(h).at(i, k) - fwd.at(i, k)));
      max_diff = std::max(max_diff, std::fabs(tape.value(h).at(i, 2 + k) - bwd.at(i, k)));
    }
  }
  CHECK_LT(max_diff, 1e-12);
}

TEST_CASE("reversing tokens and swapping directions reverses H with halves swapped") {
  ParameterStore fwd_store, swapped_store;
  add_lstm_params(fwd_store, "enc.lstm_fwd", 3, 2, 31);
  add_lstm_params(fwd_store, "enc.lstm_bwd", 3, 2, 32);
  swapped_store.add("enc.lstm_fwd.W", fwd_store.value("enc.lstm_bwd.W"));
  swapped_store.add("enc.lstm_fwd.b", fwd_store.value("enc.lstm_bwd.b"));
  swapped_store.add("enc.lstm_bwd.W", fwd_store.value("enc.lstm_fwd.W"));
  swapped_store.add("enc.lstm_bwd.b", fwd_store.value("enc.lstm_fwd.b"));

  std::mt19937_64 rng(33);
  int n = 5;
  Tensor x = rand_tensor(rng, {n, 3}, -1, 1);
  Tensor x_rev({n, 3});
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) x_rev.at(i, c) = x.at(n - 1 - i, c);
  }
  Tape t1, t2;
  const Tensor& h = t1.value(bilstm_encode(t1, fwd_store, t1.constant(x), 4));
  const Tensor& h_rev = t2.value(bilstm_encode(t2, swapped_store, t2.constant(x_rev), 4));
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < 2; ++k) {
      CHECK(h.at(i, k) == doctest::Approx(h_rev.at(n - 1 - i, 2 + k)).epsilon(1e-12));
      CHECK(h.at(i, 2 + k) == doctest::Approx(h_rev.at(n - 1 - i, k)).epsilon(1e-12));
    }
  }
}

TEST_CASE("gradients reach the distance tables but never the word table") {
  ParameterStore store;
  std::mt19937_64 rng(41);
  int radius = 4;
  store.add("enc.dist_cand", rand_tensor(rng, {2 * radius + 1, 2}, -1, 1));
  store.add("enc.dist_trig", rand_tensor(rng, {2 * radius + 1, 2}, -1, 1));
  EmbeddingTable table = EmbeddingTable::random_for({"u", "v", "w"}, 3, 2);
  store.add("emb.word", table.matrix(), /*trainable=*/false);
  add_lstm_params(store, "enc.lstm_fwd", 7, 2, 42);
  add_lstm_params(store, "enc.lstm_bwd", 7, 2, 43);

  Tape tape;
  Var x = embed_tokens(tape, store, table, {"u", "v", "w"}, 0, 2, radius);
  Var h = bilstm_encode(tape, store, x, 4);
  tape.backward(sum_all(h));
  GradMap grads = tape.parameter_grads();
  CHECK(grads.count("emb.word") == 0);  // frozen: no gradient entry at all
  REQUIRE(grads.count("enc.dist_cand") == 1);
  CHECK(grads["enc.dist_cand"].max_abs() > 0.0);
  CHECK(grads["enc.dist_trig"].max_abs() > 0.0);
}

TEST_CASE("offsets beyond the radius share the boundary embedding row") {
  ParameterStore store;
  std::mt19937_64 rng(51);
  int radius = 2;
  store.add("enc.dist_cand", rand_tensor(rng, {5, 3}, -1, 1));
  store.add("enc.dist_trig", rand_tensor(rng, {5, 3}, -1, 1));
  EmbeddingTable table = EmbeddingTable::random_for({"w"}, 2, 3);
  store.add("emb.word", table.matrix(), false);
  std::vector<std::string> tokens(8, "w");
  Tape tape;
  Var x = embed_tokens(tape, store, table, tokens, 0, 0, radius);
  const Tensor& xv = tape.value(x);
  for (int c = 0; c < 3; ++c) {
    CHECK(xv.at(2, c) == xv.at(7, c));  // offsets 2 and 7 both clamp to +radius
  }
}

TEST_SUITE_END();
