#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <random>

#include "prim_cases.hpp"
#include "semsyngtn/gtn.hpp"
#include "semsyngtn/structures.hpp"

using namespace semsyngtn;
using semsyngtn_tests::rand_tensor;

namespace {

// Saturated one-hot row: softmax puts ~1-4e-18 of the mass on `hot`.
Tensor one_hot_alpha(int size, int hot) {
  Tensor t({1, size});
  for (int i = 0; i < size; ++i) t.at(0, i) = i == hot ? 20.0 : -20.0;
  return t;
}

// Exhaustive enumeration of length-m walks i -> j in a binary adjacency.
long walk_count(const Tensor& a, int m, int from, int to) {
  if (m == 0) return from == to ? 1 : 0;
  long total = 0;
  for (int mid = 0; mid < a.cols(); ++mid) {
    if (a.at(from, mid) == 1.0) total += walk_count(a, m - 1, mid, to);
  }
  return total;
}

std::vector<Var> random_structures(Tape& tape, std::mt19937_64& rng, int n, int count) {
  std::vector<Var> out;
  for (int v = 0; v < count; ++v) {
    out.push_back(tape.constant(rand_tensor(rng, {n, n}, 0.0, 1.0)));
  }
  return out;
}

}  // namespace

TEST_SUITE_BEGIN("gtn");

TEST_CASE("saturated one-hot weights recover a single structure") {
  Tape tape;
  std::mt19937_64 rng(3);
  std::vector<Var> structures = random_structures(tape, rng, 4, 5);
  for (int hot = 0; hot < 5; ++hot) {
    Var q = gtn_intermediate(structures, tape.constant(one_hot_alpha(5, hot)));
    CHECK_LT(max_abs_diff(tape.value(q), tape.value(structures[hot])), 1e-8);
  }
}

TEST_CASE("uniform weights average the structures") {
  Tape tape;
  Var s0 = tape.constant(Tensor::matrix({{1, 0}, {0, 1}}));
  Var s1 = tape.constant(Tensor::matrix({{0, 1}, {1, 0}}));
  Var s2 = tape.constant(Tensor::matrix({{1, 1}, {1, 1}}));
  Var s3 = tape.constant(Tensor::matrix({{0, 0}, {0, 0}}));
  Var s4 = tape.constant(Tensor::matrix({{2, 2}, {0, 0}}));
  Var q = gtn_intermediate({s0, s1, s2, s3, s4}, tape.constant(Tensor({1, 5})));
  // Hand-computed average of the five matrices.
  Tensor expected = Tensor::matrix({{0.8, 0.8}, {0.4, 0.4}});
  CHECK_LT(max_abs_diff(tape.value(q), expected), 1e-12);
}

TEST_CASE("intermediates stay inside the convex hull of the structures") {
  Tape tape;
  std::mt19937_64 rng(4);
  std::vector<Var> structures = random_structures(tape, rng, 5, 5);
  Var q = gtn_intermediate(structures, tape.constant(rand_tensor(rng, {1, 5}, -2, 2)));
  const Tensor& qv = tape.value(q);
  for (int i = 0; i < qv.numel(); ++i) {
    CHECK(qv[i] >= 0.0);  // all structures are non-negative here
    double mx = 0.0;
    for (Var s : structures) mx = std::max(mx, tape.value(s)[i]);
    CHECK(qv[i] <= mx + 1e-12);
  }
}

TEST_CASE("a channel with M=1 is the single intermediate") {
  Tape tape;
  std::mt19937_64 rng(5);
  std::vector<Var> structures = random_structures(tape, rng, 3, 5);
  Tensor alpha = rand_tensor(rng, {1, 5}, -1, 1);
  Var channel = gtn_channel(structures, tape.constant(alpha));
  Var inter = gtn_intermediate(structures, tape.constant(alpha));
  CHECK_LT(max_abs_diff(tape.value(channel), tape.value(inter)), 1e-15);
}

TEST_CASE("identity intermediates multiply to the identity") {
  Tape tape;
  std::mt19937_64 rng(6);
  std::vector<Var> structures = random_structures(tape, rng, 4, 4);
  structures.push_back(tape.constant(Tensor::identity(4)));
  Tensor alpha({3, 5});
  for (int j = 0; j < 3; ++j) {
    for (int v = 0; v < 5; ++v) alpha.at(j, v) = v == 4 ? 20.0 : -20.0;
  }
  Var q = gtn_channel(structures, tape.constant(alpha));
  CHECK_LT(max_abs_diff(tape.value(q), Tensor::identity(4)), 1e-7);
}

TEST_CASE("saturated dependency chain gives A^2 with the hand matrix") {
  Tape tape;
  Tensor chain = dep_adjacency({1, -1, 1});
  std::vector<Var> structures{tape.constant(chain), tape.constant(Tensor::full({3, 3}, 0.5)),
                              tape.constant(Tensor::full({3, 3}, 0.5)),
                              tape.constant(Tensor::full({3, 3}, 1.0 / 3.0)),
                              tape.constant(Tensor::identity(3))};
  Tensor alpha({2, 5});
  for (int j = 0; j < 2; ++j) {
    for (int v = 0; v < 5; ++v) alpha.at(j, v) = v == 0 ? 20.0 : -20.0;
  }
  Var q = gtn_channel(structures, tape.constant(alpha));
  Tensor expected = Tensor::matrix({{1, 0, 1}, {0, 2, 0}, {1, 0, 1}});
  CHECK_LT(max_abs_diff(tape.value(q), expected), 1e-7);
  // and the exact matrix agrees with brute-force path enumeration
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      CHECK(std::llround(tape.value(q).at(i, j)) == walk_count(chain, 2, i, j));
    }
  }
}

TEST_CASE("channel products count walks on random graphs up to 6 nodes") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    std::uniform_int_distribution<int> nd(2, 6);
    int n = nd(rng);
    Tensor adj({n, n});
    std::bernoulli_distribution edge(0.4);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (edge(rng)) adj.at(i, j) = adj.at(j, i) = 1.0;
      }
    }
    for (int m = 1; m <= 3; ++m) {
      Tape tape;
      std::vector<Var> structures = random_structures(tape, rng, n, 4);
      structures.insert(structures.begin(), tape.constant(adj));
      Tensor alpha({m, 5});
      for (int j = 0; j < m; ++j) {
        for (int v = 0; v < 5; ++v) alpha.at(j, v) = v == 0 ? 20.0 : -20.0;
      }
      Var q = gtn_channel(structures, tape.constant(alpha));
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          CHECK(std::llround(tape.value(q).at(i, j)) == walk_count(adj, m, i, j));
        }
      }
    }
  }
}

TEST_CASE("gcn_layer with Q=I and U=I passes non-negative inputs through") {
  Tape tape;
  Tensor h = Tensor::matrix({{1, 2}, {0.5, 3}});
  Var out = gcn_layer(tape.constant(Tensor::identity(2)), tape.constant(h),
                      tape.constant(Tensor::identity(2)));
  CHECK_LT(max_abs_diff(tape.value(out), h), 1e-15);
}

TEST_CASE("gcn_layer averages rows when Q is all ones") {
  Tape tape;
  Var out = gcn_layer(tape.constant(Tensor::full({2, 2}, 1.0)),
                      tape.constant(Tensor::matrix({{1, 4}, {3, 2}})),
                      tape.constant(Tensor::identity(2)));
  Tensor expected = Tensor::matrix({{2, 3}, {2, 3}});  // ReLU((r1 + r2) / 2)
  CHECK_LT(max_abs_diff(tape.value(out), expected), 1e-15);
}

TEST_CASE("gcn_layer matches a naive double-loop oracle") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    Tensor q = rand_tensor(rng, {4, 4}, 0.0, 1.0);
    Tensor h = rand_tensor(rng, {4, 3}, -1, 1);
    Tensor u = rand_tensor(rng, {5, 3}, -1, 1);
    Tape tape;
    Var out = gcn_layer(tape.constant(q), tape.constant(h), tape.constant(u));
    // independent implementation straight from the layer formula
    Tensor expected({4, 5});
    for (int i = 0; i < 4; ++i) {
      double denom = 0.0;
      for (int t = 0; t < 4; ++t) denom += q.at(i, t);
      denom = std::max(denom, 1e-8);
      std::vector<double> agg(3, 0.0);
      for (int j = 0; j < 4; ++j) {
        for (int c = 0; c < 3; ++c) agg[c] += q.at(i, j) * h.at(j, c) / denom;
      }
      for (int r = 0; r < 5; ++r) {
        double z = 0.0;
        for (int c = 0; c < 3; ++c) z += u.at(r, c) * agg[c];
        expected.at(i, r) = std::max(z, 0.0);
      }
    }
    CHECK_LT(max_abs_diff(tape.value(out), expected), 1e-12);
  }
}

TEST_CASE("gcn_layer guards all-zero rows") {
  Tape tape;
  Tensor q({2, 2});  // zero matrix: denominators clamp to 1e-8
  Var out = gcn_layer(tape.constant(q), tape.constant(Tensor::full({2, 3}, 1.0)),
                      tape.constant(Tensor::identity(3)));
  CHECK(tape.value(out).max_abs() == 0.0);
}

TEST_CASE("encode_with_gtn widths follow channels and ablations") {
  std::mt19937_64 rng(9);
  int n = 4, d_h = 6, g = 5;
  ParameterStore store;
  store.add("gtn.alpha", rand_tensor(rng, {6, 5}, -1, 1));  // C=3, M=2
  store.add("gcn.U1", rand_tensor(rng, {g, d_h}, -1, 1));
  store.add("gcn.U2", rand_tensor(rng, {g, g}, -1, 1));
  Tape tape;
  Var h = tape.constant(rand_tensor(rng, {n, d_h}, -1, 1));
  std::vector<Var> structures = random_structures(tape, rng, n, 4);
  structures.push_back(tape.constant(Tensor::identity(n)));

  GtnConfig cfg;
  cfg.channels = 3;
  cfg.intermediates = 2;
  cfg.gcn_layers = 2;
  Var full = encode_with_gtn(tape, store, h, structures, cfg);
  CHECK(tape.value(full).cols() == 3 * g);  // one block per channel

  GtnConfig no_multihop = cfg;
  no_multihop.use_multihop = false;
  Var flat = encode_with_gtn(tape, store, h, structures, no_multihop);
  CHECK(tape.value(flat).cols() == 3 * 2 * g);  // one block per intermediate

  GtnConfig no_gtn = cfg;
  no_gtn.use_gtn = false;
  Var direct = encode_with_gtn(tape, store, h, structures, no_gtn);
  CHECK(tape.value(direct).cols() == 5 * g);  // one block per initial structure
}

TEST_CASE("a single channel with C=1 is just that channel's GCN output") {
  std::mt19937_64 rng(19);
  int n = 3, d_h = 4, g = 4;
  ParameterStore store;
  Tensor alpha = rand_tensor(rng, {2, 5}, -1, 1);
  store.add("gtn.alpha", alpha);
  store.add("gcn.U1", rand_tensor(rng, {g, d_h}, -1, 1));
  store.add("gcn.U2", rand_tensor(rng, {g, g}, -1, 1));
  Tape tape;
  Var h = tape.constant(rand_tensor(rng, {n, d_h}, -1, 1));
  std::vector<Var> structures = random_structures(tape, rng, n, 5);
  GtnConfig cfg;
  cfg.channels = 1;
  cfg.intermediates = 2;
  cfg.gcn_layers = 2;
  Var encoded = encode_with_gtn(tape, store, h, structures, cfg);
  Var direct = gcn_stack(tape, store, gtn_channel(structures, store.on(tape, "gtn.alpha")), h, 2);
  CHECK_LT(max_abs_diff(tape.value(encoded), tape.value(direct)), 1e-15);
}

TEST_CASE("channel permutation permutes the h' blocks") {
  std::mt19937_64 rng(10);
  int n = 3, d_h = 4, g = 4;
  Tensor alpha = rand_tensor(rng, {4, 5}, -1, 1);  // C=2, M=2
  Tensor permuted({4, 5});
  for (int j = 0; j < 2; ++j) {
    for (int v = 0; v < 5; ++v) {
      permuted.at(j, v) = alpha.at(2 + j, v);
      permuted.at(2 + j, v) = alpha.at(j, v);
    }
  }
  Tensor u1 = rand_tensor(rng, {g, d_h}, -1, 1);
  Tensor u2 = rand_tensor(rng, {g, g}, -1, 1);
  Tensor h = rand_tensor(rng, {n, d_h}, -1, 1);
  auto run = [&](const Tensor& a) {
    ParameterStore store;
    store.add("gtn.alpha", a);
    store.add("gcn.U1", u1);
    store.add("gcn.U2", u2);
    Tape tape;
    std::mt19937_64 srng(11);
    std::vector<Var> structures = random_structures(tape, srng, n, 5);
    GtnConfig cfg;
    cfg.channels = 2;
    cfg.intermediates = 2;
    cfg.gcn_layers = 2;
    return tape.value(encode_with_gtn(tape, store, tape.constant(h), structures, cfg));
  };
  Tensor base = run(alpha);
  Tensor swapped = run(permuted);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < g; ++c) {
      CHECK(base.at(i, c) == swapped.at(i, g + c));
      CHECK(base.at(i, g + c) == swapped.at(i, c));
    }
  }
}

TEST_CASE("predict_role returns a distribution") {
  std::mt19937_64 rng(12);
  ParameterStore store;
  store.add("head.W1", rand_tensor(rng, {6, 9}, -1, 1));
  store.add("head.b1", rand_tensor(rng, {1, 6}, -1, 1));
  store.add("head.W2", rand_tensor(rng, {7, 6}, -1, 1));
  store.add("head.b2", rand_tensor(rng, {1, 7}, -1, 1));
  Tape tape;
  Var probs = predict_role(tape, store, tape.constant(rand_tensor(rng, {1, 9}, -1, 1)));
  double sum = 0.0;
  for (int r = 0; r < 7; ++r) {
    sum += tape.value(probs).at(0, r);
    CHECK(tape.value(probs).at(0, r) >= 0.0);
  }
  CHECK(std::fabs(sum - 1.0) < 1e-9);
}

TEST_CASE("zero head weights give the uniform distribution") {
  ParameterStore store;
  store.add("head.W1", Tensor({6, 9}));
  store.add("head.b1", Tensor({1, 6}));
  store.add("head.W2", Tensor({7, 6}));
  store.add("head.b2", Tensor({1, 7}));
  Tape tape;
  Var probs = predict_role(tape, store, tape.constant(Tensor::full({1, 9}, 0.3)));
  for (int r = 0; r < 7; ++r) {
    CHECK(tape.value(probs).at(0, r) == doctest::Approx(1.0 / 7.0).epsilon(1e-12));
  }
}

TEST_CASE("shifting all logits leaves the distribution unchanged") {
  std::mt19937_64 rng(13);
  Tensor w1 = rand_tensor(rng, {6, 9}, -1, 1);
  Tensor b1 = rand_tensor(rng, {1, 6}, -1, 1);
  Tensor w2 = rand_tensor(rng, {7, 6}, -1, 1);
  Tensor b2 = rand_tensor(rng, {1, 7}, -1, 1);
  Tensor rep = rand_tensor(rng, {1, 9}, -1, 1);
  auto run = [&](double shift) {
    ParameterStore store;
    Tensor b2s = b2;
    for (int i = 0; i < 7; ++i) b2s[i] += shift;
    store.add("head.W1", w1);
    store.add("head.b1", b1);
    store.add("head.W2", w2);
    store.add("head.b2", b2s);
    Tape tape;
    return tape.value(predict_role(tape, store, tape.constant(rep)));
  };
  CHECK_LT(max_abs_diff(run(0.0), run(7.5)), 1e-12);
}

TEST_CASE("loss_pred basics") {
  Tape tape;
  Var sure = tape.constant(Tensor::matrix({{0, 1, 0}}));
  CHECK(tape.value(loss_pred(sure, 1))[0] == doctest::Approx(0.0).epsilon(1e-12));
  Var uniform7 = tape.constant(Tensor::full({1, 7}, 1.0 / 7.0));
  CHECK(tape.value(loss_pred(uniform7, 3))[0] == doctest::Approx(std::log(7.0)).epsilon(1e-12));
  CHECK(tape.value(loss_pred(uniform7, 3))[0] == doctest::Approx(1.9459).epsilon(1e-4));
  CHECK_THROWS_AS(loss_pred(uniform7, 9), std::invalid_argument);
}

TEST_CASE("loss_pred equals an independent cross-entropy on random distributions") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 10; ++trial) {
    int k = 5;
    Tensor p = rand_tensor(rng, {1, k}, 0.05, 1.0);
    double z = 0.0;
    for (int i = 0; i < k; ++i) z += p[i];
    for (int i = 0; i < k; ++i) p[i] /= z;
    std::uniform_int_distribution<int> pick(0, k - 1);
    int gold = pick(rng);
    Tape tape;
    double loss = tape.value(loss_pred(tape.constant(p), gold))[0];
    CHECK(loss == doctest::Approx(-std::log(p[gold])).epsilon(1e-12));
  }
}

TEST_CASE("loss_pred clamps vanishing probabilities") {
  Tape tape;
  Var probs = tape.constant(Tensor::matrix({{1.0, 0.0}}));
  double loss = tape.value(loss_pred(probs, 1))[0];
  CHECK(loss == doctest::Approx(-std::log(1e-12)));
}

TEST_SUITE_END();
