#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "prim_cases.hpp"
#include "semsyngtn/grad_check.hpp"
#include "semsyngtn/params.hpp"
#include "semsyngtn/tape.hpp"
#include "semsyngtn/tensor.hpp"

using namespace semsyngtn;
using semsyngtn_tests::primitive_cases;

TEST_SUITE_BEGIN("numeric");

TEST_CASE("softmax of equal logits is uniform") {
  Tape t;
  Var x = t.constant(Tensor::row({0.0, 0.0}));
  Var y = softmax(x, 1);
  CHECK(t.value(y).at(0, 0) == doctest::Approx(0.5));
  CHECK(t.value(y).at(0, 1) == doctest::Approx(0.5));
}

TEST_CASE("relu forward") {
  Tape t;
  Var y = relu(t.constant(Tensor::row({-1.0, 2.0})));
  CHECK(t.value(y).at(0, 0) == 0.0);
  CHECK(t.value(y).at(0, 1) == 2.0);
}

TEST_CASE("matmul against hand multiplication") {
  Tape t;
  Var a = t.constant(Tensor::matrix({{1, 2}, {3, 4}}));
  Var b = t.constant(Tensor::matrix({{1}, {1}}));
  Var c = matmul(a, b);
  CHECK(t.value(c).at(0, 0) == 3.0);
  CHECK(t.value(c).at(1, 0) == 7.0);
}

TEST_CASE("shape mismatch reports op name and both shapes") {
  Tape t;
  Var a = t.constant(Tensor({2, 3}));
  Var b = t.constant(Tensor({2, 3}));
  try {
    matmul(a, b);
    FAIL("expected shape error");
  } catch (const std::invalid_argument& e) {
    std::string msg = e.what();
    CHECK(msg.find("matmul") != std::string::npos);
    CHECK(msg.find("(2x3)") != std::string::npos);
  }
}

TEST_CASE("forward evaluation is deterministic bit for bit") {
  auto run = [] {
    Tape t;
    std::mt19937_64 rng(99);
    Var a = t.constant(semsyngtn_tests::rand_tensor(rng, {5, 5}, -1, 1));
    Var b = t.constant(semsyngtn_tests::rand_tensor(rng, {5, 5}, -1, 1));
    Var y = softmax(matmul(sigmoid(a), tanh_op(b)), 1);
    return t.value(y);
  };
  Tensor first = run();
  Tensor second = run();
  CHECK(first == second);
}

TEST_CASE("maxpool ties break to the lowest row and route gradients there") {
  Tape t;
  Var a = t.parameter("a", Tensor::matrix({{2.0, 1.0}, {2.0, 3.0}, {0.0, 3.0}}));
  Var pooled = maxpool_rows(a);
  CHECK(t.value(pooled).at(0, 0) == 2.0);
  CHECK(t.value(pooled).at(0, 1) == 3.0);
  t.backward(sum_all(pooled));
  Tensor g = t.parameter_grads()["a"];
  CHECK(g.at(0, 0) == 1.0);  // row 0 wins the tie in column 0
  CHECK(g.at(1, 0) == 0.0);
  CHECK(g.at(1, 1) == 1.0);  // row 1 wins the tie in column 1
  CHECK(g.at(2, 1) == 0.0);
}

TEST_CASE("every primitive passes grad_check at 1e-6") {
  for (const auto& c : primitive_cases()) {
    CAPTURE(c.name);
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      CHECK_LT(c.run(seed), 1e-6);
    }
  }
}

TEST_CASE("grad_check on sum of parameters is exact to 1e-10") {
  ParameterStore store;
  std::mt19937_64 rng(7);
  store.add("theta", semsyngtn_tests::rand_tensor(rng, {3, 4}, -1, 1));
  auto res = grad_check(
      [](Tape& t, const ParameterStore& s) { return sum_all(s.on(t, "theta")); }, store);
  CHECK_LT(res.max_rel_error, 1e-10);
}

TEST_CASE("grad_check on sigmoid(w.x) is below 1e-6") {
  ParameterStore store;
  std::mt19937_64 rng(11);
  store.add("w", semsyngtn_tests::rand_tensor(rng, {1, 4}, -1, 1));
  Tensor x = semsyngtn_tests::rand_tensor(rng, {4, 1}, -1, 1);
  auto res = grad_check(
      [&x](Tape& t, const ParameterStore& s) {
        return sum_all(sigmoid(matmul(s.on(t, "w"), t.constant(x))));
      },
      store);
  CHECK_LT(res.max_rel_error, 1e-6);
}

TEST_CASE("frozen parameters enter tapes as constants") {
  ParameterStore store;
  store.add("frozen", Tensor::row({1.0, 2.0}), /*trainable=*/false);
  store.add("live", Tensor::row({3.0, 4.0}));
  Tape t;
  Var loss = sum_all(mul(store.on(t, "frozen"), store.on(t, "live")));
  t.backward(loss);
  GradMap g = t.parameter_grads();
  CHECK(g.count("frozen") == 0);
  REQUIRE(g.count("live") == 1);
  CHECK(g["live"].at(0, 0) == 1.0);
  CHECK(g["live"].at(0, 1) == 2.0);
}

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
  ParameterStore store;
  store.add("w", Tensor::row({0.5, -0.25}));
  GradMap grads;
  grads["w"] = Tensor({1, 2});
  adam_step(store, grads, AdamConfig{});
  CHECK(store.value("w").at(0, 0) == 0.5);
  CHECK(store.value("w").at(0, 1) == -0.25);
}

TEST_CASE("adam: one step on w=0 with g=1, lr=0.1 lands near -0.1") {
  ParameterStore store;
  store.add("w", Tensor::scalar(0.0));
  GradMap grads;
  grads["w"] = Tensor::scalar(1.0);
  AdamConfig cfg;
  cfg.lr = 0.1;
  adam_step(store, grads, cfg);
  // mhat = 1, vhat = 1 after bias correction: w = -0.1 / (1 + eps)
  CHECK(store.value("w")[0] == doctest::Approx(-0.1).epsilon(1e-6));
}

TEST_CASE("adam: repeated steps reduce a convex quadratic") {
  ParameterStore store;
  store.add("w", Tensor::scalar(1.0));
  AdamConfig cfg;
  cfg.lr = 0.01;
  auto loss_of = [](double w) { return (w - 0.2) * (w - 0.2); };
  double before = loss_of(store.value("w")[0]);
  for (int i = 0; i < 2; ++i) {
    double w = store.value("w")[0];
    GradMap grads;
    grads["w"] = Tensor::scalar(2.0 * (w - 0.2));
    adam_step(store, grads, cfg);
  }
  CHECK_LT(loss_of(store.value("w")[0]), before);
}

TEST_CASE("adam: frozen parameter is not touched") {
  ParameterStore store;
  store.add("w", Tensor::scalar(1.0), /*trainable=*/false);
  GradMap grads;
  grads["w"] = Tensor::scalar(5.0);
  adam_step(store, grads, AdamConfig{});
  CHECK(store.value("w")[0] == 1.0);
}

TEST_CASE("checkpoint round-trips bit-exactly") {
  ParameterStore store;
  std::mt19937_64 rng(42);
  store.add("gtn.alpha", semsyngtn_tests::rand_tensor(rng, {6, 5}, -1, 1));
  store.add("gcn.U1", semsyngtn_tests::rand_tensor(rng, {7, 3}, -1, 1));
  store.add("emb.word", semsyngtn_tests::rand_tensor(rng, {11, 4}, -1, 1), /*trainable=*/false);
  // Exercise values that stress text round-trips; raw bytes must survive.
  store.value("gcn.U1")[0] = 0.1 + 0.2;
  store.value("gcn.U1")[1] = 1e-300;
  std::string path = "/tmp/semsyngtn_test_ckpt.bin";
  save_checkpoint(path, store, R"({"seed":1})");
  Checkpoint loaded = load_checkpoint(path);
  CHECK(loaded.config_json == R"({"seed":1})");
  CHECK(loaded.store == store);
  CHECK_FALSE(loaded.store.entry("emb.word").trainable);
}

TEST_SUITE_END();
