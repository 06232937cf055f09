#include "semsyngtn/ib.hpp"

namespace semsyngtn {

Var summarize(Var sequence) { return maxpool_rows(sequence); }

Var discriminator_score(Tape& tape, const ParameterStore& store, Var left, Var right) {
  Var pair = concat({left, right}, 1);
  Var hidden = relu(add_row_broadcast(matmul(pair, transpose(store.on(tape, "disc.W1"))),
                                      store.on(tape, "disc.b1")));
  return add_row_broadcast(matmul(hidden, transpose(store.on(tape, "disc.W2"))),
                           store.on(tape, "disc.b2"));
}

Var ib_loss(Tape& tape, const ParameterStore& store, Var h_prime, Var h_pos, Var h_neg) {
  Var d_pos = discriminator_score(tape, store, h_prime, h_pos);
  Var d_neg = discriminator_score(tape, store, h_prime, h_neg);
  Var pos_term = softplus(add_const(mul_const(d_pos, -1.0), 1.0));  // log(1 + e^(1 - D))
  Var neg_term = softplus(d_neg);                                   // log(1 + e^(D))
  return add(pos_term, neg_term);
}

std::vector<int> negative_pairing(const std::vector<std::string>& sentence_ids) {
  int b = static_cast<int>(sentence_ids.size());
  std::vector<int> partners(b, -1);
  if (b <= 1) return partners;
  for (int i = 0; i < b; ++i) {
    int j = (i + 1) % b;
    if (sentence_ids[i] != sentence_ids[j]) partners[i] = j;
  }
  return partners;
}

Var total_loss(Var l_pred, Var l_disc, double alpha_disc) {
  return add(l_pred, mul_const(l_disc, alpha_disc));
}

}  // namespace semsyngtn
