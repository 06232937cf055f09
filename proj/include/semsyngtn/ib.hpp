#ifndef SEMSYNGTN_IB_HPP_
#define SEMSYNGTN_IB_HPP_

#include <string>
#include <vector>

#include "semsyngtn/params.hpp"
#include "semsyngtn/tape.hpp"

namespace semsyngtn {

// Sequence summary: elementwise max over the token axis.
Var summarize(Var sequence);

// Two-layer discriminator score D([left, right]) (disc.W1/b1/W2/b2, scalar
// output, no output nonlinearity).
Var discriminator_score(Tape& tape, const ParameterStore& store, Var left, Var right);

// Logistic MI-estimate loss:
//   log(1 + e^(1 - D([h', h]))) + log(1 + e^(D([h', h_hat])))
// h_neg is the summary of a different sentence from the same batch.
Var ib_loss(Tape& tape, const ParameterStore& store, Var h_prime, Var h_pos, Var h_neg);

// Rotation pairing inside a batch: partner of b is (b+1) mod B, skipped (-1)
// when the partner comes from the same sentence or when B == 1.
std::vector<int> negative_pairing(const std::vector<std::string>& sentence_ids);

// L = L_pred + alpha_disc * L_disc.
Var total_loss(Var l_pred, Var l_disc, double alpha_disc);

}  // namespace semsyngtn

#endif  // SEMSYNGTN_IB_HPP_
