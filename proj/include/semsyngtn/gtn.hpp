#ifndef SEMSYNGTN_GTN_HPP_
#define SEMSYNGTN_GTN_HPP_

#include <vector>

#include "semsyngtn/params.hpp"
#include "semsyngtn/tape.hpp"

namespace semsyngtn {

// Intermediate structure: convex combination Q = sum_v softmax(alpha_row)_v A_v.
// alpha_row is 1 x V of raw weights; structures are the V input matrices.
Var gtn_intermediate(const std::vector<Var>& structures, Var alpha_row);

// One channel: left-to-right product of M intermediates. alpha_rows is M x V.
Var gtn_channel(const std::vector<Var>& structures, Var alpha_rows);

// Eq-style GCN layer over one structure Q:
//   h_i = ReLU(U sum_j Q_ij h_j / max(sum_u Q_iu, 1e-8))
Var gcn_layer(Var q, Var h_prev, Var u);

// G layers of gcn_layer over Q with weights gcn.U1..gcn.U<G> (shared across
// channels); returns the last layer's states.
Var gcn_stack(Tape& tape, const ParameterStore& store, Var q, Var h, int layers);

// Per-token final vectors h'_i. The full model concatenates one GCN output
// per channel product; use_multihop=false skips the products and runs the GCN
// over each intermediate; use_gtn=false runs it over each initial structure.
struct GtnConfig {
  int channels = 3;
  int intermediates = 3;
  int gcn_layers = 2;
  bool use_gtn = true;
  bool use_multihop = true;
};
Var encode_with_gtn(Tape& tape, const ParameterStore& store, Var h,
                    const std::vector<Var>& structures, const GtnConfig& cfg);

// Two-layer head with softmax over roles (head.W1/b1/W2/b2).
Var predict_role(Tape& tape, const ParameterStore& store, Var rep);

// Negative log-likelihood of the gold role, with P clamped at 1e-12.
Var loss_pred(Var probs, int gold_role);

}  // namespace semsyngtn

#endif  // SEMSYNGTN_GTN_HPP_
