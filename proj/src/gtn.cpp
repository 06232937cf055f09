#include "semsyngtn/gtn.hpp"

#include <stdexcept>
#include <string>

namespace semsyngtn {

Var gtn_intermediate(const std::vector<Var>& structures, Var alpha_row) {
  if (structures.empty()) throw std::invalid_argument("gtn_intermediate: no structures");
  Tape& tape = *alpha_row.tape;
  const Tensor& raw = tape.value(alpha_row);
  if (raw.rank() != 2 || raw.rows() != 1 ||
      raw.cols() != static_cast<int>(structures.size())) {
    throw std::invalid_argument("gtn_intermediate: weight row " + raw.shape_str() +
                                " does not match " + std::to_string(structures.size()) +
                                " structures");
  }
  Var weights = softmax(alpha_row, 1);
  Var q = scale_by(structures[0], slice_cols(weights, 0, 1));
  for (size_t v = 1; v < structures.size(); ++v) {
    int c = static_cast<int>(v);
    q = add(q, scale_by(structures[v], slice_cols(weights, c, c + 1)));
  }
  return q;
}

Var gtn_channel(const std::vector<Var>& structures, Var alpha_rows) {
  Tape& tape = *alpha_rows.tape;
  int m = tape.value(alpha_rows).rows();
  if (m < 1) throw std::invalid_argument("gtn_channel: need at least one intermediate");
  Var q = gtn_intermediate(structures, row(alpha_rows, 0));
  for (int j = 1; j < m; ++j) {
    q = matmul(q, gtn_intermediate(structures, row(alpha_rows, j)));
  }
  return q;
}

Var gcn_layer(Var q, Var h_prev, Var u) {
  Var denom = clamp_min(row_sum(q), 1e-8);
  Var aggregated = matmul(div_col_broadcast(q, denom), h_prev);
  return relu(matmul(aggregated, transpose(u)));
}

Var gcn_stack(Tape& tape, const ParameterStore& store, Var q, Var h, int layers) {
  Var state = h;
  for (int t = 1; t <= layers; ++t) {
    state = gcn_layer(q, state, store.on(tape, "gcn.U" + std::to_string(t)));
  }
  return state;
}

Var encode_with_gtn(Tape& tape, const ParameterStore& store, Var h,
                    const std::vector<Var>& structures, const GtnConfig& cfg) {
  std::vector<Var> blocks;
  if (!cfg.use_gtn) {
    for (Var s : structures) blocks.push_back(gcn_stack(tape, store, s, h, cfg.gcn_layers));
  } else {
    Var alpha = store.on(tape, "gtn.alpha");  // (C*M) x V
    for (int c = 0; c < cfg.channels; ++c) {
      Var rows = slice_rows(alpha, c * cfg.intermediates, (c + 1) * cfg.intermediates);
      if (cfg.use_multihop) {
        Var q = gtn_channel(structures, rows);
        blocks.push_back(gcn_stack(tape, store, q, h, cfg.gcn_layers));
      } else {
        for (int j = 0; j < cfg.intermediates; ++j) {
          Var q = gtn_intermediate(structures, row(rows, j));
          blocks.push_back(gcn_stack(tape, store, q, h, cfg.gcn_layers));
        }
      }
    }
  }
  return blocks.size() == 1 ? blocks[0] : concat(blocks, 1);
}

Var predict_role(Tape& tape, const ParameterStore& store, Var rep) {
  Var hidden = relu(add_row_broadcast(matmul(rep, transpose(store.on(tape, "head.W1"))),
                                      store.on(tape, "head.b1")));
  Var logits = add_row_broadcast(matmul(hidden, transpose(store.on(tape, "head.W2"))),
                                 store.on(tape, "head.b2"));
  return softmax(logits, 1);
}

Var loss_pred(Var probs, int gold_role) {
  Tape& tape = *probs.tape;
  const Tensor& p = tape.value(probs);
  if (p.rank() != 2 || p.rows() != 1) {
    throw std::invalid_argument("loss_pred: expected a 1 x roles distribution, got " +
                                p.shape_str());
  }
  if (gold_role < 0 || gold_role >= p.cols()) {
    throw std::invalid_argument("loss_pred: gold role " + std::to_string(gold_role) +
                                " out of range for " + p.shape_str());
  }
  Var picked = clamp_min(slice_cols(probs, gold_role, gold_role + 1), 1e-12);
  return mul_const(log_op(picked), -1.0);
}

}  // namespace semsyngtn
