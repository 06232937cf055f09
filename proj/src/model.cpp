#include "semsyngtn/model.hpp"

#include <algorithm>
#include <stdexcept>

#include "semsyngtn/gtn.hpp"
#include "semsyngtn/ib.hpp"
#include "semsyngtn/rng.hpp"
#include "semsyngtn/structures.hpp"

namespace semsyngtn {

namespace {

struct StructureFlags {
  bool dep, arg, trig, sem;
};

StructureFlags active_structures(const TrainConfig& cfg) {
  StructureFlags f;
  f.dep = cfg.drop_structure != "A_d";
  f.arg = cfg.use_syn_custom && cfg.drop_structure != "A_a";
  f.trig = cfg.use_syn_custom && cfg.drop_structure != "A_e";
  f.sem = cfg.drop_structure != "A_s";
  return f;
}

}  // namespace

ModelDims ModelDims::from(const TrainConfig& cfg, int d_w) {
  ModelDims d;
  d.d_x = d_w + 2 * cfg.d_dist;
  StructureFlags f = active_structures(cfg);
  d.structure_count = 1 + f.dep + f.arg + f.trig + f.sem;  // identity always present
  if (cfg.use_gtn) {
    d.gcn_blocks = cfg.use_multihop ? cfg.channels : cfg.channels * cfg.intermediates;
  } else {
    d.gcn_blocks = d.structure_count;
  }
  d.h_prime_width = d.gcn_blocks * cfg.gcn_hidden;
  d.rep_width = 3 * d.h_prime_width + (cfg.use_lstm_in_r ? 3 * cfg.d_h : 0);
  d.mi_source_dim = cfg.mi_source == "H" ? cfg.d_h : (cfg.mi_source == "X" ? d.d_x : d_w);
  d.disc_input = d.h_prime_width + d.mi_source_dim;
  return d;
}

void init_parameters(ParameterStore& store, const TrainConfig& cfg, const EmbeddingTable& table,
                     int n_roles) {
  cfg.validate();
  const int d_w = table.dim();
  const ModelDims dims = ModelDims::from(cfg, d_w);
  const std::uint64_t seed = cfg.seed;

  auto gauss = [&](const std::string& name, std::vector<int> shape) {
    std::mt19937_64 rng = seeded_rng(seed, name);
    store.add(name, gaussian_tensor(std::move(shape), 0.1, rng));
  };
  auto xavier = [&](const std::string& name, int rows, int cols) {
    std::mt19937_64 rng = seeded_rng(seed, name);
    store.add(name, xavier_uniform(rows, cols, rng));
  };
  auto zeros = [&](const std::string& name, std::vector<int> shape) {
    store.add(name, Tensor(std::move(shape)));
  };

  store.add("emb.word", table.matrix(), /*trainable=*/false);
  gauss("enc.dist_cand", {2 * cfg.clamp_radius + 1, cfg.d_dist});
  gauss("enc.dist_trig", {2 * cfg.clamp_radius + 1, cfg.d_dist});
  add_lstm_params(store, "enc.lstm_fwd", dims.d_x, cfg.d_h / 2, seed);
  add_lstm_params(store, "enc.lstm_bwd", dims.d_x, cfg.d_h / 2, seed);

  StructureFlags f = active_structures(cfg);
  if (f.arg || f.trig) gauss("str.len_table", {cfg.len_max + 1, cfg.d_len});
  if (f.arg) {
    xavier("str.ffa.W1", cfg.ff_hidden, 5 * cfg.d_len);
    zeros("str.ffa.b1", {1, cfg.ff_hidden});
    xavier("str.ffa.W2", 1, cfg.ff_hidden);
    zeros("str.ffa.b2", {1, 1});
  }
  if (f.trig) {
    xavier("str.ffe.W1", cfg.ff_hidden, 5 * cfg.d_len);
    zeros("str.ffe.b1", {1, cfg.ff_hidden});
    xavier("str.ffe.W2", 1, cfg.ff_hidden);
    zeros("str.ffe.b2", {1, 1});
  }
  if (f.sem) {
    xavier("str.Uk", cfg.att_dim, cfg.d_h);
    xavier("str.Uq", cfg.att_dim, cfg.d_h);
    if (cfg.use_sem_custom) {
      xavier("str.Vk", cfg.att_dim, 2 * cfg.d_h);
      xavier("str.Vq", cfg.att_dim, 2 * cfg.d_h);
    }
  }

  if (cfg.use_gtn) {
    xavier("gtn.alpha", cfg.channels * cfg.intermediates, dims.structure_count);
  }
  for (int t = 1; t <= cfg.gcn_layers; ++t) {
    xavier("gcn.U" + std::to_string(t), cfg.gcn_hidden, t == 1 ? cfg.d_h : cfg.gcn_hidden);
  }

  xavier("head.W1", cfg.head_hidden, dims.rep_width);
  zeros("head.b1", {1, cfg.head_hidden});
  xavier("head.W2", n_roles, cfg.head_hidden);
  zeros("head.b2", {1, n_roles});

  if (cfg.ib_enabled) {
    xavier("disc.W1", cfg.disc_hidden, dims.disc_input);
    zeros("disc.b1", {1, cfg.disc_hidden});
    xavier("disc.W2", 1, cfg.disc_hidden);
    zeros("disc.b2", {1, 1});
  }
}

InstanceForward forward_instance(Tape& tape, const ParameterStore& store, const TrainConfig& cfg,
                                 const EmbeddingTable& table, const Instance& inst) {
  const Example& ex = *inst.example;
  const int n = ex.size();
  const int a = inst.a;
  const int e = inst.e;

  Var x = embed_tokens(tape, store, table, ex.tokens, a, e, cfg.clamp_radius);
  Var h = bilstm_encode(tape, store, x, cfg.d_h);

  StructureFlags f = active_structures(cfg);
  std::vector<Var> structures;
  if (f.dep) structures.push_back(tape.constant(dep_adjacency(ex.heads)));
  if (f.arg) {
    structures.push_back(
        anchor_syntax_structure(tape, store, "str.ffa", dep_path_lengths(ex.heads, a), cfg.len_max));
  }
  if (f.trig) {
    structures.push_back(
        anchor_syntax_structure(tape, store, "str.ffe", dep_path_lengths(ex.heads, e), cfg.len_max));
  }
  if (f.sem) {
    structures.push_back(cfg.use_sem_custom ? semantic_structure_customized(tape, store, h, a, e)
                                            : semantic_structure_plain(tape, store, h));
  }
  structures.push_back(tape.constant(Tensor::identity(n)));

  GtnConfig gtn_cfg;
  gtn_cfg.channels = cfg.channels;
  gtn_cfg.intermediates = cfg.intermediates;
  gtn_cfg.gcn_layers = cfg.gcn_layers;
  gtn_cfg.use_gtn = cfg.use_gtn;
  gtn_cfg.use_multihop = cfg.use_multihop;
  Var h_prime = encode_with_gtn(tape, store, h, structures, gtn_cfg);

  Var pooled = maxpool_rows(h_prime);
  std::vector<Var> rep_parts;
  if (cfg.use_lstm_in_r) {
    rep_parts = {row(h, a), row(h, e), maxpool_rows(h), row(h_prime, a), row(h_prime, e), pooled};
  } else {
    rep_parts = {row(h_prime, a), row(h_prime, e), pooled};
  }
  Var rep = concat(rep_parts, 1);

  InstanceForward out;
  out.instance = &inst;
  out.probs = predict_role(tape, store, rep);
  out.loss = loss_pred(out.probs, inst.gold_role);
  out.h_prime_summary = pooled;
  Var source = cfg.mi_source == "H" ? h
               : cfg.mi_source == "X" ? x
                                      : lookup_words(tape, store, table, ex.tokens);
  out.source_summary = summarize(source);
  return out;
}

Var batch_loss(Tape& tape, const ParameterStore& store, const TrainConfig& cfg,
               const EmbeddingTable& table, const std::vector<Instance>& batch) {
  if (batch.empty()) throw std::invalid_argument("batch_loss: empty batch");
  std::vector<InstanceForward> fwd;
  std::vector<std::string> sentence_ids;
  fwd.reserve(batch.size());
  for (const Instance& inst : batch) {
    fwd.push_back(forward_instance(tape, store, cfg, table, inst));
    sentence_ids.push_back(inst.example->sentence_id);
  }
  Var total = fwd[0].loss;
  for (size_t b = 1; b < fwd.size(); ++b) total = add(total, fwd[b].loss);
  if (cfg.ib_enabled) {
    std::vector<int> partners = negative_pairing(sentence_ids);
    for (size_t b = 0; b < fwd.size(); ++b) {
      if (partners[b] < 0) continue;  // B=1 or same-sentence partner: zero IB term
      Var disc = ib_loss(tape, store, fwd[b].h_prime_summary, fwd[b].source_summary,
                         fwd[partners[b]].source_summary);
      total = add(total, mul_const(disc, cfg.alpha_disc));
    }
  }
  return mul_const(total, 1.0 / static_cast<double>(batch.size()));
}

Tensor role_distribution(const ParameterStore& store, const TrainConfig& cfg,
                         const EmbeddingTable& table, const Instance& inst) {
  Tape tape;
  InstanceForward fwd = forward_instance(tape, store, cfg, table, inst);
  return tape.value(fwd.probs);
}

int predict_role_id(const ParameterStore& store, const TrainConfig& cfg,
                    const EmbeddingTable& table, const Instance& inst) {
  Tensor probs = role_distribution(store, cfg, table, inst);
  int best = 0;
  for (int r = 1; r < probs.cols(); ++r) {
    if (probs.at(0, r) > probs.at(0, best)) best = r;  // ties keep the lower id
  }
  return best;
}

StructureSet instance_structures(const ParameterStore& store, const TrainConfig& cfg,
                                 const EmbeddingTable& table, const Instance& inst) {
  const Example& ex = *inst.example;
  Tape tape;
  Var x = embed_tokens(tape, store, table, ex.tokens, inst.a, inst.e, cfg.clamp_radius);
  Var h = bilstm_encode(tape, store, x, cfg.d_h);
  Tensor a_dep = dep_adjacency(ex.heads);
  Var a_arg = anchor_syntax_structure(tape, store, "str.ffa",
                                      dep_path_lengths(ex.heads, inst.a), cfg.len_max);
  Var a_trig = anchor_syntax_structure(tape, store, "str.ffe",
                                       dep_path_lengths(ex.heads, inst.e), cfg.len_max);
  Var a_sem = cfg.use_sem_custom ? semantic_structure_customized(tape, store, h, inst.a, inst.e)
                                 : semantic_structure_plain(tape, store, h);
  return build_structure_set(std::move(a_dep), tape.value(a_arg), tape.value(a_trig),
                             tape.value(a_sem), ex.size());
}

}  // namespace semsyngtn
