#ifndef SEMSYNGTN_MODEL_HPP_
#define SEMSYNGTN_MODEL_HPP_

#include <string>
#include <vector>

#include "semsyngtn/config.hpp"
#include "semsyngtn/corpus.hpp"
#include "semsyngtn/encoder.hpp"
#include "semsyngtn/params.hpp"
#include "semsyngtn/structures.hpp"
#include "semsyngtn/tape.hpp"

namespace semsyngtn {

// Derived widths for a config (after ablation switches).
struct ModelDims {
  int d_x = 0;              // distance blocks + word block
  int structure_count = 0;  // size of the active structure set (incl. I)
  int gcn_blocks = 0;       // GCN outputs concatenated into h'
  int h_prime_width = 0;
  int rep_width = 0;        // width of R
  int mi_source_dim = 0;
  int disc_input = 0;

  static ModelDims from(const TrainConfig& cfg, int d_w);
};

// Registers every trainable array the config needs (seeded from cfg.seed) and
// the frozen word table. Names follow the checkpoint convention (enc.*,
// str.*, gtn.alpha, gcn.U<t>, head.*, disc.*).
void init_parameters(ParameterStore& store, const TrainConfig& cfg, const EmbeddingTable& table,
                     int n_roles);

struct InstanceForward {
  Var probs;            // 1 x roles
  Var loss;             // 1 x 1 negative log-likelihood
  Var h_prime_summary;  // 1 x h'
  Var source_summary;   // 1 x mi_source_dim
  const Instance* instance = nullptr;
};

InstanceForward forward_instance(Tape& tape, const ParameterStore& store, const TrainConfig& cfg,
                                 const EmbeddingTable& table, const Instance& inst);

// Mean over the batch of L_pred + alpha_disc * L_disc, with rotation-paired
// negatives resolved inside the batch.
Var batch_loss(Tape& tape, const ParameterStore& store, const TrainConfig& cfg,
               const EmbeddingTable& table, const std::vector<Instance>& batch);

// Forward-only helpers for evaluation.
Tensor role_distribution(const ParameterStore& store, const TrainConfig& cfg,
                         const EmbeddingTable& table, const Instance& inst);
int predict_role_id(const ParameterStore& store, const TrainConfig& cfg,
                    const EmbeddingTable& table, const Instance& inst);

// The five validated structures for one instance (debug dump path). Requires
// the full structure parameters regardless of ablation switches.
StructureSet instance_structures(const ParameterStore& store, const TrainConfig& cfg,
                                 const EmbeddingTable& table, const Instance& inst);

}  // namespace semsyngtn

#endif  // SEMSYNGTN_MODEL_HPP_
