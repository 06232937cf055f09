#ifndef SEMSYNGTN_TRAIN_HPP_
#define SEMSYNGTN_TRAIN_HPP_

#include <string>
#include <vector>

#include "semsyngtn/config.hpp"
#include "semsyngtn/corpus.hpp"
#include "semsyngtn/encoder.hpp"
#include "semsyngtn/grad_check.hpp"
#include "semsyngtn/model.hpp"
#include "semsyngtn/params.hpp"

namespace semsyngtn {

struct EvalBucket {
  int count = 0;
  double f1 = 0.0;
  bool defined = false;  // false = no instances in the bucket (n/a)
};

// Micro P/R/F1 in percent. With gold triggers and entities as inputs, a
// prediction is correct iff the predicted role equals a non-None gold role;
// subtype/offset matching of full-pipeline ACE scoring reduces to this.
struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  int gold_non_none = 0;
  int predicted_non_none = 0;
  int correct = 0;
  int instances = 0;
  EvalBucket le10, gt10;  // split by #bw = |a - e|
};

struct EpochMetrics {
  int epoch = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double loss = 0.0;  // mean training loss over the epoch
};

// Everything needed to run the model: the checkpoint in memory.
struct TrainedModel {
  TrainConfig config;
  ParameterStore store;
  EmbeddingTable table;
  RoleInventory roles;
};

struct TrainOutput {
  TrainedModel model;  // parameters of the best dev-F1 epoch
  std::vector<EpochMetrics> history;
  int best_epoch = 0;  // 0 = initialization (epochs == 0 or nothing improved)
};

// Deterministic 80/10/10 split by sentence-id hash.
struct SplitCorpora {
  Corpus train, dev, test;
};
SplitCorpora split_corpus(const Corpus& corpus);

// Pretrained table from cfg.embeddings, or deterministic random vectors over
// the corpora vocabulary when the path is empty.
EmbeddingTable build_embedding_table(const TrainConfig& cfg,
                                     const std::vector<const Corpus*>& corpora);

// Observes each finished epoch (current parameters included); returning true
// stops training early. Pass nullptr for the full epoch budget.
using EpochCallback =
    std::function<bool(const EpochMetrics& metrics, const ParameterStore& current)>;

TrainOutput train(const TrainConfig& cfg, const Corpus& train_corpus, const Corpus& dev_corpus,
                  const EpochCallback& on_epoch = nullptr);
// Splits `corpus` by hash and trains on the train part.
TrainOutput train(const TrainConfig& cfg, const Corpus& corpus);

EvalReport evaluate(const TrainedModel& model, const Corpus& corpus);
// Fraction of instances whose argmax role equals gold (None included).
double role_accuracy(const TrainedModel& model, const Corpus& corpus);
// Scores a fixed prediction vector; evaluate() = predict_role_id + this.
EvalReport score_predictions(const std::vector<Instance>& instances,
                             const std::vector<int>& predictions);

void save_model(const std::string& path, const TrainedModel& model);
TrainedModel load_model(const std::string& path);

// The 13-row ablation matrix (full model + 12 single-switch variants), every
// row trained with the base seed and scored on the dev corpus.
struct AblationRow {
  std::string name;
  TrainConfig config;
  EvalReport dev;
};
std::vector<AblationRow> ablation_variants_table(const TrainConfig& base);  // configs only
std::vector<AblationRow> ablate(const TrainConfig& base, const Corpus& train_corpus,
                                const Corpus& dev_corpus);

// Whole-model gradient check: full loss (structures, GTN, GCN, head, L_disc)
// over a two-instance batch of 5-token sentences with every width <= 8.
GradCheckResult whole_model_grad_check(std::uint64_t seed);

// JSON renderers for the CLI.
std::string eval_report_json(const EvalReport& report);
std::string metrics_json(const TrainConfig& cfg, const std::vector<EpochMetrics>& history,
                         const EvalReport& test);
std::string ablation_table_json(const std::vector<AblationRow>& rows);

}  // namespace semsyngtn

#endif  // SEMSYNGTN_TRAIN_HPP_
