#include "semsyngtn/train.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "semsyngtn/rng.hpp"

namespace semsyngtn {

using nlohmann::json;

SplitCorpora split_corpus(const Corpus& corpus) {
  SplitCorpora out;
  out.train.roles = out.dev.roles = out.test.roles = corpus.roles;
  for (const Example& ex : corpus.examples) {
    std::uint64_t bucket = fnv1a64(ex.sentence_id) % 10;
    if (bucket < 8) {
      out.train.examples.push_back(ex);
    } else if (bucket == 8) {
      out.dev.examples.push_back(ex);
    } else {
      out.test.examples.push_back(ex);
    }
  }
  return out;
}

EmbeddingTable build_embedding_table(const TrainConfig& cfg,
                                     const std::vector<const Corpus*>& corpora) {
  if (!cfg.embeddings.empty()) return EmbeddingTable::load(cfg.embeddings);
  std::set<std::string> vocab;
  for (const Corpus* c : corpora) {
    for (const Example& ex : c->examples) vocab.insert(ex.tokens.begin(), ex.tokens.end());
  }
  return EmbeddingTable::random_for(std::vector<std::string>(vocab.begin(), vocab.end()),
                                    cfg.random_embeddings_dim, cfg.seed);
}

EvalReport score_predictions(const std::vector<Instance>& instances,
                             const std::vector<int>& predictions) {
  struct Counts {
    int gold = 0, pred = 0, correct = 0, total = 0;
  };
  Counts all, le10, gt10;
  for (size_t i = 0; i < instances.size(); ++i) {
    const Instance& inst = instances[i];
    int pred = predictions[i];
    bool hit = pred == inst.gold_role && inst.gold_role != RoleInventory::kNone;
    Counts& bucket = std::abs(inst.a - inst.e) <= 10 ? le10 : gt10;
    for (Counts* c : {&all, &bucket}) {
      c->total += 1;
      c->gold += inst.gold_role != RoleInventory::kNone;
      c->pred += pred != RoleInventory::kNone;
      c->correct += hit;
    }
  }
  auto prf = [](const Counts& c) {
    double p = c.pred > 0 ? 100.0 * c.correct / c.pred : 0.0;
    double r = c.gold > 0 ? 100.0 * c.correct / c.gold : 0.0;
    double f1 = p + r > 0 ? 2.0 * p * r / (p + r) : 0.0;
    return std::tuple{p, r, f1};
  };
  EvalReport report;
  std::tie(report.precision, report.recall, report.f1) = prf(all);
  report.gold_non_none = all.gold;
  report.predicted_non_none = all.pred;
  report.correct = all.correct;
  report.instances = all.total;
  report.le10 = {le10.total, std::get<2>(prf(le10)), le10.total > 0};
  report.gt10 = {gt10.total, std::get<2>(prf(gt10)), gt10.total > 0};
  return report;
}

namespace {

EvalReport evaluate_store(const ParameterStore& store, const TrainConfig& cfg,
                          const EmbeddingTable& table, const RoleInventory& roles,
                          const Corpus& corpus) {
  if (!(roles == corpus.roles)) {
    throw std::invalid_argument("evaluate: role inventory mismatch between checkpoint and corpus");
  }
  std::vector<Instance> instances = enumerate_instances(corpus);
  std::vector<int> predictions(instances.size());
  for (size_t i = 0; i < instances.size(); ++i) {
    predictions[i] = predict_role_id(store, cfg, table, instances[i]);
  }
  return score_predictions(instances, predictions);
}

}  // namespace

EvalReport evaluate(const TrainedModel& model, const Corpus& corpus) {
  return evaluate_store(model.store, model.config, model.table, model.roles, corpus);
}

double role_accuracy(const TrainedModel& model, const Corpus& corpus) {
  std::vector<Instance> instances = enumerate_instances(corpus);
  if (instances.empty()) return 0.0;
  int hits = 0;
  for (const Instance& inst : instances) {
    hits += predict_role_id(model.store, model.config, model.table, inst) == inst.gold_role;
  }
  return static_cast<double>(hits) / static_cast<double>(instances.size());
}

TrainOutput train(const TrainConfig& cfg, const Corpus& train_corpus, const Corpus& dev_corpus,
                  const EpochCallback& on_epoch) {
  cfg.validate();
  EmbeddingTable table = build_embedding_table(cfg, {&train_corpus, &dev_corpus});
  ParameterStore store;
  init_parameters(store, cfg, table, train_corpus.roles.size());

  TrainOutput out;
  out.model.config = cfg;
  out.model.table = table;
  out.model.roles = train_corpus.roles;
  out.model.store = store;  // initialization checkpoint until something improves
  out.best_epoch = 0;

  std::vector<Instance> instances = enumerate_instances(train_corpus);
  if (instances.empty() && cfg.epochs > 0) {
    throw std::invalid_argument("train: corpus yields no instances");
  }
  AdamConfig adam{cfg.lr, cfg.beta1, cfg.beta2, cfg.eps_adam};
  double best_f1 = -1.0;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::vector<int> order(instances.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::mt19937_64 rng = seeded_rng(cfg.seed, "shuffle", static_cast<std::uint64_t>(epoch));
    std::shuffle(order.begin(), order.end(), rng);

    double loss_sum = 0.0;
    for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
      size_t stop = std::min(order.size(), start + cfg.batch_size);
      std::vector<Instance> batch;
      batch.reserve(stop - start);
      for (size_t i = start; i < stop; ++i) batch.push_back(instances[order[i]]);
      try {
        Tape tape;
        Var loss = batch_loss(tape, store, cfg, table, batch);
        loss_sum += tape.value(loss)[0] * static_cast<double>(batch.size());
        tape.backward(loss);
        adam_step(store, tape.parameter_grads(), adam);
      } catch (const std::runtime_error& e) {
        throw std::runtime_error("train: epoch " + std::to_string(epoch) + ", batch " +
                                 std::to_string(start / cfg.batch_size) + ": " + e.what());
      }
    }

    EvalReport dev = evaluate_store(store, cfg, table, train_corpus.roles, dev_corpus);
    EpochMetrics m;
    m.epoch = epoch;
    m.precision = dev.precision;
    m.recall = dev.recall;
    m.f1 = dev.f1;
    m.loss = instances.empty() ? 0.0 : loss_sum / static_cast<double>(instances.size());
    out.history.push_back(m);
    if (dev.f1 > best_f1) {
      best_f1 = dev.f1;
      out.model.store = store;
      out.best_epoch = epoch;
    }
    if (on_epoch && on_epoch(m, store)) break;
  }
  return out;
}

TrainOutput train(const TrainConfig& cfg, const Corpus& corpus) {
  SplitCorpora split = split_corpus(corpus);
  return train(cfg, split.train, split.dev);
}

void save_model(const std::string& path, const TrainedModel& model) {
  json j;
  j["config"] = json::parse(model.config.to_json_string());
  j["vocab"] = model.table.vocab();
  j["roles"] = model.roles.names();
  save_checkpoint(path, model.store, j.dump());
}

TrainedModel load_model(const std::string& path) {
  Checkpoint ckpt = load_checkpoint(path);
  json j = json::parse(ckpt.config_json);
  TrainedModel model;
  model.config = TrainConfig::from_json_string(j.at("config").dump());
  model.roles = RoleInventory::from_names(j.at("roles").get<std::vector<std::string>>());
  model.table = EmbeddingTable(j.at("vocab").get<std::vector<std::string>>(),
                               ckpt.store.value("emb.word"));
  model.store = std::move(ckpt.store);
  return model;
}

std::vector<AblationRow> ablation_variants_table(const TrainConfig& base) {
  std::vector<AblationRow> rows;
  auto push = [&rows, &base](const std::string& name, auto&& tweak) {
    TrainConfig cfg = base;
    tweak(cfg);
    rows.push_back({name, cfg, {}});
  };
  push("full", [](TrainConfig&) {});
  push("-GTN", [](TrainConfig& c) { c.use_gtn = false; });
  push("-Multi-hop", [](TrainConfig& c) { c.use_multihop = false; });
  push("-SynCustom", [](TrainConfig& c) { c.use_syn_custom = false; });
  push("-SemCustom", [](TrainConfig& c) { c.use_sem_custom = false; });
  push("-IB", [](TrainConfig& c) { c.ib_enabled = false; });
  push("-IB+LSTMinR", [](TrainConfig& c) {
    c.ib_enabled = false;
    c.use_lstm_in_r = true;
  });
  push("-A_d", [](TrainConfig& c) { c.drop_structure = "A_d"; });
  push("-A_a", [](TrainConfig& c) { c.drop_structure = "A_a"; });
  push("-A_e", [](TrainConfig& c) { c.drop_structure = "A_e"; });
  push("-A_s", [](TrainConfig& c) { c.drop_structure = "A_s"; });
  push("MI=X", [](TrainConfig& c) { c.mi_source = "X"; });
  push("MI=E", [](TrainConfig& c) { c.mi_source = "E"; });
  return rows;
}

std::vector<AblationRow> ablate(const TrainConfig& base, const Corpus& train_corpus,
                                const Corpus& dev_corpus) {
  std::vector<AblationRow> rows = ablation_variants_table(base);
  for (AblationRow& row : rows) {
    TrainOutput out = train(row.config, train_corpus, dev_corpus);
    row.dev = evaluate(out.model, dev_corpus);
  }
  return rows;
}

GradCheckResult whole_model_grad_check(std::uint64_t seed) {
  TrainConfig cfg;
  cfg.seed = seed;
  cfg.d_dist = 3;
  cfg.clamp_radius = 4;
  cfg.d_len = 3;
  cfg.len_max = 6;
  cfg.d_h = 8;
  cfg.att_dim = 4;
  cfg.ff_hidden = 6;
  cfg.gcn_hidden = 6;
  cfg.gcn_layers = 2;
  cfg.channels = 2;
  cfg.intermediates = 2;
  cfg.head_hidden = 8;
  cfg.disc_hidden = 8;
  cfg.random_embeddings_dim = 5;

  Corpus corpus;
  Example first;
  first.tokens = {"ina", "saw", "rai", "near", "dove"};
  first.heads = {1, -1, 1, 2, 3};
  first.entities = {{0, 0, 0}, {4, 4, 4}};
  first.events = {{1, "EV0", {{0, "role0"}}}};
  first.sentence_id = "gc-a";
  Example second;
  second.tokens = {"dove", "fell", "by", "ina", "fast"};
  second.heads = {1, -1, 1, 2, 1};
  second.entities = {{3, 3, 3}};
  second.events = {{1, "EV1", {}}};
  second.sentence_id = "gc-b";
  corpus.examples = {first, second};
  corpus.roles = RoleInventory::from_observed({"role0"});
  for (const Example& ex : corpus.examples) validate_example(ex);

  EmbeddingTable table = build_embedding_table(cfg, {&corpus});
  ParameterStore store;
  init_parameters(store, cfg, table, corpus.roles.size());

  std::vector<Instance> instances = enumerate_instances(corpus);
  // One instance per sentence keeps both IB rotation partners active.
  std::vector<Instance> batch = {instances[0], instances[2]};
  return grad_check(
      [&](Tape& tape, const ParameterStore& s) {
        return batch_loss(tape, s, cfg, table, batch);
      },
      store);
}

namespace {

json bucket_json(const EvalBucket& b) {
  json j;
  j["count"] = b.count;
  if (b.defined) {
    j["f1"] = b.f1;
  } else {
    j["f1"] = nullptr;  // n/a: no instances in the bucket
  }
  return j;
}

json report_json(const EvalReport& r) {
  json j;
  j["P"] = r.precision;
  j["R"] = r.recall;
  j["F1"] = r.f1;
  j["gold_non_none"] = r.gold_non_none;
  j["predicted_non_none"] = r.predicted_non_none;
  j["correct"] = r.correct;
  j["instances"] = r.instances;
  j["buckets"] = {{"le10", bucket_json(r.le10)}, {"gt10", bucket_json(r.gt10)}};
  return j;
}

}  // namespace

std::string eval_report_json(const EvalReport& report) { return report_json(report).dump(2); }

std::string metrics_json(const TrainConfig& cfg, const std::vector<EpochMetrics>& history,
                         const EvalReport& test) {
  json j;
  j["config_hash"] = cfg.hash();
  j["history"] = json::array();
  for (const EpochMetrics& m : history) {
    j["history"].push_back(
        {{"epoch", m.epoch}, {"P", m.precision}, {"R", m.recall}, {"F1", m.f1}, {"loss", m.loss}});
  }
  j["test"] = {{"P", test.precision}, {"R", test.recall}, {"F1", test.f1}};
  j["buckets"] = {{"le10", bucket_json(test.le10)}, {"gt10", bucket_json(test.gt10)}};
  return j.dump(2);
}

std::string ablation_table_json(const std::vector<AblationRow>& rows) {
  json arr = json::array();
  for (const AblationRow& row : rows) {
    json j;
    j["name"] = row.name;
    j["config_hash"] = row.config.hash();
    j["dev"] = report_json(row.dev);
    arr.push_back(std::move(j));
  }
  return arr.dump(2);
}

}  // namespace semsyngtn
