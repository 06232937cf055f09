// Command-line front end: data generation, training, evaluation, the ablation
// matrix, gradient checking and structure dumps.
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "semsyngtn/config.hpp"
#include "semsyngtn/corpus.hpp"
#include "semsyngtn/model.hpp"
#include "semsyngtn/synthetic.hpp"
#include "semsyngtn/train.hpp"

namespace {

using namespace semsyngtn;
using nlohmann::json;

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << std::endl;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text << "\n";
}

TrainConfig config_from_flags(const std::string& config_path,
                              const std::vector<std::string>& overrides) {
  TrainConfig cfg = config_path.empty() ? TrainConfig{} : TrainConfig::from_file(config_path);
  for (const std::string& kv : overrides) {
    size_t eq = kv.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("--set expects key=value, got \"" + kv + "\"");
    }
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

struct LoadedData {
  Corpus train, dev, test;
  bool has_test = false;
};

LoadedData load_train_dev(const TrainConfig& cfg) {
  if (cfg.corpus.empty()) throw std::invalid_argument("config: corpus path is required");
  LoadedData data;
  Corpus full = load_corpus(cfg.corpus);
  if (!cfg.dev_corpus.empty()) {
    data.train = std::move(full);
    data.dev = load_corpus(cfg.dev_corpus);
  } else {
    SplitCorpora split = split_corpus(full);
    data.train = std::move(split.train);
    data.dev = std::move(split.dev);
    data.test = std::move(split.test);
    data.has_test = true;
  }
  return data;
}

json structure_json(const Tensor& t) {
  json rows = json::array();
  for (int i = 0; i < t.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < t.cols(); ++j) row.push_back(t.at(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

int run(int argc, char** argv) {
  CLI::App app{"SemSynGTN event-argument extraction"};
  app.require_subcommand(1);

  std::string config_path, out_path, ckpt_path, corpus_path, params_path;
  std::vector<std::string> overrides;

  auto* gen = app.add_subcommand("gen-data", "generate a synthetic corpus");
  std::uint64_t gen_seed = 1;
  int gen_n = 100;
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--n", gen_n, "number of sentences")->required();
  gen->add_option("--out", out_path, "output JSONL path")->required();
  gen->add_option("--params", params_path, "generator params JSON");

  auto* tr = app.add_subcommand("train", "train a model");
  tr->add_option("--config", config_path, "config file");
  tr->add_option("--set", overrides, "key=value override (repeatable)");
  tr->add_option("--out", out_path, "metrics JSON path (- for stdout)");

  auto* ev = app.add_subcommand("eval", "evaluate a checkpoint");
  ev->add_option("--ckpt", ckpt_path, "checkpoint path")->required();
  ev->add_option("--corpus", corpus_path, "corpus JSONL path")->required();
  ev->add_option("--out", out_path, "report JSON path (- for stdout)");

  auto* ab = app.add_subcommand("ablate", "run the 13-variant ablation matrix");
  ab->add_option("--config", config_path, "config file");
  ab->add_option("--set", overrides, "key=value override (repeatable)");
  ab->add_option("--out", out_path, "table JSON path (- for stdout)");

  auto* gc = app.add_subcommand("grad-check", "whole-model gradient check");
  std::uint64_t gc_seed = 2;
  gc->add_option("--seed", gc_seed, "seed for the check instance");

  auto* ds = app.add_subcommand("dump-structures", "write per-instance structures as JSON");
  int ds_limit = 10;
  ds->add_option("--config", config_path, "config file");
  ds->add_option("--set", overrides, "key=value override (repeatable)");
  ds->add_option("--ckpt", ckpt_path, "checkpoint (default: fresh init)");
  ds->add_option("--corpus", corpus_path, "corpus (default: config corpus)");
  ds->add_option("--limit", ds_limit, "max instances to dump");
  ds->add_option("--out", out_path, "output JSON path (- for stdout)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // exit 0
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << std::endl;
    return 1;
  }

  if (gen->parsed()) {
    SyntheticParams params =
        params_path.empty() ? SyntheticParams{} : SyntheticParams::from_json_file(params_path);
    Corpus corpus = generate_synthetic_corpus(gen_seed, gen_n, params);
    save_corpus(corpus, out_path);
    std::cerr << "wrote " << corpus.examples.size() << " sentences to " << out_path << std::endl;
    return 0;
  }

  if (tr->parsed()) {
    TrainConfig cfg = config_from_flags(config_path, overrides);
    LoadedData data = load_train_dev(cfg);
    TrainOutput out = train(cfg, data.train, data.dev);
    if (!cfg.checkpoint.empty()) save_model(cfg.checkpoint, out.model);
    EvalReport test = evaluate(out.model, data.has_test ? data.test : data.dev);
    write_text(out_path, metrics_json(cfg, out.history, test));
    std::cerr << "best epoch " << out.best_epoch << ", test F1 " << test.f1 << std::endl;
    return 0;
  }

  if (ev->parsed()) {
    TrainedModel model = load_model(ckpt_path);
    Corpus corpus = load_corpus(corpus_path);
    write_text(out_path, eval_report_json(evaluate(model, corpus)));
    return 0;
  }

  if (ab->parsed()) {
    TrainConfig cfg = config_from_flags(config_path, overrides);
    LoadedData data = load_train_dev(cfg);
    std::vector<AblationRow> rows = ablate(cfg, data.train, data.dev);
    write_text(out_path, ablation_table_json(rows));
    return 0;
  }

  if (gc->parsed()) {
    GradCheckResult result = whole_model_grad_check(gc_seed);
    std::cout << "max relative error: " << result.max_rel_error << " (parameter "
              << result.worst_param << ", entry " << result.worst_index << ")" << std::endl;
    return result.max_rel_error < 1e-3 ? 0 : 2;
  }

  if (ds->parsed()) {
    TrainConfig cfg = config_from_flags(config_path, overrides);
    Corpus corpus = load_corpus(corpus_path.empty() ? cfg.corpus : corpus_path);
    TrainedModel model;
    if (!ckpt_path.empty()) {
      model = load_model(ckpt_path);
    } else {
      model.config = cfg;
      model.roles = corpus.roles;
      model.table = build_embedding_table(cfg, {&corpus});
      init_parameters(model.store, cfg, model.table, corpus.roles.size());
    }
    json dump = json::array();
    std::vector<Instance> instances = enumerate_instances(corpus);
    for (size_t i = 0; i < instances.size() && static_cast<int>(i) < ds_limit; ++i) {
      StructureSet set = instance_structures(model.store, model.config, model.table, instances[i]);
      json j;
      j["sentence_id"] = instances[i].example->sentence_id;
      j["a"] = instances[i].a;
      j["e"] = instances[i].e;
      j["A_d"] = structure_json(set.a_dep);
      j["A_a"] = structure_json(set.a_arg);
      j["A_e"] = structure_json(set.a_trig);
      j["A_s"] = structure_json(set.a_sem);
      j["I"] = structure_json(set.identity);
      dump.push_back(std::move(j));
    }
    write_text(out_path, dump.dump(2));
    return 0;
  }

  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  }
}
