#include "semsyngtn/synthetic.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "semsyngtn/rng.hpp"

namespace semsyngtn {

using nlohmann::json;

void SyntheticParams::validate() const {
  if (min_len < 2 || max_len < min_len) throw std::invalid_argument("synthetic: bad length range");
  if (min_entities < 2 || max_entities < min_entities) {
    throw std::invalid_argument("synthetic: entity count range must start at 2");
  }
  if (max_entities > 5) throw std::invalid_argument("synthetic: at most 5 entities per sentence");
  // trigger + entities + one decoy per distractor + at least one filler
  if (min_len < 2 * max_entities + 1) {
    throw std::invalid_argument("synthetic: min_len too small for max_entities");
  }
  if (n_trigger_families < 1) throw std::invalid_argument("synthetic: need trigger families");
  if (n_signature_groups < 2) throw std::invalid_argument("synthetic: need >= 2 signature groups");
  if (forms_per_group < 2) {
    throw std::invalid_argument("synthetic: paraphrase vocabulary needs >= 2 forms per group");
  }
  if (n_filler_words < 1) throw std::invalid_argument("synthetic: need filler vocabulary");
  if (positive_rate < 0.0 || decoy_rate < 0.0 || decoy_rate > 1.0) {
    throw std::invalid_argument("synthetic: rates out of range");
  }
  if (plant_probability() > 1.0) {
    throw std::invalid_argument("synthetic: positive_rate unreachable for this entity range");
  }
}

double SyntheticParams::plant_probability() const {
  double mean_entities = 0.5 * (min_entities + max_entities);
  return positive_rate * mean_entities / (mean_entities - 1.0);
}

SyntheticParams SyntheticParams::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read generator params " + path);
  json j = json::parse(in);
  SyntheticParams p;
  const std::map<std::string, std::function<void(const json&)>> fields = {
      {"min_len", [&](const json& v) { p.min_len = v.get<int>(); }},
      {"max_len", [&](const json& v) { p.max_len = v.get<int>(); }},
      {"min_entities", [&](const json& v) { p.min_entities = v.get<int>(); }},
      {"max_entities", [&](const json& v) { p.max_entities = v.get<int>(); }},
      {"n_trigger_families", [&](const json& v) { p.n_trigger_families = v.get<int>(); }},
      {"n_signature_groups", [&](const json& v) { p.n_signature_groups = v.get<int>(); }},
      {"forms_per_group", [&](const json& v) { p.forms_per_group = v.get<int>(); }},
      {"n_filler_words", [&](const json& v) { p.n_filler_words = v.get<int>(); }},
      {"positive_rate", [&](const json& v) { p.positive_rate = v.get<double>(); }},
      {"decoy_rate", [&](const json& v) { p.decoy_rate = v.get<double>(); }},
  };
  for (const auto& [key, value] : j.items()) {
    auto it = fields.find(key);
    if (it == fields.end()) throw std::invalid_argument("synthetic: unknown params key " + key);
    it->second(value);
  }
  p.validate();
  return p;
}

namespace {

struct TokenPlan {
  enum Kind { kTrigger, kBridge, kEntity, kDecoy, kFiller } kind = kFiller;
  std::string word;
  bool positive = false;  // entities only
};

Example generate_sentence(std::uint64_t seed, int index, const SyntheticParams& p) {
  std::mt19937_64 rng = seeded_rng(seed, "synthetic-sentence", static_cast<std::uint64_t>(index));
  auto uniform = [&rng](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };

  int n = uniform(p.min_len, p.max_len);
  int n_entities = uniform(p.min_entities, p.max_entities);
  int family = uniform(0, p.n_trigger_families - 1);
  int group = uniform(0, p.n_signature_groups - 1);
  double plant_p = p.plant_probability();
  std::bernoulli_distribution plant(std::min(plant_p, 1.0));
  std::bernoulli_distribution decoy(p.decoy_rate);

  auto signature_word = [&](int g) {
    return "s" + std::to_string(g) + "f" + std::to_string(uniform(0, p.forms_per_group - 1));
  };

  std::vector<int> slots(n);
  for (int i = 0; i < n; ++i) slots[i] = i;
  std::shuffle(slots.begin(), slots.end(), rng);
  size_t next_slot = 0;
  auto take_slot = [&]() { return slots.at(next_slot++); };

  std::vector<TokenPlan> plan(n);
  int trigger_pos = take_slot();
  plan[trigger_pos] = {TokenPlan::kTrigger, "ev" + std::to_string(family), false};

  std::vector<int> entity_positions;
  for (int k = 0; k < n_entities; ++k) entity_positions.push_back(take_slot());
  int bridge_pos = entity_positions[uniform(0, n_entities - 1)];
  plan[bridge_pos] = {TokenPlan::kBridge, signature_word(group), false};

  for (int pos : entity_positions) {
    if (pos == bridge_pos) continue;
    if (plant(rng)) {
      plan[pos] = {TokenPlan::kEntity, signature_word(group), true};
    } else {
      int other = uniform(0, p.n_signature_groups - 2);
      if (other >= group) ++other;
      plan[pos] = {TokenPlan::kEntity, signature_word(other), false};
      if (decoy(rng)) {
        int decoy_pos = take_slot();
        plan[decoy_pos] = {TokenPlan::kDecoy, signature_word(other), false};
      }
    }
  }
  while (next_slot < slots.size()) {
    int pos = take_slot();
    plan[pos] = {TokenPlan::kFiller, "w" + std::to_string(uniform(0, p.n_filler_words - 1)), false};
  }

  // Random tree rooted at the trigger. The bridge is the designated trigger
  // neighbour; entities and decoys may not attach to the trigger or bridge,
  // so the bridge's signature is the only one reachable in one tree hop.
  std::vector<int> heads(n, -2);
  heads[trigger_pos] = -1;
  heads[bridge_pos] = trigger_pos;
  std::vector<int> attached{trigger_pos, bridge_pos};
  std::vector<int> fillers, constrained;
  for (int i = 0; i < n; ++i) {
    if (plan[i].kind == TokenPlan::kFiller) fillers.push_back(i);
    if (plan[i].kind == TokenPlan::kEntity || plan[i].kind == TokenPlan::kDecoy) {
      constrained.push_back(i);
    }
  }
  std::shuffle(fillers.begin(), fillers.end(), rng);
  std::shuffle(constrained.begin(), constrained.end(), rng);
  for (int pos : fillers) {
    heads[pos] = attached[uniform(0, static_cast<int>(attached.size()) - 1)];
    attached.push_back(pos);
  }
  for (int pos : constrained) {
    std::vector<int> allowed;
    for (int cand : attached) {
      if (cand != trigger_pos && cand != bridge_pos) allowed.push_back(cand);
    }
    heads[pos] = allowed[uniform(0, static_cast<int>(allowed.size()) - 1)];
    attached.push_back(pos);
  }

  Example ex;
  ex.sentence_id = "syn" + std::to_string(seed) + "-" + std::to_string(index);
  for (int i = 0; i < n; ++i) ex.tokens.push_back(plan[i].word);
  ex.heads = heads;

  std::sort(entity_positions.begin(), entity_positions.end());
  EventMention event;
  event.trigger_index = trigger_pos;
  event.subtype = "EV" + std::to_string(family);
  for (size_t m = 0; m < entity_positions.size(); ++m) {
    int pos = entity_positions[m];
    ex.entities.push_back({pos, pos, pos});
    if (plan[pos].positive) {
      event.arguments.push_back({static_cast<int>(m), "role" + std::to_string(family)});
    }
  }
  ex.events.push_back(std::move(event));
  return ex;
}

}  // namespace

Corpus generate_synthetic_corpus(std::uint64_t seed, int n_sentences,
                                 const SyntheticParams& params) {
  if (n_sentences < 1) throw std::invalid_argument("synthetic: n_sentences must be >= 1");
  params.validate();
  Corpus corpus;
  std::vector<std::string> observed;
  for (int i = 0; i < n_sentences; ++i) {
    Example ex = generate_sentence(seed, i, params);
    validate_example(ex);
    for (const EventMention& ev : ex.events) {
      for (const Argument& arg : ev.arguments) observed.push_back(arg.role);
    }
    corpus.examples.push_back(std::move(ex));
  }
  corpus.roles = RoleInventory::from_observed(observed);
  return corpus;
}

}  // namespace semsyngtn
