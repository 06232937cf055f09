#ifndef SEMSYNGTN_SYNTHETIC_HPP_
#define SEMSYNGTN_SYNTHETIC_HPP_

#include <cstdint>
#include <string>

#include "semsyngtn/corpus.hpp"

namespace semsyngtn {

// Generator settings for the multi-hop task. Every planted role is only
// recoverable by composing a dependency edge (trigger -> bridge entity) with
// a shared-signature semantic link (bridge -> argument). Distractor entities
// get signature partners too, but never adjacent to the trigger, so "my
// signature appears twice" carries no label information.
struct SyntheticParams {
  int min_len = 12;
  int max_len = 16;
  int min_entities = 2;
  int max_entities = 5;
  int n_trigger_families = 6;  // family f plants role "role<f>"
  int n_signature_groups = 8;
  int forms_per_group = 4;  // paraphrase vocabulary per signature group
  int n_filler_words = 40;
  double positive_rate = 0.35;  // target fraction of non-None instances
  double decoy_rate = 1.0;      // P(distractor gets a non-bridge partner)

  void validate() const;  // throws std::invalid_argument
  // Per-entity planting probability that realizes positive_rate over
  // instances (the bridge itself is always a None candidate).
  double plant_probability() const;

  static SyntheticParams from_json_file(const std::string& path);
};

// Pure function of (seed, n_sentences, params).
Corpus generate_synthetic_corpus(std::uint64_t seed, int n_sentences,
                                 const SyntheticParams& params);

}  // namespace semsyngtn

#endif  // SEMSYNGTN_SYNTHETIC_HPP_
