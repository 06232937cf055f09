#ifndef SEMSYNGTN_CORPUS_HPP_
#define SEMSYNGTN_CORPUS_HPP_

#include <string>
#include <vector>

namespace semsyngtn {

// A candidate argument span. head_index anchors the mention at one token.
struct EntityMention {
  int start = 0;
  int end = 0;         // inclusive
  int head_index = 0;  // start <= head_index <= end
  bool operator==(const EntityMention&) const = default;
};

struct Argument {
  int entity = 0;  // position in Example::entities
  std::string role;
  bool operator==(const Argument&) const = default;
};

struct EventMention {
  int trigger_index = 0;
  std::string subtype;
  std::vector<Argument> arguments;
  bool operator==(const EventMention&) const = default;
};

// One sentence with its dependency tree and gold annotations. heads are
// 0-based parent indexes with exactly one root marked -1.
struct Example {
  std::vector<std::string> tokens;
  std::vector<int> heads;
  std::vector<EntityMention> entities;
  std::vector<EventMention> events;
  std::string sentence_id;

  int size() const { return static_cast<int>(tokens.size()); }
  bool operator==(const Example&) const = default;
};

// Ordered role names with None fixed at index 0.
class RoleInventory {
 public:
  RoleInventory() : names_{"None"} {}
  // Sorted union of the observed non-None roles, with None prepended.
  static RoleInventory from_observed(const std::vector<std::string>& roles);
  // Exact name list (checkpoint restore); None must sit at index 0.
  static RoleInventory from_names(std::vector<std::string> names);

  int size() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name_of(int id) const;
  int id_of(const std::string& name) const;  // throws on unknown role
  static constexpr int kNone = 0;

  bool operator==(const RoleInventory&) const = default;

 private:
  std::vector<std::string> names_;
};

// One classification case: does entity (anchored at a) fill a role in the
// event triggered at e?
struct Instance {
  const Example* example = nullptr;
  int event_index = 0;
  int entity_index = 0;
  int a = 0;  // entity head_index
  int e = 0;  // trigger index
  int gold_role = RoleInventory::kNone;
};

struct Corpus {
  std::vector<Example> examples;
  RoleInventory roles;
};

// Throws std::invalid_argument describing the first violated invariant
// (index out of range, multiple roots, cyclic head pointers, bad spans...).
void validate_example(const Example& ex);

// JSONL: one object per line with keys tokens, heads, entities, events, id.
Corpus load_corpus(const std::string& path);
void save_corpus(const Corpus& corpus, const std::string& path);

// One instance per (event, entity) pair, event-major order.
std::vector<Instance> enumerate_instances(const Example& ex, const RoleInventory& roles);
std::vector<Instance> enumerate_instances(const Corpus& corpus);

// Edge counts of the unique undirected tree paths from anchor to every token.
std::vector<int> dep_path_lengths(const std::vector<int>& heads, int anchor);

}  // namespace semsyngtn

#endif  // SEMSYNGTN_CORPUS_HPP_
