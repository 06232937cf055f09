#include "semsyngtn/corpus.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace semsyngtn {

using nlohmann::json;

RoleInventory RoleInventory::from_observed(const std::vector<std::string>& roles) {
  std::set<std::string> uniq(roles.begin(), roles.end());
  uniq.erase("None");
  RoleInventory inv;
  inv.names_.assign(uniq.begin(), uniq.end());  // set iteration is sorted
  inv.names_.insert(inv.names_.begin(), "None");
  return inv;
}

RoleInventory RoleInventory::from_names(std::vector<std::string> names) {
  if (names.empty() || names[0] != "None") {
    throw std::invalid_argument("role inventory: None must be at index 0");
  }
  std::set<std::string> uniq(names.begin(), names.end());
  if (uniq.size() != names.size()) {
    throw std::invalid_argument("role inventory: duplicate role name");
  }
  RoleInventory inv;
  inv.names_ = std::move(names);
  return inv;
}

const std::string& RoleInventory::name_of(int id) const {
  if (id < 0 || id >= size()) throw std::invalid_argument("role id out of range");
  return names_[id];
}

int RoleInventory::id_of(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw std::invalid_argument("unknown role: " + name);
  return static_cast<int>(it - names_.begin());
}

void validate_example(const Example& ex) {
  int n = ex.size();
  if (n < 1) throw std::invalid_argument("empty sentence");
  if (static_cast<int>(ex.heads.size()) != n) {
    throw std::invalid_argument("heads length does not match tokens");
  }
  int root = -1;
  for (int i = 0; i < n; ++i) {
    int h = ex.heads[i];
    if (h < -1 || h >= n) throw std::invalid_argument("head index out of range");
    if (h == i) throw std::invalid_argument("cyclic head pointers");
    if (h == -1) {
      if (root != -1) throw std::invalid_argument("multiple roots");
      root = i;
    }
  }
  // No -1 means every node has a parent, so following heads must loop.
  if (root == -1) throw std::invalid_argument("cyclic head pointers");
  // N-1 parent edges and a single root: connected from the root <=> acyclic.
  std::vector<std::vector<int>> children(n);
  for (int i = 0; i < n; ++i) {
    if (ex.heads[i] >= 0) children[ex.heads[i]].push_back(i);
  }
  std::vector<char> seen(n, 0);
  std::deque<int> queue{root};
  seen[root] = 1;
  int reached = 0;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    ++reached;
    for (int v : children[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        queue.push_back(v);
      }
    }
  }
  if (reached != n) throw std::invalid_argument("cyclic head pointers");

  for (const EntityMention& m : ex.entities) {
    if (m.start < 0 || m.end >= n || m.start > m.end) {
      throw std::invalid_argument("entity span out of range");
    }
    if (m.head_index < m.start || m.head_index > m.end) {
      throw std::invalid_argument("entity head index outside its span");
    }
  }
  for (const EventMention& ev : ex.events) {
    if (ev.trigger_index < 0 || ev.trigger_index >= n) {
      throw std::invalid_argument("trigger index out of range");
    }
    for (const Argument& arg : ev.arguments) {
      if (arg.entity < 0 || arg.entity >= static_cast<int>(ex.entities.size())) {
        throw std::invalid_argument("unknown entity_id in an argument");
      }
      if (arg.role.empty()) throw std::invalid_argument("empty role name");
    }
  }
}

namespace {

Example example_from_json(const json& j) {
  Example ex;
  ex.tokens = j.at("tokens").get<std::vector<std::string>>();
  ex.heads = j.at("heads").get<std::vector<int>>();
  ex.sentence_id = j.value("id", "");
  for (const json& je : j.value("entities", json::array())) {
    EntityMention m;
    m.start = je.at("start").get<int>();
    m.end = je.at("end").get<int>();
    m.head_index = je.at("head_index").get<int>();
    ex.entities.push_back(m);
  }
  for (const json& jv : j.value("events", json::array())) {
    EventMention ev;
    ev.trigger_index = jv.at("trigger_index").get<int>();
    ev.subtype = jv.value("subtype", "");
    for (const json& ja : jv.value("arguments", json::array())) {
      ev.arguments.push_back({ja.at("entity").get<int>(), ja.at("role").get<std::string>()});
    }
    ex.events.push_back(std::move(ev));
  }
  return ex;
}

json example_to_json(const Example& ex) {
  json j;
  j["tokens"] = ex.tokens;
  j["heads"] = ex.heads;
  j["id"] = ex.sentence_id;
  j["entities"] = json::array();
  for (const EntityMention& m : ex.entities) {
    j["entities"].push_back({{"start", m.start}, {"end", m.end}, {"head_index", m.head_index}});
  }
  j["events"] = json::array();
  for (const EventMention& ev : ex.events) {
    json jv;
    jv["trigger_index"] = ev.trigger_index;
    jv["subtype"] = ev.subtype;
    jv["arguments"] = json::array();
    for (const Argument& arg : ev.arguments) {
      jv["arguments"].push_back({{"entity", arg.entity}, {"role", arg.role}});
    }
    j["events"].push_back(std::move(jv));
  }
  return j;
}

}  // namespace

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read corpus file " + path);
  Corpus corpus;
  std::vector<std::string> observed;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": malformed JSON: " + e.what());
    }
    Example ex;
    try {
      ex = example_from_json(j);
      validate_example(ex);
    } catch (const std::exception& e) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": " + e.what());
    }
    for (const EventMention& ev : ex.events) {
      for (const Argument& arg : ev.arguments) observed.push_back(arg.role);
    }
    corpus.examples.push_back(std::move(ex));
  }
  corpus.roles = RoleInventory::from_observed(observed);
  return corpus;
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write corpus file " + path);
  for (const Example& ex : corpus.examples) {
    out << example_to_json(ex).dump() << '\n';
  }
  if (!out) throw std::runtime_error("write failed for corpus file " + path);
}

std::vector<Instance> enumerate_instances(const Example& ex, const RoleInventory& roles) {
  std::vector<Instance> out;
  for (size_t v = 0; v < ex.events.size(); ++v) {
    const EventMention& ev = ex.events[v];
    for (size_t m = 0; m < ex.entities.size(); ++m) {
      Instance inst;
      inst.example = &ex;
      inst.event_index = static_cast<int>(v);
      inst.entity_index = static_cast<int>(m);
      inst.a = ex.entities[m].head_index;
      inst.e = ev.trigger_index;
      inst.gold_role = RoleInventory::kNone;
      for (const Argument& arg : ev.arguments) {
        if (arg.entity == static_cast<int>(m)) {
          inst.gold_role = roles.id_of(arg.role);
          break;
        }
      }
      if (inst.a == inst.e && inst.gold_role != RoleInventory::kNone) {
        throw std::invalid_argument("entity anchored at the trigger must have the None role (" +
                                    ex.sentence_id + ")");
      }
      out.push_back(inst);
    }
  }
  return out;
}

std::vector<Instance> enumerate_instances(const Corpus& corpus) {
  std::vector<Instance> out;
  for (const Example& ex : corpus.examples) {
    std::vector<Instance> part = enumerate_instances(ex, corpus.roles);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

std::vector<int> dep_path_lengths(const std::vector<int>& heads, int anchor) {
  int n = static_cast<int>(heads.size());
  if (anchor < 0 || anchor >= n) throw std::invalid_argument("anchor out of range");
  std::vector<std::vector<int>> adj(n);
  int roots = 0;
  for (int i = 0; i < n; ++i) {
    int h = heads[i];
    if (h < -1 || h >= n || h == i) throw std::invalid_argument("invalid tree");
    if (h == -1) {
      ++roots;
      continue;
    }
    adj[i].push_back(h);
    adj[h].push_back(i);
  }
  if (roots != 1) throw std::invalid_argument("invalid tree");
  std::vector<int> dist(n, -1);
  std::deque<int> queue{anchor};
  dist[anchor] = 0;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int v : adj[u]) {
      if (dist[v] == -1) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  for (int d : dist) {
    if (d == -1) throw std::invalid_argument("invalid tree");
  }
  return dist;
}

}  // namespace semsyngtn
