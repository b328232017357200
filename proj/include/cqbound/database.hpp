#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "query.hpp"

namespace cqbound {

// Values are opaque tokens, compared by their canonical string rendering.
using Value = std::string;
using Tuple = std::vector<Value>;

struct Relation {
  std::size_t arity = 0;
  std::set<Tuple> tuples;

  void insert(Tuple t) {
    if (t.size() != arity) throw InputError("tuple arity does not match relation arity");
    tuples.insert(std::move(t));
  }
  std::size_t size() const noexcept { return tuples.size(); }
};

struct Database {
  std::map<std::string, Relation> relations;

  const Relation& at(const std::string& name) const {
    auto it = relations.find(name);
    if (it == relations.end()) throw InputError("database has no relation " + name);
    return it->second;
  }
};

// Tuple count of the largest body relation of q in d.
inline std::size_t rmax(const Query& q, const Database& d) {
  std::size_t out = 0;
  for (const auto& name : q.relation_names()) out = std::max(out, d.at(name).size());
  return out;
}

// {"relations": {name: {"arity": a, "tuples": [[v, ...], ...]}}}
inline nlohmann::json to_json(const Database& d) {
  nlohmann::json rels = nlohmann::json::object();
  for (const auto& [name, rel] : d.relations) {
    nlohmann::json tuples = nlohmann::json::array();
    for (const auto& t : rel.tuples) tuples.push_back(t);
    rels[name] = {{"arity", rel.arity}, {"tuples", std::move(tuples)}};
  }
  return {{"relations", std::move(rels)}};
}

inline Database database_from_json(const nlohmann::json& j) {
  Database d;
  try {
    for (const auto& [name, rel] : j.at("relations").items()) {
      Relation r;
      r.arity = rel.at("arity").get<std::size_t>();
      for (const auto& t : rel.at("tuples")) r.insert(t.get<Tuple>());
      d.relations.emplace(name, std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed database JSON: ") + e.what());
  }
  return d;
}

}  // namespace cqbound
