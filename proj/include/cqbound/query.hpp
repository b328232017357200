#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"

namespace cqbound {

using VarId = std::size_t;

// Names starting with this prefix are reserved for variables and relations
// introduced by FD reduction; the parser rejects them.
inline constexpr std::string_view kReservedPrefix = "__";

struct NamedAtom {
  std::string relation;
  std::vector<std::string> args;
};

struct Atom {
  std::string relation;
  std::vector<VarId> args;

  // Distinct variables of the atom, ascending.
  std::vector<VarId> variables() const {
    std::vector<VarId> vs(args);
    std::sort(vs.begin(), vs.end());
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
    return vs;
  }
};

// Relation-level FD with 0-based attribute positions. `lhs` is sorted and
// duplicate-free; `rhs` is a single position not in `lhs`.
struct RelationFD {
  std::string relation;
  std::vector<std::size_t> lhs;
  std::size_t rhs = 0;

  auto operator<=>(const RelationFD&) const = default;
};

// `key R: p`: position p (1-based in the file, stored 0-based) determines every attribute of R.
struct SimpleKey {
  std::string relation;
  std::size_t position = 0;

  auto operator<=>(const SimpleKey&) const = default;
};

// `fd vars: ...`: an FD stated directly on query variables, by name.
struct NamedVariableFD {
  std::vector<std::string> lhs;
  std::string rhs;

  auto operator<=>(const NamedVariableFD&) const = default;
};

struct Declarations {
  std::vector<RelationFD> relation_fds;
  std::vector<SimpleKey> keys;
  std::vector<NamedVariableFD> variable_fds;
};

// FD over query variables. `lhs` is sorted, duplicate-free and nonempty.
struct VariableFD {
  std::vector<VarId> lhs;
  VarId rhs = 0;

  auto operator<=>(const VariableFD&) const = default;
};

using FdSet = std::set<VariableFD>;

// A conjunctive query R0(u0) <- R1(u1), ..., Rn(um) plus its dependency
// declarations. Variables are indexed by first occurrence in query text
// (head first, then body atoms left to right).
class Query {
 public:
  Query() = default;

  static Query make(const NamedAtom& head, const std::vector<NamedAtom>& body,
                    Declarations decls = {}) {
    Query q;
    auto intern = [&q](const std::string& name) {
      auto it = q.index_.find(name);
      if (it != q.index_.end()) return it->second;
      VarId id = q.names_.size();
      q.names_.push_back(name);
      q.index_.emplace(name, id);
      return id;
    };

    if (head.args.empty()) throw InputError("query head has no variables");
    if (body.empty()) throw InputError("query body is empty");

    q.head_.relation = head.relation;
    for (const auto& a : head.args) q.head_.args.push_back(intern(a));
    std::set<std::string> body_vars;
    for (const auto& atom : body) {
      Atom out{atom.relation, {}};
      auto [it, fresh] = q.arity_.emplace(atom.relation, atom.args.size());
      if (!fresh && it->second != atom.args.size()) {
        throw InputError("relation " + atom.relation + " used with arity " +
                         std::to_string(atom.args.size()) + " and " +
                         std::to_string(it->second));
      }
      if (atom.args.empty()) throw InputError("relation " + atom.relation + " has arity 0");
      for (const auto& a : atom.args) {
        out.args.push_back(intern(a));
        body_vars.insert(a);
      }
      q.body_.push_back(std::move(out));
    }
    for (const auto& a : head.args) {
      if (!body_vars.count(a)) throw InputError("head variable " + a + " does not occur in the body");
    }

    for (auto& fd : decls.relation_fds) {
      std::size_t arity = q.checked_arity(fd.relation, "fd");
      std::sort(fd.lhs.begin(), fd.lhs.end());
      fd.lhs.erase(std::unique(fd.lhs.begin(), fd.lhs.end()), fd.lhs.end());
      if (fd.lhs.empty()) throw InputError("fd on " + fd.relation + " has an empty left-hand side");
      for (auto p : fd.lhs) q.check_position(fd.relation, p, arity);
      q.check_position(fd.relation, fd.rhs, arity);
      if (std::find(fd.lhs.begin(), fd.lhs.end(), fd.rhs) != fd.lhs.end()) {
        throw InputError("fd on " + fd.relation + " has its right-hand side in the left-hand side");
      }
    }
    for (const auto& key : decls.keys) {
      q.check_position(key.relation, key.position, q.checked_arity(key.relation, "key"));
    }
    for (auto& fd : decls.variable_fds) {
      std::sort(fd.lhs.begin(), fd.lhs.end());
      fd.lhs.erase(std::unique(fd.lhs.begin(), fd.lhs.end()), fd.lhs.end());
      if (fd.lhs.empty()) throw InputError("variable fd has an empty left-hand side");
      for (const auto& v : fd.lhs) q.checked_var(v);
      q.checked_var(fd.rhs);
      if (std::find(fd.lhs.begin(), fd.lhs.end(), fd.rhs) != fd.lhs.end()) {
        throw InputError("variable fd has its right-hand side " + fd.rhs + " in the left-hand side");
      }
    }
    q.decls_ = std::move(decls);
    return q;
  }

  const Atom& head() const noexcept { return head_; }
  const std::vector<Atom>& body() const noexcept { return body_; }
  const Declarations& declarations() const noexcept { return decls_; }

  std::size_t num_vars() const noexcept { return names_.size(); }
  const std::string& var_name(VarId v) const { return names_.at(v); }
  const std::vector<std::string>& var_names() const noexcept { return names_; }

  std::optional<VarId> find_var(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  // Distinct head variables, ascending.
  std::vector<VarId> head_vars() const { return head_.variables(); }

  std::size_t arity(const std::string& relation) const {
    auto it = arity_.find(relation);
    if (it == arity_.end()) throw InputError("unknown relation " + relation);
    return it->second;
  }

  bool has_relation(const std::string& relation) const { return arity_.count(relation) != 0; }

  // Distinct body relation names, ascending.
  std::vector<std::string> relation_names() const {
    std::vector<std::string> out;
    for (const auto& [name, arity] : arity_) out.push_back(name);
    return out;
  }

  // Largest number of occurrences of a single relation name in the body.
  std::size_t rep() const {
    std::map<std::string, std::size_t> counts;
    std::size_t best = 0;
    for (const auto& a : body_) best = std::max(best, ++counts[a.relation]);
    return best;
  }

  NamedAtom named(const Atom& atom) const {
    NamedAtom out{atom.relation, {}};
    for (auto v : atom.args) out.args.push_back(names_[v]);
    return out;
  }

  std::vector<NamedAtom> named_body() const {
    std::vector<NamedAtom> out;
    for (const auto& a : body_) out.push_back(named(a));
    return out;
  }

  // Syntactic equality of head and body, by variable name.
  bool operator==(const Query& other) const {
    auto same = [&](const Atom& a, const Atom& b) {
      auto na = named(a);
      auto nb = other.named(b);
      return na.relation == nb.relation && na.args == nb.args;
    };
    if (!same(head_, other.head_) || body_.size() != other.body_.size()) return false;
    for (std::size_t i = 0; i < body_.size(); ++i) {
      if (!same(body_[i], other.body_[i])) return false;
    }
    return true;
  }

 private:
  std::size_t checked_arity(const std::string& relation, const char* what) const {
    auto it = arity_.find(relation);
    if (it == arity_.end()) {
      throw InputError(std::string(what) + " declared for relation " + relation +
                       " which does not occur in the body");
    }
    return it->second;
  }

  void check_position(const std::string& relation, std::size_t pos, std::size_t arity) const {
    if (pos >= arity) {
      throw InputError("position " + std::to_string(pos + 1) + " out of range for " + relation +
                       " (arity " + std::to_string(arity) + ")");
    }
  }

  VarId checked_var(const std::string& name) const {
    auto v = find_var(name);
    if (!v) throw InputError("variable " + name + " in variable fd does not occur in the query");
    return *v;
  }

  Atom head_;
  std::vector<Atom> body_;
  Declarations decls_;
  std::vector<std::string> names_;
  std::map<std::string, VarId> index_;
  std::map<std::string, std::size_t> arity_;
};

inline std::string to_string(const NamedAtom& atom) {
  std::string out = atom.relation + "(";
  for (std::size_t i = 0; i < atom.args.size(); ++i) {
    if (i) out += ",";
    out += atom.args[i];
  }
  return out + ")";
}

inline std::string to_string(const Query& q, const VariableFD& fd) {
  std::string out;
  for (std::size_t i = 0; i < fd.lhs.size(); ++i) {
    if (i) out += ",";
    out += q.var_name(fd.lhs[i]);
  }
  return out + " -> " + q.var_name(fd.rhs);
}

// Renders the query in query-file syntax; declarations follow the rule.
inline std::string to_string(const Query& q) {
  std::ostringstream out;
  out << to_string(q.named(q.head())) << " :- ";
  for (std::size_t i = 0; i < q.body().size(); ++i) {
    if (i) out << ", ";
    out << to_string(q.named(q.body()[i]));
  }
  out << ".\n";
  const auto& d = q.declarations();
  for (const auto& key : d.keys) out << "key " << key.relation << ": " << key.position + 1 << "\n";
  for (const auto& fd : d.relation_fds) {
    out << "fd " << fd.relation << ": ";
    for (std::size_t i = 0; i < fd.lhs.size(); ++i) out << (i ? "," : "") << fd.lhs[i] + 1;
    out << " -> " << fd.rhs + 1 << "\n";
  }
  for (const auto& fd : d.variable_fds) {
    out << "fd vars: ";
    for (std::size_t i = 0; i < fd.lhs.size(); ++i) out << (i ? "," : "") << fd.lhs[i];
    out << " -> " << fd.rhs << "\n";
  }
  return out.str();
}

}  // namespace cqbound
