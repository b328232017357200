#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "query.hpp"

namespace cqbound {

/// Instantiates every declared dependency at every atom occurrence of its
/// relation. Keys expand to one FD per non-key attribute. FDs whose right-hand
/// variable already appears on the left (repeated variables) are dropped.
inline FdSet instantiate_fds(const Query& q) {
  FdSet out;
  auto emit = [&out](std::vector<VarId> lhs, VarId rhs) {
    std::sort(lhs.begin(), lhs.end());
    lhs.erase(std::unique(lhs.begin(), lhs.end()), lhs.end());
    if (std::find(lhs.begin(), lhs.end(), rhs) != lhs.end()) return;
    out.insert({std::move(lhs), rhs});
  };
  const auto& decls = q.declarations();
  for (const auto& atom : q.body()) {
    for (const auto& fd : decls.relation_fds) {
      if (fd.relation != atom.relation) continue;
      std::vector<VarId> lhs;
      for (auto p : fd.lhs) lhs.push_back(atom.args[p]);
      emit(std::move(lhs), atom.args[fd.rhs]);
    }
    for (const auto& key : decls.keys) {
      if (key.relation != atom.relation) continue;
      for (std::size_t p = 0; p < atom.args.size(); ++p) {
        if (p != key.position) emit({atom.args[key.position]}, atom.args[p]);
      }
    }
  }
  for (const auto& fd : decls.variable_fds) {
    std::vector<VarId> lhs;
    for (const auto& v : fd.lhs) lhs.push_back(*q.find_var(v));
    emit(std::move(lhs), *q.find_var(fd.rhs));
  }
  return out;
}

namespace detail {

inline std::map<std::string, std::vector<std::size_t>> keyed_positions(const Query& q) {
  std::map<std::string, std::vector<std::size_t>> out;
  for (const auto& key : q.declarations().keys) out[key.relation].push_back(key.position);
  return out;
}

}  // namespace detail

/// True when no two atoms of one relation share the variable at a keyed
/// position, i.e. the simple-key chase has nothing left to merge.
inline bool is_chased(const Query& q) {
  auto keys = detail::keyed_positions(q);
  const auto& body = q.body();
  for (std::size_t j = 0; j < body.size(); ++j) {
    auto it = keys.find(body[j].relation);
    if (it == keys.end()) continue;
    for (std::size_t k = j + 1; k < body.size(); ++k) {
      if (body[k].relation != body[j].relation) continue;
      for (auto p : it->second) {
        if (body[j].args[p] == body[k].args[p]) return false;
      }
    }
  }
  return true;
}

/// Simple-key chase. Atom pairs are scanned by body position; when atoms j < k
/// agree on a keyed position, the variables of atom j are replaced position by
/// position with those of atom k throughout the query and atom j is removed.
/// Repeats until no replacement applies. Compound-LHS FDs are not consulted.
inline Query chase(const Query& q) {
  auto keys = detail::keyed_positions(q);
  NamedAtom head = q.named(q.head());
  std::vector<NamedAtom> body = q.named_body();
  Declarations decls = q.declarations();

  auto substitute = [&](const std::string& from, const std::string& to) {
    auto fix = [&](std::string& v) {
      if (v == from) v = to;
    };
    for (auto& v : head.args) fix(v);
    for (auto& atom : body) {
      for (auto& v : atom.args) fix(v);
    }
    for (auto& fd : decls.variable_fds) {
      for (auto& v : fd.lhs) fix(v);
      fix(fd.rhs);
    }
  };

  auto step = [&]() {
    for (std::size_t j = 0; j < body.size(); ++j) {
      auto it = keys.find(body[j].relation);
      if (it == keys.end()) continue;
      for (std::size_t k = j + 1; k < body.size(); ++k) {
        if (body[k].relation != body[j].relation) continue;
        for (auto p : it->second) {
          if (body[j].args[p] != body[k].args[p]) continue;
          for (std::size_t h = 0; h < body[j].args.size(); ++h) {
            std::string from = body[j].args[h];
            std::string to = body[k].args[h];
            if (from != to) substitute(from, to);
          }
          body.erase(body.begin() + static_cast<std::ptrdiff_t>(j));
          return true;
        }
      }
    }
    return false;
  };
  while (step()) {
  }

  // Substitution can collapse a variable fd into a trivial one.
  std::vector<NamedVariableFD> kept;
  for (auto& fd : decls.variable_fds) {
    std::sort(fd.lhs.begin(), fd.lhs.end());
    fd.lhs.erase(std::unique(fd.lhs.begin(), fd.lhs.end()), fd.lhs.end());
    if (std::find(fd.lhs.begin(), fd.lhs.end(), fd.rhs) == fd.lhs.end()) kept.push_back(fd);
  }
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
  decls.variable_fds = std::move(kept);
  return Query::make(head, body, std::move(decls));
}

struct ReducedQuery {
  Query query;  // declarations are exactly `fds`, as variable fds
  FdSet fds;
};

/// Rewrites every FD with three or more left-hand variables X1 X2 X3.. -> Y
/// into FDs with at most two: a fresh variable Z with a fresh relation over
/// (X1, X2, Z) and FDs X1 X2 -> Z, Z -> X1, Z -> X2, plus a fresh relation over
/// (Z, X3.., Y) with FD Z X3.. -> Y; iterated until all left sides are small.
/// X1, X2 are the two lowest-indexed left-hand variables.
inline ReducedQuery reduce_fds(const Query& q, const FdSet& fds) {
  std::vector<std::string> names = q.var_names();
  std::vector<NamedAtom> body = q.named_body();
  FdSet done;
  std::vector<VariableFD> pending(fds.begin(), fds.end());
  std::size_t fresh_var = 0, fresh_rel = 0;

  while (!pending.empty()) {
    VariableFD fd = pending.front();
    pending.erase(pending.begin());
    if (fd.lhs.size() <= 2) {
      done.insert(fd);
      continue;
    }
    VarId x1 = fd.lhs[0], x2 = fd.lhs[1];
    VarId z = names.size();
    std::string z_name = std::string(kReservedPrefix) + "z" + std::to_string(fresh_var++);
    names.push_back(z_name);

    body.push_back({std::string(kReservedPrefix) + "aux" + std::to_string(fresh_rel++),
                    {names[x1], names[x2], z_name}});
    NamedAtom rest{std::string(kReservedPrefix) + "aux" + std::to_string(fresh_rel++), {z_name}};
    for (std::size_t i = 2; i < fd.lhs.size(); ++i) rest.args.push_back(names[fd.lhs[i]]);
    rest.args.push_back(names[fd.rhs]);
    body.push_back(std::move(rest));

    done.insert({{x1, x2}, z});
    done.insert({{z}, x1});
    done.insert({{z}, x2});
    std::vector<VarId> lhs(fd.lhs.begin() + 2, fd.lhs.end());
    lhs.push_back(z);
    std::sort(lhs.begin(), lhs.end());
    pending.push_back({std::move(lhs), fd.rhs});
  }

  Declarations decls;
  for (const auto& fd : done) {
    NamedVariableFD named{{}, names[fd.rhs]};
    for (auto v : fd.lhs) named.lhs.push_back(names[v]);
    decls.variable_fds.push_back(std::move(named));
  }
  Query reduced = Query::make(q.named(q.head()), body, std::move(decls));
  return {std::move(reduced), std::move(done)};
}

}  // namespace cqbound
