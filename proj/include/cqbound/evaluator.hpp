#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "chase.hpp"
#include "database.hpp"
#include "entropy.hpp"
#include "error.hpp"
#include "query.hpp"
#include "rational.hpp"
#include "size_bound.hpp"

namespace cqbound {

namespace detail {

// Nested-loop join over interned values. Atoms are visited in ascending order
// of relation size (ties by body position); the result set does not depend on
// the order.
class Join {
 public:
  Join(const Query& q, const Database& d) : k_(q.num_vars()) {
    std::unordered_map<std::string, int> ids;
    auto intern = [&](const Value& v) {
      auto [it, fresh] = ids.emplace(v, static_cast<int>(dict_.size()));
      if (fresh) dict_.push_back(v);
      return it->second;
    };
    std::map<std::string, std::size_t> slot;
    for (const auto& atom : q.body()) {
      const Relation& rel = d.at(atom.relation);
      if (rel.arity != atom.args.size()) {
        throw InputError("relation " + atom.relation + " has arity " + std::to_string(rel.arity) +
                         " in the database but " + std::to_string(atom.args.size()) + " in the query");
      }
      auto [it, fresh] = slot.emplace(atom.relation, rels_.size());
      if (fresh) {
        std::vector<std::vector<int>> tuples;
        tuples.reserve(rel.size());
        for (const auto& t : rel.tuples) {
          std::vector<int> row;
          for (const auto& v : t) row.push_back(intern(v));
          tuples.push_back(std::move(row));
        }
        rels_.push_back(std::move(tuples));
      }
      atoms_.push_back({atom.args, it->second});
    }
    std::stable_sort(atoms_.begin(), atoms_.end(), [this](const AtomRef& a, const AtomRef& b) {
      return rels_[a.rel].size() < rels_[b.rel].size();
    });
  }

  // Calls f(binding) once per substitution satisfying every body atom.
  template <class F>
  void for_each(F&& f) const {
    std::vector<int> binding(k_, -1);
    descend(0, binding, f);
  }

  const Value& value(int id) const { return dict_[static_cast<std::size_t>(id)]; }

 private:
  struct AtomRef {
    std::vector<VarId> args;
    std::size_t rel;
  };

  template <class F>
  void descend(std::size_t level, std::vector<int>& binding, F& f) const {
    if (level == atoms_.size()) {
      f(static_cast<const std::vector<int>&>(binding));
      return;
    }
    const AtomRef& atom = atoms_[level];
    std::vector<VarId> bound_here;
    for (const auto& row : rels_[atom.rel]) {
      bool ok = true;
      bound_here.clear();
      for (std::size_t p = 0; p < atom.args.size(); ++p) {
        int& slot = binding[atom.args[p]];
        if (slot == -1) {
          slot = row[p];
          bound_here.push_back(atom.args[p]);
        } else if (slot != row[p]) {
          ok = false;
          break;
        }
      }
      if (ok) descend(level + 1, binding, f);
      for (auto v : bound_here) binding[v] = -1;
    }
  }

  std::size_t k_;
  std::vector<Value> dict_;
  std::vector<std::vector<std::vector<int>>> rels_;
  std::vector<AtomRef> atoms_;
};

}  // namespace detail

/// Q(D) under set semantics: head projections of all satisfying substitutions.
inline std::set<Tuple> evaluate(const Query& q, const Database& d) {
  detail::Join join(q, d);
  std::set<Tuple> out;
  join.for_each([&](const std::vector<int>& binding) {
    Tuple t;
    for (auto v : q.head().args) t.push_back(join.value(binding[v]));
    out.insert(std::move(t));
  });
  return out;
}

struct FdViolation {
  std::string relation;  // "*" for FDs stated on query variables
  std::string fd;
  Tuple first;
  Tuple second;
};

/// Every pair of tuples violating a declared FD or key, per relation. FDs
/// declared on query variables are checked on the full join Q'(D).
inline std::vector<FdViolation> check_fds(const Query& q, const Database& d) {
  std::vector<FdViolation> out;
  auto check = [&out](const std::string& relation, const std::string& label, const std::vector<Tuple>& rows,
                      const std::vector<std::size_t>& lhs, std::size_t rhs) {
    std::map<Tuple, std::vector<const Tuple*>> groups;
    for (const auto& t : rows) {
      Tuple key;
      for (auto p : lhs) key.push_back(t[p]);
      groups[key].push_back(&t);
    }
    for (const auto& [key, members] : groups) {
      for (std::size_t a = 0; a < members.size(); ++a) {
        for (std::size_t b = a + 1; b < members.size(); ++b) {
          if ((*members[a])[rhs] != (*members[b])[rhs]) out.push_back({relation, label, *members[a], *members[b]});
        }
      }
    }
  };
  auto positions = [](const std::vector<std::size_t>& ps) {
    std::string s;
    for (auto p : ps) s += (s.empty() ? "" : ",") + std::to_string(p + 1);
    return s;
  };

  const auto& decls = q.declarations();
  std::map<std::string, std::vector<std::pair<std::vector<std::size_t>, std::size_t>>> per_relation;
  for (const auto& fd : decls.relation_fds) per_relation[fd.relation].push_back({fd.lhs, fd.rhs});
  for (const auto& key : decls.keys) {
    for (std::size_t p = 0; p < q.arity(key.relation); ++p) {
      if (p != key.position) per_relation[key.relation].push_back({{key.position}, p});
    }
  }
  for (auto& [relation, fds] : per_relation) {
    std::sort(fds.begin(), fds.end());
    fds.erase(std::unique(fds.begin(), fds.end()), fds.end());
    const Relation& rel = d.at(relation);
    std::vector<Tuple> rows(rel.tuples.begin(), rel.tuples.end());
    for (const auto& [lhs, rhs] : fds) {
      check(relation, positions(lhs) + " -> " + std::to_string(rhs + 1), rows, lhs, rhs);
    }
  }

  if (!decls.variable_fds.empty()) {
    detail::Join join(q, d);
    std::vector<Tuple> rows;
    join.for_each([&](const std::vector<int>& binding) {
      Tuple t;
      for (auto id : binding) t.push_back(join.value(id));
      rows.push_back(std::move(t));
    });
    for (const auto& fd : decls.variable_fds) {
      std::vector<std::size_t> lhs;
      for (const auto& v : fd.lhs) lhs.push_back(*q.find_var(v));
      std::string label;
      for (const auto& v : fd.lhs) label += (label.empty() ? "" : ",") + v;
      check("*", label + " -> " + fd.rhs, rows, lhs, *q.find_var(fd.rhs));
    }
  }
  return out;
}

struct WeightedAssignment {
  std::vector<int> values;  // one interned value per query variable
  double weight;
};

/// Distribution over Q'(D) (all variables in the output) whose head marginal
/// is uniform: each full tuple has weight 1/|Q(D)| * 1/(extensions of its head).
inline std::vector<WeightedAssignment> head_uniform_distribution(const Query& q, const Database& d) {
  detail::Join join(q, d);
  std::vector<std::vector<int>> rows;
  join.for_each([&](const std::vector<int>& binding) { rows.push_back(binding); });
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  if (rows.empty()) throw InputError("query output is empty; no entropy vector exists");

  auto head = q.head().args;
  auto head_of = [&head](const std::vector<int>& row) {
    std::vector<int> key;
    for (auto v : head) key.push_back(row[v]);
    return key;
  };
  std::map<std::vector<int>, std::size_t> extensions;
  for (const auto& r : rows) ++extensions[head_of(r)];
  const double heads = static_cast<double>(extensions.size());

  std::vector<WeightedAssignment> out;
  out.reserve(rows.size());
  for (auto& r : rows) {
    double w = 1.0 / heads / static_cast<double>(extensions[head_of(r)]);
    out.push_back({std::move(r), w});
  }
  return out;
}

/// H(S) in bits for every nonempty S under head_uniform_distribution.
inline EntropyVector<double> empirical_entropy_vector(const Query& q, const Database& d) {
  auto dist = head_uniform_distribution(q, d);
  const std::size_t k = q.num_vars();
  EntropyVector<double> h(k);
  std::map<std::vector<int>, double> marginal;
  std::vector<int> key;
  for (std::uint32_t s = 1; s < (std::uint32_t{1} << k); ++s) {
    marginal.clear();
    auto members = SubsetId(s).members();
    for (const auto& a : dist) {
      key.clear();
      for (auto v : members) key.push_back(a.values[v]);
      marginal[key] += a.weight;
    }
    double acc = 0;
    for (const auto& [_, p] : marginal) {
      if (p > 0) acc -= p * std::log2(p);
    }
    h[SubsetId(s)] = acc;
  }
  return h;
}

/// Sum of |atoms| over the signed sum of atoms of the information diagram;
/// 1 exactly when every atom is nonnegative. Undefined for the zero vector.
inline std::optional<double> knitted_complexity(const EntropyVector<double>& h) {
  auto atoms = information_atoms(h);
  double abs_sum = 0, signed_sum = 0;
  for (std::size_t s = 1; s < atoms.size(); ++s) {
    abs_sum += std::abs(atoms[s]);
    signed_sum += atoms[s];
  }
  if (std::abs(signed_sum) < 1e-12) return std::nullopt;
  return abs_sum / signed_sum;
}

inline constexpr double kFeasibilitySlack = 1e-6;

struct FeasibilityReport {
  bool vacuous = false;  // every body atom has zero entropy
  double scale = 0;      // max_i H(u_i)
  std::vector<std::string> violations;

  bool pass() const { return violations.empty(); }
};

/// Scales an empirical entropy vector by 1/max_i H(u_i) and checks it against
/// every row of the size LP.
inline FeasibilityReport feasibility_check(const Query& q, const FdSet& fds, const EntropyVector<double>& ev,
                                           const LpOptions& opts = {}) {
  FeasibilityReport report;
  for (const auto& atom : q.body()) {
    report.scale = std::max(report.scale, ev[SubsetId::of(atom.args)]);
  }
  if (report.scale <= 0) {
    report.vacuous = true;
    return report;
  }
  EntropyVector<double> scaled(ev.k());
  for (std::uint32_t s = 1; s < scaled.values().size(); ++s) scaled[SubsetId(s)] = ev[SubsetId(s)] / report.scale;

  LinearProgram lp = build_size_lp(q, fds, opts);
  for (const auto& c : lp.constraints) {
    double lhs = scaled.evaluate(c.form);
    double bound = c.bound.get_d();
    bool ok = c.relation == Sense::LessEq    ? lhs <= bound + kFeasibilitySlack
              : c.relation == Sense::GreaterEq ? lhs >= bound - kFeasibilitySlack
                                                  : std::abs(lhs - bound) <= kFeasibilitySlack;
    if (!ok) report.violations.push_back(c.label + " (value " + std::to_string(lhs) + ")");
  }
  return report;
}

struct EvalReport {
  std::size_t output_size = 0;
  std::size_t rmax = 0;
  std::optional<double> observed_exponent;                            // needs rmax >= 2
  std::optional<Rational> exact_exponent;                             // when |Q(D)| and rmax share a base
  std::map<std::string, std::optional<double>> relation_exponents;    // log|Q(D)| / log|R_i(D)|
  std::optional<EntropyVector<double>> entropy;                       // needs |Q(D)| >= 1
  std::optional<double> knitted;
};

inline std::optional<double> log_ratio(std::size_t num, std::size_t den) {
  if (den < 2 || num == 0) return std::nullopt;
  return std::log(static_cast<double>(num)) / std::log(static_cast<double>(den));
}

namespace detail {

// The g with n = g^e for the largest possible e.
inline std::pair<std::uint64_t, std::uint64_t> primitive_root(std::uint64_t n) {
  for (std::uint64_t g = 2; g * g <= n; ++g) {
    std::uint64_t v = n, e = 0;
    while (v % g == 0) {
      v /= g;
      ++e;
    }
    if (v == 1) return {g, e};
  }
  return {n, 1};
}

}  // namespace detail

/// log(num)/log(den) as an exact fraction when both are powers of a common
/// base, e.g. 625 and 25 give 2; nullopt otherwise.
inline std::optional<Rational> exact_log_ratio(std::uint64_t num, std::uint64_t den) {
  if (den < 2 || num == 0) return std::nullopt;
  if (num == 1) return Rational(0);
  auto [g, e] = detail::primitive_root(den);
  std::uint64_t v = num, x = 0;
  while (v % g == 0) {
    v /= g;
    ++x;
  }
  if (v != 1) return std::nullopt;
  Rational out(static_cast<long>(x), static_cast<long>(e));
  out.canonicalize();
  return out;
}

inline EvalReport evaluate_report(const Query& q, const Database& d) {
  EvalReport r;
  r.output_size = evaluate(q, d).size();
  r.rmax = rmax(q, d);
  r.observed_exponent = log_ratio(r.output_size, r.rmax);
  r.exact_exponent = exact_log_ratio(r.output_size, r.rmax);
  for (const auto& name : q.relation_names()) r.relation_exponents[name] = log_ratio(r.output_size, d.at(name).size());
  if (r.output_size > 0) {
    r.entropy = empirical_entropy_vector(q, d);
    r.knitted = knitted_complexity(*r.entropy);
  }
  return r;
}

}  // namespace cqbound
