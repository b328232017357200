#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "chase.hpp"
#include "coloring.hpp"
#include "error.hpp"
#include "query.hpp"
#include "rational.hpp"

namespace cqbound {

// (p1 v p2 v ~n): at most two positive literals and an optional negated one.
struct HornClause {
  std::vector<VarId> positive;
  std::optional<VarId> negated;

  bool operator==(const HornClause&) const = default;
};

// SAT_i = C1 ^ C2 ^ C3 for one body atom: C1 negated units (the atom's
// variables), C2 one positive clause over head variables, C3 one clause per FD.
struct SatInstance {
  std::size_t num_vars = 0;
  std::set<VarId> c1;
  std::set<VarId> c2;
  std::vector<HornClause> c3;
};

struct SatOutcome {
  bool satisfiable = false;
  std::vector<bool> assignment;  // valid when satisfiable
  std::size_t passes = 0;
};

struct SparsityResult {
  bool preserving = false;
  std::optional<std::size_t> failing_relation;  // body index of the first unsatisfiable SAT_i
  std::optional<Coloring> witness;              // when not preserving
  std::optional<Rational> lower_bound_exponent; // m/(m-1), when not preserving
};

/// SAT instance for body atom `atom_index`. Every FD must have at most two
/// left-hand variables (run reduce_fds first).
inline SatInstance build_sat(const Query& q, const FdSet& fds, std::size_t atom_index) {
  if (atom_index >= q.body().size()) throw std::out_of_range("build_sat: atom index out of range");
  SatInstance sat;
  sat.num_vars = q.num_vars();
  for (auto v : q.body()[atom_index].args) sat.c1.insert(v);
  for (auto v : q.head_vars()) {
    if (!sat.c1.count(v)) sat.c2.insert(v);
  }
  for (const auto& fd : fds) {
    if (fd.lhs.size() > 2) throw std::invalid_argument("build_sat: FD with more than two left-hand variables");
    sat.c3.push_back({fd.lhs, fd.rhs});
  }
  return sat;
}

/// Pass-based solver for SAT_i. Each pass drops clauses whose negated literal is
/// already in C1, strips C1 variables from positive positions, and moves
/// clauses reduced to a lone negated literal into C1. Stops after a pass that
/// adds nothing; unsatisfiable when C2 empties or a positive unit meets C1.
/// `on_pass` sees the instance after each completed pass.
template <class OnPass>
SatOutcome solve_sat_pass(SatInstance sat, OnPass&& on_pass) {
  SatOutcome out;
  auto strip_c2 = [&sat]() {
    for (auto v : sat.c1) sat.c2.erase(v);
  };
  strip_c2();
  if (sat.c2.empty()) return out;

  for (;;) {
    ++out.passes;
    bool added = false;
    std::vector<HornClause> kept;
    for (auto& clause : sat.c3) {
      if (clause.negated && sat.c1.count(*clause.negated)) continue;
      std::erase_if(clause.positive, [&sat](VarId v) { return sat.c1.count(v) != 0; });
      if (clause.positive.empty()) {
        if (!clause.negated) return out;  // positive unit contradicted by C1
        sat.c1.insert(*clause.negated);
        sat.c2.erase(*clause.negated);
        added = true;
        continue;
      }
      kept.push_back(std::move(clause));
    }
    sat.c3 = std::move(kept);
    on_pass(static_cast<const SatInstance&>(sat));
    if (sat.c2.empty()) return out;
    if (!added) break;
  }
  out.satisfiable = true;
  out.assignment.assign(sat.num_vars, true);
  for (auto v : sat.c1) out.assignment[v] = false;
  return out;
}

inline SatOutcome solve_sat_pass(SatInstance sat) {
  return solve_sat_pass(std::move(sat), [](const SatInstance&) {});
}

/// Decides whether |Q(D)| <= rmax(Q,D) for every database D: true iff some
/// SAT_i is unsatisfiable. Otherwise each satisfying assignment is a one-color
/// coloring that misses atom i but reaches the head; their union is a valid
/// witness with ratio >= m/(m-1).
inline SparsityResult is_sparsity_preserving(const Query& q, const FdSet& fds) {
  if (!is_chased(q)) throw InputError("query is not a chase fixpoint; apply chase first");
  ReducedQuery reduced = reduce_fds(q, fds);
  const std::size_t m = q.body().size();

  SparsityResult result;
  Coloring witness = Coloring::empty(q.num_vars());
  for (std::size_t i = 0; i < m; ++i) {
    auto outcome = solve_sat_pass(build_sat(reduced.query, reduced.fds, i));
    if (!outcome.satisfiable) {
      result.preserving = true;
      result.failing_relation = i;
      return result;
    }
    for (VarId v = 0; v < q.num_vars(); ++v) {
      if (outcome.assignment[v]) witness.labels[v].insert(static_cast<ColorId>(i));
    }
  }
  if (m < 2) throw std::logic_error("single-atom query cannot increase size");
  result.witness = std::move(witness);
  result.lower_bound_exponent = Rational(static_cast<long>(m), static_cast<long>(m - 1));
  result.lower_bound_exponent->canonicalize();
  return result;
}

}  // namespace cqbound
