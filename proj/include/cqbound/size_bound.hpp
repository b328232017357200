#pragma once

#include <set>
#include <sstream>
#include <string>

#include "chase.hpp"
#include "entropy.hpp"
#include "error.hpp"
#include "simplex.hpp"

namespace cqbound {

struct LpOptions {
  std::size_t max_vars = 16;
};

namespace detail {

inline void check_lp_preconditions(const Query& q, const LpOptions& opts) {
  if (q.num_vars() > opts.max_vars) {
    throw LimitError("query has " + std::to_string(q.num_vars()) + " variables; the entropy LP is capped at " +
                     std::to_string(opts.max_vars) + " (raise --max-vars to override)");
  }
  if (q.num_vars() > 30) throw LimitError("entropy LPs are limited to 30 variables");
  if (!is_chased(q)) throw InputError("query is not a chase fixpoint; apply chase first");
}

// Objective h(u0), one h(u_i) <= 1 row per distinct body atom, one
// h(lhs u rhs) - h(lhs) = 0 row per FD. Shared by both entropy programs.
inline LinearProgram base_program(const Query& q, const FdSet& fds) {
  LinearProgram lp;
  lp.k = q.num_vars();
  auto head = q.head_vars();
  lp.objective = LinearForm::entropy(SubsetId::of(head));

  std::set<SubsetId> seen;
  for (const auto& atom : q.body()) {
    auto vars = atom.variables();
    SubsetId s = SubsetId::of(vars);
    if (!seen.insert(s).second) continue;
    lp.constraints.push_back({LinearForm::entropy(s), Sense::LessEq, 1, "atom " + atom.relation});
  }
  for (const auto& fd : fds) {
    SubsetId lhs = SubsetId::of(fd.lhs);
    LinearForm form = LinearForm::entropy(lhs | SubsetId::single(fd.rhs));
    form.add(lhs, -1);
    lp.constraints.push_back({std::move(form), Sense::Equal, 0, "fd " + to_string(q, fd)});
  }
  return lp;
}

}  // namespace detail

/// Elemental Shannon inequalities on k variables: h(i | rest) >= 0 for each i,
/// and I(i; j | S) >= 0 for each pair i < j and each S avoiding both.
inline std::vector<Constraint> elemental_inequalities(std::size_t k) {
  std::vector<Constraint> out;
  const SubsetId full = SubsetId::full(k);
  for (VarId i = 0; i < k; ++i) {
    LinearForm form = LinearForm::entropy(full);
    form.add(full.minus(SubsetId::single(i)), -1);
    out.push_back({std::move(form), Sense::GreaterEq, 0, "shannon h(i|rest)"});
  }
  for (VarId i = 0; i < k; ++i) {
    for (VarId j = i + 1; j < k; ++j) {
      SubsetId pair = SubsetId::single(i) | SubsetId::single(j);
      std::uint32_t rest = full.minus(pair).bits();
      for (std::uint32_t s = rest;; s = (s - 1) & rest) {
        SubsetId cond(s);
        LinearForm form;
        form.add(cond | SubsetId::single(i), 1);
        form.add(cond | SubsetId::single(j), 1);
        form.add(cond, -1);
        form.add(cond | pair, -1);
        out.push_back({std::move(form), Sense::GreaterEq, 0, "shannon I(i;j|S)"});
        if (s == 0) break;
      }
    }
  }
  return out;
}

/// The entropy LP whose optimum s(Q) bounds |Q(D)| <= rmax(Q,D)^s(Q).
inline LinearProgram build_size_lp(const Query& q, const FdSet& fds, const LpOptions& opts = {}) {
  detail::check_lp_preconditions(q, opts);
  LinearProgram lp = detail::base_program(q, fds);
  auto shannon = elemental_inequalities(q.num_vars());
  lp.constraints.insert(lp.constraints.end(), std::make_move_iterator(shannon.begin()),
                        std::make_move_iterator(shannon.end()));
  return lp;
}

inline Rational size_bound_exponent(const Query& q, const FdSet& fds, const LpOptions& opts = {}) {
  return solve_exact(build_size_lp(q, fds, opts)).optimum;
}

/// Plain-text dump of an LP: one line per row, coefficients as exact
/// fractions, subsets as variable-name sets.
inline std::string export_lp(const Query& q, const LinearProgram& lp) {
  auto render = [&q](const LinearForm& form) {
    std::string out;
    for (const auto& [s, c] : form.terms()) {
      if (!out.empty()) out += " ";
      out += (c > 0 ? "+" : "") + to_string(c) + " h" + subset_name(q, s);
    }
    return out;
  };
  std::ostringstream out;
  out << "variables: " << lp.k << "\n";
  out << "maximize: " << render(lp.objective) << "\n";
  out << "subject to:\n";
  for (const auto& c : lp.constraints) {
    const char* rel = c.relation == Sense::LessEq ? "<=" : c.relation == Sense::Equal ? "=" : ">=";
    out << "  " << render(c.form) << " " << rel << " " << to_string(c.bound);
    if (!c.label.empty()) out << "  # " << c.label;
    out << "\n";
  }
  return out.str();
}

}  // namespace cqbound
