#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <vector>

#include "entropy.hpp"
#include "error.hpp"
#include "query.hpp"
#include "rational.hpp"
#include "simplex.hpp"
#include "size_bound.hpp"

namespace cqbound {

using ColorId = int;

// Color labels L(X) per query variable, indexed by VarId.
struct Coloring {
  std::vector<std::set<ColorId>> labels;

  static Coloring empty(std::size_t k) { return Coloring{std::vector<std::set<ColorId>>(k)}; }

  std::set<ColorId> colors_of(std::span<const VarId> vars) const {
    std::set<ColorId> out;
    for (auto v : vars) out.insert(labels.at(v).begin(), labels.at(v).end());
    return out;
  }

  std::set<ColorId> all_colors() const {
    std::set<ColorId> out;
    for (const auto& l : labels) out.insert(l.begin(), l.end());
    return out;
  }

  bool operator==(const Coloring&) const = default;
};

struct ColorNumberResult {
  Rational value;
  Coloring witness;
  EntropyVector<Rational> lp_vertex;
};

namespace detail {

inline void check_coloring_shape(const Query& q, const Coloring& col) {
  if (col.labels.size() != q.num_vars()) {
    throw InputError("coloring has " + std::to_string(col.labels.size()) + " label sets, query has " +
                     std::to_string(q.num_vars()) + " variables");
  }
}

}  // namespace detail

/// FDs whose right-hand labels are not covered by the union of the
/// left-hand labels. Empty result means the coloring is valid.
inline std::vector<VariableFD> validate_coloring(const Query& q, const FdSet& fds, const Coloring& col) {
  detail::check_coloring_shape(q, col);
  std::vector<VariableFD> violations;
  for (const auto& fd : fds) {
    auto covered = col.colors_of(fd.lhs);
    const auto& rhs = col.labels.at(fd.rhs);
    if (!std::includes(covered.begin(), covered.end(), rhs.begin(), rhs.end())) violations.push_back(fd);
  }
  return violations;
}

// Largest number of colors seen by a single body atom.
inline std::size_t max_atom_colors(const Query& q, const Coloring& col) {
  std::size_t r = 0;
  for (const auto& atom : q.body()) r = std::max(r, col.colors_of(atom.args).size());
  return r;
}

/// |colors on the head| / max over body atoms of |colors on the atom|.
inline Rational coloring_ratio(const Query& q, const Coloring& col) {
  detail::check_coloring_shape(q, col);
  std::size_t r = max_atom_colors(q, col);
  if (r == 0) throw InputError("coloring leaves every body atom uncolored; the ratio is undefined");
  Rational out(static_cast<long>(col.colors_of(q.head().args).size()), static_cast<long>(r));
  out.canonicalize();
  return out;
}

/// Same objective, atom bounds and FD rows as the size LP, with the Shannon
/// block replaced by nonnegativity of every information-diagram atom.
inline LinearProgram build_color_lp(const Query& q, const FdSet& fds, const LpOptions& opts = {}) {
  detail::check_lp_preconditions(q, opts);
  LinearProgram lp = detail::base_program(q, fds);
  const std::uint32_t n = SubsetId::full(q.num_vars()).bits();
  for (std::uint32_t s = 1; s <= n; ++s) {
    lp.constraints.push_back({atom_expression(SubsetId(s), q.num_vars()), Sense::GreaterEq, 0, "atom >= 0"});
  }
  return lp;
}

/// LP point of a valid coloring: the atom at S is the number of colors carried
/// by exactly the variables in S, divided by r = max colors in a body atom.
inline EntropyVector<Rational> coloring_to_lp_point(const Query& q, const Coloring& col) {
  detail::check_coloring_shape(q, col);
  std::size_t r = max_atom_colors(q, col);
  if (r == 0) throw InputError("coloring leaves every body atom uncolored");
  const std::size_t k = q.num_vars();
  std::vector<Rational> atoms(std::size_t{1} << k);
  for (ColorId c : col.all_colors()) {
    std::uint32_t carriers = 0;
    for (VarId v = 0; v < k; ++v) {
      if (col.labels[v].count(c)) carriers |= std::uint32_t{1} << v;
    }
    atoms[carriers] += 1;
  }
  for (auto& a : atoms) a /= static_cast<long>(r);
  return entropy_from_atoms(k, atoms);
}

/// Coloring from a rational color-LP point: with q the LCM of the atom
/// denominators, each S receives q * I(S | rest) fresh colors on all of its
/// variables. Throws when an atom is negative.
inline Coloring lp_point_to_coloring(const Query& q, const EntropyVector<Rational>& vertex) {
  if (vertex.k() != q.num_vars()) throw std::invalid_argument("lp_point_to_coloring: vertex arity mismatch");
  auto atoms = information_atoms(vertex);
  mpz_class denom = 1;
  for (std::size_t s = 1; s < atoms.size(); ++s) {
    if (atoms[s] < 0) {
      throw std::invalid_argument("lp_point_to_coloring: atom " + subset_name(q, SubsetId(static_cast<std::uint32_t>(s))) +
                                  " is negative; the point is not feasible for the color LP");
    }
    denom = lcm(denom, atoms[s].get_den());
  }
  Coloring col = Coloring::empty(q.num_vars());
  ColorId next = 0;
  for (std::size_t s = 1; s < atoms.size(); ++s) {
    Rational scaled = atoms[s] * Rational(denom);
    long count = mpz_class(scaled.get_num()).get_si();
    auto members = SubsetId(static_cast<std::uint32_t>(s)).members();
    for (long c = 0; c < count; ++c, ++next) {
      for (auto v : members) col.labels[v].insert(next);
    }
  }
  return col;
}

/// Color number via the color LP; the LP vertex is turned into a witness
/// coloring whose ratio must equal the optimum exactly.
inline ColorNumberResult color_number(const Query& q, const FdSet& fds, const LpOptions& opts = {}) {
  auto sol = solve_exact(build_color_lp(q, fds, opts));
  Coloring witness = lp_point_to_coloring(q, sol.vertex);
  if (!validate_coloring(q, fds, witness).empty() || coloring_ratio(q, witness) != sol.optimum) {
    throw std::logic_error("color LP vertex does not round-trip to a coloring of equal ratio");
  }
  return {sol.optimum, std::move(witness), std::move(sol.vertex)};
}

/// Exact maximum of coloring_ratio over valid colorings with at most
/// `max_colors` colors. A coloring is valid iff each single color's carrier
/// set is closed under the FDs, so colorings are multisets of closed carrier
/// sets; enumerating nondecreasing sequences skips color renamings.
inline Rational brute_force_color_search(const Query& q, const FdSet& fds, std::size_t max_colors) {
  const std::size_t k = q.num_vars();
  if (k > 6) throw LimitError("brute_force_color_search supports at most 6 variables");
  if (max_colors > 4) throw LimitError("brute_force_color_search supports at most 4 colors");

  std::vector<std::uint32_t> carriers;
  for (std::uint32_t s = 1; s < (std::uint32_t{1} << k); ++s) {
    bool closed = true;
    for (const auto& fd : fds) {
      if ((s >> fd.rhs & 1u) && !(s & SubsetId::of(fd.lhs).bits())) {
        closed = false;
        break;
      }
    }
    if (closed) carriers.push_back(s);
  }
  const std::uint32_t head = SubsetId::of(q.head().args).bits();
  std::vector<std::uint32_t> atoms;
  for (const auto& a : q.body()) atoms.push_back(SubsetId::of(a.args).bits());

  Rational best = 0;
  std::vector<std::size_t> atom_counts(atoms.size(), 0);
  auto recurse = [&](auto&& self, std::size_t from, std::size_t used, std::size_t head_count) -> void {
    if (used > 0) {
      std::size_t r = *std::max_element(atom_counts.begin(), atom_counts.end());
      if (r > 0) {
        Rational ratio(static_cast<long>(head_count), static_cast<long>(r));
        ratio.canonicalize();
        if (ratio > best) best = ratio;
      }
    }
    if (used == max_colors) return;
    for (std::size_t c = from; c < carriers.size(); ++c) {
      for (std::size_t i = 0; i < atoms.size(); ++i) atom_counts[i] += (carriers[c] & atoms[i]) != 0;
      self(self, c, used + 1, head_count + ((carriers[c] & head) != 0));
      for (std::size_t i = 0; i < atoms.size(); ++i) atom_counts[i] -= (carriers[c] & atoms[i]) != 0;
    }
  };
  recurse(recurse, 0, 0, 0);
  return best;
}

}  // namespace cqbound
