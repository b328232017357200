#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "coloring.hpp"
#include "database.hpp"
#include "error.hpp"
#include "query.hpp"

namespace cqbound {

struct GenOptions {
  std::uint64_t tuple_cap = 10'000'000;
};

namespace detail {

// base^exp, or nullopt past `cap`.
inline std::optional<std::uint64_t> capped_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t cap) {
  std::uint64_t out = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    if (base != 0 && out > cap / base) return std::nullopt;
    out *= base;
  }
  return out <= cap ? std::optional(out) : std::nullopt;
}

inline bool is_prime(std::uint64_t p) {
  if (p < 2) return false;
  for (std::uint64_t d = 2; d * d <= p; ++d) {
    if (p % d == 0) return false;
  }
  return true;
}

}  // namespace detail

/// Worst-case instance from a valid coloring. Each color c takes N values; an
/// attribute bound to variable X holds the ordered list of (color, value)
/// pairs over L(X), rendered "[c:v,...]". Relation R_j is every assignment of
/// values to the colors of its atom, so |R_j| = N^{q_j}. Atoms sharing a
/// relation name contribute the union of their tuples.
inline Database worst_case_from_coloring(const Query& q, const FdSet& fds, const Coloring& col, std::uint64_t n_values,
                                         const GenOptions& opts = {}) {
  if (n_values < 1) throw InputError("N must be at least 1");
  if (auto bad = validate_coloring(q, fds, col); !bad.empty()) {
    throw InputError("coloring violates fd " + to_string(q, bad.front()));
  }
  const auto colors = col.all_colors();
  if (!detail::capped_pow(n_values, colors.size(), opts.tuple_cap)) {
    throw LimitError("N^d = " + std::to_string(n_values) + "^" + std::to_string(colors.size()) +
                     " exceeds the tuple cap " + std::to_string(opts.tuple_cap));
  }

  Database d;
  for (const auto& atom : q.body()) {
    auto& rel = d.relations[atom.relation];
    rel.arity = atom.args.size();
    auto used = col.colors_of(atom.args);
    std::vector<ColorId> order(used.begin(), used.end());
    std::vector<std::uint64_t> assignment(order.size(), 0);
    auto render = [&](VarId v) {
      std::string out = "[";
      bool first = true;
      for (ColorId c : col.labels[v]) {
        auto pos = static_cast<std::size_t>(std::lower_bound(order.begin(), order.end(), c) - order.begin());
        if (!first) out += ",";
        out += std::to_string(c) + ":" + std::to_string(assignment[pos]);
        first = false;
      }
      return out + "]";
    };
    for (;;) {
      Tuple t;
      for (auto v : atom.args) t.push_back(render(v));
      rel.tuples.insert(std::move(t));
      std::size_t i = 0;
      while (i < assignment.size() && ++assignment[i] == n_values) assignment[i++] = 0;
      if (i == assignment.size()) break;
    }
  }
  return d;
}

// Query and FDs of the secret-sharing gap family: k/2 groups of k variables
// X{i}_{j} (row i, group j); R{j} spans group j, T{i} spans row i.
struct GapFamily {
  int k = 0;
  std::uint64_t p = 0;
  Query query;
  FdSet fds;
};

/// Builds the gap family for even k in [4, 8] and prime p >= k. Each group
/// relation carries FDs S -> X for every k/2-subset S of its positions and every
/// position X outside S (larger left sides are implied).
inline GapFamily gap_query(int k, std::uint64_t p) {
  if (k < 4 || k > 8 || k % 2 != 0) throw InputError("gap family needs an even k with 4 <= k <= 8");
  if (!detail::is_prime(p)) throw InputError("p must be prime");
  if (p < static_cast<std::uint64_t>(k)) throw InputError("p must be at least k");
  const int g = k / 2;
  auto name = [](int i, int j) { return "X" + std::to_string(i) + "_" + std::to_string(j); };

  NamedAtom head{"Q", {}};
  std::vector<NamedAtom> body;
  for (int j = 1; j <= g; ++j) {
    for (int i = 1; i <= k; ++i) head.args.push_back(name(i, j));
  }
  for (int j = 1; j <= g; ++j) {
    NamedAtom r{"R" + std::to_string(j), {}};
    for (int i = 1; i <= k; ++i) r.args.push_back(name(i, j));
    body.push_back(std::move(r));
  }
  for (int i = 1; i <= k; ++i) {
    NamedAtom t{"T" + std::to_string(i), {}};
    for (int j = 1; j <= g; ++j) t.args.push_back(name(i, j));
    body.push_back(std::move(t));
  }

  Declarations decls;
  for (int j = 1; j <= g; ++j) {
    for (std::uint32_t s = 0; s < (1u << k); ++s) {
      if (std::popcount(s) != g) continue;
      std::vector<std::size_t> lhs;
      for (int i = 0; i < k; ++i) {
        if (s >> i & 1u) lhs.push_back(static_cast<std::size_t>(i));
      }
      for (int i = 0; i < k; ++i) {
        if (!(s >> i & 1u)) decls.relation_fds.push_back({"R" + std::to_string(j), lhs, static_cast<std::size_t>(i)});
      }
    }
  }
  GapFamily fam{k, p, Query::make(head, body, std::move(decls)), {}};
  fam.fds = instantiate_fds(fam.query);
  return fam;
}

/// Gap database: R{j} holds the Shamir (k/2, k) shares (f(0), ..., f(k-1)) of
/// every polynomial f of degree < k/2 over GF(p); T{i} is the full product of
/// the p values of each of its variables. Group values are tagged "g{j}:v".
inline Database gap_database(const GapFamily& fam, const GenOptions& opts = {}) {
  const int k = fam.k, g = k / 2;
  const std::uint64_t p = fam.p;
  if (!detail::capped_pow(p, static_cast<std::uint64_t>(g), opts.tuple_cap)) {
    throw LimitError("gap relations would exceed the tuple cap");
  }
  auto value = [](int group, std::uint64_t v) { return "g" + std::to_string(group) + ":" + std::to_string(v); };

  Database d;
  for (int j = 1; j <= g; ++j) {
    Relation rel{static_cast<std::size_t>(k), {}};
    std::vector<std::uint64_t> coeff(static_cast<std::size_t>(g), 0);
    for (;;) {
      Tuple t;
      for (std::uint64_t a = 0; a < static_cast<std::uint64_t>(k); ++a) {
        std::uint64_t acc = 0;
        for (int c = g - 1; c >= 0; --c) acc = (acc * a + coeff[static_cast<std::size_t>(c)]) % p;
        t.push_back(value(j, acc));
      }
      rel.tuples.insert(std::move(t));
      std::size_t i = 0;
      while (i < coeff.size() && ++coeff[i] == p) coeff[i++] = 0;
      if (i == coeff.size()) break;
    }
    d.relations.emplace("R" + std::to_string(j), std::move(rel));
  }
  for (int i = 1; i <= k; ++i) {
    Relation rel{static_cast<std::size_t>(g), {}};
    std::vector<std::uint64_t> digits(static_cast<std::size_t>(g), 0);
    for (;;) {
      Tuple t;
      for (int j = 1; j <= g; ++j) t.push_back(value(j, digits[static_cast<std::size_t>(j - 1)]));
      rel.tuples.insert(std::move(t));
      std::size_t c = 0;
      while (c < digits.size() && ++digits[c] == p) digits[c++] = 0;
      if (c == digits.size()) break;
    }
    d.relations.emplace("T" + std::to_string(i), std::move(rel));
  }
  return d;
}

/// |Q(D)| for a gap database without materializing the join. Requires that
/// every T{i} is the full product of the per-variable value sets observed in
/// the group relations; then the join factors into the product of the R{j}.
/// Returns nullopt when that structure does not hold.
inline std::optional<std::uint64_t> gap_output_size(const GapFamily& fam, const Database& d) {
  const int k = fam.k, g = k / 2;
  std::uint64_t total = 1;
  std::vector<std::vector<std::set<Value>>> column(static_cast<std::size_t>(g) + 1,
                                                   std::vector<std::set<Value>>(static_cast<std::size_t>(k)));
  for (int j = 1; j <= g; ++j) {
    const auto& rel = d.at("R" + std::to_string(j));
    for (const auto& t : rel.tuples) {
      for (int i = 0; i < k; ++i) column[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)].insert(t[static_cast<std::size_t>(i)]);
    }
    if (total > std::numeric_limits<std::uint64_t>::max() / rel.size()) return std::nullopt;
    total *= rel.size();
  }
  for (int i = 1; i <= k; ++i) {
    const auto& rel = d.at("T" + std::to_string(i));
    std::uint64_t expected = 1;
    for (int j = 1; j <= g; ++j) expected *= column[static_cast<std::size_t>(j)][static_cast<std::size_t>(i - 1)].size();
    if (rel.size() != expected) return std::nullopt;
    for (const auto& t : rel.tuples) {
      for (int j = 1; j <= g; ++j) {
        if (!column[static_cast<std::size_t>(j)][static_cast<std::size_t>(i - 1)].count(t[static_cast<std::size_t>(j - 1)])) {
          return std::nullopt;
        }
      }
    }
  }
  return total;
}

}  // namespace cqbound
