#include <gtest/gtest.h>

#include <random>

#include <cqbound/cqbound.hpp>

#include "support.hpp"

using namespace cqbound;

namespace {

// Exhaustive truth-table oracle for SAT_i.
bool brute_sat(const SatInstance& sat) {
  for (std::uint32_t a = 0; a < (1u << sat.num_vars); ++a) {
    auto val = [a](VarId v) { return (a >> v & 1u) != 0; };
    bool ok = true;
    for (auto v : sat.c1) ok = ok && !val(v);
    bool any = false;
    for (auto v : sat.c2) any = any || val(v);
    ok = ok && any;
    for (const auto& c : sat.c3) {
      bool clause = c.negated && !val(*c.negated);
      for (auto v : c.positive) clause = clause || val(v);
      ok = ok && clause;
    }
    if (ok) return true;
  }
  return false;
}

bool satisfies(const SatInstance& sat, const std::vector<bool>& a) {
  for (auto v : sat.c1) {
    if (a[v]) return false;
  }
  bool any = false;
  for (auto v : sat.c2) any = any || a[v];
  if (!any) return false;
  for (const auto& c : sat.c3) {
    bool clause = c.negated && !a[*c.negated];
    for (auto v : c.positive) clause = clause || a[v];
    if (!clause) return false;
  }
  return true;
}

}  // namespace

TEST(Sparsity, ChainWithKeyIsPreserving) {
  auto a = cqtest::analyse(cqtest::load("chain_key.cq"));
  auto res = is_sparsity_preserving(a.query, a.fds);
  EXPECT_TRUE(res.preserving);
  ASSERT_TRUE(res.failing_relation);
  EXPECT_EQ(a.query.body()[*res.failing_relation].relation, "R");
  EXPECT_FALSE(res.witness);
}

TEST(Sparsity, ChainWithoutFdsIsNot) {
  auto a = cqtest::analyse(cqtest::load("chain.cq"));
  auto res = is_sparsity_preserving(a.query, a.fds);
  EXPECT_FALSE(res.preserving);
  ASSERT_TRUE(res.witness);
  EXPECT_EQ(res.witness->labels, (std::vector<std::set<ColorId>>{{1}, {0}, {}}));
  EXPECT_EQ(coloring_ratio(a.query, *res.witness), 2);
  EXPECT_EQ(*res.lower_bound_exponent, 2);
}

TEST(Sparsity, SatInstanceShape) {
  auto a = cqtest::analyse(cqtest::load("chain_key.cq"));
  SatInstance sat = build_sat(a.query, a.fds, 0);
  EXPECT_EQ(sat.c1, (std::set<VarId>{0, 2}));
  EXPECT_EQ(sat.c2, (std::set<VarId>{1}));
  ASSERT_EQ(sat.c3.size(), 1u);
  EXPECT_EQ(sat.c3[0].positive, (std::vector<VarId>{2}));
  EXPECT_EQ(sat.c3[0].negated, VarId{1});
  EXPECT_FALSE(solve_sat_pass(sat).satisfiable);
}

TEST(Sparsity, RejectsWideFdsAndUnchasedInput) {
  auto a = cqtest::analyse("Q(A,B,C,D) :- R(A,B,C,D).\nfd R: 1,2,3 -> 4");
  EXPECT_THROW(build_sat(a.query, a.fds, 0), std::invalid_argument);
  EXPECT_NO_THROW(is_sparsity_preserving(a.query, a.fds));
  Query raw = cqtest::load("key_chase.cq");
  EXPECT_THROW(is_sparsity_preserving(raw, instantiate_fds(raw)), InputError);
}

TEST(Sparsity, WideFdQuery) {
  // A B C determine D, so any coloring of D comes from the atom R.
  auto a = cqtest::analyse("Q(D) :- R(A,B,C), S(C,D).\nfd vars: A,B,C -> D");
  auto res = is_sparsity_preserving(a.query, a.fds);
  EXPECT_EQ(res.preserving, color_number(a.query, a.fds).value == 1);
}

TEST(Property, PassSolverMatchesTruthTable) {
  std::mt19937 rng(3);
  for (int iter = 0; iter < 400; ++iter) {
    const std::size_t n = 1 + rng() % 12;
    SatInstance sat;
    sat.num_vars = n;
    for (VarId v = 0; v < n; ++v) {
      if (rng() % 3 == 0) sat.c1.insert(v);
    }
    for (VarId v = 0; v < n; ++v) {
      if (rng() % 3 == 0 && !sat.c1.count(v)) sat.c2.insert(v);
    }
    const std::size_t clauses = rng() % 10;
    for (std::size_t c = 0; c < clauses; ++c) {
      HornClause h;
      std::size_t pos = rng() % 3;
      for (std::size_t i = 0; i < pos; ++i) h.positive.push_back(static_cast<VarId>(rng() % n));
      if (pos == 0 || rng() % 4) h.negated = static_cast<VarId>(rng() % n);
      sat.c3.push_back(h);
    }
    const bool expected = brute_sat(sat);
    SatOutcome out = solve_sat_pass(sat, [&](const SatInstance& mid) { EXPECT_EQ(brute_sat(mid), expected) << iter; });
    EXPECT_EQ(out.satisfiable, expected) << iter;
    if (out.satisfiable) {
      EXPECT_TRUE(satisfies(sat, out.assignment)) << iter;
    }
    EXPECT_LE(out.passes, n - sat.c1.size() + 1) << iter;
  }
}

TEST(Property, DecisionMatchesColorNumberOne) {
  std::mt19937 rng(23);
  for (int i = 0; i < 80; ++i) {
    auto a = cqtest::analyse(cqtest::random_query_text(rng));
    auto res = is_sparsity_preserving(a.query, a.fds);
    Rational c = color_number(a.query, a.fds).value;
    EXPECT_EQ(res.preserving, c == 1) << to_string(a.query);
    if (!res.preserving) {
      const auto m = static_cast<long>(a.query.body().size());
      EXPECT_TRUE(validate_coloring(a.query, a.fds, *res.witness).empty()) << to_string(a.query);
      EXPECT_GE(coloring_ratio(a.query, *res.witness), Rational(m, m - 1)) << to_string(a.query);
      EXPECT_LE(coloring_ratio(a.query, *res.witness), c) << to_string(a.query);
    }
  }
}

TEST(Property, SatForEveryAtomAgreesWithTruthTable) {
  std::mt19937 rng(29);
  for (int i = 0; i < 80; ++i) {
    auto a = cqtest::analyse(cqtest::random_query_text(rng));
    auto r = reduce_fds(a.query, a.fds);
    for (std::size_t atom = 0; atom < a.query.body().size(); ++atom) {
      SatInstance sat = build_sat(r.query, r.fds, atom);
      ASSERT_LE(sat.num_vars, 20u);
      SatOutcome out = solve_sat_pass(sat);
      EXPECT_EQ(out.satisfiable, brute_sat(sat));
      EXPECT_LE(out.passes, sat.num_vars);
    }
  }
}
