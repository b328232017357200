#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <cqbound/cqbound.hpp>

#include "support.hpp"

using namespace cqbound;

namespace {

Rational frac(long p, long q) {
  Rational r(p, q);
  r.canonicalize();
  return r;
}

Rational size_bound(const std::string& text) {
  auto a = cqtest::analyse(text);
  return size_bound_exponent(a.query, a.fds);
}

}  // namespace

TEST(SubsetId, Basics) {
  SubsetId s = SubsetId::of(std::vector<VarId>{0, 2});
  EXPECT_EQ(s.bits(), 5u);
  EXPECT_EQ(s.size(), 2);
  EXPECT_TRUE(s.contains(2));
  EXPECT_FALSE(s.contains(1));
  EXPECT_EQ(s.members(), (std::vector<VarId>{0, 2}));
  EXPECT_EQ(SubsetId::full(3).bits(), 7u);
  EXPECT_TRUE(s.subset_of(SubsetId::full(3)));
}

TEST(LinearForm, DropsEmptySubsetAndCancels) {
  LinearForm f;
  f.add(SubsetId(0), 5).add(SubsetId(1), 2).add(SubsetId(1), -2).add(SubsetId(3), 1);
  ASSERT_EQ(f.terms().size(), 1u);
  EXPECT_EQ(f.terms().begin()->first, SubsetId(3));
}

TEST(AtomExpression, TwoVariables) {
  // I(X;Y) = h(X) + h(Y) - h(XY); I(X|Y) = h(XY) - h(Y).
  LinearForm both = atom_expression(SubsetId(3), 2);
  EXPECT_EQ(both.terms().at(SubsetId(1)), 1);
  EXPECT_EQ(both.terms().at(SubsetId(2)), 1);
  EXPECT_EQ(both.terms().at(SubsetId(3)), -1);
  LinearForm x = atom_expression(SubsetId(1), 2);
  EXPECT_EQ(x.terms().size(), 2u);
  EXPECT_EQ(x.terms().at(SubsetId(3)), 1);
  EXPECT_EQ(x.terms().at(SubsetId(2)), -1);
}

TEST(AtomExpression, TripleInteraction) {
  // I(X;Y;Z) = sum h(single) - sum h(pair) + h(XYZ).
  LinearForm f = atom_expression(SubsetId(7), 3);
  for (std::uint32_t s = 1; s < 8; ++s) {
    int sign = std::popcount(s) % 2 == 1 ? 1 : -1;
    EXPECT_EQ(f.terms().at(SubsetId(s)), sign) << s;
  }
}

TEST(InformationAtoms, AgreeWithAtomExpressionAndInvert) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> dist(-5, 9);
  for (std::size_t k = 1; k <= 5; ++k) {
    EntropyVector<Rational> h(k);
    for (std::uint32_t s = 1; s < (1u << k); ++s) h[SubsetId(s)] = frac(dist(rng), 3);
    auto atoms = information_atoms(h);
    for (std::uint32_t s = 1; s < (1u << k); ++s) {
      EXPECT_EQ(atoms[s], h.evaluate(atom_expression(SubsetId(s), k))) << k << " " << s;
    }
    EXPECT_EQ(entropy_from_atoms(k, atoms), h);
  }
}

TEST(InformationAtoms, SubsetSumIdentity) {
  // h(T) is the sum of the atoms of the sets meeting T.
  EntropyVector<double> h(3);
  double vals[] = {0, 1.0, 1.5, 2.0, 0.5, 1.2, 1.7, 2.4};
  for (std::uint32_t s = 1; s < 8; ++s) h[SubsetId(s)] = vals[s];
  auto atoms = information_atoms(h);
  for (std::uint32_t t = 1; t < 8; ++t) {
    double sum = 0;
    for (std::uint32_t s = 1; s < 8; ++s) {
      if (s & t) sum += atoms[s];
    }
    EXPECT_NEAR(sum, vals[t], 1e-12);
  }
}

TEST(ElementalInequalities, Count) {
  for (std::size_t k = 1; k <= 6; ++k) {
    std::size_t pairs = k * (k - 1) / 2;
    std::size_t expected = k + pairs * (k >= 2 ? (std::size_t{1} << (k - 2)) : 0);
    EXPECT_EQ(elemental_inequalities(k).size(), expected) << k;
  }
}

TEST(ElementalInequalities, HoldOnEntropicVectors) {
  // Entropy of independent uniform bits with XOR structure: X, Y, Z = X^Y.
  EntropyVector<double> h(3);
  for (std::uint32_t s = 1; s < 8; ++s) h[SubsetId(s)] = std::popcount(s) == 1 ? 1.0 : 2.0;
  for (const auto& c : elemental_inequalities(3)) {
    EXPECT_GE(h.evaluate(c.form), -1e-12) << c.label;
  }
}

TEST(Simplex, SmallLp) {
  // max x + y  s.t.  x + 2y <= 4, 3x + y <= 6 -> x = 8/5, y = 6/5.
  LinearProgram lp;
  lp.k = 2;
  lp.objective.add(SubsetId(1), 1).add(SubsetId(2), 1);
  lp.constraints.push_back({LinearForm().add(SubsetId(1), 1).add(SubsetId(2), 2), Sense::LessEq, 4, ""});
  lp.constraints.push_back({LinearForm().add(SubsetId(1), 3).add(SubsetId(2), 1), Sense::LessEq, 6, ""});
  LpSolution sol = solve_exact(lp);
  EXPECT_EQ(sol.optimum, frac(14, 5));
  EXPECT_EQ(sol.vertex[SubsetId(1)], frac(8, 5));
  EXPECT_EQ(sol.vertex[SubsetId(2)], frac(6, 5));
}

TEST(Simplex, EqualityAndGreaterRows) {
  // max x  s.t.  x + y = 3, y >= 1 -> x = 2.
  LinearProgram lp;
  lp.k = 2;
  lp.objective.add(SubsetId(1), 1);
  lp.constraints.push_back({LinearForm().add(SubsetId(1), 1).add(SubsetId(2), 1), Sense::Equal, 3, ""});
  lp.constraints.push_back({LinearForm().add(SubsetId(2), 1), Sense::GreaterEq, 1, ""});
  EXPECT_EQ(solve_exact(lp).optimum, 2);
}

TEST(Simplex, InfeasibleAndUnbounded) {
  LinearProgram bad;
  bad.k = 1;
  bad.objective.add(SubsetId(1), 1);
  bad.constraints.push_back({LinearForm().add(SubsetId(1), 1), Sense::GreaterEq, 2, ""});
  bad.constraints.push_back({LinearForm().add(SubsetId(1), 1), Sense::LessEq, 1, ""});
  try {
    solve_exact(bad);
    FAIL();
  } catch (const SolverError& e) {
    EXPECT_EQ(e.kind(), SolverError::Kind::Infeasible);
  }
  LinearProgram open;
  open.k = 1;
  open.objective.add(SubsetId(1), 1);
  try {
    solve_exact(open);
    FAIL();
  } catch (const SolverError& e) {
    EXPECT_EQ(e.kind(), SolverError::Kind::Unbounded);
  }
}

TEST(Simplex, VertexSatisfiesConstraints) {
  auto a = cqtest::analyse(cqtest::load("loomis_whitney4.cq"));
  LinearProgram lp = build_size_lp(a.query, a.fds);
  LpSolution sol = solve_exact(lp);
  for (const auto& c : lp.constraints) {
    Rational v = sol.vertex.evaluate(c.form);
    if (c.relation == Sense::LessEq) {
      EXPECT_LE(v, c.bound) << c.label;
    }
    if (c.relation == Sense::GreaterEq) {
      EXPECT_GE(v, c.bound) << c.label;
    }
    if (c.relation == Sense::Equal) {
      EXPECT_EQ(v, c.bound) << c.label;
    }
  }
  EXPECT_EQ(sol.vertex.evaluate(lp.objective), sol.optimum);
}

TEST(SizeBound, KnownValues) {
  EXPECT_EQ(size_bound("Q(X,Y,Z) :- R(X,Y), S(Y,Z), T(Z,X)."), frac(3, 2));
  EXPECT_EQ(size_bound("Q(X,Z) :- R(X,Y), S(Y,Z)."), 2);
  EXPECT_EQ(size_bound("Q(X,Z) :- R(X,Y), S(Y,Z).\nkey S: 1"), 1);
  EXPECT_EQ(size_bound("Q(X,Y) :- R(X,Y)."), 1);
  EXPECT_EQ(size_bound("Q(X) :- R(X,X)."), 1);
  EXPECT_EQ(size_bound("Q(A,B,C,D) :- R(A,B,C), S(B,C,D), T(A,C,D), U(A,B,D)."), frac(4, 3));
  EXPECT_EQ(size_bound("Q(A,B,C,D) :- R(A,B), S(B,C), T(C,D), U(D,A)."), 2);
  EXPECT_EQ(size_bound("Q(A,B,C) :- R(X,A), S(X,B), T(X,C)."), 3);
  EXPECT_EQ(size_bound("Q(X,Y,Z) :- R(X,Y), S(Y,Z), T(Z,X).\nfd vars: X -> Y"), 1);
}

TEST(SizeBound, LpShape) {
  auto a = cqtest::analyse("Q(X,Z) :- R(X,Y), S(Y,Z).\nkey S: 1");
  LinearProgram lp = build_size_lp(a.query, a.fds);
  EXPECT_EQ(lp.k, 3u);
  std::size_t atom_rows = 0, fd_rows = 0;
  for (const auto& c : lp.constraints) {
    atom_rows += c.label.rfind("atom ", 0) == 0;
    fd_rows += c.label.rfind("fd ", 0) == 0;
  }
  EXPECT_EQ(atom_rows, 2u);
  EXPECT_EQ(fd_rows, 1u);
  EXPECT_EQ(lp.constraints.size(), 3u + elemental_inequalities(3).size());
}

TEST(SizeBound, RefusesAboveCapAndUnchasedInput) {
  auto a = cqtest::analyse(cqtest::load("gap_k4.cq"));
  EXPECT_THROW(size_bound_exponent(a.query, a.fds, LpOptions{6}), LimitError);
  Query raw = cqtest::load("key_chase.cq");
  EXPECT_THROW(size_bound_exponent(raw, instantiate_fds(raw)), InputError);
}

TEST(SizeBound, ExportMentionsEveryRow) {
  auto a = cqtest::analyse(cqtest::load("triangle.cq"));
  LinearProgram lp = build_size_lp(a.query, a.fds);
  std::string text = export_lp(a.query, lp);
  EXPECT_NE(text.find("maximize: +1 h{X,Y,Z}"), std::string::npos);
  EXPECT_NE(text.find("+1 h{X,Y} <= 1  # atom R"), std::string::npos);
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), lp.constraints.size() + 3);
}
