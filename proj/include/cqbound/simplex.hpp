#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "entropy.hpp"
#include "rational.hpp"

namespace cqbound {

class SolverError : public std::runtime_error {
 public:
  enum class Kind { Infeasible, Unbounded };
  SolverError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

struct LpSolution {
  Rational optimum;
  EntropyVector<Rational> vertex;
  std::size_t pivots = 0;
};

namespace detail {

// Exact dictionary simplex for  max c.x  s.t.  A x <= b,  x >= 0.
// Rows are kept in dictionary form: basic_i = D[i][n+1] - sum_j D[i][j] * nonbasic_j.
// Column n is the auxiliary variable of the phase-one problem.
// Pivoting follows Bland's rule: the entering variable is the lowest-indexed one
// with an improving reduced cost, the leaving one is the lowest-indexed basic
// variable among the minimum ratios.
class DictionarySimplex {
 public:
  using SparseRow = std::vector<std::pair<std::size_t, Rational>>;

  DictionarySimplex(const std::vector<SparseRow>& rows, const std::vector<Rational>& rhs,
                    const std::vector<Rational>& objective)
      : m_(rows.size()), n_(objective.size()), basic_(m_), nonbasic_(n_ + 1),
        dict_(m_ + 2, std::vector<Rational>(n_ + 2)) {
    for (std::size_t i = 0; i < m_; ++i) {
      for (const auto& [j, v] : rows[i]) dict_[i][j] += v;
      dict_[i][n_] = -1;
      dict_[i][n_ + 1] = rhs[i];
      basic_[i] = static_cast<long>(n_ + i);
    }
    for (std::size_t j = 0; j < n_; ++j) {
      nonbasic_[j] = static_cast<long>(j);
      dict_[m_][j] = -objective[j];
    }
    nonbasic_[n_] = -1;
    dict_[m_ + 1][n_] = 1;
  }

  // Returns the optimum; fills `x` with an optimal basic feasible solution.
  Rational solve(std::vector<Rational>& x) {
    std::size_t r = 0;
    for (std::size_t i = 1; i < m_; ++i) {
      if (dict_[i][n_ + 1] < dict_[r][n_ + 1]) r = i;
    }
    if (m_ > 0 && dict_[r][n_ + 1] < 0) {
      pivot(r, n_);
      if (!run(2) || dict_[m_ + 1][n_ + 1] < 0) {
        throw SolverError(SolverError::Kind::Infeasible, "linear program is infeasible");
      }
      for (std::size_t i = 0; i < m_; ++i) {
        if (basic_[i] != -1) continue;
        std::size_t s = n_ + 1;
        for (std::size_t j = 0; j <= n_; ++j) {
          if (dict_[i][j] != 0 && (s == n_ + 1 || nonbasic_[j] < nonbasic_[s])) s = j;
        }
        if (s != n_ + 1) pivot(i, s);
      }
    }
    if (!run(1)) throw SolverError(SolverError::Kind::Unbounded, "linear program is unbounded");
    x.assign(n_, Rational(0));
    for (std::size_t i = 0; i < m_; ++i) {
      if (basic_[i] >= 0 && static_cast<std::size_t>(basic_[i]) < n_) x[basic_[i]] = dict_[i][n_ + 1];
    }
    return dict_[m_][n_ + 1];
  }

  std::size_t pivots() const noexcept { return pivots_; }

 private:
  bool run(int phase) {
    const std::size_t obj = m_ + static_cast<std::size_t>(phase) - 1;
    for (;;) {
      std::size_t s = n_ + 1;
      for (std::size_t j = 0; j <= n_; ++j) {
        if (nonbasic_[j] == -phase) continue;
        if (dict_[obj][j] < 0 && (s == n_ + 1 || nonbasic_[j] < nonbasic_[s])) s = j;
      }
      if (s == n_ + 1) return true;

      std::size_t r = m_;
      Rational best;
      for (std::size_t i = 0; i < m_; ++i) {
        if (dict_[i][s] <= 0) continue;
        Rational ratio = dict_[i][n_ + 1] / dict_[i][s];
        if (r == m_ || ratio < best || (ratio == best && basic_[i] < basic_[r])) {
          r = i;
          best = std::move(ratio);
        }
      }
      if (r == m_) return false;
      pivot(r, s);
    }
  }

  void pivot(std::size_t r, std::size_t s) {
    ++pivots_;
    auto& row = dict_[r];
    Rational inv = 1 / row[s];
    nonzero_.clear();
    for (std::size_t j = 0; j < n_ + 2; ++j) {
      if (j != s && row[j] != 0) nonzero_.push_back(j);
    }
    Rational factor, tmp;
    for (std::size_t i = 0; i < m_ + 2; ++i) {
      if (i == r || dict_[i][s] == 0) continue;
      auto& other = dict_[i];
      factor = other[s] * inv;
      for (auto j : nonzero_) {
        tmp = row[j] * factor;
        other[j] -= tmp;
      }
      other[s] = -factor;
    }
    for (auto j : nonzero_) row[j] *= inv;
    row[s] = inv;
    std::swap(basic_[r], nonbasic_[s]);
  }

  std::size_t m_, n_;
  std::vector<long> basic_, nonbasic_;
  std::vector<std::vector<Rational>> dict_;
  std::vector<std::size_t> nonzero_;
  std::size_t pivots_ = 0;
};

}  // namespace detail

/// Solves an entropy LP exactly. The LP variables are subset entropies, which
/// are nonnegative, so every h(S) carries the bound h(S) >= 0. Equalities are
/// split into two inequalities. Throws SolverError when infeasible or unbounded.
inline LpSolution solve_exact(const LinearProgram& lp) {
  const std::size_t n = (std::size_t{1} << lp.k) - 1;
  std::vector<detail::DictionarySimplex::SparseRow> rows;
  std::vector<Rational> rhs;
  auto push = [&](const LinearForm& form, const Rational& bound, int sign) {
    detail::DictionarySimplex::SparseRow row;
    for (const auto& [s, c] : form.terms()) {
      if (s.bits() > n) throw std::invalid_argument("solve_exact: subset outside [k]");
      row.emplace_back(s.bits() - 1, sign > 0 ? c : Rational(-c));
    }
    rows.push_back(std::move(row));
    rhs.push_back(sign > 0 ? bound : Rational(-bound));
  };
  for (const auto& c : lp.constraints) {
    if (c.form.empty()) throw std::invalid_argument("solve_exact: empty constraint form");
    switch (c.relation) {
      case Sense::LessEq: push(c.form, c.bound, 1); break;
      case Sense::GreaterEq: push(c.form, c.bound, -1); break;
      case Sense::Equal:
        push(c.form, c.bound, 1);
        push(c.form, c.bound, -1);
        break;
    }
  }
  std::vector<Rational> objective(n);
  for (const auto& [s, c] : lp.objective.terms()) {
    if (s.bits() > n) throw std::invalid_argument("solve_exact: subset outside [k]");
    objective[s.bits() - 1] = c;
  }

  detail::DictionarySimplex simplex(rows, rhs, objective);
  std::vector<Rational> x;
  LpSolution out;
  out.optimum = simplex.solve(x);
  out.pivots = simplex.pivots();
  out.vertex = EntropyVector<Rational>(lp.k);
  for (std::size_t j = 0; j < n; ++j) out.vertex[SubsetId(static_cast<std::uint32_t>(j + 1))] = x[j];
  return out;
}

}  // namespace cqbound
