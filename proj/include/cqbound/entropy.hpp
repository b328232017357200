#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "query.hpp"
#include "rational.hpp"

namespace cqbound {

// A set of query variables, as a bitmask over canonical variable indices.
class SubsetId {
 public:
  constexpr SubsetId() = default;
  constexpr explicit SubsetId(std::uint32_t bits) : bits_(bits) {}

  static SubsetId of(std::span<const VarId> vars) {
    std::uint32_t bits = 0;
    for (auto v : vars) bits |= std::uint32_t{1} << v;
    return SubsetId(bits);
  }
  static constexpr SubsetId full(std::size_t k) {
    return SubsetId(k >= 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << k) - 1);
  }
  static constexpr SubsetId single(VarId v) { return SubsetId(std::uint32_t{1} << v); }

  constexpr std::uint32_t bits() const noexcept { return bits_; }
  constexpr bool empty() const noexcept { return bits_ == 0; }
  constexpr int size() const noexcept { return std::popcount(bits_); }
  constexpr bool contains(VarId v) const noexcept { return (bits_ >> v) & 1u; }
  constexpr bool intersects(SubsetId o) const noexcept { return (bits_ & o.bits_) != 0; }
  constexpr bool subset_of(SubsetId o) const noexcept { return (bits_ & ~o.bits_) == 0; }

  constexpr SubsetId operator|(SubsetId o) const noexcept { return SubsetId(bits_ | o.bits_); }
  constexpr SubsetId operator&(SubsetId o) const noexcept { return SubsetId(bits_ & o.bits_); }
  constexpr SubsetId minus(SubsetId o) const noexcept { return SubsetId(bits_ & ~o.bits_); }

  std::vector<VarId> members() const {
    std::vector<VarId> out;
    for (std::uint32_t b = bits_; b; b &= b - 1) out.push_back(static_cast<VarId>(std::countr_zero(b)));
    return out;
  }

  constexpr auto operator<=>(const SubsetId&) const = default;

 private:
  std::uint32_t bits_ = 0;
};

// Sparse linear combination of subset entropies h(S). The empty subset has
// entropy 0, so terms on it are discarded.
class LinearForm {
 public:
  LinearForm() = default;

  LinearForm& add(SubsetId s, const Rational& coeff) {
    if (s.empty() || coeff == 0) return *this;
    auto [it, fresh] = terms_.emplace(s, coeff);
    if (!fresh) {
      it->second += coeff;
      if (it->second == 0) terms_.erase(it);
    }
    return *this;
  }

  static LinearForm entropy(SubsetId s) { return LinearForm().add(s, 1); }

  const std::map<SubsetId, Rational>& terms() const noexcept { return terms_; }
  bool empty() const noexcept { return terms_.empty(); }

  template <class T>
  T evaluate(std::span<const T> h) const {
    T acc{};
    for (const auto& [s, c] : terms_) acc += coefficient_as<T>(c) * h[s.bits()];
    return acc;
  }

  bool operator==(const LinearForm&) const = default;

 private:
  template <class T>
  static T coefficient_as(const Rational& c) {
    if constexpr (std::is_same_v<T, double>) {
      return c.get_d();
    } else {
      return T(c);
    }
  }

  std::map<SubsetId, Rational> terms_;
};

enum class Sense { LessEq, Equal, GreaterEq };

struct Constraint {
  LinearForm form;
  Sense relation = Sense::LessEq;
  Rational bound = 0;
  std::string label;  // what the row encodes, for export and diagnostics
};

// maximize objective subject to constraints, over the variables h(S) for the
// 2^k - 1 nonempty subsets S of [k].
struct LinearProgram {
  LinearForm objective;
  std::vector<Constraint> constraints;
  std::size_t k = 0;
};

// Values h(S) indexed by subset bitmask; slot 0 holds h(empty) = 0.
template <class T>
class EntropyVector {
 public:
  EntropyVector() = default;
  explicit EntropyVector(std::size_t k) : k_(k), values_(std::size_t{1} << k, T{}) {}

  std::size_t k() const noexcept { return k_; }
  T& operator[](SubsetId s) { return values_.at(s.bits()); }
  const T& operator[](SubsetId s) const { return values_.at(s.bits()); }
  std::span<const T> values() const noexcept { return values_; }
  std::span<T> values() noexcept { return values_; }

  T evaluate(const LinearForm& form) const { return form.evaluate<T>(std::span<const T>(values_)); }

  bool operator==(const EntropyVector&) const = default;

 private:
  std::size_t k_ = 0;
  std::vector<T> values_;
};

/// Information-diagram atom I(S | x_{[k]-S}) as a linear form in entropies:
///   sum over nonempty T of S of (-1)^{|T|+1} h(T u ([k]-S))  -  h([k]-S)
/// where the last term is absent when S = [k].
inline LinearForm atom_expression(SubsetId s, std::size_t k) {
  if (s.empty()) throw std::invalid_argument("atom_expression: empty subset");
  SubsetId full = SubsetId::full(k);
  if (!s.subset_of(full)) throw std::invalid_argument("atom_expression: subset outside [k]");
  SubsetId rest = full.minus(s);
  LinearForm out;
  for (std::uint32_t t = s.bits(); t; t = (t - 1) & s.bits()) {
    SubsetId sub(t);
    out.add(sub | rest, sub.size() % 2 == 1 ? 1 : -1);
  }
  out.add(rest, -1);
  return out;
}

/// All 2^k atoms of the information diagram at once (slot 0 unused, set to 0).
/// With F(W) = h([k]) - h([k]-W) = sum of atoms inside W, the atoms are the
/// Moebius inversion of F over the subset lattice.
template <class T>
std::vector<T> information_atoms(const EntropyVector<T>& h) {
  const std::size_t n = std::size_t{1} << h.k();
  const std::uint32_t full = SubsetId::full(h.k()).bits();
  std::vector<T> f(n);
  for (std::uint32_t w = 1; w < n; ++w) f[w] = h.values()[full] - h.values()[full & ~w];
  for (std::size_t bit = 0; bit < h.k(); ++bit) {
    for (std::uint32_t w = 0; w < n; ++w) {
      if (w >> bit & 1u) f[w] -= f[w ^ (1u << bit)];
    }
  }
  return f;
}

/// Inverse of information_atoms: h(T) = sum of atoms a(S) with S meeting T.
template <class T>
EntropyVector<T> entropy_from_atoms(std::size_t k, const std::vector<T>& atoms) {
  const std::size_t n = std::size_t{1} << k;
  std::vector<T> f(atoms.begin(), atoms.end());
  f[0] = T{};
  for (std::size_t bit = 0; bit < k; ++bit) {
    for (std::uint32_t w = 0; w < n; ++w) {
      if (w >> bit & 1u) f[w] += f[w ^ (1u << bit)];
    }
  }
  // f(W) = sum of atoms inside W; h(T) = total - (atoms inside [k]-T).
  EntropyVector<T> h(k);
  const std::uint32_t full = static_cast<std::uint32_t>(n - 1);
  for (std::uint32_t t = 1; t < n; ++t) h[SubsetId(t)] = f[full] - f[full & ~t];
  return h;
}

inline std::string subset_name(const Query& q, SubsetId s) {
  std::string out = "{";
  bool first = true;
  for (auto v : s.members()) {
    if (!first) out += ",";
    out += v < q.num_vars() ? q.var_name(v) : "#" + std::to_string(v);
    first = false;
  }
  return out + "}";
}

}  // namespace cqbound
