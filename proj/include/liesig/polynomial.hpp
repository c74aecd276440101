#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <map>
#include <vector>

#include "liesig/ring.hpp"

namespace liesig {

using VariableId = std::uint32_t;

/// Product of variables, kept sorted so that equal monomials compare equal.
using Monomial = std::vector<VariableId>;

/// Sparse multivariate polynomial with exact rational coefficients. Zero
/// coefficients are never stored.
class Polynomial {
public:
  using Terms = std::map<Monomial, Rational>;

  Polynomial() = default;
  Polynomial(long c) {  // NOLINT: implicit, like a scalar
    if (c != 0) terms_.emplace(Monomial{}, Rational(c));
  }
  explicit Polynomial(const Rational& c) {
    if (sgn(c) != 0) terms_.emplace(Monomial{}, c);
  }

  static Polynomial variable(VariableId v) {
    Polynomial p;
    p.terms_.emplace(Monomial{v}, Rational(1));
    return p;
  }

  const Terms& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }

  Rational coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  void add_term(const Monomial& m, const Rational& c) {
    if (sgn(c) == 0) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (inserted) return;
    it->second += c;
    if (sgn(it->second) == 0) terms_.erase(it);
  }

  Polynomial& operator+=(const Polynomial& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator-(Polynomial a) {
    for (auto& [m, c] : a.terms_) c = -c;
    return a;
  }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial out;
    if (a.is_zero() || b.is_zero()) return out;
    Monomial prod;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) {
        prod.clear();
        std::merge(ma.begin(), ma.end(), mb.begin(), mb.end(), std::back_inserter(prod));
        out.add_term(prod, ca * cb);
      }
    return out;
  }
  friend bool operator==(const Polynomial&, const Polynomial&) = default;

  /// Evaluates with values[v] substituted for variable v.
  template <class Values>
  double evaluate(const Values& values) const {
    double total = 0;
    for (const auto& [m, c] : terms_) {
      double t = c.get_d();
      for (VariableId v : m) t *= values[v];
      total += t;
    }
    return total;
  }

  /// Largest total degree among the terms (0 for constants and zero).
  std::size_t degree() const {
    std::size_t d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.size());
    return d;
  }

private:
  Terms terms_;
};

template <>
struct ring_traits<Polynomial> {
  static constexpr bool exact = true;
  static Polynomial zero() { return {}; }
  static Polynomial one() { return Polynomial(1L); }
  static Polynomial from_int(std::int64_t n) { return Polynomial(static_cast<long>(n)); }
  static Polynomial from_rational(const Rational& q) { return Polynomial(q); }
  static bool is_zero(const Polynomial& p) { return p.is_zero(); }
  static double magnitude(const Polynomial& p) {
    double m = 0;
    for (const auto& [mono, c] : p.terms()) m = std::max(m, std::abs(c.get_d()));
    return m;
  }
};

}  // namespace liesig
