#pragma once

#include <cmath>
#include <cstdint>

#include <gmpxx.h>

namespace liesig {

using Rational = mpq_class;

// Coefficient rings. A ring C needs +, -, *, unary -, and a traits
// specialization providing the constants and the zero test below.
template <class C>
struct ring_traits;

template <>
struct ring_traits<double> {
  static constexpr bool exact = false;
  static double zero() { return 0.0; }
  static double one() { return 1.0; }
  static double from_int(std::int64_t n) { return static_cast<double>(n); }
  static double from_rational(const Rational& q) { return q.get_d(); }
  static bool is_zero(double x) { return x == 0.0; }
  static double magnitude(double x) { return std::abs(x); }
};

template <>
struct ring_traits<Rational> {
  static constexpr bool exact = true;
  static Rational zero() { return Rational(0); }
  static Rational one() { return Rational(1); }
  static Rational from_int(std::int64_t n) { return Rational(static_cast<long>(n)); }
  static Rational from_rational(const Rational& q) { return q; }
  static bool is_zero(const Rational& x) { return sgn(x) == 0; }
  static double magnitude(const Rational& x) { return std::abs(x.get_d()); }
};

template <class C>
concept CoefficientRing = requires(const C& a, const C& b) {
  { a + b };
  { a - b };
  { a * b };
  { -a };
  { ring_traits<C>::zero() };
  { ring_traits<C>::is_zero(a) };
};

inline Rational make_rational(long p, long q) {
  Rational r(p, q);
  r.canonicalize();
  return r;
}

}  // namespace liesig
