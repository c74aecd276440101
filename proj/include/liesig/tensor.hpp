#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "liesig/ring.hpp"
#include "liesig/words.hpp"

namespace liesig {

/// Flat index of a word inside its level: i1...in -> sum (i_k - 1) d^(n-k).
inline std::size_t flat_index(const Word& w, int d) {
  std::size_t idx = 0;
  for (Letter a : w) idx = idx * static_cast<std::size_t>(d) + static_cast<std::size_t>(a - 1);
  return idx;
}

inline Word word_at(int level, std::size_t index, int d) {
  std::vector<Letter> letters(static_cast<std::size_t>(level));
  for (int k = level - 1; k >= 0; --k) {
    letters[static_cast<std::size_t>(k)] = static_cast<Letter>(index % static_cast<std::size_t>(d)) + 1;
    index /= static_cast<std::size_t>(d);
  }
  return Word(std::move(letters));
}

inline std::size_t level_width(int d, int level) {
  std::size_t w = 1;
  for (int i = 0; i < level; ++i) w *= static_cast<std::size_t>(d);
  return w;
}

/// An element of the tensor algebra truncated at level m, stored densely.
/// Level n holds d^n coefficients in flat_index order; level 0 is the
/// coefficient of the empty word.
template <class C>
class TensorElement {
public:
  using traits = ring_traits<C>;

  TensorElement(int dim, int level) : dim_(dim), level_(level) {
    if (dim < 1) throw std::invalid_argument("tensor dimension must be at least 1");
    if (level < 0) throw std::invalid_argument("tensor level must be nonnegative");
    levels_.reserve(static_cast<std::size_t>(level) + 1);
    for (int n = 0; n <= level; ++n) levels_.emplace_back(level_width(dim, n), traits::zero());
  }

  static TensorElement identity(int dim, int level) {
    TensorElement t(dim, level);
    t.epsilon() = traits::one();
    return t;
  }

  /// The level-1 element sum v_i * e_i.
  static TensorElement from_vector(int level, std::span<const C> v) {
    TensorElement t(static_cast<int>(v.size()), level);
    if (level >= 1) std::copy(v.begin(), v.end(), t.levels_[1].begin());
    return t;
  }

  int dim() const noexcept { return dim_; }
  int level() const noexcept { return level_; }

  C& epsilon() { return levels_[0][0]; }
  const C& epsilon() const { return levels_[0][0]; }

  std::span<C> level_coefficients(int n) { return levels_.at(static_cast<std::size_t>(n)); }
  std::span<const C> level_coefficients(int n) const { return levels_.at(static_cast<std::size_t>(n)); }

  C& operator[](const Word& w) { return checked_level(w)[flat_index(w, dim_)]; }
  const C& operator[](const Word& w) const {
    return const_cast<TensorElement*>(this)->checked_level(w)[flat_index(w, dim_)];
  }

  /// Adds c * w; words longer than the truncation level are ignored.
  TensorElement& add_term(const Word& w, const C& c) {
    if (static_cast<int>(w.size()) <= level_) (*this)[w] += c;
    return *this;
  }

  bool same_shape(const TensorElement& o) const noexcept { return dim_ == o.dim_ && level_ == o.level_; }

  TensorElement& operator+=(const TensorElement& o) {
    require_same_shape(o);
    for (std::size_t n = 0; n < levels_.size(); ++n)
      for (std::size_t i = 0; i < levels_[n].size(); ++i) levels_[n][i] += o.levels_[n][i];
    return *this;
  }
  TensorElement& operator-=(const TensorElement& o) {
    require_same_shape(o);
    for (std::size_t n = 0; n < levels_.size(); ++n)
      for (std::size_t i = 0; i < levels_[n].size(); ++i) levels_[n][i] -= o.levels_[n][i];
    return *this;
  }
  TensorElement& operator*=(const C& s) {
    for (auto& lvl : levels_)
      for (auto& c : lvl) c *= s;
    return *this;
  }

  friend TensorElement operator+(TensorElement a, const TensorElement& b) { return a += b; }
  friend TensorElement operator-(TensorElement a, const TensorElement& b) { return a -= b; }
  friend TensorElement operator*(TensorElement a, const C& s) { return a *= s; }
  friend TensorElement operator*(const C& s, TensorElement a) { return a *= s; }
  friend TensorElement operator-(TensorElement a) {
    for (auto& lvl : a.levels_)
      for (auto& c : lvl) c = -c;
    return a;
  }

  friend bool operator==(const TensorElement& a, const TensorElement& b) {
    return a.same_shape(b) && a.levels_ == b.levels_;
  }

  /// Largest coefficient magnitude over all levels.
  double max_norm() const {
    double r = 0;
    for (const auto& lvl : levels_)
      for (const auto& c : lvl) r = std::max(r, traits::magnitude(c));
    return r;
  }

  void require_same_shape(const TensorElement& o) const {
    if (!same_shape(o)) throw std::invalid_argument("tensor elements differ in dimension or level");
  }

private:
  std::vector<C>& checked_level(const Word& w) {
    if (static_cast<int>(w.size()) > level_) throw std::out_of_range("word longer than truncation level");
    for (Letter a : w)
      if (a < 1 || a > dim_) throw std::out_of_range("letter outside alphabet");
    return levels_[w.size()];
  }

  int dim_;
  int level_;
  std::vector<std::vector<C>> levels_;
};

/// Truncated concatenation product: (ab)(w) = sum over w = uv of a(u) b(v).
template <class C>
TensorElement<C> concat_product(const TensorElement<C>& a, const TensorElement<C>& b) {
  a.require_same_shape(b);
  using traits = ring_traits<C>;
  const int d = a.dim(), m = a.level();
  TensorElement<C> out(d, m);
  for (int n = 0; n <= m; ++n) {
    auto dest = out.level_coefficients(n);
    for (int j = 0; j <= n; ++j) {
      auto left = a.level_coefficients(j);
      auto right = b.level_coefficients(n - j);
      const std::size_t stride = right.size();
      for (std::size_t i = 0; i < left.size(); ++i) {
        if (traits::is_zero(left[i])) continue;
        const C& l = left[i];
        C* row = dest.data() + i * stride;
        for (std::size_t k = 0; k < stride; ++k)
          if (!traits::is_zero(right[k])) row[k] += l * right[k];
      }
    }
  }
  return out;
}

template <class C>
TensorElement<C> operator*(const TensorElement<C>& a, const TensorElement<C>& b) {
  return concat_product(a, b);
}

/// exp(x) = sum_{i<=m} x^i / i!, evaluated as 1 + x(1 + x/2(1 + x/3(...))).
template <class C>
TensorElement<C> tensor_exp(const TensorElement<C>& x) {
  using traits = ring_traits<C>;
  if (!traits::is_zero(x.epsilon())) throw std::invalid_argument("exp needs a zero empty-word component");
  const int m = x.level();
  auto acc = TensorElement<C>::identity(x.dim(), m);
  for (int i = m; i >= 1; --i) {
    acc = concat_product(x, acc);
    acc *= traits::from_rational(make_rational(1, i));
    acc.epsilon() += traits::one();
  }
  return acc;
}

/// Tolerance on the empty-word component accepted by tensor_log for inexact rings.
inline constexpr double kLogEpsilonTolerance = 1e-9;

/// log(1 + z) = z - z^2/2 + ... +- z^m/m, for x = 1 + z. For inexact rings the
/// empty-word component may be within kLogEpsilonTolerance of 1, and x is
/// divided through by it first.
template <class C>
TensorElement<C> tensor_log(const TensorElement<C>& x) {
  using traits = ring_traits<C>;
  TensorElement<C> z = x;
  if constexpr (traits::exact) {
    if (!traits::is_zero(x.epsilon() - traits::one()))
      throw std::invalid_argument("log needs an empty-word component of 1");
  } else {
    const double e = traits::magnitude(x.epsilon());
    if (!(traits::magnitude(x.epsilon() - traits::one()) <= kLogEpsilonTolerance))
      throw std::invalid_argument("log needs an empty-word component of 1");
    if (e != 1.0) z *= traits::one() / x.epsilon();
  }
  z.epsilon() = traits::zero();
  const int m = x.level();
  if (m == 0) return z;
  // Horner: r_m = 1/m, r_i = 1/i - z r_{i+1}, log = z r_1.
  auto acc = TensorElement<C>::identity(x.dim(), m);
  acc *= traits::from_rational(make_rational(1, m));
  for (int i = m - 1; i >= 1; --i) {
    acc = -concat_product(z, acc);
    acc.epsilon() += traits::from_rational(make_rational(1, i));
  }
  return concat_product(z, acc);
}

/// A piecewise-linear path given by its vertices in R^d.
class PathPoints {
public:
  explicit PathPoints(int dim) : dim_(dim) {
    if (dim < 1) throw std::invalid_argument("path dimension must be at least 1");
  }
  PathPoints(int dim, const std::vector<std::vector<double>>& points) : PathPoints(dim) {
    for (const auto& p : points) push_back(p);
  }

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return coords_.size() / static_cast<std::size_t>(dim_); }
  bool empty() const noexcept { return coords_.empty(); }

  void push_back(std::span<const double> p) {
    if (p.size() != static_cast<std::size_t>(dim_)) throw std::invalid_argument("point has wrong dimension");
    coords_.insert(coords_.end(), p.begin(), p.end());
  }
  void push_back(std::initializer_list<double> p) { push_back(std::span<const double>(p.begin(), p.size())); }

  std::span<const double> operator[](std::size_t i) const {
    return std::span<const double>(coords_).subspan(i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_));
  }
  std::span<double> operator[](std::size_t i) {
    return std::span<double>(coords_).subspan(i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_));
  }

  /// Displacement of segment i, from vertex i to vertex i+1.
  std::vector<double> displacement(std::size_t i) const {
    auto a = (*this)[i], b = (*this)[i + 1];
    std::vector<double> out(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = b[k] - a[k];
    return out;
  }

  const std::vector<double>& coordinates() const noexcept { return coords_; }

private:
  int dim_;
  std::vector<double> coords_;
};

/// Signature of a straight segment: coefficient of i1...in is prod v[i_j] / n!.
template <class C>
TensorElement<C> line_signature(std::span<const C> displacement, int m) {
  if (m < 1) throw std::invalid_argument("level must be at least 1");
  using traits = ring_traits<C>;
  const int d = static_cast<int>(displacement.size());
  auto out = TensorElement<C>::identity(d, m);
  for (int n = 1; n <= m; ++n) {
    auto prev = out.level_coefficients(n - 1);
    auto cur = out.level_coefficients(n);
    const C inv_n = traits::from_rational(make_rational(1, n));
    for (std::size_t i = 0; i < prev.size(); ++i) {
      const C scaled = prev[i] * inv_n;
      for (int k = 0; k < d; ++k) cur[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(k)] = scaled * displacement[static_cast<std::size_t>(k)];
    }
  }
  return out;
}

/// Chen's identity: the product of the segment signatures.
inline TensorElement<double> path_signature(const PathPoints& path, int m) {
  if (path.empty()) throw std::invalid_argument("path has no points");
  auto sig = TensorElement<double>::identity(path.dim(), m);
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    auto disp = path.displacement(i);
    sig = concat_product(sig, line_signature<double>(disp, m));
  }
  return sig;
}

}  // namespace liesig
