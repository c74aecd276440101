#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "liesig/bracket_tree.hpp"
#include "liesig/errors.hpp"
#include "liesig/ring.hpp"
#include "liesig/tensor.hpp"
#include "liesig/words.hpp"

namespace liesig {

/// sigma: a letter maps to itself, w = uv (standard factorization) to [sigma(u), sigma(v)].
inline BracketTree sigma_tree(const Word& w) {
  if (!is_lyndon(w)) throw std::invalid_argument("sigma is only defined on Lyndon words");
  if (w.size() == 1) return BracketTree::leaf(w[0]);
  auto [u, v] = standard_factorization(w);
  return BracketTree::bracket(sigma_tree(u), sigma_tree(v));
}

/// Lyndon-basis coordinates with integer coefficients, sorted by basis index.
using SparseLie = std::vector<std::pair<std::size_t, std::int64_t>>;

/// The Lyndon basis of the free Lie algebra on d letters up to level m,
/// with the tables every Lie computation needs: standard factorizations,
/// rho(sigma(w)) for each basis word, and the bracket of every pair of
/// basis elements whose levels sum to at most m. Built once, then read-only.
///
/// Basis indices run level-ascending and lexicographically within a level.
class LyndonBasis {
public:
  LyndonBasis(int dim, int level) : dim_(dim), level_(level) {
    if (level < 1) throw std::invalid_argument("level must be at least 1");
    Alphabet alphabet(dim);
    auto levels = generate_lyndon_words(alphabet, level);
    level_begin_.push_back(0);
    for (auto& lvl : levels) {
      for (auto& w : lvl) words_.push_back(std::move(w));
      level_begin_.push_back(words_.size());
    }
    for (std::size_t i = 0; i < words_.size(); ++i) index_.emplace(words_[i], i);
    build_factorizations();
    build_rho();
    build_brackets();
  }

  static std::shared_ptr<const LyndonBasis> make(int dim, int level) {
    return std::make_shared<const LyndonBasis>(dim, level);
  }

  int dim() const noexcept { return dim_; }
  int level() const noexcept { return level_; }
  std::size_t size() const noexcept { return words_.size(); }

  const Word& word(std::size_t i) const { return words_.at(i); }
  const std::vector<Word>& words() const noexcept { return words_; }
  int word_level(std::size_t i) const { return static_cast<int>(words_.at(i).size()); }

  std::optional<std::size_t> index_of(const Word& w) const {
    auto it = index_.find(w);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Basis indices of level n form [level_begin(n), level_end(n)).
  std::size_t level_begin(int n) const { return level_begin_.at(static_cast<std::size_t>(n - 1)); }
  std::size_t level_end(int n) const { return level_begin_.at(static_cast<std::size_t>(std::min(n, level_))); }

  /// Indices (u, v) of the standard factorization of basis word i (|w| >= 2).
  std::pair<std::size_t, std::size_t> factorization(std::size_t i) const {
    if (word_level(i) < 2) throw std::invalid_argument("letters have no factorization");
    return factors_[i];
  }

  BracketTree tree(std::size_t i) const { return sigma_tree(words_.at(i)); }

  /// rho(sigma(w_i)) at level |w_i|.
  const SparseLevel& rho(std::size_t i) const { return rho_.at(i); }

  /// Lyndon coordinates of [sigma(w_i), sigma(w_j)]; requires i < j and
  /// level(i) + level(j) <= m.
  const SparseLie& bracket_ordered(std::size_t i, std::size_t j) const {
    return brackets_[i][j - i - 1];
  }

  /// Upper bound (exclusive) of j for which [w_i, w_j] is tabulated.
  std::size_t bracket_row_end(std::size_t i) const { return level_end(level_ - word_level(i)); }

  /// Lyndon coordinates of [sigma(w_i), sigma(w_j)], any order.
  SparseLie bracket(std::size_t i, std::size_t j) const {
    if (word_level(i) + word_level(j) > level_)
      throw truncation_overflow("bracket depth exceeds truncation level");
    if (i == j) return {};
    if (i < j) return bracket_ordered(i, j);
    SparseLie r = bracket_ordered(j, i);
    for (auto& t : r) t.second = -t.second;
    return r;
  }

private:
  void build_factorizations() {
    factors_.resize(words_.size());
    for (std::size_t i = level_end(1); i < words_.size(); ++i) {
      auto [u, v] = standard_factorization(words_[i]);
      factors_[i] = {index_.at(u), index_.at(v)};
    }
  }

  void build_rho() {
    rho_.resize(words_.size());
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if (word_level(i) == 1) {
        rho_[i] = {{static_cast<std::size_t>(words_[i][0] - 1), 1}};
        continue;
      }
      auto [u, v] = factors_[i];
      rho_[i] = rho_commutator(rho_[u], word_level(u), rho_[v], word_level(v), dim_);
    }
  }

  // Adds sign * [w_i, w_j] (Lyndon coordinates) into acc.
  void accumulate_bracket(std::size_t i, std::size_t j, std::int64_t sign, std::map<std::size_t, std::int64_t>& acc) {
    if (i == j || sign == 0) return;
    if (j < i) {
      std::swap(i, j);
      sign = -sign;
    }
    for (const auto& [k, c] : compute_bracket(i, j)) acc[k] += sign * c;
  }

  // [sigma(w_i), sigma(w_j)] for index i < j, memoized. Indices are
  // level-major, so the pair is first put in lexicographic order u < v.
  // If u is a letter, or u = xy with y >= v, then (u, v) is the standard
  // factorization of uv. Otherwise Jacobi gives [[x,y],v] = [y,[v,x]] +
  // [x,[y,v]], and both terms recurse on strictly simpler pairs.
  const SparseLie& compute_bracket(std::size_t i, std::size_t j) {
    auto& slot = memo_[i][j - i - 1];
    if (slot) return *slot;
    std::size_t u = i, v = j;
    std::int64_t sign = 1;
    if (words_[v] < words_[u]) {
      std::swap(u, v);
      sign = -1;
    }
    SparseLie result;
    bool standard = word_level(u) == 1;
    std::size_t x = 0, y = 0;
    if (!standard) {
      std::tie(x, y) = factors_[u];
      standard = !(words_[y] < words_[v]);
    }
    if (standard) {
      result = {{index_.at(words_[u] + words_[v]), sign}};
    } else {
      std::map<std::size_t, std::int64_t> acc;
      // [y, [v, x]]
      std::map<std::size_t, std::int64_t> inner;
      accumulate_bracket(v, x, sign, inner);
      for (const auto& [k, c] : inner) accumulate_bracket(y, k, c, acc);
      // [x, [y, v]]
      inner.clear();
      accumulate_bracket(y, v, sign, inner);
      for (const auto& [k, c] : inner) accumulate_bracket(x, k, c, acc);
      result = detail::compact(std::move(acc));
    }
    slot = std::move(result);
    return *slot;
  }

  void build_brackets() {
    memo_.resize(words_.size());
    for (std::size_t i = 0; i < words_.size(); ++i) {
      std::size_t end = bracket_row_end(i);
      memo_[i].resize(end > i + 1 ? end - i - 1 : 0);
    }
    for (std::size_t i = 0; i < words_.size(); ++i)
      for (std::size_t j = i + 1; j < bracket_row_end(i); ++j) compute_bracket(i, j);
    brackets_.resize(words_.size());
    for (std::size_t i = 0; i < words_.size(); ++i) {
      brackets_[i].reserve(memo_[i].size());
      for (auto& slot : memo_[i]) brackets_[i].push_back(std::move(*slot));
    }
    memo_.clear();
    memo_.shrink_to_fit();
  }

  int dim_;
  int level_;
  std::vector<Word> words_;
  std::vector<std::size_t> level_begin_;
  std::map<Word, std::size_t> index_;
  std::vector<std::pair<std::size_t, std::size_t>> factors_;
  std::vector<SparseLevel> rho_;
  std::vector<std::vector<SparseLie>> brackets_;
  std::vector<std::vector<std::optional<SparseLie>>> memo_;
};

using BasisPtr = std::shared_ptr<const LyndonBasis>;

/// An element of the truncated free Lie algebra in Lyndon coordinates.
template <class C>
class LieElement {
public:
  using traits = ring_traits<C>;

  explicit LieElement(BasisPtr basis) : basis_(std::move(basis)), coeffs_(basis_->size(), traits::zero()) {}

  static LieElement basis_element(BasisPtr basis, const Word& w, C coeff = ring_traits<C>::one()) {
    LieElement x(std::move(basis));
    x.coeff(w) = std::move(coeff);
    return x;
  }
  static LieElement generator(BasisPtr basis, Letter a) { return basis_element(std::move(basis), Word{a}); }

  /// The level-1 element sum v_i * i.
  static LieElement from_vector(BasisPtr basis, std::span<const C> v) {
    LieElement x(std::move(basis));
    if (v.size() != static_cast<std::size_t>(x.basis_->dim())) throw std::invalid_argument("vector has wrong dimension");
    for (std::size_t k = 0; k < v.size(); ++k) x.coeffs_[k] = v[k];
    return x;
  }

  const LyndonBasis& basis() const noexcept { return *basis_; }
  const BasisPtr& basis_ptr() const noexcept { return basis_; }
  int dim() const noexcept { return basis_->dim(); }
  int level() const noexcept { return basis_->level(); }
  std::size_t size() const noexcept { return coeffs_.size(); }

  C& operator[](std::size_t i) { return coeffs_[i]; }
  const C& operator[](std::size_t i) const { return coeffs_[i]; }
  std::span<const C> coefficients() const noexcept { return coeffs_; }

  C& coeff(const Word& w) { return coeffs_[checked_index(w)]; }
  const C& coeff(const Word& w) const { return coeffs_[checked_index(w)]; }

  /// Lowest level carrying a nonzero coefficient; level() + 1 for zero.
  int min_level() const {
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
      if (!traits::is_zero(coeffs_[i])) return basis_->word_level(i);
    return basis_->level() + 1;
  }

  bool is_zero() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const C& c) { return traits::is_zero(c); });
  }

  bool compatible(const LieElement& o) const noexcept {
    return basis_ == o.basis_ || (dim() == o.dim() && level() == o.level());
  }
  void require_compatible(const LieElement& o) const {
    if (!compatible(o)) throw std::invalid_argument("Lie elements differ in dimension or level");
  }

  LieElement& operator+=(const LieElement& o) {
    require_compatible(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
  }
  LieElement& operator-=(const LieElement& o) {
    require_compatible(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
  }
  LieElement& operator*=(const C& s) {
    for (auto& c : coeffs_) c *= s;
    return *this;
  }

  friend LieElement operator+(LieElement a, const LieElement& b) { return a += b; }
  friend LieElement operator-(LieElement a, const LieElement& b) { return a -= b; }
  friend LieElement operator*(LieElement a, const C& s) { return a *= s; }
  friend LieElement operator*(const C& s, LieElement a) { return a *= s; }
  friend LieElement operator-(LieElement a) {
    for (auto& c : a.coeffs_) c = -c;
    return a;
  }
  friend bool operator==(const LieElement& a, const LieElement& b) {
    return a.compatible(b) && a.coeffs_ == b.coeffs_;
  }

  double max_norm() const {
    double r = 0;
    for (const auto& c : coeffs_) r = std::max(r, traits::magnitude(c));
    return r;
  }

private:
  std::size_t checked_index(const Word& w) const {
    auto i = basis_->index_of(w);
    if (!i) throw std::invalid_argument("word is not a Lyndon basis element at this level");
    return *i;
  }

  BasisPtr basis_;
  std::vector<C> coeffs_;
};

/// Lyndon coordinates of [sigma(u), sigma(v)].
template <class C = Rational>
LieElement<C> lyndon_bracket_basis(const BasisPtr& basis, const Word& u, const Word& v) {
  if (!is_lyndon(u) || !is_lyndon(v)) throw std::invalid_argument("bracket arguments must be Lyndon words");
  if (static_cast<int>(u.size() + v.size()) > basis->level())
    throw truncation_overflow("bracket depth exceeds truncation level");
  auto iu = basis->index_of(u), iv = basis->index_of(v);
  if (!iu || !iv) throw std::invalid_argument("word outside the basis alphabet");
  LieElement<C> out(basis);
  for (const auto& [k, c] : basis->bracket(*iu, *iv)) out[k] = ring_traits<C>::from_int(c);
  return out;
}

/// Bilinear Lie bracket; components beyond the truncation level are dropped.
template <class C>
LieElement<C> lie_bracket(const LieElement<C>& x, const LieElement<C>& y) {
  x.require_compatible(y);
  using traits = ring_traits<C>;
  const LyndonBasis& basis = x.basis();
  LieElement<C> out(x.basis_ptr());
  // [x, y] = sum_{i<j} (x_i y_j - x_j y_i) [e_i, e_j]
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const bool xi = !traits::is_zero(x[i]), yi = !traits::is_zero(y[i]);
    if (!xi && !yi) continue;
    const std::size_t end = basis.bracket_row_end(i);
    for (std::size_t j = i + 1; j < end; ++j) {
      const bool xj = !traits::is_zero(x[j]), yj = !traits::is_zero(y[j]);
      if (!((xi && yj) || (xj && yi))) continue;
      C f = traits::zero();
      if (xi && yj) f += x[i] * y[j];
      if (xj && yi) f -= x[j] * y[i];
      if (traits::is_zero(f)) continue;
      for (const auto& [k, c] : basis.bracket_ordered(i, j)) {
        if (c == 1) out[k] += f;
        else if (c == -1) out[k] -= f;
        else out[k] += f * traits::from_int(c);
      }
    }
  }
  return out;
}

/// rho: the Lie element as a tensor (zero empty-word component).
template <class C>
TensorElement<C> expand_rho(const LieElement<C>& x) {
  using traits = ring_traits<C>;
  const LyndonBasis& basis = x.basis();
  TensorElement<C> t(basis.dim(), basis.level());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (traits::is_zero(x[i])) continue;
    auto dest = t.level_coefficients(basis.word_level(i));
    for (const auto& [k, c] : basis.rho(i)) dest[k] += x[i] * traits::from_int(c);
  }
  return t;
}

/// Residual tolerance (max norm) accepted by project_from_tensor for inexact rings.
inline constexpr double kLieResidualTolerance = 1e-8;

/// The Lie element L with expand_rho(L) = t. rho(sigma(w)) has coefficient 1
/// on w and is otherwise supported on lexicographically larger words, so
/// peeling each level's Lyndon words in ascending order is a triangular
/// solve. Whatever is left afterwards must vanish.
template <class C>
LieElement<C> project_from_tensor(const TensorElement<C>& t, const BasisPtr& basis) {
  using traits = ring_traits<C>;
  if (t.dim() != basis->dim() || t.level() != basis->level())
    throw std::invalid_argument("tensor and basis differ in dimension or level");
  if (!traits::is_zero(t.epsilon())) throw std::invalid_argument("a Lie element has no empty-word component");
  TensorElement<C> residual = t;
  LieElement<C> out(basis);
  for (std::size_t i = 0; i < basis->size(); ++i) {
    const auto& rho = basis->rho(i);
    auto lvl = residual.level_coefficients(basis->word_level(i));
    const C c = lvl[rho.front().first];
    if (traits::is_zero(c)) continue;
    for (const auto& [k, r] : rho) lvl[k] -= c * traits::from_int(r);
    out[i] = c;
  }
  const double norm = residual.max_norm();
  bool ok = true;
  if constexpr (traits::exact) {
    for (int n = 1; n <= residual.level() && ok; ++n)
      for (const auto& c : residual.level_coefficients(n))
        if (!traits::is_zero(c)) {
          ok = false;
          break;
        }
  } else {
    ok = norm <= kLieResidualTolerance;
  }
  if (!ok) throw not_lie_element_error("tensor is not a Lie element", norm);
  return out;
}

}  // namespace liesig
