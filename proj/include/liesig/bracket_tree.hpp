#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "liesig/tensor.hpp"
#include "liesig/words.hpp"

namespace liesig {

/// A bracketed expression: a letter, or [left, right]. Immutable; subtrees are shared.
class BracketTree {
public:
  static BracketTree leaf(Letter a) {
    if (a < 1) throw std::invalid_argument("letters start at 1");
    return BracketTree(std::make_shared<const Node>(Node{a, {}, {}, 1}));
  }
  static BracketTree bracket(const BracketTree& left, const BracketTree& right) {
    return BracketTree(std::make_shared<const Node>(Node{0, left.node_, right.node_, left.depth() + right.depth()}));
  }

  bool is_leaf() const noexcept { return node_->letter != 0; }
  Letter letter() const {
    if (!is_leaf()) throw std::logic_error("not a leaf");
    return node_->letter;
  }
  BracketTree left() const { return child(node_->left); }
  BracketTree right() const { return child(node_->right); }

  /// Number of leaves, i.e. the length of the foliage.
  int depth() const noexcept { return node_->depth; }

  Word foliage() const {
    Word w;
    append_foliage(*node_, w);
    return w;
  }

  /// [a, b] with every bracket's two sides exchanged, recursively.
  BracketTree mirrored() const {
    if (is_leaf()) return *this;
    return bracket(right().mirrored(), left().mirrored());
  }

  /// Canonical text, e.g. "[1, [1, 2]]".
  std::string render() const {
    if (is_leaf()) return std::to_string(node_->letter);
    return "[" + left().render() + ", " + right().render() + "]";
  }

  friend bool operator==(const BracketTree& a, const BracketTree& b) { return equal(*a.node_, *b.node_); }

private:
  struct Node {
    Letter letter;
    std::shared_ptr<const Node> left, right;
    int depth;
  };

  explicit BracketTree(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  BracketTree child(const std::shared_ptr<const Node>& n) const {
    if (!n) throw std::logic_error("a leaf has no children");
    return BracketTree(n);
  }

  static void append_foliage(const Node& n, Word& w) {
    if (n.letter) {
      w.push_back(n.letter);
      return;
    }
    append_foliage(*n.left, w);
    append_foliage(*n.right, w);
  }

  static bool equal(const Node& a, const Node& b) {
    if (&a == &b) return true;
    if (a.letter != b.letter || a.depth != b.depth) return false;
    if (a.letter) return true;
    return equal(*a.left, *b.left) && equal(*a.right, *b.right);
  }

  std::shared_ptr<const Node> node_;
};

/// One level of a tensor with integer coefficients, sorted by flat index.
using SparseLevel = std::vector<std::pair<std::size_t, std::int64_t>>;

namespace detail {

inline SparseLevel compact(std::map<std::size_t, std::int64_t>&& acc) {
  SparseLevel out;
  out.reserve(acc.size());
  for (const auto& [k, v] : acc)
    if (v != 0) out.emplace_back(k, v);
  return out;
}

}  // namespace detail

/// rho(a) rho(b) - rho(b) rho(a) for homogeneous a (level la) and b (level lb).
inline SparseLevel rho_commutator(const SparseLevel& a, int la, const SparseLevel& b, int lb, int d) {
  const std::size_t wa = level_width(d, la), wb = level_width(d, lb);
  std::map<std::size_t, std::int64_t> acc;
  for (const auto& [ia, ca] : a)
    for (const auto& [ib, cb] : b) {
      acc[ia * wb + ib] += ca * cb;
      acc[ib * wa + ia] -= ca * cb;
    }
  return detail::compact(std::move(acc));
}

/// Expansion of a bracketed expression into the tensor algebra, at level depth().
inline SparseLevel rho_of_tree(const BracketTree& t, int d) {
  if (t.is_leaf()) {
    if (t.letter() > d) throw std::invalid_argument("letter outside alphabet");
    return {{static_cast<std::size_t>(t.letter() - 1), 1}};
  }
  return rho_commutator(rho_of_tree(t.left(), d), t.left().depth(), rho_of_tree(t.right(), d), t.right().depth(), d);
}

template <class C>
TensorElement<C> to_tensor(const SparseLevel& s, int level, int d, int m) {
  TensorElement<C> t(d, m);
  if (level > m) return t;
  auto dest = t.level_coefficients(level);
  for (const auto& [i, c] : s) dest[i] = ring_traits<C>::from_int(c);
  return t;
}

}  // namespace liesig
