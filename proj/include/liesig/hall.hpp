#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "liesig/bracket_tree.hpp"
#include "liesig/errors.hpp"
#include "liesig/ring.hpp"
#include "liesig/tensor.hpp"
#include "liesig/words.hpp"

namespace liesig {

/// Orders on bracketed expressions from which a Hall basis is generated.
///
/// lyndon_foliage compares trees by foliage alphabetically, which yields the
/// Lyndon words as foliages. coropa compares by depth, then left subtree,
/// then right subtree. classical_hall is the coropa basis with every bracket
/// reversed, so elements at even levels have their rho-images negated.
enum class HallOrder { lyndon_foliage, coropa, classical_hall };

inline HallOrder parse_hall_order(std::string_view s) {
  if (s == "lyndon" || s == "lyndon-foliage") return HallOrder::lyndon_foliage;
  if (s == "coropa") return HallOrder::coropa;
  if (s == "hall" || s == "classical-hall") return HallOrder::classical_hall;
  throw std::invalid_argument("unknown basis order '" + std::string(s) + "' (expected lyndon, coropa or hall)");
}

inline std::string to_string(HallOrder o) {
  switch (o) {
    case HallOrder::lyndon_foliage: return "lyndon";
    case HallOrder::coropa: return "coropa";
    case HallOrder::classical_hall: return "hall";
  }
  return "?";
}

class HallBasis {
public:
  int dim() const noexcept { return dim_; }
  int level() const noexcept { return level_; }
  HallOrder order() const noexcept { return order_; }
  std::size_t size() const noexcept { return trees_.size(); }

  std::size_t level_begin(int n) const { return begin_.at(static_cast<std::size_t>(n - 1)); }
  std::size_t level_end(int n) const { return begin_.at(static_cast<std::size_t>(n)); }
  std::size_t level_size(int n) const { return level_end(n) - level_begin(n); }

  const BracketTree& element(std::size_t i) const { return trees_.at(i); }
  int element_level(std::size_t i) const { return trees_.at(i).depth(); }
  /// rho of element i, a homogeneous tensor at level element_level(i).
  const SparseLevel& rho(std::size_t i) const { return rho_.at(i); }

  std::vector<BracketTree> elements(int n) const {
    return {trees_.begin() + static_cast<std::ptrdiff_t>(level_begin(n)),
            trees_.begin() + static_cast<std::ptrdiff_t>(level_end(n))};
  }

private:
  friend HallBasis build_hall_basis(int d, int m, HallOrder order);

  HallBasis(int d, int m, HallOrder o) : dim_(d), level_(m), order_(o) {}

  int dim_, level_;
  HallOrder order_;
  std::vector<BracketTree> trees_;
  std::vector<SparseLevel> rho_;
  std::vector<std::size_t> begin_;
};

inline HallBasis build_hall_basis(int d, int m, HallOrder order) {
  Alphabet alphabet(d);
  if (m < 1) throw std::invalid_argument("level must be at least 1");

  // Construction happens on unreversed trees; the order is evaluated through
  // a global rank that is refreshed after every level.
  struct Node {
    std::size_t left, right;  // npos for letters
    Letter letter;
    int depth;
    Word foliage;
  };
  constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::vector<Node> nodes;
  std::vector<std::size_t> rank;
  std::vector<std::vector<std::size_t>> by_level(static_cast<std::size_t>(m) + 1);

  // Children of any node sit at strictly lower levels, whose relative ranks
  // never change, so the previous ranking is valid inside the comparator.
  auto less = [&](std::size_t a, std::size_t b) {
    const Node &x = nodes[a], &y = nodes[b];
    if (order == HallOrder::lyndon_foliage) return x.foliage < y.foliage;
    if (x.depth != y.depth) return x.depth < y.depth;
    if (x.letter || y.letter) return x.letter < y.letter;
    if (rank[x.left] != rank[y.left]) return rank[x.left] < rank[y.left];
    return rank[x.right] < rank[y.right];
  };
  auto rerank = [&] {
    std::vector<std::size_t> perm(nodes.size());
    std::iota(perm.begin(), perm.end(), 0);
    rank.resize(nodes.size(), 0);
    std::sort(perm.begin(), perm.end(), less);
    std::vector<std::size_t> next(nodes.size());
    for (std::size_t r = 0; r < perm.size(); ++r) next[perm[r]] = r;
    rank = std::move(next);
  };

  for (Letter a = 1; a <= alphabet.size(); ++a) {
    by_level[1].push_back(nodes.size());
    nodes.push_back({npos, npos, a, 1, Word{a}});
  }
  rerank();

  for (int n = 2; n <= m; ++n) {
    std::vector<std::size_t> fresh;
    for (int a = 1; a < n; ++a)
      for (std::size_t u : by_level[static_cast<std::size_t>(a)])
        for (std::size_t v : by_level[static_cast<std::size_t>(n - a)]) {
          if (rank[u] >= rank[v]) continue;
          if (nodes[v].letter == 0 && rank[nodes[v].left] > rank[u]) continue;
          fresh.push_back(nodes.size());
          nodes.push_back({u, v, 0, n, nodes[u].foliage + nodes[v].foliage});
        }
    rank.resize(nodes.size(), 0);
    std::sort(fresh.begin(), fresh.end(), less);
    by_level[static_cast<std::size_t>(n)] = fresh;
    rerank();
  }

  HallBasis basis(d, m, order);
  const bool reverse = order == HallOrder::classical_hall;
  std::vector<BracketTree> tree_of(nodes.size(), BracketTree::leaf(1));
  std::vector<SparseLevel> rho_of(nodes.size());
  for (int n = 1; n <= m; ++n) {
    basis.begin_.push_back(basis.trees_.size());
    for (std::size_t i : by_level[static_cast<std::size_t>(n)]) {
      const Node& node = nodes[i];
      if (node.letter) {
        tree_of[i] = BracketTree::leaf(node.letter);
        rho_of[i] = {{static_cast<std::size_t>(node.letter - 1), 1}};
      } else {
        std::size_t l = node.left, r = node.right;
        if (reverse) std::swap(l, r);
        tree_of[i] = BracketTree::bracket(tree_of[l], tree_of[r]);
        rho_of[i] = rho_commutator(rho_of[l], nodes[l].depth, rho_of[r], nodes[r].depth, d);
      }
      basis.trees_.push_back(tree_of[i]);
      basis.rho_.push_back(rho_of[i]);
    }
  }
  basis.begin_.push_back(basis.trees_.size());
  return basis;
}

/// Coefficients of homogeneous level-n components, indexed [n-1][k] where k
/// follows the basis order within level n.
template <class C>
using HallCoordinates = std::vector<std::vector<C>>;

/// Tensor-algebra image of sum of coeffs[n-1][k] * rho(element k of level n).
template <class C>
TensorElement<C> expand_hall(const HallCoordinates<C>& coeffs, const HallBasis& basis) {
  if (coeffs.size() != static_cast<std::size_t>(basis.level()))
    throw std::invalid_argument("coefficient levels do not match the basis");
  TensorElement<C> t(basis.dim(), basis.level());
  for (int n = 1; n <= basis.level(); ++n) {
    const auto& row = coeffs[static_cast<std::size_t>(n - 1)];
    if (row.size() != basis.level_size(n)) throw std::invalid_argument("coefficient count does not match the basis level");
    auto dest = t.level_coefficients(n);
    for (std::size_t k = 0; k < row.size(); ++k)
      for (const auto& [idx, c] : basis.rho(basis.level_begin(n) + k)) dest[idx] += row[k] * ring_traits<C>::from_int(c);
  }
  return t;
}

namespace detail {

inline std::vector<int> letter_content(std::size_t flat, int level, int d) {
  std::vector<int> counts(static_cast<std::size_t>(d), 0);
  for (int k = 0; k < level; ++k) {
    ++counts[flat % static_cast<std::size_t>(d)];
    flat /= static_cast<std::size_t>(d);
  }
  return counts;
}

// Solves A c = b in the least-rows sense: A is rows x cols with full column
// rank. Returns c from the pivoted square part; the caller checks residuals.
template <class C>
std::vector<C> eliminate(std::vector<std::vector<C>> a, std::size_t cols) {
  using R = ring_traits<C>;
  const std::size_t rows = a.size();
  for (std::size_t k = 0; k < cols; ++k) {
    std::size_t best = rows;
    double best_mag = 0;
    for (std::size_t r = k; r < rows; ++r) {
      double mag = R::magnitude(a[r][k]);
      if constexpr (R::exact) {
        if (!R::is_zero(a[r][k])) {
          best = r;
          break;
        }
      } else if (mag > best_mag) {
        best = r;
        best_mag = mag;
      }
    }
    if (best == rows || (!R::exact && best_mag < 1e-9))
      throw std::logic_error("Hall basis level is linearly dependent (broken basis)");
    std::swap(a[k], a[best]);
    for (std::size_t r = k + 1; r < rows; ++r) {
      if (R::is_zero(a[r][k])) continue;
      C f = a[r][k] / a[k][k];
      for (std::size_t c = k; c <= cols; ++c) a[r][c] -= f * a[k][c];
    }
  }
  std::vector<C> x(cols, R::zero());
  for (std::size_t k = cols; k-- > 0;) {
    C s = a[k][cols];
    for (std::size_t c = k + 1; c < cols; ++c) s -= a[k][c] * x[c];
    x[k] = s / a[k][k];
  }
  return x;
}

}  // namespace detail

inline constexpr double kHallResidualTolerance = 1e-8;

/// Expresses a Lie element, given by its tensor-algebra image, in a Hall
/// basis. Each level is solved in blocks of equal letter content; a nonzero
/// residual means t is not in the image of the free Lie algebra.
template <class C>
HallCoordinates<C> express_in_hall_basis(const TensorElement<C>& t, const HallBasis& basis) {
  using R = ring_traits<C>;
  if (t.dim() != basis.dim() || t.level() != basis.level())
    throw std::invalid_argument("tensor shape does not match the basis");
  if (!R::is_zero(t.epsilon())) throw std::invalid_argument("expected a zero constant term");
  const int d = basis.dim();
  HallCoordinates<C> out(static_cast<std::size_t>(basis.level()));
  for (int n = 1; n <= basis.level(); ++n) {
    auto target = t.level_coefficients(n);
    const std::size_t first = basis.level_begin(n), count = basis.level_size(n);
    auto& coeffs = out[static_cast<std::size_t>(n - 1)];
    coeffs.assign(count, R::zero());

    std::map<std::vector<int>, std::vector<std::size_t>> blocks;
    for (std::size_t k = 0; k < count; ++k) {
      const auto& r = basis.rho(first + k);
      blocks[detail::letter_content(r.front().first, n, d)].push_back(k);
    }
    for (const auto& [content, members] : blocks) {
      std::map<std::size_t, std::size_t> row_of;
      for (std::size_t k : members)
        for (const auto& [idx, c] : basis.rho(first + k)) row_of.emplace(idx, 0);
      std::size_t r = 0;
      for (auto& [idx, row] : row_of) row = r++;
      std::vector<std::vector<C>> a(row_of.size(), std::vector<C>(members.size() + 1, R::zero()));
      for (std::size_t col = 0; col < members.size(); ++col)
        for (const auto& [idx, c] : basis.rho(first + members[col])) a[row_of[idx]][col] = R::from_int(c);
      for (const auto& [idx, row] : row_of) a[row][members.size()] = target[idx];
      auto x = detail::eliminate<C>(std::move(a), members.size());
      for (std::size_t col = 0; col < members.size(); ++col) coeffs[members[col]] = x[col];
    }
  }

  auto residual = t - expand_hall(out, basis);
  const double norm = residual.max_norm();
  if (R::exact ? norm != 0 : norm > kHallResidualTolerance)
    throw not_lie_element_error("tensor is not a Lie element", norm);
  return out;
}

}  // namespace liesig
