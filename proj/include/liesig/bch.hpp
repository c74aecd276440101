#pragma once

#include <algorithm>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "liesig/errors.hpp"
#include "liesig/lie.hpp"
#include "liesig/ring.hpp"
#include "liesig/tensor.hpp"
#include "liesig/words.hpp"

namespace liesig {

/// Levels compute_bch_table accepts.
inline constexpr int kMaxComputedBchLevel = 10;
/// Files may describe coefficients up to this level.
inline constexpr int kMaxLoadedBchLevel = 20;

/// Orders words by length, then lexicographically.
struct LevelThenLex {
  bool operator()(const Word& a, const Word& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
};

/// Coefficients of log(exp(1) exp(2)) in the Lyndon basis on letters {1, 2}.
class BchTable {
public:
  BchTable() = default;
  explicit BchTable(int level) : level_(level) {}

  int level() const noexcept { return level_; }

  /// Sorted by level then lexicographically. Zero coefficients are not stored.
  const std::map<Word, Rational, LevelThenLex>& terms() const noexcept { return ordered_; }

  Rational coefficient(const Word& w) const {
    auto it = ordered_.find(w);
    return it == ordered_.end() ? Rational(0) : it->second;
  }

  void set(const Word& w, const Rational& c) {
    if (sgn(c) == 0) ordered_.erase(w);
    else ordered_[w] = c;
  }

  friend bool operator==(const BchTable& a, const BchTable& b) {
    return a.level_ == b.level_ && a.ordered_ == b.ordered_;
  }

private:
  int level_ = 0;
  std::map<Word, Rational, LevelThenLex> ordered_;
};

/// Derives the table by expanding log(exp(1) exp(2)) in exact rationals in
/// the tensor algebra and reading off Lyndon coordinates.
inline BchTable compute_bch_table(int m) {
  if (m < 1 || m > kMaxComputedBchLevel)
    throw std::invalid_argument("BCH table level must be in 1.." + std::to_string(kMaxComputedBchLevel));
  auto basis = LyndonBasis::make(2, m);
  auto e1 = TensorElement<Rational>(2, m), e2 = TensorElement<Rational>(2, m);
  e1[Word{1}] = 1;
  e2[Word{2}] = 1;
  auto z = tensor_log(concat_product(tensor_exp(e1), tensor_exp(e2)));
  auto lie = project_from_tensor(z, basis);
  BchTable table(m);
  for (std::size_t i = 0; i < basis->size(); ++i) table.set(basis->word(i), lie[i]);
  return table;
}

/// Writes the table in the whitespace-column layout read by load_bch_table:
///   index left right numerator denominator
/// Lines 1 and 2 are the generators (left = right = 0); every later line is
/// the basis element [E_left, E_right] in Lyndon order.
inline void write_bch_table(std::ostream& out, const BchTable& table) {
  auto basis = LyndonBasis::make(2, table.level());
  for (std::size_t i = 0; i < basis->size(); ++i) {
    std::size_t left = 0, right = 0;
    if (basis->word_level(i) > 1) {
      auto [u, v] = basis->factorization(i);
      left = u + 1;
      right = v + 1;
    }
    Rational c = table.coefficient(basis->word(i));
    out << (i + 1) << ' ' << left << ' ' << right << ' ' << c.get_num() << ' ' << c.get_den() << '\n';
  }
}

namespace detail {

inline BchTable parse_bch_stream(std::istream& in, int m) {
  std::vector<BracketTree> elements;
  BchTable table(0);
  int file_level = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    long long index = 0, left = 0, right = 0;
    mpz_class num, den;
    std::string extra;
    if (!(row >> index >> left >> right >> num >> den) || (row >> extra))
      throw format_error("expected five integer columns: index left right numerator denominator", line_no);
    if (index != static_cast<long long>(elements.size()) + 1)
      throw format_error("element indices must run 1, 2, 3, ...", line_no);
    if (sgn(den) <= 0) throw format_error("denominator must be positive", line_no);
    BracketTree tree = BracketTree::leaf(1);
    if (index <= 2) {
      if (left != 0 || right != 0) throw format_error("the first two elements must be the generators", line_no);
      tree = BracketTree::leaf(static_cast<Letter>(index));
    } else {
      if (left < 1 || right < 1 || left >= index || right >= index)
        throw format_error("sub-element indices must refer to earlier lines", line_no);
      tree = BracketTree::bracket(elements[static_cast<std::size_t>(left - 1)], elements[static_cast<std::size_t>(right - 1)]);
    }
    const Word foliage = tree.foliage();
    if (!is_lyndon(foliage) || !(sigma_tree(foliage) == tree))
      throw format_error("element " + tree.render() + " is not a Lyndon basis element", line_no);
    elements.push_back(tree);
    const int lvl = tree.depth();
    file_level = std::max(file_level, lvl);
    if (lvl <= m) {
      Rational c(num, den);
      c.canonicalize();
      table.set(foliage, c);
    }
  }
  if (elements.empty()) throw format_error("BCH data is empty", 0);
  BchTable out(std::min(m, file_level));
  for (const auto& [w, c] : table.terms()) out.set(w, c);
  return out;
}

}  // namespace detail

/// Reads a BCH coefficient file (layout as produced by write_bch_table),
/// keeps levels <= m, and checks every coefficient up to
/// min(m, kMaxComputedBchLevel) against compute_bch_table. The check cannot
/// be skipped.
inline BchTable load_bch_table(std::istream& in, int m) {
  if (m < 1 || m > kMaxLoadedBchLevel)
    throw std::invalid_argument("BCH table level must be in 1.." + std::to_string(kMaxLoadedBchLevel));
  BchTable table = detail::parse_bch_stream(in, m);
  const int check_level = std::min(table.level(), kMaxComputedBchLevel);
  const BchTable reference = compute_bch_table(check_level);
  auto basis = LyndonBasis::make(2, check_level);
  for (const Word& w : basis->words()) {
    if (table.coefficient(w) != reference.coefficient(w))
      throw integrity_error("BCH coefficient of " + to_string(w, 2) + " is " + table.coefficient(w).get_str() +
                                ", expected " + reference.coefficient(w).get_str(),
                            to_string(w, 2));
  }
  return table;
}

enum class DepthSkip { enabled, disabled };

/// log(exp(x) exp(y)) in the free Lie algebra: each table word is evaluated
/// with x for letter 1 and y for letter 2, bracketing along its standard
/// factorization. Shared sub-words are evaluated once. With DepthSkip, a word
/// with a ones and b twos is skipped when a*minlevel(x) + b*minlevel(y) > m,
/// since every term it produces would be truncated.
template <class C>
LieElement<C> bch_concat(const LieElement<C>& x, const LieElement<C>& y, const BchTable& table,
                         DepthSkip skip = DepthSkip::enabled) {
  x.require_compatible(y);
  using traits = ring_traits<C>;
  const int m = x.level();
  if (table.level() < m) throw std::invalid_argument("BCH table level is below the truncation level");
  const int lx = x.min_level(), ly = y.min_level();
  std::map<Word, LieElement<C>> memo;
  auto eval = [&](auto&& self, const Word& w) -> const LieElement<C>& {
    auto it = memo.find(w);
    if (it != memo.end()) return it->second;
    if (w.size() == 1) return memo.emplace(w, w[0] == 1 ? x : y).first->second;
    auto [u, v] = standard_factorization(w);
    LieElement<C> value = lie_bracket(self(self, u), self(self, v));
    return memo.emplace(w, std::move(value)).first->second;
  };
  LieElement<C> out(x.basis_ptr());
  for (const auto& [w, coeff] : table.terms()) {
    if (static_cast<int>(w.size()) > m) continue;
    if (skip == DepthSkip::enabled) {
      const auto ones = std::count(w.begin(), w.end(), 1);
      const auto twos = static_cast<long>(w.size()) - ones;
      if (ones * static_cast<long>(lx) + twos * static_cast<long>(ly) > m) continue;
    }
    out += eval(eval, w) * traits::from_rational(coeff);
  }
  return out;
}

}  // namespace liesig
