#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace liesig {

using Letter = int;

/// The letters 1..d with their natural order.
class Alphabet {
public:
  explicit Alphabet(int size) : size_(size) {
    if (size < 1) throw std::invalid_argument("alphabet size must be at least 1");
  }

  int size() const noexcept { return size_; }
  bool contains(Letter a) const noexcept { return a >= 1 && a <= size_; }

  friend bool operator==(const Alphabet&, const Alphabet&) = default;

private:
  int size_;
};

/// A finite sequence of letters. The defaulted comparison is the
/// lexicographic order: a proper prefix sorts before the longer word.
class Word {
public:
  Word() = default;
  Word(std::initializer_list<Letter> letters) : letters_(letters) {}
  explicit Word(std::vector<Letter> letters) : letters_(std::move(letters)) {}

  std::size_t size() const noexcept { return letters_.size(); }
  bool empty() const noexcept { return letters_.empty(); }
  Letter operator[](std::size_t i) const { return letters_[i]; }
  Letter front() const { return letters_.front(); }
  Letter back() const { return letters_.back(); }
  const std::vector<Letter>& letters() const noexcept { return letters_; }

  auto begin() const noexcept { return letters_.begin(); }
  auto end() const noexcept { return letters_.end(); }

  void push_back(Letter a) { letters_.push_back(a); }

  Word prefix(std::size_t n) const { return Word({letters_.begin(), letters_.begin() + n}); }
  Word suffix_from(std::size_t pos) const { return Word({letters_.begin() + pos, letters_.end()}); }

  friend Word operator+(const Word& u, const Word& v) {
    std::vector<Letter> out;
    out.reserve(u.size() + v.size());
    out.insert(out.end(), u.begin(), u.end());
    out.insert(out.end(), v.begin(), v.end());
    return Word(std::move(out));
  }

  friend auto operator<=>(const Word&, const Word&) = default;
  friend bool operator==(const Word&, const Word&) = default;

private:
  std::vector<Letter> letters_;
};

/// Digits are written back to back when every letter is a single digit
/// (d <= 9); otherwise letters are joined with `separator`.
inline std::string to_string(const Word& w, int alphabet_size, char separator = ',') {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (alphabet_size > 9 && i) out += separator;
    out += std::to_string(w[i]);
  }
  return out;
}

inline Word parse_word(std::string_view text, int alphabet_size) {
  Word w;
  if (alphabet_size <= 9) {
    for (char c : text) {
      if (c < '1' || c > '0' + alphabet_size)
        throw std::invalid_argument("bad letter in word '" + std::string(text) + "'");
      w.push_back(c - '0');
    }
    return w;
  }
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t next = text.find(',', pos);
    if (next == std::string_view::npos) next = text.size();
    int letter = std::stoi(std::string(text.substr(pos, next - pos)));
    if (letter < 1 || letter > alphabet_size)
      throw std::invalid_argument("bad letter in word '" + std::string(text) + "'");
    w.push_back(letter);
    pos = next + 1;
  }
  return w;
}

/// True iff w is nonempty and strictly smaller than each of its proper suffixes.
inline bool is_lyndon(const Word& w) {
  if (w.empty()) return false;
  const auto& s = w.letters();
  for (std::size_t pos = 1; pos < s.size(); ++pos) {
    // w < suffix(pos)?
    bool smaller = std::lexicographical_compare(s.begin(), s.end(), s.begin() + pos, s.end());
    if (!smaller) return false;
  }
  return true;
}

/// Lyndon words of length 1..m, outer index = level - 1, each level ascending.
/// Duval's generation emits them in lexicographic order.
inline std::vector<std::vector<Word>> generate_lyndon_words(const Alphabet& alphabet, int m) {
  if (m < 1) throw std::invalid_argument("level must be at least 1");
  const int d = alphabet.size();
  std::vector<std::vector<Word>> levels(static_cast<std::size_t>(m));
  std::vector<Letter> w{1};
  while (!w.empty()) {
    levels[w.size() - 1].push_back(Word(w));
    const std::size_t period = w.size();
    while (w.size() < static_cast<std::size_t>(m)) w.push_back(w[w.size() - period]);
    while (!w.empty() && w.back() == d) w.pop_back();
    if (!w.empty()) ++w.back();
  }
  return levels;
}

/// w = uv with v the longest proper suffix of w that is itself Lyndon.
inline std::pair<Word, Word> standard_factorization(const Word& w) {
  if (w.size() < 2) throw std::invalid_argument("standard factorization needs a word of length >= 2");
  if (!is_lyndon(w)) throw std::invalid_argument("standard factorization of a non-Lyndon word");
  for (std::size_t pos = 1; pos < w.size(); ++pos) {
    Word v = w.suffix_from(pos);
    if (is_lyndon(v)) return {w.prefix(pos), std::move(v)};
  }
  // The last letter is always Lyndon, so the loop returns.
  throw std::logic_error("unreachable");
}

namespace detail {

inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
    throw std::overflow_error("count exceeds 64 bits");
  return a * b;
}

inline std::uint64_t checked_pow(std::uint64_t base, int exponent) {
  std::uint64_t r = 1;
  for (int i = 0; i < exponent; ++i) r = checked_mul(r, base);
  return r;
}

inline int moebius(int n) {
  int result = 1;
  for (int p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    n /= p;
    if (n % p == 0) return 0;
    result = -result;
  }
  if (n > 1) result = -result;
  return result;
}

}  // namespace detail

/// Number of Lyndon words of length exactly n (Witt's necklace formula).
inline std::uint64_t lyndon_count(const Alphabet& alphabet, int n) {
  if (n < 1) throw std::invalid_argument("length must be at least 1");
  const auto d = static_cast<std::uint64_t>(alphabet.size());
  // Positive and negative Moebius terms are summed separately to stay unsigned.
  std::uint64_t plus = 0, minus = 0;
  for (int k = 1; k <= n; ++k) {
    if (n % k) continue;
    int mu = detail::moebius(n / k);
    if (mu > 0) plus += detail::checked_pow(d, k);
    if (mu < 0) minus += detail::checked_pow(d, k);
  }
  return (plus - minus) / static_cast<std::uint64_t>(n);
}

}  // namespace liesig
