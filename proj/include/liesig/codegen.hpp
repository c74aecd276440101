#pragma once

#include <map>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "liesig/bch.hpp"
#include "liesig/polynomial.hpp"

namespace liesig {

/// Straight-line program for joining a line segment onto a log signature:
/// out = log(exp(a) exp(s)) in Lyndon coordinates, with a the existing log
/// signature and s the segment displacement.
///
/// Variables are numbered: a_w for basis index i is i, s_k is size + k - 1,
/// and the intermediate t_j (1-based) is size + d + j - 1.
struct ExpressionProgram {
  struct Statement {
    std::string name;
    Polynomial expr;
  };

  int dim = 0;
  int level = 0;
  std::vector<std::string> variable_names;
  std::vector<Statement> intermediates;
  std::vector<Statement> outputs;
  /// Output polynomials over inputs only, before subexpression extraction.
  std::vector<Polynomial> exact_outputs;

  std::size_t logsig_size() const noexcept { return outputs.size(); }
  std::size_t input_count() const noexcept { return outputs.size() + static_cast<std::size_t>(dim); }
};

enum class Cse { enabled, disabled };

namespace detail {

inline std::string word_name(const Word& w, int d) { return to_string(w, d, '_'); }

// Greedily hoists the most frequent pair of factors among all output
// monomials into a new intermediate until no pair occurs twice.
inline void extract_common_products(ExpressionProgram& prog) {
  using Pair = std::pair<VariableId, VariableId>;
  auto next_id = static_cast<VariableId>(prog.variable_names.size());
  while (true) {
    std::map<Pair, std::size_t> counts;
    for (const auto& out : prog.outputs)
      for (const auto& [mono, c] : out.expr.terms())
        for (std::size_t i = 0; i < mono.size(); ++i) {
          if (i > 0 && mono[i] == mono[i - 1]) continue;
          for (std::size_t j = i + 1; j < mono.size(); ++j) {
            if (j > i + 1 && mono[j] == mono[j - 1]) continue;
            ++counts[{mono[i], mono[j]}];
          }
        }
    Pair best{};
    std::size_t best_count = 1;
    for (const auto& [p, n] : counts)
      if (n > best_count) {
        best = p;
        best_count = n;
      }
    if (best_count < 2) return;

    const VariableId t = next_id++;
    std::string name = "t_" + std::to_string(prog.intermediates.size() + 1);
    Monomial prod{best.first, best.second};
    Polynomial def;
    def.add_term(prod, Rational(1));
    prog.intermediates.push_back({name, std::move(def)});
    prog.variable_names.push_back(std::move(name));

    for (auto& out : prog.outputs) {
      Polynomial rewritten;
      for (const auto& [mono, c] : out.expr.terms()) {
        auto a = std::find(mono.begin(), mono.end(), best.first);
        auto b = a == mono.end() ? mono.end() : std::find(a + 1, mono.end(), best.second);
        if (b == mono.end()) {
          rewritten.add_term(mono, c);
          continue;
        }
        Monomial m = mono;
        m.erase(m.begin() + (b - mono.begin()));
        m.erase(m.begin() + (a - mono.begin()));
        m.push_back(t);  // t is the largest id so far, so m stays sorted
        rewritten.add_term(m, c);
      }
      out.expr = std::move(rewritten);
    }
  }
}

inline std::string render_monomial(const Monomial& m, const std::vector<std::string>& names) {
  if (m.empty()) return "1";
  std::string s;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i) s += '*';
    s += names.at(m[i]);
  }
  return s;
}

inline std::string render_constant(const Rational& c) {
  if (c.get_den() == 1) return c.get_num().get_str();
  return "(" + c.get_num().get_str() + "/" + c.get_den().get_str() + ")";
}

// Terms are grouped by coefficient magnitude; the unit group is written
// bare and every other group as "c*(...)", signs kept inside the group.
inline std::string render_polynomial(const Polynomial& p, const std::vector<std::string>& names) {
  if (p.is_zero()) return "0";
  std::map<Rational, std::vector<std::pair<bool, std::string>>> groups;
  for (const auto& [mono, c] : p.terms()) groups[abs(c)].emplace_back(sgn(c) < 0, render_monomial(mono, names));

  auto join = [](const std::vector<std::pair<bool, std::string>>& terms) {
    std::string s;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const auto& [neg, text] = terms[i];
      if (i == 0) s += neg ? "-" : "";
      else s += neg ? " - " : " + ";
      s += text;
    }
    return s;
  };

  std::vector<std::string> parts;
  auto unit = groups.find(Rational(1));
  if (unit != groups.end()) parts.push_back(join(unit->second));
  for (const auto& [mag, terms] : groups) {
    if (mag == 1) continue;
    if (terms.size() == 1) {
      parts.push_back((terms[0].first ? "-" : "") + render_constant(mag) + "*" + terms[0].second);
    } else {
      parts.push_back(render_constant(mag) + "*(" + join(terms) + ")");
    }
  }
  std::string s = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) {
    if (parts[i][0] == '-') s += " - " + parts[i].substr(1);
    else s += " + " + parts[i];
  }
  return s;
}

}  // namespace detail

inline ExpressionProgram specialize_segment_join(int d, int m, const BchTable& table, Cse cse = Cse::enabled) {
  if (table.level() < m) throw std::invalid_argument("BCH table level is below the truncation level");
  auto basis = LyndonBasis::make(d, m);
  const auto n = basis->size();
  ExpressionProgram prog;
  prog.dim = d;
  prog.level = m;

  LieElement<Polynomial> a(basis), s(basis);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = Polynomial::variable(static_cast<VariableId>(i));
    prog.variable_names.push_back("a_" + detail::word_name(basis->word(i), d));
  }
  for (int k = 0; k < d; ++k) {
    s[static_cast<std::size_t>(k)] = Polynomial::variable(static_cast<VariableId>(n + static_cast<std::size_t>(k)));
    prog.variable_names.push_back("s_" + std::to_string(k + 1));
  }

  auto joined = bch_concat(a, s, table);
  for (std::size_t i = 0; i < n; ++i) {
    prog.exact_outputs.push_back(joined[i]);
    prog.outputs.push_back({"out_" + detail::word_name(basis->word(i), d), joined[i]});
  }
  if (cse == Cse::enabled) detail::extract_common_products(prog);
  return prog;
}

inline std::vector<double> evaluate_program(const ExpressionProgram& prog, std::span<const double> a,
                                            std::span<const double> s) {
  if (a.size() != prog.logsig_size()) throw std::invalid_argument("log signature input has the wrong length");
  if (s.size() != static_cast<std::size_t>(prog.dim)) throw std::invalid_argument("segment has the wrong dimension");
  std::vector<double> values(prog.variable_names.size());
  std::copy(a.begin(), a.end(), values.begin());
  std::copy(s.begin(), s.end(), values.begin() + static_cast<std::ptrdiff_t>(a.size()));
  std::size_t slot = prog.input_count();
  for (const auto& st : prog.intermediates) values[slot++] = st.expr.evaluate(values);
  std::vector<double> out;
  out.reserve(prog.outputs.size());
  for (const auto& st : prog.outputs) out.push_back(st.expr.evaluate(values));
  return out;
}

enum class Dialect { infix_assignments };

/// One "name = expression;" line per intermediate, then per output.
inline std::string emit_source(const ExpressionProgram& prog, Dialect = Dialect::infix_assignments) {
  std::ostringstream os;
  for (const auto* group : {&prog.intermediates, &prog.outputs})
    for (const auto& st : *group) os << st.name << " = " << detail::render_polynomial(st.expr, prog.variable_names) << ";\n";
  return os.str();
}

}  // namespace liesig
