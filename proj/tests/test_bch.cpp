#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "liesig/bch.hpp"
#include "oracles.hpp"

using namespace liesig;

namespace {

using RL = LieElement<Rational>;
using DL = LieElement<double>;

Rational q(long p, long r = 1) { return make_rational(p, r); }

template <class C>
LieElement<C> tensor_route(const LieElement<C>& x, const LieElement<C>& y) {
  return project_from_tensor(tensor_log(concat_product(tensor_exp(expand_rho(x)), tensor_exp(expand_rho(y)))),
                             x.basis_ptr());
}

DL random_float_lie(std::mt19937& rng, const BasisPtr& basis) {
  std::uniform_real_distribution<double> u(-1, 1);
  DL x(basis);
  for (std::size_t i = 0; i < basis->size(); ++i) x[i] = u(rng);
  return x;
}

RL random_lie(std::mt19937& rng, const BasisPtr& basis) {
  RL x(basis);
  for (std::size_t i = 0; i < basis->size(); ++i) x[i] = oracle::random_rational(rng, 4);
  return x;
}

std::string serialize(const BchTable& t) {
  std::ostringstream os;
  write_bch_table(os, t);
  return os.str();
}

}  // namespace

TEST(Bch, ComputedTableLowLevels) {
  auto t2 = compute_bch_table(2);
  EXPECT_EQ(t2.terms().size(), 3u);
  EXPECT_EQ(t2.coefficient(Word{1}), 1);
  EXPECT_EQ(t2.coefficient(Word{2}), 1);
  EXPECT_EQ(t2.coefficient(Word{1, 2}), q(1, 2));

  auto t3 = compute_bch_table(3);
  EXPECT_EQ(t3.terms().size(), 5u);
  EXPECT_EQ(t3.coefficient(Word{1, 1, 2}), q(1, 12));
  EXPECT_EQ(t3.coefficient(Word{1, 2, 2}), q(1, 12));

  auto t4 = compute_bch_table(4);
  EXPECT_EQ(t4.coefficient(Word{1, 1, 1, 2}), 0);
  EXPECT_EQ(t4.coefficient(Word{1, 1, 2, 2}), q(1, 24));
  EXPECT_EQ(t4.coefficient(Word{1, 2, 2, 2}), 0);

  EXPECT_THROW(compute_bch_table(0), std::invalid_argument);
  EXPECT_THROW(compute_bch_table(kMaxComputedBchLevel + 1), std::invalid_argument);
}

TEST(Bch, LevelThreeMatchesHandExpansion) {
  // 1 + 2 + 1/2 [1,2] + 1/12 [1,[1,2]] - 1/12 [[2,1],2]
  auto basis = LyndonBasis::make(2, 3);
  auto leaf = BracketTree::leaf;
  auto b = BracketTree::bracket;
  TensorElement<Rational> t(2, 3);
  auto add = [&](const BracketTree& tree, Rational c) {
    auto r = to_tensor<Rational>(rho_of_tree(tree, 2), tree.depth(), 2, 3);
    t += r * c;
  };
  add(leaf(1), 1);
  add(leaf(2), 1);
  add(b(leaf(1), leaf(2)), q(1, 2));
  add(b(leaf(1), b(leaf(1), leaf(2))), q(1, 12));
  add(b(b(leaf(2), leaf(1)), leaf(2)), q(-1, 12));
  auto from_paper = project_from_tensor(t, basis);
  auto table = compute_bch_table(3);
  for (std::size_t i = 0; i < basis->size(); ++i) EXPECT_EQ(from_paper[i], table.coefficient(basis->word(i)));
}

TEST(Bch, ConcatGenerators) {
  auto basis = LyndonBasis::make(2, 2);
  auto table = compute_bch_table(2);
  auto z = bch_concat(RL::generator(basis, 1), RL::generator(basis, 2), table);
  EXPECT_EQ(z.coeff(Word{1}), 1);
  EXPECT_EQ(z.coeff(Word{2}), 1);
  EXPECT_EQ(z.coeff(Word{1, 2}), q(1, 2));
}

TEST(Bch, ConcatWithZero) {
  std::mt19937 rng(21);
  auto basis = LyndonBasis::make(3, 4);
  auto table = compute_bch_table(4);
  auto x = random_lie(rng, basis);
  EXPECT_EQ(bch_concat(x, RL(basis), table), x);
  EXPECT_EQ(bch_concat(RL(basis), x, table), x);
}

TEST(Bch, SubstitutionExample) {
  // log(exp([1,2]) exp(3)) = [1,2] + 3 + 1/2 [[1,2],3] - 1/12 [[3,[1,2]],3]
  auto basis = LyndonBasis::make(3, 4);
  auto table = compute_bch_table(4);
  auto x = RL::basis_element(basis, Word{1, 2});
  auto y = RL::generator(basis, 3);
  auto z = bch_concat(x, y, table);
  EXPECT_EQ(z, tensor_route(x, y));

  auto leaf = BracketTree::leaf;
  auto b = BracketTree::bracket;
  auto t12 = b(leaf(1), leaf(2));
  TensorElement<Rational> t(3, 4);
  auto add = [&](const BracketTree& tree, Rational c) {
    t += to_tensor<Rational>(rho_of_tree(tree, 3), tree.depth(), 3, 4) * c;
  };
  add(t12, 1);
  add(leaf(3), 1);
  add(b(t12, leaf(3)), q(1, 2));
  add(b(b(leaf(3), t12), leaf(3)), q(-1, 12));
  EXPECT_EQ(z, project_from_tensor(t, basis));
  // frozen Lyndon coordinates
  EXPECT_EQ(z.coeff(Word{1, 2}), 1);
  EXPECT_EQ(z.coeff(Word{3}), 1);
  EXPECT_EQ(z.coeff(Word{1, 2, 3}), q(1, 2));
  EXPECT_EQ(z.coeff(Word{1, 3, 2}), q(1, 2));
}

TEST(Bch, RouteEquivalenceExact) {
  std::mt19937 rng(22);
  for (int d = 1; d <= 3; ++d)
    for (int m = 1; m <= 4; ++m) {
      auto basis = LyndonBasis::make(d, m);
      auto table = compute_bch_table(m);
      auto x = random_lie(rng, basis), y = random_lie(rng, basis);
      EXPECT_EQ(bch_concat(x, y, table), tensor_route(x, y)) << "d=" << d << " m=" << m;
    }
}

TEST(Bch, RouteEquivalenceFloat) {
  std::mt19937 rng(23);
  for (int d = 1; d <= 3; ++d)
    for (int m = 1; m <= 5; ++m) {
      auto basis = LyndonBasis::make(d, m);
      auto table = compute_bch_table(m);
      for (int trial = 0; trial < 3; ++trial) {
        auto x = random_float_lie(rng, basis), y = random_float_lie(rng, basis);
        auto a = bch_concat(x, y, table), b = tensor_route(x, y);
        EXPECT_LE(oracle::relative_max_diff(a.coefficients(), b.coefficients()), 1e-10);
      }
    }
}

TEST(Bch, Associativity) {
  std::mt19937 rng(24);
  auto basis = LyndonBasis::make(3, 5);
  auto table = compute_bch_table(5);
  auto e1 = RL::generator(basis, 1), e2 = RL::generator(basis, 2), e3 = RL::generator(basis, 3);
  EXPECT_EQ(bch_concat(bch_concat(e1, e2, table), e3, table), bch_concat(e1, bch_concat(e2, e3, table), table));
  for (int trial = 0; trial < 3; ++trial) {
    auto x = random_float_lie(rng, basis), y = random_float_lie(rng, basis), z = random_float_lie(rng, basis);
    auto l = bch_concat(bch_concat(x, y, table), z, table), r = bch_concat(x, bch_concat(y, z, table), table);
    EXPECT_LE(oracle::relative_max_diff(l.coefficients(), r.coefficients()), 1e-10);
  }
}

TEST(Bch, RetracedSegmentCancels) {
  auto basis = LyndonBasis::make(3, 5);
  auto table = compute_bch_table(5);
  std::vector<Rational> v{q(1, 3), q(-2), q(5, 4)};
  auto x = RL::from_vector(basis, v);
  EXPECT_TRUE(bch_concat(x, -x, table).is_zero());
}

TEST(Bch, DepthSkipIsSound) {
  std::mt19937 rng(25);
  auto basis = LyndonBasis::make(3, 5);
  auto table = compute_bch_table(5);
  auto x = RL::basis_element(basis, Word{1, 2}) + RL::basis_element(basis, Word{1, 1, 3}, q(2, 3));
  auto y = RL::basis_element(basis, Word{2, 3}, q(-1, 2));
  EXPECT_EQ(bch_concat(x, y, table, DepthSkip::enabled), bch_concat(x, y, table, DepthSkip::disabled));
  auto g = random_lie(rng, basis);
  EXPECT_EQ(bch_concat(g, y, table, DepthSkip::enabled), bch_concat(g, y, table, DepthSkip::disabled));
}

TEST(Bch, ConcatRejectsMismatch) {
  auto table = compute_bch_table(3);
  EXPECT_THROW(bch_concat(RL(LyndonBasis::make(2, 3)), RL(LyndonBasis::make(3, 3)), table), std::invalid_argument);
  auto b4 = LyndonBasis::make(2, 4);
  EXPECT_THROW(bch_concat(RL(b4), RL(b4), table), std::invalid_argument);
}

TEST(BchFile, RoundTrip) {
  auto table = compute_bch_table(6);
  std::istringstream in(serialize(table));
  EXPECT_EQ(load_bch_table(in, 6), table);
  std::istringstream in3(serialize(table));
  EXPECT_EQ(load_bch_table(in3, 3), compute_bch_table(3));
}

TEST(BchFile, EmittedLayout) {
  EXPECT_EQ(serialize(compute_bch_table(3)), "1 0 0 1 1\n2 0 0 1 1\n3 1 2 1 2\n4 1 3 1 12\n5 3 2 1 12\n");
}

TEST(BchFile, EmptyStream) {
  std::istringstream in("");
  EXPECT_THROW(load_bch_table(in, 3), format_error);
  std::istringstream blank("\n  \n");
  EXPECT_THROW(load_bch_table(blank, 3), format_error);
}

TEST(BchFile, CorruptedCoefficient) {
  std::istringstream in("1 0 0 1 1\n2 0 0 1 1\n3 1 2 1 3\n4 1 3 1 12\n5 3 2 1 12\n");
  try {
    load_bch_table(in, 3);
    FAIL();
  } catch (const integrity_error& e) {
    EXPECT_EQ(e.element(), "12");
  }
}

TEST(BchFile, FormatErrorsCarryLineNumbers) {
  auto expect_line = [](const std::string& text, std::size_t line) {
    std::istringstream in(text);
    try {
      load_bch_table(in, 3);
      FAIL() << text;
    } catch (const format_error& e) {
      EXPECT_EQ(e.line(), line) << text;
    }
  };
  expect_line("1 0 0 1 1\n2 0 0 x 1\n", 2);
  expect_line("1 0 0 1 1\n2 0 0 1 1\n3 1 2 1\n", 3);
  expect_line("1 0 0 1 1\n3 0 0 1 1\n", 2);
  expect_line("1 0 0 1 1\n2 0 0 1 1\n3 2 1 1 2\n", 3);   // [2,1] is not a basis element
  expect_line("1 0 0 1 1\n2 0 0 1 1\n3 1 4 1 2\n", 3);   // forward reference
  expect_line("1 0 0 1 1\n2 0 0 1 0\n", 2);
  expect_line("1 0 0 1 1 7\n", 1);
}

TEST(BchFile, LoadedTableDrivesConcat) {
  std::istringstream in(serialize(compute_bch_table(4)));
  auto table = load_bch_table(in, 4);
  auto basis = LyndonBasis::make(2, 4);
  auto z = bch_concat(RL::generator(basis, 1), RL::generator(basis, 2), table);
  EXPECT_EQ(z.coeff(Word{1, 1, 2, 2}), q(1, 24));
  EXPECT_THROW(load_bch_table(in, 0), std::invalid_argument);
}
