#include <gtest/gtest.h>

#include <cstdlib>

#include "armub/error.hpp"
#include "armub/hadamard.hpp"
#include "oracle.hpp"

using namespace armub;

namespace {

bool first_row_col_positive(const SignMatrix& h) {
  for (int i = 0; i < h.order(); ++i) {
    if (h(0, i) != 1 || h(i, 0) != 1) return false;
  }
  return true;
}

}  // namespace

TEST(Sylvester, SmallOrders) {
  EXPECT_EQ(sylvester(0).rows(), (std::vector<std::vector<int>>{{1}}));
  EXPECT_EQ(sylvester(1).rows(), (std::vector<std::vector<int>>{{1, 1}, {1, -1}}));
  const SignMatrix h8 = sylvester(3);
  EXPECT_EQ(h8.order(), 8);
  EXPECT_TRUE(oracle::is_hadamard(h8.rows()));
  EXPECT_TRUE(h8.verified());
}

TEST(Paley, Orders) {
  EXPECT_EQ(paley(3).order(), 4);
  EXPECT_EQ(paley(7).order(), 8);
  EXPECT_EQ(paley(5).order(), 12);
  for (std::uint64_t q : {3u, 5u, 7u, 9u, 11u, 13u, 19u, 23u, 25u, 27u, 29u, 31u, 43u, 47u, 49u, 59u, 79u}) {
    const SignMatrix h = paley(q);
    EXPECT_EQ(h.order(), q % 4 == 3 ? int(q + 1) : int(2 * (q + 1))) << q;
    EXPECT_TRUE(oracle::is_hadamard(h.rows())) << q;
    EXPECT_TRUE(first_row_col_positive(h)) << q;
  }
  EXPECT_THROW(paley(15), DomainError);
  EXPECT_THROW(paley(2), DomainError);
}

TEST(Kronecker, MatchesOrderFourMub) {
  const SignMatrix h2 = sylvester(1);
  const std::vector<std::vector<int>> expected{{1, 1, 1, 1}, {1, -1, 1, -1}, {1, 1, -1, -1}, {1, -1, -1, 1}};
  EXPECT_EQ(kronecker(h2, h2).rows(), expected);
  EXPECT_EQ(kronecker(sylvester(0), paley(7)), paley(7));
  const SignMatrix h16 = kronecker(paley(3), paley(3));
  EXPECT_EQ(h16.order(), 16);
  EXPECT_TRUE(oracle::is_hadamard(h16.rows()));
}

TEST(Kronecker, PoolExhaustive) {
  const std::vector<SignMatrix> pool{sylvester(1), sylvester(2), paley(7), paley(11)};
  for (const auto& a : pool) {
    for (const auto& b : pool) {
      const SignMatrix k = kronecker(a, b);
      EXPECT_EQ(k.order(), a.order() * b.order());
      EXPECT_TRUE(is_hadamard(k).ok);
      EXPECT_TRUE(oracle::is_hadamard(k.rows()));
    }
  }
}

TEST(IsHadamard, LocatesViolation) {
  SignMatrix h = sylvester(2);
  EXPECT_TRUE(is_hadamard(h).ok);
  h.set(1, 2, -h(1, 2));
  EXPECT_FALSE(h.verified());
  const auto check = is_hadamard(h);
  EXPECT_FALSE(check.ok);
  EXPECT_GE(check.row, 0);
  EXPECT_NE(check.value, 0);
  EXPECT_THROW(verified(h), StructuralError);
}

TEST(IsHadamard, TransformedMubPair) {
  const SignMatrix m = SignMatrix::from_rows({{1, 1, 1, 1}, {1, 1, -1, -1}, {1, -1, 1, -1}, {1, -1, -1, 1}});
  EXPECT_TRUE(is_hadamard(m).ok);
  EXPECT_THROW(SignMatrix::from_rows({{1, 0}, {1, -1}}), DomainError);
  EXPECT_THROW(SignMatrix::from_rows({{1, 1}}), DomainError);
}

TEST(FindHadamard, Eighty) {
  const auto recipe = hadamard_recipe(80);
  ASSERT_EQ(recipe.size(), 1u);
  EXPECT_EQ(recipe[0].kind, HadamardFactor::Kind::PaleyI);
  EXPECT_EQ(recipe[0].parameter, 79);
  const SignMatrix h = find_hadamard(80);
  EXPECT_EQ(h.order(), 80);
  EXPECT_TRUE(oracle::is_hadamard(h.rows()));
  EXPECT_TRUE(first_row_col_positive(h));
}

TEST(FindHadamard, Errors) {
  EXPECT_THROW(find_hadamard(6), DomainError);
  EXPECT_THROW(find_hadamard(3), DomainError);
  EXPECT_THROW(find_hadamard(0), DomainError);
  try {
    find_hadamard(92);
    FAIL() << "92 should not be constructible";
  } catch (const NotConstructibleError& e) {
    EXPECT_FALSE(e.attempted().empty());
    EXPECT_EQ(e.attempted().front(), 92);
  }
  EXPECT_THROW(find_hadamard(8192), ResourceError);
}

TEST(FindHadamard, AllReachableOrdersVerify) {
  for (int order : {1, 2, 4, 8, 12, 16, 20, 24, 28, 32, 36, 40, 44, 48, 52, 56, 60, 64, 68, 72, 76, 80, 84, 88, 96, 100}) {
    const SignMatrix h = find_hadamard(order);
    EXPECT_EQ(h.order(), order);
    EXPECT_TRUE(oracle::is_hadamard(h.rows())) << order;
    EXPECT_TRUE(first_row_col_positive(h)) << order;
  }
}

TEST(FindHadamard, BudgetFromEnvironment) {
  ::setenv("ARMUB_SIZE_BUDGET", "16", 1);
  EXPECT_EQ(order_budget(), 16);
  EXPECT_THROW(find_hadamard(32), ResourceError);
  ::unsetenv("ARMUB_SIZE_BUDGET");
  EXPECT_EQ(order_budget(), kDefaultOrderBudget);
}

TEST(HadamardJson, RoundTrip) {
  const SignMatrix h = find_hadamard(12);
  const auto j = hadamard_to_json(h);
  EXPECT_EQ(j.at("order"), 12);
  EXPECT_EQ(hadamard_from_json(j), h);
  EXPECT_EQ(hadamard_to_json(hadamard_from_json(j)).dump(), j.dump());
  auto bad = j;
  bad["rows"][3][5] = -bad["rows"][3][5].get<int>();
  EXPECT_THROW(hadamard_from_json(bad), ParseError);
  bad = j;
  bad["rows"][0][0] = 2;
  EXPECT_THROW(hadamard_from_json(bad), ParseError);
}
