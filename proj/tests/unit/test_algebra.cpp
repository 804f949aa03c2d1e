#include <gtest/gtest.h>

#include <random>

#include "armub/error.hpp"
#include "armub/gf.hpp"
#include "armub/matrix.hpp"
#include "armub/quad.hpp"
#include "armub/rational.hpp"
#include "oracle.hpp"

using namespace armub;

namespace {

QuadNum q(long a, long b, std::uint64_t m) { return QuadNum(Rational(a), Rational(b), m); }
QuadNum qs(const char* a, const char* b, std::uint64_t m) { return QuadNum(Rational::parse(a), Rational::parse(b), m); }

}  // namespace

TEST(Rational, CanonicalForm) {
  const Rational r = Rational::parse("-6/4");
  EXPECT_EQ(r.to_string(), "-3/2");
  EXPECT_EQ(Rational(mpz_class(6), mpz_class(-4)), r);
  EXPECT_EQ(Rational::parse("0/7").to_string(), "0");
  EXPECT_EQ(Rational::parse("-0").denominator(), 1);
  EXPECT_EQ((Rational(1) / Rational(3) + Rational(1) / Rational(6)).to_string(), "1/2");
}

TEST(Rational, ParseErrors) {
  EXPECT_THROW(Rational::parse(""), ParseError);
  EXPECT_THROW(Rational::parse("1/"), ParseError);
  EXPECT_THROW(Rational::parse("x"), ParseError);
  EXPECT_THROW(Rational::parse("6/-4"), ParseError);
  EXPECT_THROW(Rational::parse("1/0"), ArithmeticError);
  EXPECT_THROW(Rational(0).inverse(), ArithmeticError);
}

TEST(Rational, NeverUnreduced) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long> dist(-1000, 1000);
  for (int i = 0; i < 2000; ++i) {
    long den = dist(rng);
    if (den == 0) den = 1;
    const Rational a(mpz_class(dist(rng)), mpz_class(den));
    const Rational b(mpz_class(dist(rng)), mpz_class(37));
    for (const Rational& r : {a + b, a - b, a * b}) {
      mpz_class g;
      mpz_gcd(g.get_mpz_t(), r.numerator().get_mpz_t(), r.denominator().get_mpz_t());
      EXPECT_EQ(g, 1);
      EXPECT_GT(r.denominator(), 0);
    }
  }
}

TEST(Quad, ConjugateProduct) {
  EXPECT_EQ(q(1, 1, 2) * q(1, -1, 2), q(-1, 0, 2));
}

TEST(Quad, DivisionExample) {
  const QuadNum x = q(1, 0, 5) / q(1, 1, 5);
  EXPECT_EQ(x, qs("-1/4", "1/4", 5));
  EXPECT_EQ(x * q(1, 1, 5), q(1, 0, 5));
}

TEST(Quad, SquareRadicandRejected) {
  EXPECT_THROW(QuadNum(Rational(0), Rational(1), 4), DomainError);
  EXPECT_NO_THROW(QuadNum(Rational(3), Rational(0), 1));
}

TEST(Quad, MismatchedRadicand) {
  EXPECT_THROW(q(1, 1, 2) + q(1, 1, 3), StructuralError);
  EXPECT_THROW(q(1, 1, 2) / q(0, 0, 2), ArithmeticError);
}

TEST(Quad, SignExamples) {
  EXPECT_EQ(q(1, -1, 2).sign(), -1);
  EXPECT_EQ(q(0, 0, 5).sign(), 0);
  EXPECT_EQ(q(7, -2, 12).sign(), 1);
  EXPECT_EQ(q(-7, 2, 12).sign(), -1);
}

TEST(Quad, FloatRendering) {
  EXPECT_EQ(quad_to_float(q(1, 0, 2)), 1.0);
  EXPECT_DOUBLE_EQ(quad_to_float(q(0, 1, 2), 53), 1.4142135623730951);
  EXPECT_EQ(quad_to_decimal(q(0, 1, 2), 12), "1.41421356237");
}

// x * (1/x) = 1 and sign agrees with the oracle and with a 64-bit rendering.
TEST(Quad, RandomFieldProperties) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long> num(-60, 60), den(1, 40);
  const std::uint64_t radicands[] = {2, 3, 5, 12, 20, 80};
  for (int i = 0; i < 10000; ++i) {
    const std::uint64_t m = radicands[i % 6];
    const QuadNum x(Rational(mpz_class(num(rng)), mpz_class(den(rng))), Rational(mpz_class(num(rng)), mpz_class(den(rng))), m);
    const int s = x.sign();
    EXPECT_EQ(s, oracle::sign({x.a().raw(), x.b().raw()}, long(m)));
    const double f = quad_to_float(x, 64);
    if (s > 0) { EXPECT_GT(f, 0.0); }
    if (s < 0) { EXPECT_LT(f, 0.0); }
    if (s == 0) {
      EXPECT_EQ(f, 0.0);
      continue;
    }
    EXPECT_EQ(x * x.inverse(), QuadNum::rational(1, m));
  }
}

TEST(Quad, ScaledRootCompare) {
  // sqrt(3) * (1/3) vs 1/2: 1/3 > 1/4.
  EXPECT_EQ(scaled_root_compare(3, qs("1/3", "0", 5), qs("1/2", "0", 5)), 1);
  EXPECT_EQ(scaled_root_compare(4, qs("1/2", "0", 5), q(1, 0, 5)), 0);
  EXPECT_EQ(scaled_root_compare(2, q(-1, 0, 5), q(0, 0, 5)), -1);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<long> num(-30, 30), den(1, 9);
  for (int i = 0; i < 3000; ++i) {
    const QuadNum x(Rational(mpz_class(num(rng)), mpz_class(den(rng))), Rational(mpz_class(num(rng)), mpz_class(den(rng))), 20);
    const QuadNum c(Rational(mpz_class(num(rng)), mpz_class(den(rng))), Rational(mpz_class(num(rng)), mpz_class(den(rng))), 20);
    const long r = 1 + i % 17;
    EXPECT_EQ(scaled_root_compare(std::uint64_t(r), x, c),
              oracle::scaled_sign(r, {x.a().raw(), x.b().raw()}, {c.a().raw(), c.b().raw()}, 20));
  }
}

TEST(Quad, ZeroRendersExactly) {
  EXPECT_EQ(scaled_root_to_float(2, qs("0", "1/2", 2), 1, Rational(-1)), 0.0);
  EXPECT_EQ(scaled_root_to_decimal(2, qs("0", "1/2", 2), 1, Rational(-1)), "0");
}

TEST(Gf, PrimeField) {
  const auto f = gf_make(3, 1);
  EXPECT_EQ(f->size(), 3u);
  EXPECT_EQ(f->mul(2, 2), 1u);
  EXPECT_EQ(f->add(2, 2), 1u);
  EXPECT_EQ(f->inv(2), 2u);
}

TEST(Gf, Gf81) {
  const auto f = gf_make(3, 4);
  EXPECT_EQ(f->size(), 81u);
  EXPECT_TRUE(poly::is_irreducible(f->modulus(), 3));
}

TEST(Gf, Gf9AxiomsExhaustive) {
  const auto f = gf_make(3, 2);
  const std::uint32_t n = f->size();
  for (std::uint32_t a = 0; a < n; ++a) {
    EXPECT_EQ(f->add(a, 0), a);
    EXPECT_EQ(f->mul(a, 1), a);
    EXPECT_EQ(f->add(a, f->neg(a)), 0u);
    if (a != 0) { EXPECT_EQ(f->mul(a, f->inv(a)), 1u); }
    for (std::uint32_t b = 0; b < n; ++b) {
      EXPECT_EQ(f->add(a, b), f->add(b, a));
      EXPECT_EQ(f->mul(a, b), f->mul(b, a));
      if (a != 0 && b != 0) { EXPECT_NE(f->mul(a, b), 0u); }
      for (std::uint32_t c = 0; c < n; ++c) {
        EXPECT_EQ(f->add(f->add(a, b), c), f->add(a, f->add(b, c)));
        EXPECT_EQ(f->mul(f->mul(a, b), c), f->mul(a, f->mul(b, c)));
        EXPECT_EQ(f->mul(a, f->add(b, c)), f->add(f->mul(a, b), f->mul(a, c)));
      }
    }
  }
}

TEST(Gf, FermatProperty) {
  for (std::uint64_t qv : {3u, 5u, 7u, 9u, 11u, 13u, 25u, 27u, 49u, 81u, 121u, 125u, 243u, 343u}) {
    const auto f = gf_make_order(qv);
    const std::uint32_t n = f->size();
    const std::uint32_t step = n <= 81 ? 1 : 7;
    for (std::uint32_t a = 1; a < n; a += step) EXPECT_EQ(f->pow(a, n - 1), 1u) << "q=" << qv << " a=" << a;
  }
}

TEST(Gf, QuadraticCharacter) {
  const auto f = gf_make_order(9);
  int residues = 0;
  for (std::uint32_t a = 1; a < 9; ++a) residues += f->chi(a) == 1;
  EXPECT_EQ(residues, 4);
  EXPECT_EQ(f->chi(0), 0);
}

TEST(Gf, Errors) {
  EXPECT_THROW(gf_make(2, 3), DomainError);
  EXPECT_THROW(gf_make(9, 1), DomainError);
  EXPECT_THROW(gf_make(3, 30), ResourceError);
  EXPECT_THROW(gf_make_order(15), DomainError);
}

TEST(Matrix, ExactInverse) {
  QuadMatrix a(2, 2, 5);
  a(0, 0) = q(1, 1, 5);
  a(0, 1) = q(2, 0, 5);
  a(1, 0) = q(0, 1, 5);
  a(1, 1) = q(3, 0, 5);
  EXPECT_EQ(a * a.inverse(), QuadMatrix::identity(2, 5));
  QuadMatrix singular(2, 2, 5);
  EXPECT_THROW(singular.inverse(), ArithmeticError);
}

TEST(Matrix, OrthogonalityResidual) {
  QuadMatrix y(2, 2, 2);
  y(0, 0) = qs("0", "1/2", 2);
  y(0, 1) = qs("0", "1/2", 2);
  y(1, 0) = qs("0", "1/2", 2);
  y(1, 1) = qs("0", "-1/2", 2);
  EXPECT_TRUE(check_orthogonal(y).orthogonal);
  y(1, 1) = qs("0", "1/2", 2);
  const auto r = check_orthogonal(y);
  EXPECT_FALSE(r.orthogonal);
  EXPECT_FALSE(r.detail.empty());
}
