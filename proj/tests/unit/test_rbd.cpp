#include <gtest/gtest.h>

#include "armub/error.hpp"
#include "armub/gf.hpp"
#include "armub/rbd.hpp"
#include "oracle.hpp"

using namespace armub;

namespace {

Rbd four_point_design() {
  Rbd r;
  r.d = 4;
  r.k = 2;
  r.s = 2;
  r.classes = {{{0, 1}, {2, 3}}, {{0, 2}, {1, 3}}, {{0, 3}, {1, 2}}};
  r.mu = 1;
  return r;
}

std::vector<int> odd_prime_powers_up_to(int n) {
  std::vector<int> out;
  for (int s = 3; s <= n; s += 2) {
    if (prime_power(std::uint64_t(s))) out.push_back(s);
  }
  return out;
}

}  // namespace

TEST(AffineRbd, SixPoints) {
  const Rbd r = build_affine_rbd(2, 3);
  EXPECT_EQ(r.d, 6);
  ASSERT_EQ(r.classes.size(), 3u);
  for (const auto& c : r.classes) {
    ASSERT_EQ(c.size(), 3u);
    for (const auto& b : c) EXPECT_EQ(b.size(), 2u);
  }
  EXPECT_EQ(oracle::brute_mu(r.classes), 1);
  EXPECT_TRUE(verify_rbd(r).valid);
}

TEST(AffineRbd, Rejections) {
  EXPECT_THROW(build_affine_rbd(2, 2), DomainError);
  EXPECT_THROW(build_affine_rbd(3, 15), DomainError);
  EXPECT_THROW(build_affine_rbd(6, 5), DomainError);
  EXPECT_THROW(build_affine_rbd(0, 5), DomainError);
  EXPECT_NO_THROW(build_affine_rbd(5, 5));
  EXPECT_EQ(build_affine_rbd(5, 5).flags, std::vector<std::string>{"k == s"});
}

TEST(AffineRbd, ThreeByFiveBruteForce) {
  const Rbd r = build_affine_rbd(3, 5);
  const auto cert = verify_rbd(r);
  EXPECT_TRUE(cert.valid);
  EXPECT_EQ(cert.mu, 1);
  EXPECT_EQ(cert.class_pairs_checked, 10);
  EXPECT_EQ(oracle::brute_mu(r.classes), 1);
}

// Any two blocks of different slopes share at most one point, and every
// point links exactly one block pair, so each class pair has d sharing pairs.
TEST(AffineRbd, IntersectionCountsExhaustive) {
  for (int s : odd_prime_powers_up_to(13)) {
    for (int k = 1; k <= s; ++k) {
      const Rbd r = build_affine_rbd(k, s);
      long pairs_total = 0;
      for (std::size_t p = 0; p < r.classes.size(); ++p) {
        for (std::size_t q = p + 1; q < r.classes.size(); ++q) {
          long sharing = 0;
          for (const auto& a : r.classes[p]) {
            for (const auto& b : r.classes[q]) {
              int shared = 0;
              for (int x : a) shared += std::count(b.begin(), b.end(), x);
              ASSERT_LE(shared, 1) << "k=" << k << " s=" << s;
              sharing += shared;
            }
          }
          EXPECT_EQ(sharing, long(k) * s);
          pairs_total += sharing;
        }
      }
      const auto cert = verify_rbd(r);
      EXPECT_TRUE(cert.valid);
      EXPECT_EQ(cert.intersecting_block_pairs, pairs_total);
    }
  }
}

TEST(AffineRbd, PointLayout) {
  const Rbd r = build_affine_rbd(3, 7);
  // Row a of every block sits in the point range [a*s, (a+1)*s).
  for (const auto& c : r.classes) {
    for (const auto& b : c) {
      for (int a = 0; a < 3; ++a) {
        EXPECT_GE(b[a], a * 7);
        EXPECT_LT(b[a], (a + 1) * 7);
      }
    }
  }
  // Slope zero: block c is the horizontal line b = c.
  EXPECT_EQ(r.classes[0][2], (std::vector<int>{2, 9, 16}));
}

TEST(AffineRbd, Deterministic) {
  EXPECT_EQ(rbd_to_json(build_affine_rbd(4, 9)).dump(), rbd_to_json(build_affine_rbd(4, 9)).dump());
}

TEST(AffineRbd, LargeExampleSampled) {
  const Rbd r = build_affine_rbd(79, 81);
  EXPECT_EQ(r.d, 6399);
  EXPECT_EQ(r.classes.size(), 81u);
  const auto cert = verify_rbd(r, false, 40, 5);
  EXPECT_TRUE(cert.valid);
  EXPECT_EQ(cert.mu, 1);
  EXPECT_EQ(cert.mode, "sampled");
  EXPECT_EQ(cert.class_pairs_checked, 40);
}

TEST(VerifyRbd, FourPointDesign) {
  const auto cert = verify_rbd(four_point_design());
  EXPECT_TRUE(cert.valid);
  EXPECT_EQ(cert.mu, 1);
}

TEST(VerifyRbd, ReportsViolations) {
  Rbd r = four_point_design();
  r.mu = 0;
  r.classes[2] = {{0, 1}, {2, 3}};  // repeats class 0
  auto cert = verify_rbd(r);
  EXPECT_EQ(cert.mu, 2);

  r = four_point_design();
  r.classes[1] = {{0, 2}, {2, 3}};
  cert = verify_rbd(r);
  EXPECT_FALSE(cert.valid);
  EXPECT_FALSE(cert.violations.empty());

  r = four_point_design();
  r.classes[1][0] = {2, 0};
  EXPECT_FALSE(verify_rbd(r).valid);

  r = four_point_design();
  r.classes[1][1] = {1, 4};
  EXPECT_FALSE(verify_rbd(r).valid);

  EXPECT_THROW(verify_rbd(four_point_design(), false, 0), DomainError);
}

TEST(RbdJson, RoundTripAndTamper) {
  const Rbd r = build_affine_rbd(3, 5);
  const auto j = rbd_to_json(r);
  EXPECT_EQ(rbd_to_json(rbd_from_json(j)).dump(2), j.dump(2));
  auto bad = j;
  bad["classes"][1][0][0] = bad["classes"][1][1][0];
  EXPECT_THROW(rbd_from_json(bad), ParseError);
  bad = j;
  bad["mu"] = 2;
  EXPECT_THROW(rbd_from_json(bad), ParseError);
  bad = j;
  bad.erase("classes");
  EXPECT_THROW(rbd_from_json(bad), ParseError);
}

TEST(CounterRng, ReproducibleAndBounded) {
  CounterRng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.below(17);
    EXPECT_EQ(x, b.below(17));
    EXPECT_LT(x, 17u);
  }
  EXPECT_NE(CounterRng(42).at(0), c.at(0));
  EXPECT_EQ(CounterRng(42).at(5), CounterRng(42).at(5));
  EXPECT_THROW(a.below(0), DomainError);
}
