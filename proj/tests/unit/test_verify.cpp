#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "armub/error.hpp"
#include "armub/gf.hpp"
#include "armub/verify.hpp"
#include "oracle.hpp"

using namespace armub;

namespace {

BasisSet build(int k, int s, int t) {
  const auto h = find_hadamard(t == 0 ? k : k + t);
  const auto y = std::make_shared<const EpsHadamard>(t == 0 ? direct_normalized(h) : best_reduction(h, t));
  return assemble(std::make_shared<const Rbd>(build_affine_rbd(k, s)), y);
}

BasisSet four_point_bundle() {
  Rbd r;
  r.d = 4;
  r.k = 2;
  r.s = 2;
  r.classes = {{{0, 1}, {2, 3}}, {{0, 2}, {1, 3}}, {{0, 3}, {1, 2}}};
  r.mu = 1;
  return assemble(std::make_shared<const Rbd>(r), std::make_shared<const EpsHadamard>(direct_normalized(sylvester(1))));
}

oracle::Dense to_dense(const QuadMatrix& y) {
  oracle::Dense out(y.rows(), std::vector<oracle::Surd>(y.cols()));
  for (int i = 0; i < y.rows(); ++i) {
    for (int j = 0; j < y.cols(); ++j) out[i][j] = {y(i, j).a().raw(), y(i, j).b().raw()};
  }
  return out;
}

void expect_matches_oracle(const BasisSet& bs, const UnbiasednessReport& r) {
  const long m = long(bs.y->y.radicand());
  const auto g = oracle::dense_gram_stats(bs.rbd->classes, to_dense(bs.y->y), bs.d(), m);
  EXPECT_EQ(r.pairs_checked, g.pairs);
  ASSERT_EQ(r.delta.size(), g.values.size());
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    EXPECT_EQ(r.delta[i].value.a().raw(), g.values[i].first.a);
    EXPECT_EQ(r.delta[i].value.b().raw(), g.values[i].first.b);
    EXPECT_EQ(r.delta[i].count, g.values[i].second);
  }
}

}  // namespace

TEST(CrossStats, FourPointFixtureIsMub) {
  const BasisSet bs = four_point_bundle();
  const auto r = cross_stats(bs, SamplingMode{});
  ASSERT_EQ(r.delta.size(), 1u);
  EXPECT_EQ(r.delta[0].value, QuadNum::rational(Rational(1) / Rational(2), 2));
  EXPECT_EQ(r.delta[0].count, 48u);
  EXPECT_EQ(r.classification, Classification::MUB);
  EXPECT_EQ(r.beta().compare(QuadNum::rational(1, 2)), 0);
  expect_matches_oracle(bs, r);
}

TEST(CrossStats, SixDimensionalApmub) {
  const BasisSet bs = build(2, 3, 0);
  const auto r = cross_stats(bs, SamplingMode{});
  ASSERT_EQ(r.delta.size(), 2u);
  EXPECT_TRUE(r.delta[0].value.is_zero());
  EXPECT_EQ(r.delta[1].value, QuadNum::rational(Rational(1) / Rational(2), 2));
  EXPECT_EQ(r.classification, Classification::APMUB);
  EXPECT_NEAR(r.beta_float(), std::sqrt(6.0) / 2, 1e-15);
  expect_matches_oracle(bs, r);
}

TEST(CrossStats, ManyValuesIsBetaArmub) {
  const BasisSet bs = build(3, 5, 1);
  const auto r = cross_stats(bs, SamplingMode{});
  EXPECT_GT(r.delta.size(), 2u);
  EXPECT_EQ(r.classification, Classification::BetaARMUB);
  EXPECT_LE(r.beta_vs_bound, 0);
  expect_matches_oracle(bs, r);
}

// Sparse statistics against the dense Gram oracle for a spread of small
// constructions, including a design with k == s.
TEST(CrossStats, DenseOracleSmall) {
  const int configs[][3] = {{3, 3, 1}, {3, 5, 1}, {6, 7, 2}, {7, 9, 1}, {9, 11, 3},
                            {2, 3, 0}, {1, 5, 0}, {4, 5, 0}, {4, 9, 0}, {8, 11, 0}};
  for (const auto& c : configs) {
    const BasisSet bs = build(c[0], c[1], c[2]);
    const auto r = cross_stats(bs, SamplingMode{});
    SCOPED_TRACE("k=" + std::to_string(c[0]) + " s=" + std::to_string(c[1]) + " t=" + std::to_string(c[2]));
    expect_matches_oracle(bs, r);
    // beta is sqrt(d) times the largest value in delta.
    EXPECT_EQ(r.max_inner, r.delta.back().value);
    EXPECT_LE(r.beta_vs_bound, 0);
  }
}

TEST(CrossStats, ThreadCountInvariant) {
  const BasisSet bs = build(7, 9, 1);
  const auto one = cross_stats(bs, SamplingMode{}, 1);
  const auto four = cross_stats(bs, SamplingMode{}, 4);
  EXPECT_EQ(report_to_json(one).dump(), report_to_json(four).dump());
}

TEST(CrossStats, SampledBelowExhaustive) {
  const BasisSet bs = build(11, 13, 1);
  const auto full = cross_stats(bs, SamplingMode{});
  for (std::uint64_t seed : {0u, 1u, 99u}) {
    const auto sampled = cross_stats(bs, SamplingMode::parse("sampled:500", seed));
    EXPECT_LE(quad_compare(sampled.max_inner, full.max_inner), 0);
    EXPECT_TRUE(sampled.classification_lower_bound);
    EXPECT_EQ(sampled.pairs_checked, 500u);
    std::uint64_t total = 0;
    for (const auto& v : sampled.delta) {
      total += v.count;
      const bool known = std::any_of(full.delta.begin(), full.delta.end(), [&](const DeltaValue& f) { return f.value == v.value; });
      EXPECT_TRUE(known) << v.value.to_string();
    }
    EXPECT_EQ(total, 500u);
  }
  const auto again = cross_stats(bs, SamplingMode::parse("sampled:500", 99));
  EXPECT_EQ(report_to_json(again).dump(), report_to_json(cross_stats(bs, SamplingMode::parse("sampled:500", 99))).dump());
}

TEST(CrossStats, DirectPairAgrees) {
  const BasisSet bs = build(7, 9, 1);
  const auto full = cross_stats(bs, SamplingMode{});
  std::map<std::string, std::uint64_t> summed;
  for (int p = 0; p < bs.count(); ++p) {
    for (int q = p + 1; q < bs.count(); ++q) {
      const auto ps = direct_pair_stats(bs, p, q);
      EXPECT_EQ(ps.pairs, std::uint64_t(bs.d()) * bs.d());
      for (const auto& v : ps.delta) summed[v.value.to_string()] += v.count;
    }
  }
  ASSERT_EQ(summed.size(), full.delta.size());
  for (const auto& v : full.delta) EXPECT_EQ(summed[v.value.to_string()], v.count);
  EXPECT_THROW(direct_pair_stats(bs, 1, 1), DomainError);
}

TEST(SamplingMode, Parse) {
  EXPECT_TRUE(SamplingMode::parse("exhaustive").exhaustive);
  const auto s = SamplingMode::parse("sampled:25", 4);
  EXPECT_FALSE(s.exhaustive);
  EXPECT_EQ(s.pairs, 25);
  EXPECT_EQ(s.seed, 4u);
  EXPECT_EQ(s.to_string(), "sampled:25");
  EXPECT_THROW(SamplingMode::parse("sampled:0"), DomainError);
  EXPECT_THROW(SamplingMode::parse("sampled:x"), ParseError);
  EXPECT_THROW(SamplingMode::parse("dense"), ParseError);
  SamplingMode zero;
  zero.exhaustive = false;
  EXPECT_THROW(cross_stats(four_point_bundle(), zero), DomainError);
}

TEST(Bound, ExactAgainstFloat) {
  for (int order : {8, 12, 20, 24, 80}) {
    for (int t = 1; t <= 3; ++t) {
      if (t * t >= order) continue;
      const EpsHadamard e = best_reduction(find_hadamard(order), t);
      const double bound = std::pow(1 + e.epsilon.to_double(), 2) / e.k;
      const std::uint64_t m = e.y.radicand();
      for (const char* frac : {"1/1000", "1/50", "1/20", "1/9", "1/4", "1/2"}) {
        const QuadNum x = QuadNum::rational(Rational::parse(frac), m);
        const double xf = quad_to_float(x);
        if (std::fabs(xf - bound) < 1e-9) continue;
        EXPECT_EQ(compare_with_bound(x, e.epsilon), xf > bound ? 1 : -1) << order << " " << t << " " << frac;
      }
    }
  }
}

TEST(Ledger, SmallPipelinePasses) {
  const BasisSet bs = build(3, 5, 1);
  const auto r = cross_stats(bs, SamplingMode{});
  const auto ledger = check_theorem_bounds(r, *bs.y);
  EXPECT_TRUE(ledger_passes(ledger));
  ASSERT_EQ(ledger.size(), 6u);
  for (const auto& l : ledger) {
    EXPECT_NE(l.verdict, Verdict::Fail) << l.check;
  }
}

TEST(Ledger, InflatedEntryFails) {
  const BasisSet bs = build(3, 5, 1);
  const auto r = cross_stats(bs, SamplingMode{});
  EpsHadamard bad = *bs.y;
  bad.y(1, 2) = bad.y(1, 2) * Rational(5);
  const auto ledger = check_theorem_bounds(r, bad);
  const auto it = std::find_if(ledger.begin(), ledger.end(), [](const LedgerLine& l) { return l.check == "entry window"; });
  ASSERT_NE(it, ledger.end());
  EXPECT_EQ(it->verdict, Verdict::Fail);
  EXPECT_NE(it->lhs.find("Y(1,2)"), std::string::npos);
  EXPECT_FALSE(ledger_passes(ledger));
}

TEST(Ledger, ThreeFromSixteenGating) {
  const BasisSet bs = build(13, 13, 3);
  const auto r = cross_stats(bs, SamplingMode{});
  const auto ledger = check_theorem_bounds(r, *bs.y);
  EXPECT_EQ(ledger[0].verdict, Verdict::Pass);           // epsilon <= 4/sqrt(4)
  EXPECT_EQ(ledger[1].verdict, Verdict::NotApplicable);  // t < sqrt(n) fails
  EXPECT_EQ(ledger[2].verdict, Verdict::Pass);
  EXPECT_EQ(ledger[3].verdict, Verdict::Pass);
  EXPECT_EQ(ledger[5].verdict, Verdict::NotApplicable);  // s == k
}

TEST(Ledger, DirectHasNoReductionLines) {
  const BasisSet bs = build(2, 3, 0);
  const auto ledger = check_theorem_bounds(cross_stats(bs, SamplingMode{}), *bs.y);
  EXPECT_EQ(ledger[0].verdict, Verdict::NotApplicable);
  EXPECT_EQ(ledger[1].verdict, Verdict::NotApplicable);
  EXPECT_EQ(ledger[2].verdict, Verdict::NotApplicable);
  EXPECT_TRUE(ledger_passes(ledger));
  const auto j = ledger_to_json(ledger);
  EXPECT_EQ(j.size(), ledger.size());
  EXPECT_EQ(j[3].at("verdict"), "pass");
}

TEST(Classify, Rules) {
  UnbiasednessReport r;
  r.d = 9;
  const QuadNum third = QuadNum::rational(Rational(1) / Rational(3), 5);
  r.delta = {{third, 10}};
  r.max_inner = third;
  EXPECT_EQ(classify(r), Classification::MUB);
  r.delta = {{QuadNum::rational(0, 5), 3}, {QuadNum::rational(Rational(2) / Rational(3), 5), 3}};
  EXPECT_EQ(classify(r), Classification::APMUB);
  r.delta = {{QuadNum::rational(0, 5), 3}, {QuadNum::rational(Rational(3) / Rational(4), 5), 3}};
  EXPECT_EQ(classify(r), Classification::BetaARMUB);  // beta = 9/4 > 2
  r.delta = {{QuadNum::rational(Rational(1) / Rational(9), 5), 3}, {third, 3}};
  EXPECT_EQ(classify(r), Classification::BetaARMUB);
}

TEST(ReportJson, RoundTrip) {
  const BasisSet bs = build(9, 11, 3);
  const auto r = cross_stats(bs, SamplingMode::parse("sampled:200", 3));
  const auto j = report_to_json(r);
  EXPECT_EQ(report_to_json(report_from_json(j)).dump(2), j.dump(2));
  auto bad = j;
  bad["classification"] = "MUBS";
  EXPECT_THROW(report_from_json(bad), ParseError);
  bad = j;
  bad.erase("delta");
  EXPECT_THROW(report_from_json(bad), ParseError);
  const std::string csv = report_to_csv(r);
  EXPECT_NE(csv.find("beta-ARMUB"), std::string::npos);
}

TEST(ExponentFit, RecoversSlope) {
  std::vector<std::pair<int, double>> pts;
  for (int d : {100, 400, 1600, 6400}) pts.emplace_back(d, 1 + 3 * std::pow(double(d), -0.25));
  EXPECT_NEAR(fit_beta_exponent(pts), -0.25, 1e-12);
  EXPECT_TRUE(std::isnan(fit_beta_exponent({{10, 1.5}})));
}
