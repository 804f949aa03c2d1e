#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "armub/armub.hpp"

namespace armub {

/// "exhaustive" or "sampled:<pairs>".
struct SamplingMode {
  bool exhaustive = true;
  long pairs = 0;
  std::uint64_t seed = 0;

  static SamplingMode parse(const std::string& text, std::uint64_t seed = 0);
  std::string to_string() const;
};

enum class Classification { MUB, APMUB, BetaARMUB };
std::string to_string(Classification c);

/// A distinct cross-basis inner-product magnitude and how often it occurs.
struct DeltaValue {
  QuadNum value;
  std::uint64_t count = 0;
};

struct UnbiasednessReport {
  int d = 0;
  int s = 0;  // number of bases
  int k = 0;
  int t = 0;
  int order4n = 0;
  Epsilon epsilon;
  std::vector<DeltaValue> delta;  // ascending by value
  QuadNum max_inner;              // max |<u, v>| over the checked pairs
  /// Sign of beta - (1 + eps)^2 sqrt(d) / k.
  int beta_vs_bound = 0;
  std::uint64_t pairs_checked = 0;
  std::string mode;
  std::uint64_t seed = 0;
  Classification classification = Classification::BetaARMUB;
  /// True when the classification rests on sampled pairs only.
  bool classification_lower_bound = false;

  /// beta = sqrt(d) * max_inner.
  ScaledRoot beta() const { return {std::uint64_t(d), max_inner}; }
  double beta_float() const { return beta().to_double(); }
  double bound_float() const;
};

/// Cross-basis statistics over all pairs of bases. Exhaustive mode covers all
/// C(s,2) d^2 vector pairs through per-position intersection counts; sampled
/// mode draws vector pairs from a seeded counter-based generator.
UnbiasednessReport cross_stats(const BasisSet& bs, const SamplingMode& mode, int threads = 1);

/// Distinct magnitudes and counts for every vector pair of bases p and q,
/// evaluated pair by pair through the shared coordinates.
struct PairStats {
  std::vector<DeltaValue> delta;
  QuadNum max_inner;
  std::uint64_t pairs = 0;
};
PairStats direct_pair_stats(const BasisSet& bs, int p, int q);

/// Sign of x - (1 + eps)^2 / k, exact.
int compare_with_bound(const QuadNum& x, const Epsilon& eps);

Classification classify(const UnbiasednessReport& r);

enum class Verdict { Pass, Fail, NotApplicable };
std::string to_string(Verdict v);

struct LedgerLine {
  std::string check;
  std::string lhs;
  std::string rhs;
  Verdict verdict = Verdict::Pass;
  std::string note;
};

/// Inequalities claimed for the construction, evaluated exactly.
std::vector<LedgerLine> check_theorem_bounds(const UnbiasednessReport& r, const EpsHadamard& y);
bool ledger_passes(const std::vector<LedgerLine>& ledger);

/// Least-squares slope of log(beta - 1) against log(d); informational.
double fit_beta_exponent(const std::vector<std::pair<int, double>>& d_beta);

nlohmann::json report_to_json(const UnbiasednessReport& r);
UnbiasednessReport report_from_json(const nlohmann::json& j);
nlohmann::json ledger_to_json(const std::vector<LedgerLine>& ledger);
std::string report_to_csv(const UnbiasednessReport& r);

}  // namespace armub
