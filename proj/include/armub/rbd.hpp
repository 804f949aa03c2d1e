#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace armub {

using Block = std::vector<int>;
using ParallelClass = std::vector<Block>;

/// Resolvable block design on points {0, ..., d-1}.
struct Rbd {
  int d = 0;
  int k = 0;
  int s = 0;
  std::vector<ParallelClass> classes;
  int mu = 0;
  std::vector<std::string> flags;
};

/// Lines of every non-vertical slope of AG(2, s), restricted to the first k
/// rows. Point (a, b) has index a*s + rank(b); block B_{l,c} = {(a, c + l*a)}.
/// Throws DomainError unless s is an odd prime power and 1 <= k <= s.
Rbd build_affine_rbd(int k, int s);

struct RbdCertificate {
  bool valid = true;
  int mu = 0;
  long class_pairs_checked = 0;
  long class_pairs_total = 0;
  /// Block pairs that share at least one point, summed over checked class pairs.
  long intersecting_block_pairs = 0;
  std::string mode;  // "full" or "sampled"
  std::uint64_t seed = 0;
  std::vector<std::string> violations;
};

/// Checks partition, block size, sortedness and mu. With full = false only
/// `sample_pairs` random class pairs (seeded) are examined for mu.
RbdCertificate verify_rbd(const Rbd& r, bool full = true, long sample_pairs = 64, std::uint64_t seed = 0);

/// For class c, block index and position of every point (-1 if uncovered).
struct PointIndex {
  std::vector<int> block;
  std::vector<int> position;
};
PointIndex index_class(const Rbd& r, int c);

nlohmann::json rbd_to_json(const Rbd& r);
/// Parses and re-verifies (full); ParseError on malformed input or failed checks.
Rbd rbd_from_json(const nlohmann::json& j);

/// Counter-based generator (splitmix64 over seed + counter); stateless per draw.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}
  std::uint64_t at(std::uint64_t counter) const;
  std::uint64_t next() { return at(counter_++); }
  /// Uniform in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n);

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace armub
