#include "armub/rbd.hpp"

#include <algorithm>

#include "armub/error.hpp"
#include "armub/gf.hpp"

namespace armub {

std::uint64_t CounterRng::at(std::uint64_t counter) const {
  std::uint64_t z = seed_ + (counter + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t CounterRng::below(std::uint64_t n) {
  if (n == 0) throw DomainError("empty sampling range");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  while (true) {
    const std::uint64_t v = next();
    if (v < limit) return v % n;
  }
}

Rbd build_affine_rbd(int k, int s) {
  if (s < 3 || s % 2 == 0) throw DomainError("s must be an odd prime power, got " + std::to_string(s));
  const auto pe = prime_power(std::uint64_t(s));
  if (!pe) throw DomainError("s must be an odd prime power, got " + std::to_string(s));
  if (k < 1) throw DomainError("block size k must be >= 1");
  if (k > s) throw DomainError("block size k = " + std::to_string(k) + " exceeds s = " + std::to_string(s));
  const auto field = gf_make(pe->first, pe->second);

  Rbd r;
  r.d = k * s;
  r.k = k;
  r.s = s;
  if (k == s) r.flags.push_back("k == s");
  r.classes.resize(s);
  for (int slope = 0; slope < s; ++slope) {
    ParallelClass& cls = r.classes[slope];
    cls.reserve(s);
    for (int c = 0; c < s; ++c) {
      Block b(k);
      for (int a = 0; a < k; ++a) {
        const auto y = field->add(GfField::Elem(c), field->mul(GfField::Elem(slope), GfField::Elem(a)));
        b[a] = a * s + static_cast<int>(y);
      }
      cls.push_back(std::move(b));
    }
  }
  const auto cert = verify_rbd(r, true);
  if (!cert.valid) throw StructuralError("affine design failed verification: " + cert.violations.front());
  r.mu = cert.mu;
  return r;
}

PointIndex index_class(const Rbd& r, int c) {
  PointIndex idx;
  idx.block.assign(r.d, -1);
  idx.position.assign(r.d, -1);
  const auto& cls = r.classes[c];
  for (std::size_t b = 0; b < cls.size(); ++b) {
    for (std::size_t p = 0; p < cls[b].size(); ++p) {
      const int x = cls[b][p];
      if (x >= 0 && x < r.d) {
        idx.block[x] = static_cast<int>(b);
        idx.position[x] = static_cast<int>(p);
      }
    }
  }
  return idx;
}

namespace {

constexpr std::size_t kMaxViolations = 32;

void report(RbdCertificate& cert, std::string what) {
  cert.valid = false;
  if (cert.violations.size() < kMaxViolations) cert.violations.push_back(std::move(what));
}

// Max shared points and number of intersecting block pairs between classes p and q.
std::pair<int, long> intersect_classes(const Rbd& r, int p, const PointIndex& q_index, int q_blocks) {
  std::vector<int> count(q_blocks, 0);
  std::vector<int> touched;
  int best = 0;
  long pairs = 0;
  for (const auto& block : r.classes[p]) {
    touched.clear();
    for (int x : block) {
      if (x < 0 || x >= r.d) continue;
      const int qb = q_index.block[x];
      if (qb < 0) continue;
      if (count[qb]++ == 0) touched.push_back(qb);
    }
    for (int qb : touched) {
      best = std::max(best, count[qb]);
      count[qb] = 0;
    }
    pairs += static_cast<long>(touched.size());
  }
  return {best, pairs};
}

}  // namespace

RbdCertificate verify_rbd(const Rbd& r, bool full, long sample_pairs, std::uint64_t seed) {
  RbdCertificate cert;
  cert.mode = full ? "full" : "sampled";
  cert.seed = seed;
  if (!full && sample_pairs <= 0) throw DomainError("sampled verification needs a positive pair count");
  if (r.d <= 0 || r.classes.empty()) {
    report(cert, "design has no points or no classes");
    return cert;
  }
  if (r.k > 0 && r.s > 0 && r.d != r.k * r.s) report(cert, "d != k*s");

  std::vector<int> seen(r.d);
  for (std::size_t c = 0; c < r.classes.size(); ++c) {
    std::fill(seen.begin(), seen.end(), 0);
    const auto& cls = r.classes[c];
    if (r.s > 0 && static_cast<int>(cls.size()) != r.s) {
      report(cert, "class " + std::to_string(c) + " has " + std::to_string(cls.size()) + " blocks, expected s");
    }
    for (std::size_t b = 0; b < cls.size(); ++b) {
      const auto& block = cls[b];
      const std::string where = "class " + std::to_string(c) + " block " + std::to_string(b);
      if (r.k > 0 && static_cast<int>(block.size()) != r.k) report(cert, where + " has size " + std::to_string(block.size()));
      for (std::size_t i = 0; i < block.size(); ++i) {
        if (i > 0 && block[i] <= block[i - 1]) report(cert, where + " is not strictly increasing");
        if (block[i] < 0 || block[i] >= r.d) {
          report(cert, where + " has point " + std::to_string(block[i]) + " outside [0, d)");
          continue;
        }
        ++seen[block[i]];
      }
    }
    for (int x = 0; x < r.d; ++x) {
      if (seen[x] != 1) {
        report(cert, "class " + std::to_string(c) + " covers point " + std::to_string(x) + " " +
                         std::to_string(seen[x]) + " times");
        break;
      }
    }
  }

  const long nc = static_cast<long>(r.classes.size());
  cert.class_pairs_total = nc * (nc - 1) / 2;
  std::vector<PointIndex> indices;
  indices.reserve(nc);
  for (long c = 0; c < nc; ++c) indices.push_back(index_class(r, static_cast<int>(c)));

  const auto examine = [&](long p, long q) {
    const auto [shared, pairs] = intersect_classes(r, int(p), indices[q], int(r.classes[q].size()));
    cert.mu = std::max(cert.mu, shared);
    cert.intersecting_block_pairs += pairs;
    ++cert.class_pairs_checked;
  };
  if (full) {
    for (long p = 0; p < nc; ++p) {
      for (long q = p + 1; q < nc; ++q) examine(p, q);
    }
  } else if (nc >= 2) {
    CounterRng rng(seed);
    for (long i = 0; i < sample_pairs; ++i) {
      const long p = long(rng.below(std::uint64_t(nc)));
      long q = long(rng.below(std::uint64_t(nc - 1)));
      if (q >= p) ++q;
      examine(std::min(p, q), std::max(p, q));
    }
  }
  if (r.mu != 0 && cert.mu > r.mu) {
    report(cert, "observed mu " + std::to_string(cert.mu) + " exceeds declared mu " + std::to_string(r.mu));
  }
  return cert;
}

nlohmann::json rbd_to_json(const Rbd& r) {
  nlohmann::json j{{"d", r.d}, {"k", r.k}, {"s", r.s}, {"classes", r.classes}, {"mu", r.mu}};
  if (!r.flags.empty()) j["flags"] = r.flags;
  return j;
}

Rbd rbd_from_json(const nlohmann::json& j) {
  Rbd r;
  try {
    r.d = j.at("d").get<int>();
    r.k = j.at("k").get<int>();
    r.s = j.at("s").get<int>();
    r.classes = j.at("classes").get<std::vector<ParallelClass>>();
    r.mu = j.at("mu").get<int>();
    if (j.contains("flags")) r.flags = j.at("flags").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed design JSON: ") + e.what());
  }
  const auto cert = verify_rbd(r, true);
  if (!cert.valid) throw ParseError("design fails verification: " + cert.violations.front());
  if (cert.mu != r.mu) {
    throw ParseError("declared mu " + std::to_string(r.mu) + " differs from observed " + std::to_string(cert.mu));
  }
  return r;
}

}  // namespace armub
