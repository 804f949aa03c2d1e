#include "armub/verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <thread>

namespace armub {

SamplingMode SamplingMode::parse(const std::string& text, std::uint64_t seed) {
  SamplingMode m;
  m.seed = seed;
  if (text == "exhaustive") return m;
  const std::string prefix = "sampled:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string count = text.substr(prefix.size());
    char* end = nullptr;
    const long n = std::strtol(count.c_str(), &end, 10);
    if (count.empty() || *end != '\0') throw ParseError("bad sample count in mode '" + text + "'");
    if (n <= 0) throw DomainError("sampled mode needs a positive pair count");
    m.exhaustive = false;
    m.pairs = n;
    return m;
  }
  throw ParseError("mode must be 'exhaustive' or 'sampled:<pairs>', got '" + text + "'");
}

std::string SamplingMode::to_string() const {
  return exhaustive ? "exhaustive" : "sampled:" + std::to_string(pairs);
}

std::string to_string(Classification c) {
  switch (c) {
    case Classification::MUB: return "MUB";
    case Classification::APMUB: return "APMUB";
    case Classification::BetaARMUB: return "beta-ARMUB";
  }
  return "?";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::NotApplicable: return "n/a";
  }
  return "?";
}

namespace {

struct QuadLess {
  bool operator()(const QuadNum& a, const QuadNum& b) const { return quad_compare(a, b) < 0; }
};

using ValueCounts = std::map<QuadNum, std::uint64_t, QuadLess>;

// Distinct |Y_ij| in ascending order and the id of every entry.
struct MagnitudeTable {
  std::vector<QuadNum> values;
  std::vector<int> id;  // row-major k x k
  int k = 0;

  explicit MagnitudeTable(const QuadMatrix& y) : k(y.rows()) {
    std::vector<QuadNum> all;
    all.reserve(std::size_t(k) * k);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) all.push_back(y(i, j).abs());
    }
    values = all;
    std::sort(values.begin(), values.end(), QuadLess{});
    values.erase(std::unique(values.begin(), values.end()), values.end());
    id.resize(all.size());
    for (std::size_t e = 0; e < all.size(); ++e) {
      id[e] = static_cast<int>(std::lower_bound(values.begin(), values.end(), all[e], QuadLess{}) - values.begin());
    }
  }
  int at(int i, int j) const { return id[std::size_t(i) * k + j]; }
  int size() const { return static_cast<int>(values.size()); }
};

// Folds counts of magnitude-id products into exact values.
void fold_products(const MagnitudeTable& mags, const std::vector<std::uint64_t>& counts, ValueCounts& out) {
  const int n = mags.size();
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const std::uint64_t c = counts[std::size_t(a) * n + b];
      if (c != 0) out[mags.values[a] * mags.values[b]] += c;
    }
  }
}

void finish_delta(const ValueCounts& counts, std::vector<DeltaValue>& delta, QuadNum& max_inner, std::uint64_t m) {
  delta.clear();
  for (const auto& [v, c] : counts) {
    if (c != 0) delta.push_back({v, c});
  }
  max_inner = delta.empty() ? QuadNum::rational(0, m) : delta.back().value;
}

std::vector<std::pair<int, int>> class_pairs(int n) {
  std::vector<std::pair<int, int>> out;
  for (int p = 0; p < n; ++p) {
    for (int q = p + 1; q < n; ++q) out.emplace_back(p, q);
  }
  return out;
}

template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  threads = std::max(1, std::min<int>(threads, static_cast<int>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    fn(0, 0, count);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (int w = 0; w < threads; ++w) {
    const std::size_t begin = count * w / threads;
    const std::size_t end = count * (w + 1) / threads;
    pool.emplace_back([&, w, begin, end] {
      try {
        fn(w, begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Generic path: exact sums over every shared coordinate, for designs with mu > 1.
void accumulate_pair_exact(const BasisSet& bs, const std::vector<PointIndex>& idx, int p, int q, ValueCounts& out) {
  const int d = bs.d();
  const int k = bs.k();
  const QuadMatrix& y = bs.y->y;
  const std::uint64_t m = y.radicand();
  const auto& cls_p = bs.rbd->classes[p];
  std::map<int, QuadNum> sums;
  std::uint64_t nonzero = 0;
  for (int u = 0; u < d; ++u) {
    const Block& b = cls_p[u / k];
    const int row = u % k;
    sums.clear();
    for (int j = 0; j < k; ++j) {
      const int x = b[j];
      const int qb = idx[q].block[x];
      const int qp = idx[q].position[x];
      for (int r = 0; r < k; ++r) {
        auto [it, inserted] = sums.try_emplace(qb * k + r, QuadNum::rational(0, m));
        it->second += y(row, j) * y(r, qp);
      }
    }
    for (const auto& [v, value] : sums) {
      out[value.abs()] += 1;
      ++nonzero;
    }
  }
  out[QuadNum::rational(0, m)] += std::uint64_t(d) * d - nonzero;
}

}  // namespace

double UnbiasednessReport::bound_float() const {
  const double one_plus = 1.0 + epsilon.to_double();
  return one_plus * one_plus * std::sqrt(double(d)) / double(k);
}

int compare_with_bound(const QuadNum& x, const Epsilon& eps) {
  const std::uint64_t k = eps.k;
  const Rational kr(static_cast<long>(k));
  if (eps.above) return quad_compare(x, eps.y.square());
  // (1 + eps)^2 / k = (4 + k y^2)/k - sqrt(k) (4 y / k).
  const QuadNum rational_part = (QuadNum::rational(4, x.m()) + eps.y.square() * kr) * kr.inverse();
  const QuadNum root_coeff = eps.y * (Rational(4) / kr);
  return scaled_root_compare(k, root_coeff, rational_part - x);
}

PairStats direct_pair_stats(const BasisSet& bs, int p, int q) {
  if (p == q || p < 0 || q < 0 || p >= bs.count() || q >= bs.count()) throw DomainError("invalid basis pair");
  const int d = bs.d();
  const int k = bs.k();
  const QuadMatrix& y = bs.y->y;
  const std::uint64_t m = y.radicand();
  std::vector<PointIndex> idx(bs.count());
  idx[p] = index_class(*bs.rbd, p);
  idx[q] = index_class(*bs.rbd, q);

  ValueCounts counts;
  if (bs.rbd->mu > 1) {
    accumulate_pair_exact(bs, idx, p, q, counts);
  } else {
    // Every pair of vectors shares at most one coordinate: enumerate the
    // partners of u through each of its coordinates.
    const MagnitudeTable mags(y);
    const int n = mags.size();
    std::vector<std::uint64_t> table(std::size_t(n) * n, 0);
    std::vector<int> stamp(d, -1);
    const auto& cls_p = bs.rbd->classes[p];
    std::uint64_t nonzero = 0;
    for (int u = 0; u < d; ++u) {
      const Block& b = cls_p[u / k];
      const int row = u % k;
      for (int j = 0; j < k; ++j) {
        const int x = b[j];
        const int qb = idx[q].block[x];
        const int qp = idx[q].position[x];
        const std::size_t base = std::size_t(mags.at(row, j)) * n;
        for (int r = 0; r < k; ++r) {
          const int v = qb * k + r;
          if (stamp[v] == u) throw StructuralError("vector pair shares two coordinates in a mu = 1 design");
          stamp[v] = u;
          ++table[base + mags.at(r, qp)];
        }
        nonzero += std::uint64_t(k);
      }
    }
    fold_products(mags, table, counts);
    const std::uint64_t zeros = std::uint64_t(d) * d - nonzero;
    if (zeros != 0) counts[QuadNum::rational(0, m)] += zeros;
  }
  PairStats out;
  finish_delta(counts, out.delta, out.max_inner, m);
  out.pairs = std::uint64_t(d) * d;
  return out;
}

UnbiasednessReport cross_stats(const BasisSet& bs, const SamplingMode& mode, int threads) {
  const int d = bs.d();
  const int k = bs.k();
  const int nb = bs.count();
  const QuadMatrix& y = bs.y->y;
  const std::uint64_t m = y.radicand();

  UnbiasednessReport r;
  r.d = d;
  r.s = nb;
  r.k = k;
  r.t = bs.y->t;
  r.order4n = bs.y->order4n;
  r.epsilon = bs.y->epsilon;
  r.mode = mode.to_string();
  r.seed = mode.seed;
  if (nb < 2) throw DomainError("cross statistics need at least two bases");

  std::vector<PointIndex> idx;
  idx.reserve(nb);
  for (int c = 0; c < nb; ++c) idx.push_back(index_class(*bs.rbd, c));
  const auto pairs = class_pairs(nb);

  ValueCounts counts;
  if (!mode.exhaustive) {
    if (mode.pairs <= 0) throw DomainError("sampled mode needs a positive pair count");
    CounterRng rng(mode.seed);
    for (long i = 0; i < mode.pairs; ++i) {
      const int p = int(rng.below(std::uint64_t(nb)));
      int q = int(rng.below(std::uint64_t(nb - 1)));
      if (q >= p) ++q;
      const int u = int(rng.below(std::uint64_t(d)));
      const int v = int(rng.below(std::uint64_t(d)));
      const Block& bu = bs.rbd->classes[p][u / k];
      const Block& bv = bs.rbd->classes[q][v / k];
      QuadNum acc = QuadNum::rational(0, m);
      std::size_t a = 0, b = 0;
      while (a < bu.size() && b < bv.size()) {
        if (bu[a] < bv[b]) {
          ++a;
        } else if (bu[a] > bv[b]) {
          ++b;
        } else {
          acc += y(u % k, int(a)) * y(v % k, int(b));
          ++a;
          ++b;
        }
      }
      counts[acc.abs()] += 1;
    }
    r.pairs_checked = std::uint64_t(mode.pairs);
  } else if (bs.rbd->mu > 1) {
    std::vector<ValueCounts> partial(std::max(1, threads));
    parallel_for(pairs.size(), threads, [&](int w, std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) accumulate_pair_exact(bs, idx, pairs[i].first, pairs[i].second, partial[w]);
    });
    for (const auto& part : partial) {
      for (const auto& [v, c] : part) counts[v] += c;
    }
    r.pairs_checked = std::uint64_t(pairs.size()) * d * d;
  } else {
    // With mu <= 1 each shared point x links exactly one block pair, whose
    // k^2 vector pairs take the values Y_{i,p} Y_{j,q} at x's positions (p, q).
    std::vector<std::vector<std::uint64_t>> occ(std::max(1, threads), std::vector<std::uint64_t>(std::size_t(k) * k, 0));
    parallel_for(pairs.size(), threads, [&](int w, std::size_t begin, std::size_t end) {
      auto& o = occ[w];
      for (std::size_t i = begin; i < end; ++i) {
        const auto& ip = idx[pairs[i].first];
        const auto& iq = idx[pairs[i].second];
        for (int x = 0; x < d; ++x) ++o[std::size_t(ip.position[x]) * k + iq.position[x]];
      }
    });
    std::vector<std::uint64_t> total(std::size_t(k) * k, 0);
    for (const auto& o : occ) {
      for (std::size_t i = 0; i < total.size(); ++i) total[i] += o[i];
    }
    const MagnitudeTable mags(y);
    const int n = mags.size();
    // Column histograms of magnitude ids.
    std::vector<std::vector<std::uint64_t>> col(k, std::vector<std::uint64_t>(n, 0));
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) ++col[j][mags.at(i, j)];
    }
    std::vector<std::uint64_t> table(std::size_t(n) * n, 0);
    std::uint64_t nonzero = 0;
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        const std::uint64_t o = total[std::size_t(a) * k + b];
        if (o == 0) continue;
        for (int ia = 0; ia < n; ++ia) {
          if (col[a][ia] == 0) continue;
          for (int ib = 0; ib < n; ++ib) {
            if (col[b][ib] == 0) continue;
            table[std::size_t(ia) * n + ib] += o * col[a][ia] * col[b][ib];
          }
        }
        nonzero += o * std::uint64_t(k) * k;
      }
    }
    fold_products(mags, table, counts);
    const std::uint64_t all = std::uint64_t(pairs.size()) * d * d;
    if (all > nonzero) counts[QuadNum::rational(0, m)] += all - nonzero;
    r.pairs_checked = all;
  }
  finish_delta(counts, r.delta, r.max_inner, m);
  r.beta_vs_bound = compare_with_bound(r.max_inner, r.epsilon);
  r.classification = classify(r);
  r.classification_lower_bound = !mode.exhaustive;
  return r;
}

Classification classify(const UnbiasednessReport& r) {
  const std::uint64_t m = r.max_inner.m();
  const QuadNum one = QuadNum::rational(1, m);
  const QuadNum two = QuadNum::rational(2, m);
  if (r.delta.size() == 1 && scaled_root_compare(std::uint64_t(r.d), r.delta[0].value, one) == 0) {
    return Classification::MUB;
  }
  if (r.delta.size() == 2 && r.delta[0].value.is_zero() &&
      scaled_root_compare(std::uint64_t(r.d), r.delta[1].value, two) <= 0) {
    return Classification::APMUB;
  }
  return Classification::BetaARMUB;
}

namespace {

std::string both(const std::string& exact, double value) {
  std::ostringstream os;
  os.precision(15);
  os << exact << " = " << value;
  return os.str();
}

std::string quad_both(const QuadNum& q) { return both(q.to_string(), quad_to_float(q)); }

}  // namespace

std::vector<LedgerLine> check_theorem_bounds(const UnbiasednessReport& r, const EpsHadamard& y) {
  std::vector<LedgerLine> ledger;
  const int t = y.t;
  const int n4 = y.order4n;
  const std::uint64_t m = y.y.radicand();
  const std::string eps_text = both(y.epsilon.expression(), y.epsilon.to_double());
  const bool reduced = t >= 1 && t <= 3 && n4 % 4 == 0;

  {
    LedgerLine line{"epsilon <= rho_t/sqrt(n)", eps_text, "", Verdict::NotApplicable, ""};
    if (reduced) {
      const int n = n4 / 4;
      const Rational two_rho = t == 1 ? Rational(1) : (t == 2 ? Rational(4) : Rational(8));
      const QuadNum rhs = sqrt_order(n4).inverse() * two_rho;  // rho / sqrt(n) = 2 rho / sqrt(4n)
      line.rhs = quad_both(rhs);
      if (t == 3 && n < 4) {
        line.note = "stated for n >= 4";
      } else {
        line.verdict = y.epsilon.compare(rhs) <= 0 ? Verdict::Pass : Verdict::Fail;
      }
    } else {
      line.note = "no reduction (t = 0)";
    }
    ledger.push_back(line);
  }
  {
    LedgerLine line{"epsilon < 1", eps_text, "1", Verdict::NotApplicable, ""};
    if (reduced && t * t < n4 / 4) {
      line.verdict = y.epsilon.compare(QuadNum::rational(1, m)) < 0 ? Verdict::Pass : Verdict::Fail;
    } else {
      line.note = "requires t < sqrt(n)";
    }
    ledger.push_back(line);
  }
  {
    LedgerLine line{"entry window", "", "", Verdict::NotApplicable, ""};
    if (reduced && t * t < n4) {
      const auto [lo, hi] = entry_window(n4, t);
      line.rhs = "[" + quad_both(lo) + ", " + quad_both(hi) + "]";
      const auto bad = check_entry_window(y.y, n4, t);
      if (bad) {
        line.lhs = "|Y(" + std::to_string(bad->row) + "," + std::to_string(bad->col) + ")| = " +
                   quad_both(bad->value.abs());
        line.verdict = Verdict::Fail;
      } else {
        line.lhs = "all |Y_ij|";
        line.verdict = Verdict::Pass;
      }
    } else {
      line.note = "requires 1 <= t < sqrt(4n)";
    }
    ledger.push_back(line);
  }
  const std::string beta_text = both(r.beta().to_string(), r.beta_float());
  ledger.push_back(LedgerLine{"beta <= (1+eps)^2 sqrt(d)/k", beta_text,
                              both("(1+eps)^2*sqrt(" + std::to_string(r.d) + ")/" + std::to_string(r.k), r.bound_float()),
                              r.beta_vs_bound <= 0 ? Verdict::Pass : Verdict::Fail, ""});
  ledger.push_back(LedgerLine{"beta < 2", beta_text, "2",
                              r.beta().compare(QuadNum::rational(2, r.max_inner.m())) < 0 ? Verdict::Pass
                                                                                           : Verdict::Fail,
                              r.classification_lower_bound ? "sampled pairs" : ""});
  {
    const int blocks = r.k > 0 ? r.d / r.k : 0;
    const auto root = isqrt(std::uint64_t(r.d));
    const std::uint64_t ceil_root = root * root == std::uint64_t(r.d) ? root : root + 1;
    LedgerLine line{"bases >= ceil(sqrt(d))", std::to_string(r.s), std::to_string(ceil_root), Verdict::NotApplicable,
                    ""};
    if (blocks > r.k) {
      line.verdict = std::uint64_t(r.s) >= ceil_root ? Verdict::Pass : Verdict::Fail;
    } else {
      line.note = "requires s > k";
    }
    ledger.push_back(line);
  }
  return ledger;
}

bool ledger_passes(const std::vector<LedgerLine>& ledger) {
  return std::none_of(ledger.begin(), ledger.end(), [](const LedgerLine& l) { return l.verdict == Verdict::Fail; });
}

double fit_beta_exponent(const std::vector<std::pair<int, double>>& d_beta) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& [d, beta] : d_beta) {
    if (beta <= 1.0 || d <= 1) continue;
    const double x = std::log(double(d));
    const double yv = std::log(beta - 1.0);
    sx += x;
    sy += yv;
    sxx += x * x;
    sxy += x * yv;
    ++n;
  }
  if (n < 2) return std::nan("");
  const double denom = n * sxx - sx * sx;
  if (denom == 0) return std::nan("");
  return (n * sxy - sx * sy) / denom;
}

nlohmann::json report_to_json(const UnbiasednessReport& r) {
  nlohmann::json delta = nlohmann::json::array();
  for (const auto& v : r.delta) {
    delta.push_back({{"value", quad_to_json(v.value)}, {"float", quad_to_float(v.value)}, {"count", v.count}});
  }
  return nlohmann::json{
      {"d", r.d},
      {"s", r.s},
      {"k", r.k},
      {"t", r.t},
      {"m", r.order4n},
      {"epsilon", epsilon_to_json(r.epsilon)},
      {"delta", std::move(delta)},
      {"max_inner", quad_to_json(r.max_inner)},
      {"beta", {{"exact", r.beta().to_string()}, {"float", r.beta_float()}}},
      {"bound_beta", {{"exact", "(1+eps)^2*sqrt(" + std::to_string(r.d) + ")/" + std::to_string(r.k)},
                      {"float", r.bound_float()},
                      {"beta_vs_bound", r.beta_vs_bound}}},
      {"pairs_checked", r.pairs_checked},
      {"mode", r.mode},
      {"seed", r.seed},
      {"classification", to_string(r.classification)},
      {"classification_evidence", r.classification_lower_bound ? "sampled (lower bound)" : "exhaustive"},
  };
}

UnbiasednessReport report_from_json(const nlohmann::json& j) {
  try {
    UnbiasednessReport r;
    r.d = j.at("d").get<int>();
    r.s = j.at("s").get<int>();
    r.k = j.at("k").get<int>();
    r.t = j.at("t").get<int>();
    r.order4n = j.at("m").get<int>();
    const std::uint64_t m = field_radicand(r.order4n);
    r.epsilon = epsilon_from_json(j.at("epsilon"), m);
    for (const auto& v : j.at("delta")) r.delta.push_back({quad_from_json(v.at("value"), m), v.at("count").get<std::uint64_t>()});
    r.max_inner = quad_from_json(j.at("max_inner"), m);
    r.beta_vs_bound = j.at("bound_beta").at("beta_vs_bound").get<int>();
    r.pairs_checked = j.at("pairs_checked").get<std::uint64_t>();
    r.mode = j.at("mode").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    const auto cls = j.at("classification").get<std::string>();
    if (cls == "MUB") {
      r.classification = Classification::MUB;
    } else if (cls == "APMUB") {
      r.classification = Classification::APMUB;
    } else if (cls == "beta-ARMUB") {
      r.classification = Classification::BetaARMUB;
    } else {
      throw ParseError("unknown classification '" + cls + "'");
    }
    r.classification_lower_bound = j.at("classification_evidence").get<std::string>() != "exhaustive";
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed report JSON: ") + e.what());
  }
}

nlohmann::json ledger_to_json(const std::vector<LedgerLine>& ledger) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& l : ledger) {
    nlohmann::json line{{"check", l.check}, {"lhs", l.lhs}, {"rhs", l.rhs}, {"verdict", to_string(l.verdict)}};
    if (!l.note.empty()) line["note"] = l.note;
    out.push_back(std::move(line));
  }
  return out;
}

std::string report_to_csv(const UnbiasednessReport& r) {
  std::ostringstream os;
  os.precision(15);
  os << "d,s,k,t,m,epsilon,beta,bound_beta,pairs_checked,mode,seed,classification\n";
  os << r.d << "," << r.s << "," << r.k << "," << r.t << "," << r.order4n << "," << r.epsilon.to_double() << ","
     << r.beta_float() << "," << r.bound_float() << "," << r.pairs_checked << "," << r.mode << "," << r.seed << ","
     << to_string(r.classification) << "\n";
  os << "\nvalue,float,count\n";
  for (const auto& v : r.delta) os << v.value.to_string() << "," << quad_to_float(v.value) << "," << v.count << "\n";
  return os.str();
}

}  // namespace armub
