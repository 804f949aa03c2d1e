#include "armub/hadamard.hpp"

#include <cstdlib>
#include <map>
#include <optional>

#include "armub/error.hpp"
#include "armub/gf.hpp"

namespace armub {

int order_budget() {
  if (const char* env = std::getenv("ARMUB_SIZE_BUDGET")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return kDefaultOrderBudget;
}

namespace {

void check_budget(long order, int budget) {
  if (order > budget) {
    throw ResourceError("Hadamard order " + std::to_string(order) + " exceeds budget " + std::to_string(budget));
  }
}

}  // namespace

SignMatrix SignMatrix::from_rows(const std::vector<std::vector<int>>& rows) {
  SignMatrix m(static_cast<int>(rows.size()));
  for (int i = 0; i < m.order_; ++i) {
    if (static_cast<int>(rows[i].size()) != m.order_) throw DomainError("sign matrix must be square");
    for (int j = 0; j < m.order_; ++j) m.set(i, j, rows[i][j]);
  }
  return m;
}

void SignMatrix::set(int i, int j, int v) {
  if (v != 1 && v != -1) throw DomainError("sign matrix entries must be +1 or -1, got " + std::to_string(v));
  data_[std::size_t(i) * order_ + j] = static_cast<std::int8_t>(v);
  verified_ = false;
}

void SignMatrix::negate_row(int i) {
  for (int j = 0; j < order_; ++j) data_[std::size_t(i) * order_ + j] = static_cast<std::int8_t>(-data_[std::size_t(i) * order_ + j]);
}

void SignMatrix::negate_col(int j) {
  for (int i = 0; i < order_; ++i) data_[std::size_t(i) * order_ + j] = static_cast<std::int8_t>(-data_[std::size_t(i) * order_ + j]);
}

std::vector<std::vector<int>> SignMatrix::rows() const {
  std::vector<std::vector<int>> r(order_, std::vector<int>(order_));
  for (int i = 0; i < order_; ++i) {
    for (int j = 0; j < order_; ++j) r[i][j] = (*this)(i, j);
  }
  return r;
}

IntMatrix SignMatrix::to_int() const {
  IntMatrix r(order_, order_);
  for (int i = 0; i < order_; ++i) {
    for (int j = 0; j < order_; ++j) r(i, j) = (*this)(i, j);
  }
  return r;
}

IntMatrix SignMatrix::block(const std::vector<int>& rows, const std::vector<int>& cols) const {
  IntMatrix r(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) r(int(i), int(j)) = (*this)(rows[i], cols[j]);
  }
  return r;
}

HadamardCheck is_hadamard(const SignMatrix& m) {
  const int n = m.order();
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      long dot = 0;
      for (int l = 0; l < n; ++l) dot += m(i, l) * m(j, l);
      const long expected = (i == j) ? n : 0;
      if (dot != expected) return HadamardCheck{false, i, j, dot};
    }
  }
  return {};
}

SignMatrix verified(SignMatrix m) {
  const auto check = is_hadamard(m);
  if (!check.ok) {
    throw StructuralError("not a Hadamard matrix: (H*H^T)(" + std::to_string(check.row) + "," +
                          std::to_string(check.col) + ") = " + std::to_string(check.value));
  }
  m.verified_ = true;
  return m;
}

SignMatrix normalize(SignMatrix m) {
  const bool was_verified = m.verified();
  for (int i = 0; i < m.order(); ++i) {
    if (m(i, 0) < 0) m.negate_row(i);
  }
  for (int j = 0; j < m.order(); ++j) {
    if (m(0, j) < 0) m.negate_col(j);
  }
  return was_verified ? verified(std::move(m)) : m;
}

SignMatrix sylvester(int doublings) {
  if (doublings < 0) throw DomainError("Sylvester doublings must be >= 0");
  if (doublings > 30) throw ResourceError("Sylvester order 2^" + std::to_string(doublings) + " exceeds budget");
  check_budget(1L << doublings, order_budget());
  SignMatrix h(1);
  const SignMatrix h2 = SignMatrix::from_rows({{1, 1}, {1, -1}});
  for (int i = 0; i < doublings; ++i) h = kronecker(h, h2);
  return verified(std::move(h));
}

SignMatrix paley(std::uint64_t q) {
  const auto pe = prime_power(q);
  if (!pe || pe->first == 2) throw DomainError("Paley construction needs an odd prime power, got " + std::to_string(q));
  const bool type_one = q % 4 == 3;
  check_budget(type_one ? long(q + 1) : long(2 * (q + 1)), order_budget());
  const auto field = gf_make(pe->first, pe->second);
  const int qi = static_cast<int>(q);

  // Jacobsthal matrix Q_ij = chi(x_j - x_i) bordered to order q+1.
  std::vector<std::vector<int>> c(qi + 1, std::vector<int>(qi + 1, 0));
  for (int j = 1; j <= qi; ++j) {
    c[0][j] = 1;
    c[j][0] = type_one ? -1 : 1;
  }
  for (int i = 0; i < qi; ++i) {
    for (int j = 0; j < qi; ++j) c[i + 1][j + 1] = field->chi(field->sub(GfField::Elem(j), GfField::Elem(i)));
  }

  SignMatrix h;
  if (type_one) {
    h = SignMatrix(qi + 1);
    for (int i = 0; i <= qi; ++i) {
      for (int j = 0; j <= qi; ++j) h.set(i, j, c[i][j] + (i == j ? 1 : 0));
    }
  } else {
    // C (x) [[1,1],[1,-1]] + I (x) [[1,-1],[-1,-1]].
    const int n = 2 * (qi + 1);
    h = SignMatrix(n);
    for (int i = 0; i <= qi; ++i) {
      for (int j = 0; j <= qi; ++j) {
        const int v = c[i][j];
        const int d = (i == j) ? 1 : 0;
        h.set(2 * i, 2 * j, v + d);
        h.set(2 * i, 2 * j + 1, v - d);
        h.set(2 * i + 1, 2 * j, v - d);
        h.set(2 * i + 1, 2 * j + 1, -v - d);
      }
    }
  }
  return normalize(verified(std::move(h)));
}

SignMatrix kronecker(const SignMatrix& a, const SignMatrix& b) {
  check_budget(long(a.order()) * b.order(), order_budget());
  const int n = a.order() * b.order();
  SignMatrix r(n);
  for (int i = 0; i < a.order(); ++i) {
    for (int j = 0; j < a.order(); ++j) {
      for (int k = 0; k < b.order(); ++k) {
        for (int l = 0; l < b.order(); ++l) r.set(i * b.order() + k, j * b.order() + l, a(i, j) * b(k, l));
      }
    }
  }
  if (a.verified() && b.verified()) return verified(std::move(r));
  return r;
}

std::string HadamardFactor::describe() const {
  switch (kind) {
    case Kind::Sylvester: return "Sylvester(" + std::to_string(order) + ")";
    case Kind::PaleyI: return "PaleyI(q=" + std::to_string(parameter) + ")";
    case Kind::PaleyII: return "PaleyII(q=" + std::to_string(parameter) + ")";
  }
  return "?";
}

namespace {

// Generators of order exactly n, in preference order.
std::vector<HadamardFactor> atoms_of_order(int n) {
  std::vector<HadamardFactor> out;
  if (n >= 2 && (n & (n - 1)) == 0) {
    int d = 0;
    while ((1 << d) < n) ++d;
    out.push_back({HadamardFactor::Kind::Sylvester, n, std::uint64_t(d)});
  }
  if (n >= 4) {
    const auto q = std::uint64_t(n - 1);
    const auto pe = prime_power(q);
    if (pe && pe->first != 2 && q % 4 == 3) out.push_back({HadamardFactor::Kind::PaleyI, n, q});
  }
  if (n >= 4 && n % 2 == 0) {
    const auto q = std::uint64_t(n / 2 - 1);
    const auto pe = prime_power(q);
    if (pe && pe->first != 2 && q % 4 == 1) out.push_back({HadamardFactor::Kind::PaleyII, n, q});
  }
  return out;
}

struct RecipeSearch {
  std::map<int, std::optional<std::vector<HadamardFactor>>> memo;
  std::vector<int> attempted;

  const std::optional<std::vector<HadamardFactor>>& best(int n) {
    if (auto it = memo.find(n); it != memo.end()) return it->second;
    attempted.push_back(n);
    std::optional<std::vector<HadamardFactor>> result;
    if (n == 1) {
      result = std::vector<HadamardFactor>{};
    } else {
      for (int d = 2; d <= n; ++d) {
        if (n % d != 0) continue;
        const auto atoms = atoms_of_order(d);
        if (atoms.empty()) continue;
        const auto& rest = best(n / d);
        if (!rest) continue;
        if (!result || rest->size() + 1 < result->size()) {
          std::vector<HadamardFactor> candidate{atoms.front()};
          candidate.insert(candidate.end(), rest->begin(), rest->end());
          result = std::move(candidate);
        }
      }
      // Among equal-length recipes prefer a single generator of the preferred kind.
      if (result && result->size() > 1) {
        const auto whole = atoms_of_order(n);
        if (!whole.empty()) result = std::vector<HadamardFactor>{whole.front()};
      }
    }
    return memo.emplace(n, std::move(result)).first->second;
  }
};

}  // namespace

std::vector<HadamardFactor> hadamard_recipe(int order, int budget) {
  if (order < 1) throw DomainError("Hadamard order must be positive");
  if (order > 2 && order % 4 != 0) {
    throw DomainError("no real Hadamard matrix of order " + std::to_string(order) +
                      " exists (orders above 2 must be divisible by 4)");
  }
  check_budget(order, budget);
  RecipeSearch search;
  const auto& found = search.best(order);
  if (!found) {
    throw NotConstructibleError("order " + std::to_string(order) + " is not reachable from Sylvester, Paley I/II "
                                "and Kronecker products", search.attempted);
  }
  return *found;
}

SignMatrix find_hadamard(int order, int budget) {
  const auto recipe = hadamard_recipe(order, budget);
  SignMatrix h = verified(SignMatrix(1));
  for (const auto& f : recipe) {
    SignMatrix part = f.kind == HadamardFactor::Kind::Sylvester ? sylvester(static_cast<int>(f.parameter))
                                                                 : paley(f.parameter);
    h = kronecker(h, part);
  }
  return normalize(verified(std::move(h)));
}

nlohmann::json hadamard_to_json(const SignMatrix& m) {
  nlohmann::json j;
  j["order"] = m.order();
  j["rows"] = m.rows();
  return j;
}

SignMatrix hadamard_from_json(const nlohmann::json& j) {
  try {
    const int order = j.at("order").get<int>();
    const auto rows = j.at("rows").get<std::vector<std::vector<int>>>();
    if (static_cast<int>(rows.size()) != order) throw ParseError("row count differs from order");
    SignMatrix m = SignMatrix::from_rows(rows);
    const auto check = is_hadamard(m);
    if (!check.ok) {
      throw ParseError("matrix fails H*H^T = nI at (" + std::to_string(check.row) + "," + std::to_string(check.col) +
                       ")");
    }
    return verified(std::move(m));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed Hadamard JSON: ") + e.what());
  } catch (const DomainError& e) {
    throw ParseError(std::string("malformed Hadamard JSON: ") + e.what());
  }
}

}  // namespace armub
