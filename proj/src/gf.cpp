#include "armub/gf.hpp"

#include <sstream>

#include "armub/error.hpp"

namespace armub {

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

std::optional<std::pair<std::uint32_t, std::uint32_t>> prime_power(std::uint64_t q) {
  if (q < 2) return std::nullopt;
  std::uint64_t p = 0;
  for (std::uint64_t d = 2; d * d <= q; ++d) {
    if (q % d == 0) {
      p = d;
      break;
    }
  }
  if (p == 0) return std::make_pair(static_cast<std::uint32_t>(q), 1u);
  std::uint32_t e = 0;
  while (q % p == 0) {
    q /= p;
    ++e;
  }
  if (q != 1) return std::nullopt;
  return std::make_pair(static_cast<std::uint32_t>(p), e);
}

namespace poly {

Poly trim(Poly a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
  return a;
}

namespace {

std::uint32_t inv_mod(std::uint32_t a, std::uint32_t p) {
  // p is prime: a^(p-2).
  std::uint64_t result = 1;
  std::uint64_t base = a % p;
  for (std::uint32_t n = p - 2; n != 0; n >>= 1) {
    if (n & 1u) result = result * base % p;
    base = base * base % p;
  }
  return static_cast<std::uint32_t>(result);
}

}  // namespace

Poly mod(const Poly& a, const Poly& m, std::uint32_t p) {
  Poly r = trim(a);
  const Poly mt = trim(m);
  if (mt.empty()) throw ArithmeticError("polynomial modulus is zero");
  const std::uint32_t lead_inv = inv_mod(mt.back(), p);
  while (r.size() >= mt.size()) {
    const std::uint64_t factor = static_cast<std::uint64_t>(r.back()) * lead_inv % p;
    const std::size_t shift = r.size() - mt.size();
    for (std::size_t i = 0; i < mt.size(); ++i) {
      const std::uint64_t sub = factor * mt[i] % p;
      r[shift + i] = static_cast<std::uint32_t>((r[shift + i] + p - sub) % p);
    }
    r = trim(std::move(r));
  }
  return r;
}

Poly mulmod(const Poly& a, const Poly& b, const Poly& m, std::uint32_t p) {
  if (a.empty() || b.empty()) return {};
  Poly prod(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      prod[i + j] = static_cast<std::uint32_t>((prod[i + j] + static_cast<std::uint64_t>(a[i]) * b[j]) % p);
    }
  }
  return mod(prod, m, p);
}

Poly sub(const Poly& a, const Poly& b, std::uint32_t p) {
  Poly r(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < r.size(); ++i) {
    const std::uint32_t x = i < a.size() ? a[i] : 0;
    const std::uint32_t y = i < b.size() ? b[i] : 0;
    r[i] = (x + p - y) % p;
  }
  return trim(std::move(r));
}

Poly gcd(Poly a, Poly b, std::uint32_t p) {
  a = trim(std::move(a));
  b = trim(std::move(b));
  while (!b.empty()) {
    Poly r = mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

bool is_irreducible(const Poly& f_in, std::uint32_t p) {
  const Poly f = trim(f_in);
  if (f.size() < 2) return false;
  const std::size_t deg = f.size() - 1;
  if (deg == 1) return true;
  for (std::uint32_t x = 0; x < p; ++x) {
    std::uint64_t value = 0;
    for (std::size_t i = f.size(); i-- > 0;) value = (value * x + f[i]) % p;
    if (value == 0) return false;
  }
  // x^(p^i) mod f by repeated p-th powering.
  const Poly x{0, 1};
  Poly xp = x;
  for (std::size_t i = 1; i <= deg / 2; ++i) {
    Poly acc{1};
    Poly base = xp;
    for (std::uint32_t n = p; n != 0; n >>= 1) {
      if (n & 1u) acc = mulmod(acc, base, f, p);
      base = mulmod(base, base, f, p);
    }
    xp = acc;
    const Poly g = gcd(f, sub(xp, x, p), p);
    if (g.size() != 1) return false;
  }
  return true;
}

}  // namespace poly

std::vector<std::uint32_t> GfField::coefficients(Elem x) const {
  std::vector<std::uint32_t> c(e_, 0);
  for (std::uint32_t i = 0; i < e_; ++i) {
    c[i] = x % p_;
    x /= p_;
  }
  return c;
}

GfField::Elem GfField::from_coefficients(const std::vector<std::uint32_t>& coeffs) const {
  if (coeffs.size() != e_) throw StructuralError("coefficient vector length differs from field degree");
  Elem x = 0;
  for (std::size_t i = coeffs.size(); i-- > 0;) {
    if (coeffs[i] >= p_) throw DomainError("coefficient out of range");
    x = x * p_ + coeffs[i];
  }
  return x;
}

GfField::Elem GfField::add(Elem x, Elem y) const {
  Elem r = 0;
  Elem scale = 1;
  for (std::uint32_t i = 0; i < e_; ++i) {
    r += ((x % p_ + y % p_) % p_) * scale;
    x /= p_;
    y /= p_;
    scale *= p_;
  }
  return r;
}

GfField::Elem GfField::sub(Elem x, Elem y) const {
  Elem r = 0;
  Elem scale = 1;
  for (std::uint32_t i = 0; i < e_; ++i) {
    r += ((x % p_ + p_ - y % p_) % p_) * scale;
    x /= p_;
    y /= p_;
    scale *= p_;
  }
  return r;
}

GfField::Elem GfField::mul(Elem x, Elem y) const {
  if (x == 0 || y == 0) return 0;
  const std::uint32_t order = size_ - 1;
  return exp_[(log_[x] + log_[y]) % order];
}

GfField::Elem GfField::inv(Elem x) const {
  if (x == 0) throw ArithmeticError("inverse of zero in GF(" + std::to_string(size_) + ")");
  const std::uint32_t order = size_ - 1;
  return exp_[(order - log_[x]) % order];
}

GfField::Elem GfField::pow(Elem x, std::uint64_t n) const {
  if (n == 0) return 1;
  if (x == 0) return 0;
  const std::uint64_t order = size_ - 1;
  return exp_[(static_cast<std::uint64_t>(log_[x]) * (n % order)) % order];
}

int GfField::chi(Elem x) const {
  if (x == 0) return 0;
  return log_[x] % 2 == 0 ? 1 : -1;
}

std::string GfField::describe() const {
  std::ostringstream os;
  os << "GF(" << p_ << "^" << e_ << ") mod ";
  bool first = true;
  for (std::size_t i = modulus_.size(); i-- > 0;) {
    if (modulus_[i] == 0) continue;
    if (!first) os << " + ";
    first = false;
    if (i == 0 || modulus_[i] != 1) os << modulus_[i];
    if (i >= 1) os << "x";
    if (i >= 2) os << "^" << i;
  }
  return os.str();
}

GfFieldPtr gf_make(std::uint32_t p, std::uint32_t e, std::uint64_t budget) {
  if (!is_prime(p) || p == 2) throw DomainError("field characteristic must be an odd prime, got " + std::to_string(p));
  if (e == 0) throw DomainError("field degree must be >= 1");
  std::uint64_t size = 1;
  for (std::uint32_t i = 0; i < e; ++i) {
    size *= p;
    if (size > budget) {
      throw ResourceError("field size " + std::to_string(p) + "^" + std::to_string(e) + " exceeds budget " +
                          std::to_string(budget));
    }
  }

  auto field = std::shared_ptr<GfField>(new GfField());
  field->p_ = p;
  field->e_ = e;
  field->size_ = static_cast<std::uint32_t>(size);

  // Monic candidates x^e + sum c_i x^i in increasing rank of (c_{e-1}, ..., c_0).
  for (std::uint64_t r = 0; r < size; ++r) {
    poly::Poly f(e + 1, 0);
    std::uint64_t v = r;
    for (std::uint32_t i = 0; i < e; ++i) {
      f[i] = static_cast<std::uint32_t>(v % p);
      v /= p;
    }
    f[e] = 1;
    if (poly::is_irreducible(f, p)) {
      field->modulus_ = f;
      break;
    }
  }
  if (field->modulus_.empty()) throw ArithmeticError("no irreducible polynomial found");

  const auto to_poly = [&](std::uint64_t x) {
    poly::Poly c(e, 0);
    for (std::uint32_t i = 0; i < e; ++i) {
      c[i] = static_cast<std::uint32_t>(x % p);
      x /= p;
    }
    return poly::trim(std::move(c));
  };
  const auto from_poly = [&](const poly::Poly& c) {
    std::uint64_t x = 0;
    for (std::size_t i = c.size(); i-- > 0;) x = x * p + c[i];
    return static_cast<GfField::Elem>(x);
  };

  const std::uint64_t order = size - 1;
  for (std::uint64_t g = 1; g < size; ++g) {
    // g is primitive iff its powers reach 1 only at size-1.
    std::vector<GfField::Elem> exp(order);
    poly::Poly acc{1};
    const poly::Poly gp = to_poly(g);
    bool early_one = false;
    for (std::uint64_t i = 0; i < order; ++i) {
      exp[i] = from_poly(acc);
      if (i > 0 && exp[i] == 1) {
        early_one = true;
        break;
      }
      acc = poly::mulmod(acc, gp, field->modulus_, p);
    }
    if (early_one) continue;
    field->primitive_ = static_cast<GfField::Elem>(g);
    field->exp_ = std::move(exp);
    field->log_.assign(size, 0);
    for (std::uint64_t i = 0; i < order; ++i) field->log_[field->exp_[i]] = static_cast<std::uint32_t>(i);
    break;
  }
  if (field->exp_.empty()) throw ArithmeticError("no primitive element found");
  return field;
}

GfFieldPtr gf_make_order(std::uint64_t q, std::uint64_t budget) {
  const auto pe = prime_power(q);
  if (!pe || pe->first == 2) throw DomainError(std::to_string(q) + " is not an odd prime power");
  return gf_make(pe->first, pe->second, budget);
}

}  // namespace armub
