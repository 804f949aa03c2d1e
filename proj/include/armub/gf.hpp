#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace armub {

/// Default cap on the field size p^e accepted by gf_make.
inline constexpr std::uint64_t kDefaultFieldBudget = 1u << 20;

/// Returns (p, e) when q = p^e for a prime p and e >= 1.
std::optional<std::pair<std::uint32_t, std::uint32_t>> prime_power(std::uint64_t q);

bool is_prime(std::uint64_t n);

/// Finite field GF(p^e) for an odd prime p.
///
/// Elements are identified by their rank sum(c_i * p^i), where c_i are the
/// coefficients of the residue polynomial; rank order is the lexicographic
/// order of (c_{e-1}, ..., c_0). Multiplication goes through discrete log
/// tables built from the smallest-rank primitive element.
class GfField {
 public:
  using Elem = std::uint32_t;

  std::uint32_t characteristic() const { return p_; }
  std::uint32_t degree() const { return e_; }
  std::uint32_t size() const { return size_; }
  /// Monic modulus, coefficients from x^0 up to x^e (last entry is 1).
  const std::vector<std::uint32_t>& modulus() const { return modulus_; }
  Elem primitive() const { return primitive_; }

  /// Coefficient vector (c_0, ..., c_{e-1}) of element x.
  std::vector<std::uint32_t> coefficients(Elem x) const;
  Elem from_coefficients(const std::vector<std::uint32_t>& coeffs) const;

  Elem add(Elem x, Elem y) const;
  Elem sub(Elem x, Elem y) const;
  Elem neg(Elem x) const { return sub(0, x); }
  Elem mul(Elem x, Elem y) const;
  Elem inv(Elem x) const;
  Elem div(Elem x, Elem y) const { return mul(x, inv(y)); }
  Elem pow(Elem x, std::uint64_t n) const;
  Elem one() const { return 1; }

  /// Quadratic character: 0 for zero, +1 for nonzero squares, -1 otherwise.
  int chi(Elem x) const;

  std::string describe() const;

 private:
  friend std::shared_ptr<const GfField> gf_make(std::uint32_t p, std::uint32_t e, std::uint64_t budget);
  GfField() = default;

  std::uint32_t p_ = 0;
  std::uint32_t e_ = 0;
  std::uint32_t size_ = 0;
  Elem primitive_ = 0;
  std::vector<std::uint32_t> modulus_;
  std::vector<Elem> exp_;            // exp_[i] = g^i, i in [0, size-1)
  std::vector<std::uint32_t> log_;   // log_[x] for x != 0
};

using GfFieldPtr = std::shared_ptr<const GfField>;

/// Element handle tied to its field descriptor.
struct GfElem {
  GfFieldPtr field;
  GfField::Elem value = 0;

  std::vector<std::uint32_t> coefficients() const { return field->coefficients(value); }
  friend bool operator==(const GfElem& a, const GfElem& b) {
    return a.field == b.field && a.value == b.value;
  }
};

/// Builds GF(p^e) with the lexicographically smallest monic irreducible modulus.
/// Throws DomainError unless p is an odd prime and e >= 1, ResourceError when
/// p^e exceeds `budget`.
GfFieldPtr gf_make(std::uint32_t p, std::uint32_t e, std::uint64_t budget = kDefaultFieldBudget);

/// gf_make for q = p^e given as a single odd prime power.
GfFieldPtr gf_make_order(std::uint64_t q, std::uint64_t budget = kDefaultFieldBudget);

namespace poly {

/// Dense polynomials over Z_p, coefficient i multiplies x^i, no trailing zeros.
using Poly = std::vector<std::uint32_t>;

Poly trim(Poly a);
Poly mod(const Poly& a, const Poly& m, std::uint32_t p);
Poly mulmod(const Poly& a, const Poly& b, const Poly& m, std::uint32_t p);
Poly sub(const Poly& a, const Poly& b, std::uint32_t p);
Poly gcd(Poly a, Poly b, std::uint32_t p);
/// Irreducibility over Z_p: no roots in Z_p, and gcd(f, x^(p^i) - x) = 1 for 1 <= i <= deg/2.
bool is_irreducible(const Poly& f, std::uint32_t p);

}  // namespace poly

}  // namespace armub
