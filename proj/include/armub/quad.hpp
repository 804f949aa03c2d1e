#pragma once

#include <cstdint>
#include <ostream>
#include <string>

#include "armub/rational.hpp"

namespace armub {

/// Exact element a + b*sqrt(m) of the quadratic field Q(sqrt(m)).
///
/// The radicand m is either a non-square integer > 1, or 1, which marks the
/// plain rational field (b is then always zero). Square radicands > 1 are
/// rejected so that equality stays componentwise.
class QuadNum {
 public:
  /// Zero of the rational field.
  QuadNum() = default;
  QuadNum(Rational a, Rational b, std::uint64_t m);

  static QuadNum rational(Rational a, std::uint64_t m) { return QuadNum(std::move(a), Rational(0), m); }
  /// sqrt(m) itself; for m == 1 this is the rational 1.
  static QuadNum root(std::uint64_t m);

  const Rational& a() const { return a_; }
  const Rational& b() const { return b_; }
  std::uint64_t m() const { return m_; }

  bool is_zero() const { return a_.is_zero() && b_.is_zero(); }
  bool is_rational() const { return b_.is_zero(); }

  /// Sign of the real number a + b*sqrt(m), decided without floating point.
  int sign() const;
  QuadNum abs() const { return sign() < 0 ? -*this : *this; }
  QuadNum conjugate() const { return QuadNum(a_, -b_, m_); }
  /// Field norm a^2 - m*b^2.
  Rational norm() const { return a_ * a_ - Rational(static_cast<long>(m_)) * b_ * b_; }
  QuadNum inverse() const;
  QuadNum square() const { return *this * *this; }

  QuadNum& operator+=(const QuadNum& o);
  QuadNum& operator-=(const QuadNum& o);
  QuadNum& operator*=(const QuadNum& o);
  QuadNum& operator/=(const QuadNum& o);
  QuadNum& operator*=(const Rational& r);

  friend QuadNum operator+(QuadNum x, const QuadNum& y) { return x += y; }
  friend QuadNum operator-(QuadNum x, const QuadNum& y) { return x -= y; }
  friend QuadNum operator*(QuadNum x, const QuadNum& y) { return x *= y; }
  friend QuadNum operator/(QuadNum x, const QuadNum& y) { return x /= y; }
  friend QuadNum operator*(QuadNum x, const Rational& r) { return x *= r; }
  friend QuadNum operator*(const Rational& r, QuadNum x) { return x *= r; }
  friend QuadNum operator-(const QuadNum& x) { return QuadNum(-x.a_, -x.b_, x.m_); }

  /// Componentwise equality; operands with different radicands are unequal.
  friend bool operator==(const QuadNum& x, const QuadNum& y) {
    return x.m_ == y.m_ && x.a_ == y.a_ && x.b_ == y.b_;
  }

  /// Compact text form: "a", "b*sqrt(m)" or "a + b*sqrt(m)" with rationals as p/q.
  std::string to_string() const;
  friend std::ostream& operator<<(std::ostream& os, const QuadNum& x) { return os << x.to_string(); }

 private:
  void require_same_field(const QuadNum& o) const;

  Rational a_;
  Rational b_;
  std::uint64_t m_ = 1;
};

/// Exact sign of x.
int quad_sign(const QuadNum& x);

/// Three-way comparison of real values; throws StructuralError on mixed radicands.
int quad_compare(const QuadNum& x, const QuadNum& y);

/// Rounds a + b*sqrt(m) to a double. The value is evaluated with MPFR at
/// `precision_bits` plus guard bits, so the result is within 2^-precision_bits
/// (relative) of the true value before the final rounding to double.
double quad_to_float(const QuadNum& x, int precision_bits = 53);

/// Decimal rendering with `digits` significant digits (MPFR backed).
std::string quad_to_decimal(const QuadNum& x, int digits = 15);

/// Sign of sqrt(r)*q - c for a non-negative integer r and q, c in the same
/// field. Used for quantities such as sqrt(k)*|Y_ij| that live outside Q(sqrt(m)).
int scaled_root_compare(std::uint64_t r, const QuadNum& q, const QuadNum& c);

/// sign * sqrt(r) * q + shift, evaluated with MPFR at 256 bits and rounded.
double scaled_root_to_float(std::uint64_t r, const QuadNum& q, int sign, const Rational& shift);
std::string scaled_root_to_decimal(std::uint64_t r, const QuadNum& q, int sign, const Rational& shift,
                                   int digits = 15);

/// The value sqrt(r) * q, kept symbolic. Comparisons square both sides.
struct ScaledRoot {
  std::uint64_t r = 1;
  QuadNum q;

  /// Sign of (this - c).
  int compare(const QuadNum& c) const { return scaled_root_compare(r, q, c); }
  double to_double() const;
  std::string to_string() const;
};

}  // namespace armub
