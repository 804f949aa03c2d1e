#include "armub/quad.hpp"

#include <mpfr.h>

#include <cmath>
#include <cstdio>
#include <memory>
#include <sstream>

#include "armub/error.hpp"

namespace armub {

namespace {

// Guard bits for the a + b*sqrt(m) evaluation: two roundings and a sqrt.
constexpr int kGuardBits = 16;

class MpfrValue {
 public:
  explicit MpfrValue(mpfr_prec_t prec) { mpfr_init2(v_, prec); }
  ~MpfrValue() { mpfr_clear(v_); }
  MpfrValue(const MpfrValue&) = delete;
  MpfrValue& operator=(const MpfrValue&) = delete;
  mpfr_ptr get() { return v_; }

 private:
  mpfr_t v_;
};

void evaluate(const QuadNum& x, int precision_bits, MpfrValue& out) {
  const mpfr_prec_t prec = precision_bits + kGuardBits;
  MpfrValue root(prec);
  MpfrValue term(prec);
  mpfr_set_q(out.get(), x.a().raw().get_mpq_t(), MPFR_RNDN);
  if (!x.b().is_zero()) {
    mpfr_set_ui(root.get(), static_cast<unsigned long>(x.m()), MPFR_RNDN);
    mpfr_sqrt(root.get(), root.get(), MPFR_RNDN);
    mpfr_mul_q(term.get(), root.get(), x.b().raw().get_mpq_t(), MPFR_RNDN);
    mpfr_add(out.get(), out.get(), term.get(), MPFR_RNDN);
  }
}

}  // namespace

QuadNum::QuadNum(Rational a, Rational b, std::uint64_t m) : a_(std::move(a)), b_(std::move(b)), m_(m) {
  if (m == 0) throw DomainError("radicand must be positive");
  if (m == 1) {
    if (!b_.is_zero()) throw DomainError("radicand 1 (rational field) requires b == 0");
  } else if (is_perfect_square(m)) {
    throw DomainError("radicand " + std::to_string(m) + " is a perfect square");
  }
}

QuadNum QuadNum::root(std::uint64_t m) {
  if (m == 1) return QuadNum(Rational(1), Rational(0), 1);
  return QuadNum(Rational(0), Rational(1), m);
}

void QuadNum::require_same_field(const QuadNum& o) const {
  if (m_ != o.m_) {
    throw StructuralError("mixed radicands " + std::to_string(m_) + " and " + std::to_string(o.m_));
  }
}

int QuadNum::sign() const {
  const int sa = a_.sign();
  const int sb = b_.sign();
  if (sb == 0) return sa;
  if (sa == 0 || sa == sb) return sb;
  // Opposite signs: compare a^2 against m*b^2.
  const Rational lhs = a_ * a_;
  const Rational rhs = Rational(static_cast<long>(m_)) * b_ * b_;
  if (lhs > rhs) return sa;
  if (lhs < rhs) return sb;
  return 0;  // unreachable for non-square m
}

QuadNum QuadNum::inverse() const {
  const Rational n = norm();
  if (n.is_zero()) throw ArithmeticError("division by zero in Q(sqrt(" + std::to_string(m_) + "))");
  return QuadNum(a_ / n, -b_ / n, m_);
}

QuadNum& QuadNum::operator+=(const QuadNum& o) {
  require_same_field(o);
  a_ += o.a_;
  b_ += o.b_;
  return *this;
}

QuadNum& QuadNum::operator-=(const QuadNum& o) {
  require_same_field(o);
  a_ -= o.a_;
  b_ -= o.b_;
  return *this;
}

QuadNum& QuadNum::operator*=(const QuadNum& o) {
  require_same_field(o);
  if (b_.is_zero() && o.b_.is_zero()) {
    a_ *= o.a_;
    return *this;
  }
  Rational a = a_ * o.a_ + Rational(static_cast<long>(m_)) * b_ * o.b_;
  Rational b = a_ * o.b_ + b_ * o.a_;
  a_ = std::move(a);
  b_ = std::move(b);
  return *this;
}

QuadNum& QuadNum::operator/=(const QuadNum& o) {
  require_same_field(o);
  if (o.is_zero()) throw ArithmeticError("division by zero in Q(sqrt(" + std::to_string(m_) + "))");
  return *this *= o.inverse();
}

QuadNum& QuadNum::operator*=(const Rational& r) {
  a_ *= r;
  b_ *= r;
  return *this;
}

std::string QuadNum::to_string() const {
  std::ostringstream os;
  if (b_.is_zero()) {
    os << a_;
  } else if (a_.is_zero()) {
    os << b_ << "*sqrt(" << m_ << ")";
  } else {
    os << a_ << (b_.sign() < 0 ? " - " : " + ") << b_.abs() << "*sqrt(" << m_ << ")";
  }
  return os.str();
}

int quad_sign(const QuadNum& x) { return x.sign(); }

int quad_compare(const QuadNum& x, const QuadNum& y) { return (x - y).sign(); }

double quad_to_float(const QuadNum& x, int precision_bits) {
  MpfrValue v(precision_bits + kGuardBits);
  evaluate(x, precision_bits, v);
  return mpfr_get_d(v.get(), MPFR_RNDN);
}

std::string quad_to_decimal(const QuadNum& x, int digits) {
  // ~3.33 bits per decimal digit.
  const int bits = digits * 4 + 8;
  MpfrValue v(bits + kGuardBits);
  evaluate(x, bits, v);
  std::unique_ptr<char, void (*)(char*)> text(nullptr, mpfr_free_str);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%%.%dRg", digits);
  char* out = nullptr;
  mpfr_asprintf(&out, buf, v.get());
  text.reset(out);
  return std::string(text.get());
}

int scaled_root_compare(std::uint64_t r, const QuadNum& q, const QuadNum& c) {
  const int sq = r == 0 ? 0 : q.sign();
  const int sc = c.sign();
  if (sq == 0) return -sc;
  if (sc == 0) return sq;
  if (sq != sc) return sq;
  // Same sign: compare r*q^2 with c^2, flipping for negatives.
  const int diff = (q.square() * Rational(static_cast<long>(r)) - c.square()).sign();
  return sq > 0 ? diff : -diff;
}

namespace {

// sign * sqrt(r) * q + shift at the requested precision.
void evaluate_affine(std::uint64_t r, const QuadNum& q, int sign, const Rational& shift, int precision_bits,
                     MpfrValue& out) {
  const mpfr_prec_t prec = precision_bits + kGuardBits;
  MpfrValue root(prec);
  evaluate(q, precision_bits, out);
  mpfr_set_ui(root.get(), static_cast<unsigned long>(r), MPFR_RNDN);
  mpfr_sqrt(root.get(), root.get(), MPFR_RNDN);
  mpfr_mul(out.get(), out.get(), root.get(), MPFR_RNDN);
  if (sign < 0) mpfr_neg(out.get(), out.get(), MPFR_RNDN);
  mpfr_add_q(out.get(), out.get(), shift.raw().get_mpq_t(), MPFR_RNDN);
}

}  // namespace

namespace {

bool affine_is_zero(std::uint64_t r, const QuadNum& q, int sign, const Rational& shift) {
  const QuadNum target = QuadNum::rational(Rational(0) - shift, q.m());
  return scaled_root_compare(r, sign < 0 ? -q : q, target) == 0;
}

}  // namespace

double scaled_root_to_float(std::uint64_t r, const QuadNum& q, int sign, const Rational& shift) {
  if (affine_is_zero(r, q, sign, shift)) return 0.0;
  // Cancellation against the shift can cost bits, so evaluate with headroom.
  MpfrValue v(256 + kGuardBits);
  evaluate_affine(r, q, sign, shift, 256, v);
  return mpfr_get_d(v.get(), MPFR_RNDN);
}

std::string scaled_root_to_decimal(std::uint64_t r, const QuadNum& q, int sign, const Rational& shift, int digits) {
  if (affine_is_zero(r, q, sign, shift)) return "0";
  MpfrValue v(256 + kGuardBits);
  evaluate_affine(r, q, sign, shift, 256, v);
  char fmt[32];
  std::snprintf(fmt, sizeof fmt, "%%.%dRg", digits);
  char* out = nullptr;
  mpfr_asprintf(&out, fmt, v.get());
  std::string text(out);
  mpfr_free_str(out);
  return text;
}

double ScaledRoot::to_double() const { return scaled_root_to_float(r, q, 1, Rational(0)); }

std::string ScaledRoot::to_string() const {
  if (r == 1) return q.to_string();
  return "sqrt(" + std::to_string(r) + ")*(" + q.to_string() + ")";
}

}  // namespace armub
