#include "armub/matrix.hpp"

#include <gmpxx.h>

#include "armub/error.hpp"

namespace armub {

IntMatrix IntMatrix::identity(int n) {
  IntMatrix r(n, n);
  for (int i = 0; i < n; ++i) r(i, i) = 1;
  return r;
}

IntMatrix IntMatrix::transpose() const {
  IntMatrix r(cols_, rows_);
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
  }
  return r;
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols_ != b.rows_) throw StructuralError("integer matrix shape mismatch in product");
  IntMatrix r(a.rows_, b.cols_);
  for (int i = 0; i < a.rows_; ++i) {
    for (int l = 0; l < a.cols_; ++l) {
      const long x = a(i, l);
      if (x == 0) continue;
      for (int j = 0; j < b.cols_; ++j) r(i, j) += x * b(l, j);
    }
  }
  return r;
}

IntMatrix operator+(const IntMatrix& a, const IntMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw StructuralError("integer matrix shape mismatch in sum");
  IntMatrix r = a;
  for (std::size_t i = 0; i < r.data_.size(); ++i) r.data_[i] += b.data_[i];
  return r;
}

long IntMatrix::trace() const {
  long t = 0;
  for (int i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

long IntMatrix::small_determinant() const {
  if (rows_ != cols_) throw StructuralError("determinant of non-square matrix");
  const auto& m = *this;
  switch (rows_) {
    case 0: return 1;
    case 1: return m(0, 0);
    case 2: return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    case 3:
      return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
             m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    default: throw StructuralError("small_determinant supports n <= 3");
  }
}

QuadMatrix::QuadMatrix(int rows, int cols, std::uint64_t m)
    : rows_(rows), cols_(cols), m_(m), data_(std::size_t(rows) * cols, QuadNum::rational(0, m)) {}

QuadMatrix QuadMatrix::identity(int n, std::uint64_t m) {
  QuadMatrix r(n, n, m);
  for (int i = 0; i < n; ++i) r(i, i) = QuadNum::rational(1, m);
  return r;
}

QuadMatrix QuadMatrix::from_int(const IntMatrix& a, std::uint64_t m) {
  QuadMatrix r(a.rows(), a.cols(), m);
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) r(i, j) = QuadNum::rational(a(i, j), m);
  }
  return r;
}

QuadMatrix QuadMatrix::transpose() const {
  QuadMatrix r(cols_, rows_, m_);
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
  }
  return r;
}

QuadMatrix operator*(const QuadMatrix& a, const QuadMatrix& b) {
  if (a.cols_ != b.rows_) throw StructuralError("matrix shape mismatch in product");
  if (a.m_ != b.m_) throw StructuralError("matrix radicand mismatch in product");
  QuadMatrix r(a.rows_, b.cols_, a.m_);
  for (int i = 0; i < a.rows_; ++i) {
    for (int l = 0; l < a.cols_; ++l) {
      const QuadNum& x = a(i, l);
      if (x.is_zero()) continue;
      for (int j = 0; j < b.cols_; ++j) r(i, j) += x * b(l, j);
    }
  }
  return r;
}

QuadMatrix operator+(const QuadMatrix& a, const QuadMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw StructuralError("matrix shape mismatch in sum");
  QuadMatrix r = a;
  for (std::size_t i = 0; i < r.data_.size(); ++i) r.data_[i] += b.data_[i];
  return r;
}

QuadMatrix operator-(const QuadMatrix& a, const QuadMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw StructuralError("matrix shape mismatch in difference");
  QuadMatrix r = a;
  for (std::size_t i = 0; i < r.data_.size(); ++i) r.data_[i] -= b.data_[i];
  return r;
}

QuadMatrix QuadMatrix::scaled(const QuadNum& s) const {
  QuadMatrix r = *this;
  for (auto& x : r.data_) x *= s;
  return r;
}

bool operator==(const QuadMatrix& a, const QuadMatrix& b) {
  return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.m_ == b.m_ && a.data_ == b.data_;
}

QuadMatrix QuadMatrix::inverse() const {
  if (rows_ != cols_) throw StructuralError("inverse of non-square matrix");
  const int n = rows_;
  QuadMatrix a = *this;
  QuadMatrix inv = identity(n, m_);
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    for (int r = col; r < n; ++r) {
      if (!a(r, col).is_zero()) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) throw ArithmeticError("singular matrix in exact elimination");
    if (pivot != col) {
      for (int j = 0; j < n; ++j) {
        std::swap(a(pivot, j), a(col, j));
        std::swap(inv(pivot, j), inv(col, j));
      }
    }
    const QuadNum scale = a(col, col).inverse();
    for (int j = 0; j < n; ++j) {
      a(col, j) *= scale;
      inv(col, j) *= scale;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col || a(r, col).is_zero()) continue;
      const QuadNum f = a(r, col);
      for (int j = 0; j < n; ++j) {
        a(r, j) -= f * a(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

namespace {

// Y = (A + B*sqrt(m)) / L with integer matrices A, B and a positive integer L.
struct IntegerForm {
  int n = 0;
  int c = 0;
  mpz_class denom;
  std::vector<mpz_class> a;
  std::vector<mpz_class> b;
};

IntegerForm integer_form(const QuadMatrix& y) {
  IntegerForm f;
  f.n = y.rows();
  f.c = y.cols();
  f.denom = 1;
  for (int i = 0; i < y.rows(); ++i) {
    for (int j = 0; j < y.cols(); ++j) {
      mpz_lcm(f.denom.get_mpz_t(), f.denom.get_mpz_t(), y(i, j).a().raw().get_den_mpz_t());
      mpz_lcm(f.denom.get_mpz_t(), f.denom.get_mpz_t(), y(i, j).b().raw().get_den_mpz_t());
    }
  }
  const std::size_t count = std::size_t(f.n) * f.c;
  f.a.resize(count);
  f.b.resize(count);
  for (int i = 0; i < y.rows(); ++i) {
    for (int j = 0; j < y.cols(); ++j) {
      const auto& x = y(i, j);
      const std::size_t idx = std::size_t(i) * f.c + j;
      f.a[idx] = x.a().raw().get_num() * (f.denom / x.a().raw().get_den());
      f.b[idx] = x.b().raw().get_num() * (f.denom / x.b().raw().get_den());
    }
  }
  return f;
}

// Rows (transpose=false) or columns (transpose=true) of Y must be orthonormal.
OrthogonalityResidual check_gram(const IntegerForm& f, std::uint64_t m, bool columns) {
  const int count = columns ? f.c : f.n;
  const int len = columns ? f.n : f.c;
  const auto at = [&](const std::vector<mpz_class>& v, int vec, int pos) -> const mpz_class& {
    return columns ? v[std::size_t(pos) * f.c + vec] : v[std::size_t(vec) * f.c + pos];
  };
  const mpz_class target = f.denom * f.denom;
  const mpz_class mz(static_cast<unsigned long>(m));
  mpz_class rational_part;
  mpz_class root_part;
  mpz_class bb;
  for (int i = 0; i < count; ++i) {
    for (int j = i; j < count; ++j) {
      rational_part = 0;
      root_part = 0;
      bb = 0;
      for (int l = 0; l < len; ++l) {
        const mpz_class& ai = at(f.a, i, l);
        const mpz_class& bi = at(f.b, i, l);
        const mpz_class& aj = at(f.a, j, l);
        const mpz_class& bj = at(f.b, j, l);
        mpz_addmul(rational_part.get_mpz_t(), ai.get_mpz_t(), aj.get_mpz_t());
        mpz_addmul(bb.get_mpz_t(), bi.get_mpz_t(), bj.get_mpz_t());
        mpz_addmul(root_part.get_mpz_t(), ai.get_mpz_t(), bj.get_mpz_t());
        mpz_addmul(root_part.get_mpz_t(), bi.get_mpz_t(), aj.get_mpz_t());
      }
      rational_part += mz * bb;
      const mpz_class expected = (i == j) ? target : mpz_class(0);
      if (rational_part != expected || root_part != 0) {
        OrthogonalityResidual r;
        r.orthogonal = false;
        r.row = i;
        r.col = j;
        r.detail = std::string(columns ? "Y^T*Y" : "Y*Y^T") + " entry (" + std::to_string(i) + "," +
                   std::to_string(j) + ") = (" + rational_part.get_str() + " + " + root_part.get_str() +
                   "*sqrt(" + std::to_string(m) + "))/" + target.get_str();
        return r;
      }
    }
  }
  return {};
}

}  // namespace

OrthogonalityResidual check_orthogonal(const QuadMatrix& y) {
  if (y.rows() != y.cols()) {
    OrthogonalityResidual r;
    r.orthogonal = false;
    r.detail = "matrix is not square";
    return r;
  }
  const IntegerForm f = integer_form(y);
  auto rows = check_gram(f, y.radicand(), false);
  if (!rows.orthogonal) return rows;
  return check_gram(f, y.radicand(), true);
}

}  // namespace armub
