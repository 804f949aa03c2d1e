#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "armub/quad.hpp"

namespace armub {

/// Dense row-major integer matrix, used for the +-1 blocks and their products.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(int rows, int cols, long fill = 0) : rows_(rows), cols_(cols), data_(std::size_t(rows) * cols, fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  long& operator()(int i, int j) { return data_[std::size_t(i) * cols_ + j]; }
  long operator()(int i, int j) const { return data_[std::size_t(i) * cols_ + j]; }

  static IntMatrix identity(int n);
  IntMatrix transpose() const;
  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);
  friend IntMatrix operator+(const IntMatrix& a, const IntMatrix& b);
  friend bool operator==(const IntMatrix& a, const IntMatrix& b) = default;

  long trace() const;
  /// Determinant for n <= 3 (cofactor expansion).
  long small_determinant() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<long> data_;
};

/// Dense matrix over Q(sqrt(m)); every entry shares the radicand m.
class QuadMatrix {
 public:
  QuadMatrix() = default;
  QuadMatrix(int rows, int cols, std::uint64_t m);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::uint64_t radicand() const { return m_; }

  QuadNum& operator()(int i, int j) { return data_[std::size_t(i) * cols_ + j]; }
  const QuadNum& operator()(int i, int j) const { return data_[std::size_t(i) * cols_ + j]; }

  static QuadMatrix identity(int n, std::uint64_t m);
  static QuadMatrix from_int(const IntMatrix& a, std::uint64_t m);

  QuadMatrix transpose() const;
  friend QuadMatrix operator*(const QuadMatrix& a, const QuadMatrix& b);
  friend QuadMatrix operator+(const QuadMatrix& a, const QuadMatrix& b);
  friend QuadMatrix operator-(const QuadMatrix& a, const QuadMatrix& b);
  QuadMatrix scaled(const QuadNum& s) const;
  friend bool operator==(const QuadMatrix& a, const QuadMatrix& b);

  /// Exact inverse by Gauss-Jordan elimination; ArithmeticError if singular.
  QuadMatrix inverse() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::uint64_t m_ = 1;
  std::vector<QuadNum> data_;
};

/// Location and value of the first entry where A*A^T (or A^T*A) differs from I.
struct OrthogonalityResidual {
  bool orthogonal = true;
  int row = -1;
  int col = -1;
  std::string detail;
};

/// Exact check of Y*Y^T == I and Y^T*Y == I. Entries are brought to a common
/// denominator so the products run over integers.
OrthogonalityResidual check_orthogonal(const QuadMatrix& y);

}  // namespace armub
