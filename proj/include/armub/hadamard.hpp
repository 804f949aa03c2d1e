#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "armub/matrix.hpp"

namespace armub {

/// Default cap on constructed Hadamard orders.
inline constexpr int kDefaultOrderBudget = 4096;

/// Order budget honoring the ARMUB_SIZE_BUDGET environment override.
int order_budget();

/// Square matrix with entries in {+1, -1}.
class SignMatrix {
 public:
  SignMatrix() = default;
  explicit SignMatrix(int order) : order_(order), data_(std::size_t(order) * order, 1) {}
  /// Throws DomainError unless `rows` is square with +-1 entries.
  static SignMatrix from_rows(const std::vector<std::vector<int>>& rows);

  int order() const { return order_; }
  int operator()(int i, int j) const { return data_[std::size_t(i) * order_ + j]; }
  void set(int i, int j, int v);
  void negate_row(int i);
  void negate_col(int j);

  /// Set once is_hadamard has confirmed H*H^T = order*I.
  bool verified() const { return verified_; }

  std::vector<std::vector<int>> rows() const;
  IntMatrix to_int() const;
  IntMatrix block(const std::vector<int>& rows, const std::vector<int>& cols) const;

  friend bool operator==(const SignMatrix& a, const SignMatrix& b) {
    return a.order_ == b.order_ && a.data_ == b.data_;
  }

 private:
  friend SignMatrix verified(SignMatrix m);
  int order_ = 0;
  std::vector<std::int8_t> data_;
  bool verified_ = false;
};

struct HadamardCheck {
  bool ok = true;
  int row = -1;
  int col = -1;
  long value = 0;  // (H*H^T)_{row,col} at the first violation
};

/// Exact integer check of H*H^T = order*I.
HadamardCheck is_hadamard(const SignMatrix& m);

/// Runs is_hadamard and returns m flagged as verified; throws StructuralError on failure.
SignMatrix verified(SignMatrix m);

/// Negates rows, then columns, so the first column and first row are all +1.
SignMatrix normalize(SignMatrix m);

SignMatrix sylvester(int doublings);
SignMatrix paley(std::uint64_t q);
SignMatrix kronecker(const SignMatrix& a, const SignMatrix& b);

/// One factor of a Hadamard order decomposition.
struct HadamardFactor {
  enum class Kind { Sylvester, PaleyI, PaleyII };
  Kind kind;
  int order;
  std::uint64_t parameter;  // doublings for Sylvester, q for Paley

  std::string describe() const;
};

/// Fewest-factor decomposition of `order`. Throws DomainError for orders that
/// admit no real Hadamard matrix, NotConstructibleError when the generators
/// cannot reach the order, ResourceError past the budget.
std::vector<HadamardFactor> hadamard_recipe(int order, int budget = order_budget());

/// Builds the matrix for hadamard_recipe(order), normalized and verified.
SignMatrix find_hadamard(int order, int budget = order_budget());

nlohmann::json hadamard_to_json(const SignMatrix& m);
/// Parses and re-verifies; ParseError on malformed input or a failed check.
SignMatrix hadamard_from_json(const nlohmann::json& j);

}  // namespace armub
