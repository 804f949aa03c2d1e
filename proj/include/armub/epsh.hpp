#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "armub/error.hpp"
#include "armub/hadamard.hpp"
#include "armub/matrix.hpp"
#include "armub/quad.hpp"

namespace armub {

/// The two orthogonal reductions of a block split. For t >= 2, Y1 is
/// D^ - W^(I+U^)^-1 V^ and Y2 is D^ + W^(I-U^)^-1 V^. For t = 1 the labels are
/// exchanged, so that Y2 = (D - WV/(sqrt(4n)+1))/sqrt(4n) for U = [1].
enum class Variant { Y1, Y2 };

/// Sign pattern of the reduction: Minus is D^ - W^(I+U^)^-1 V^, Plus is D^ + W^(I-U^)^-1 V^.
enum class ReductionForm { Minus, Plus };

ReductionForm form_of(int t, Variant v);
std::string to_string(Variant v);
Variant parse_variant(const std::string& s);

enum class Scope { CornerOnly, RowColPermutations, PermutationsAndNegations };
std::string to_string(Scope s);
/// Accepts "corner-only", "row-col-permutations", "permutations-and-negations".
Scope parse_scope(const std::string& s);

/// Radicand used for Q(sqrt(4n)): 4n itself, or 1 when 4n is a perfect square.
std::uint64_t field_radicand(int order4n);
/// sqrt(4n) as an element of Q(sqrt(field_radicand(4n))).
QuadNum sqrt_order(int order4n);

/// Choice of U inside a Hadamard matrix: U = diag(row_signs) H[rows, cols] diag(col_signs).
/// The signs also apply to the corresponding rows of V and columns of W.
struct BlockSplit {
  std::shared_ptr<const SignMatrix> source;
  int t = 0;
  std::vector<int> row_select;
  std::vector<int> col_select;
  std::vector<int> row_signs;
  std::vector<int> col_signs;

  static BlockSplit corner(std::shared_ptr<const SignMatrix> h, int t);

  int order() const { return source->order(); }
  std::vector<int> row_rest() const;
  std::vector<int> col_rest() const;
  IntMatrix u() const;
  IntMatrix v() const;
  IntMatrix w() const;
  IntMatrix d() const;
  /// Validates index sets and signs; throws DomainError.
  void validate() const;
};

/// Polynomial relation U^2 = kappa I + gamma U (t <= 2) or U^3 = kappa I + gamma U + theta U^2 (t = 3).
struct UClass {
  int t = 0;
  long kappa = 0;
  long gamma = 0;
  long theta = 0;
  std::optional<Variant> preferred;
  std::string family;
};

/// Returns the class of u, or nullopt for 3x3 matrices outside the two known families.
UClass compute_relation(const IntMatrix& u);
std::optional<UClass> classify_u(const IntMatrix& u);
/// The 3x3 sign matrices with a closed form, family 1 first (12), then family 2 (8).
const std::vector<IntMatrix>& listed_t3_matrices();
bool relation_holds(const IntMatrix& u, const UClass& c);

/// max_ij |sqrt(k) |Y_ij| - 1|, attained at entry (row, col) with magnitude y.
/// `above` selects sqrt(k) y - 1 (true) or 1 - sqrt(k) y (false).
struct Epsilon {
  std::uint64_t k = 1;
  QuadNum y;
  bool above = true;
  int row = 0;
  int col = 0;

  /// Sign of (epsilon - c).
  int compare(const QuadNum& c) const;
  bool is_zero() const;
  double to_double() const;
  std::string expression() const;
  std::string decimal(int digits = 15) const;
};

/// Three-way comparison of two epsilons of the same k and field.
int compare_epsilon(const Epsilon& a, const Epsilon& b);

Epsilon epsilon_of(const QuadMatrix& y);

struct EpsHadamard {
  int k = 0;
  int order4n = 0;
  int t = 0;
  QuadMatrix y;
  Epsilon epsilon;
  // Provenance.
  std::string method;  // "closed-form", "schur", "direct"
  std::optional<Variant> variant;
  std::optional<UClass> uclass;
  std::vector<int> row_select;
  std::vector<int> col_select;
  std::vector<int> row_signs;
  std::vector<int> col_signs;
  std::string source;  // Hadamard recipe description, informational
};

/// General reduction via exact Gauss-Jordan inversion of I +- U/sqrt(4n).
EpsHadamard schur_reduce(const BlockSplit& split, Variant variant);

/// Coefficients of (I + X/alpha)^-1 = c0 I + c1 X + c2 X^2 for the relation of X,
/// together with the denominator whose non-vanishing the formula needs.
struct InverseFormula {
  QuadNum c0;
  QuadNum c1;
  QuadNum c2;
  QuadNum denominator;
  IntMatrix x;  // U for the Minus form, -U for the Plus form
};

/// The closed inverse for (I + U^) (Minus) or (I - U^) (Plus). Throws
/// ArithmeticError if the denominator vanishes.
InverseFormula inverse_formula(const IntMatrix& u, const UClass& c, ReductionForm form, int order4n);

/// Evaluates the inverse formula as a t x t matrix.
QuadMatrix inverse_formula_matrix(const InverseFormula& f, std::uint64_t m);

/// Reduction via the polynomial-in-U closed form. Throws DomainError if the
/// class relation does not hold for the split's U.
EpsHadamard closed_form(const BlockSplit& split, const UClass& uclass, Variant variant);

/// H / sqrt(order) for an order that is itself Hadamard (t = 0, epsilon = 0).
EpsHadamard direct_normalized(const SignMatrix& h);

struct SearchOptions {
  Scope scope = Scope::CornerOnly;
  long cap = 100000;
  int threads = 1;
};

/// Search cap hit; carries the best reduction among the splits examined.
class SearchCapExceeded : public ResourceError {
 public:
  SearchCapExceeded(const std::string& what, EpsHadamard partial)
      : ResourceError(what), partial_(std::move(partial)) {}
  const EpsHadamard& partial() const { return partial_; }

 private:
  EpsHadamard partial_;
};

/// Minimum-epsilon reduction over the candidate splits of `scope`. Ties go to
/// the lexicographically smallest (rows, cols, signs), then to Y2.
EpsHadamard best_reduction(const SignMatrix& h, int t, const SearchOptions& options = {});

/// Finds a split of h whose U block equals u exactly, scanning increasing
/// index sets in lexicographic order and solving for row/column signs.
std::optional<BlockSplit> place_u(std::shared_ptr<const SignMatrix> h, const IntMatrix& u);

/// Closed entry window [(1 - t/(a-t))/a, (1 + t/(a-t))/a] with a = sqrt(4n).
std::pair<QuadNum, QuadNum> entry_window(int order4n, int t);

struct WindowViolation {
  int row = -1;
  int col = -1;
  QuadNum value;
};
/// First entry of y outside the window, if any.
std::optional<WindowViolation> check_entry_window(const QuadMatrix& y, int order4n, int t);

struct SeriesResidual {
  QuadMatrix exact;
  QuadMatrix partial;
  QuadNum max_residual;  // max_ij |exact - partial|
  QuadNum tail_bound;    // t^terms / (a^(terms+1) (1 - t/a))
  bool within_bound = false;
};

/// Truncated Neumann series sum_{r=0}^{terms} (-sign * U^)^r against the
/// exact inverse of I + sign * U^.
SeriesResidual series_inverse_check(const QuadMatrix& u_hat, int sign, int terms);

nlohmann::json rational_to_json(const Rational& r);
Rational rational_from_json(const nlohmann::json& j);
nlohmann::json quad_to_json(const QuadNum& x);
QuadNum quad_from_json(const nlohmann::json& j, std::uint64_t m);

nlohmann::json epsilon_to_json(const Epsilon& e);
Epsilon epsilon_from_json(const nlohmann::json& j, std::uint64_t m);

nlohmann::json epsh_to_json(const EpsHadamard& e);
/// Parses and, with certify, re-checks orthogonality and the stored epsilon;
/// ParseError on failure. Without certify only the structure is checked.
EpsHadamard epsh_from_json(const nlohmann::json& j, bool certify = true);

}  // namespace armub
