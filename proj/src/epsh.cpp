#include "armub/epsh.hpp"

#include <algorithm>
#include <thread>

namespace armub {

ReductionForm form_of(int t, Variant v) {
  if (t == 1) return v == Variant::Y2 ? ReductionForm::Minus : ReductionForm::Plus;
  return v == Variant::Y1 ? ReductionForm::Minus : ReductionForm::Plus;
}

std::string to_string(Variant v) { return v == Variant::Y1 ? "Y1" : "Y2"; }

Variant parse_variant(const std::string& s) {
  if (s == "Y1") return Variant::Y1;
  if (s == "Y2") return Variant::Y2;
  throw ParseError("unknown variant '" + s + "'");
}

std::string to_string(Scope s) {
  switch (s) {
    case Scope::CornerOnly: return "corner-only";
    case Scope::RowColPermutations: return "row-col-permutations";
    case Scope::PermutationsAndNegations: return "permutations-and-negations";
  }
  return "?";
}

Scope parse_scope(const std::string& s) {
  if (s == "corner-only" || s == "corner") return Scope::CornerOnly;
  if (s == "row-col-permutations" || s == "permutations") return Scope::RowColPermutations;
  if (s == "permutations-and-negations" || s == "negations") return Scope::PermutationsAndNegations;
  throw DomainError("unknown search scope '" + s + "'");
}

std::uint64_t field_radicand(int order4n) {
  if (order4n <= 0) throw DomainError("order must be positive");
  return is_perfect_square(std::uint64_t(order4n)) ? 1 : std::uint64_t(order4n);
}

QuadNum sqrt_order(int order4n) {
  const std::uint64_t m = field_radicand(order4n);
  if (m == 1) return QuadNum::rational(Rational(static_cast<long>(isqrt(std::uint64_t(order4n)))), 1);
  return QuadNum::root(m);
}

// ---------------------------------------------------------------------------
// BlockSplit

namespace {

std::vector<int> complement(const std::vector<int>& selected, int n) {
  std::vector<int> rest;
  rest.reserve(n - selected.size());
  std::size_t p = 0;
  for (int i = 0; i < n; ++i) {
    if (p < selected.size() && selected[p] == i) {
      ++p;
    } else {
      rest.push_back(i);
    }
  }
  return rest;
}

}  // namespace

BlockSplit BlockSplit::corner(std::shared_ptr<const SignMatrix> h, int t) {
  BlockSplit s;
  s.source = std::move(h);
  s.t = t;
  for (int i = 0; i < t; ++i) {
    s.row_select.push_back(i);
    s.col_select.push_back(i);
  }
  s.row_signs.assign(t, 1);
  s.col_signs.assign(t, 1);
  return s;
}

std::vector<int> BlockSplit::row_rest() const { return complement(row_select, order()); }
std::vector<int> BlockSplit::col_rest() const { return complement(col_select, order()); }

void BlockSplit::validate() const {
  if (!source) throw DomainError("block split has no source matrix");
  if (t < 1 || t > 3) throw DomainError("t must be 1, 2 or 3, got " + std::to_string(t));
  const auto check = [&](const std::vector<int>& idx, const std::vector<int>& signs, const char* what) {
    if (static_cast<int>(idx.size()) != t || static_cast<int>(signs.size()) != t) {
      throw DomainError(std::string(what) + " selection must have t entries");
    }
    for (int i = 0; i < t; ++i) {
      if (idx[i] < 0 || idx[i] >= order()) throw DomainError(std::string(what) + " index out of range");
      if (i > 0 && idx[i] <= idx[i - 1]) throw DomainError(std::string(what) + " indices must be strictly increasing");
      if (signs[i] != 1 && signs[i] != -1) throw DomainError(std::string(what) + " signs must be +-1");
    }
  };
  check(row_select, row_signs, "row");
  check(col_select, col_signs, "column");
}

IntMatrix BlockSplit::u() const {
  IntMatrix r(t, t);
  for (int i = 0; i < t; ++i) {
    for (int j = 0; j < t; ++j) r(i, j) = row_signs[i] * col_signs[j] * (*source)(row_select[i], col_select[j]);
  }
  return r;
}

IntMatrix BlockSplit::v() const {
  const auto cols = col_rest();
  IntMatrix r(t, static_cast<int>(cols.size()));
  for (int i = 0; i < t; ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) r(i, int(j)) = row_signs[i] * (*source)(row_select[i], cols[j]);
  }
  return r;
}

IntMatrix BlockSplit::w() const {
  const auto rows = row_rest();
  IntMatrix r(static_cast<int>(rows.size()), t);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int j = 0; j < t; ++j) r(int(i), j) = col_signs[j] * (*source)(rows[i], col_select[j]);
  }
  return r;
}

IntMatrix BlockSplit::d() const { return source->block(row_rest(), col_rest()); }

// ---------------------------------------------------------------------------
// U classes

namespace {

IntMatrix from_rows3(std::initializer_list<std::initializer_list<long>> rows) {
  IntMatrix m(3, 3);
  int i = 0;
  for (const auto& row : rows) {
    int j = 0;
    for (long v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

IntMatrix scaled_identity(int t, long c) {
  IntMatrix r(t, t);
  for (int i = 0; i < t; ++i) r(i, i) = c;
  return r;
}

IntMatrix scaled(const IntMatrix& a, long c) {
  IntMatrix r = a;
  for (int i = 0; i < r.rows(); ++i) {
    for (int j = 0; j < r.cols(); ++j) r(i, j) *= c;
  }
  return r;
}

constexpr int kFamilyOneCount = 12;

}  // namespace

const std::vector<IntMatrix>& listed_t3_matrices() {
  static const std::vector<IntMatrix> listed = {
      from_rows3({{1, 1, 1}, {1, -1, 1}, {1, 1, -1}}),
      from_rows3({{-1, 1, 1}, {1, 1, 1}, {1, 1, -1}}),
      from_rows3({{-1, 1, 1}, {1, -1, 1}, {1, 1, 1}}),
      from_rows3({{-1, -1, 1}, {-1, 1, -1}, {1, -1, -1}}),
      from_rows3({{1, -1, 1}, {-1, -1, -1}, {1, -1, -1}}),
      from_rows3({{-1, -1, 1}, {-1, -1, -1}, {1, -1, 1}}),
      from_rows3({{1, 1, -1}, {1, -1, -1}, {-1, -1, -1}}),
      from_rows3({{-1, 1, -1}, {1, -1, -1}, {-1, -1, 1}}),
      from_rows3({{-1, 1, -1}, {1, 1, -1}, {-1, -1, -1}}),
      from_rows3({{-1, -1, -1}, {-1, -1, 1}, {-1, 1, 1}}),
      from_rows3({{-1, -1, -1}, {-1, 1, 1}, {-1, 1, -1}}),
      from_rows3({{1, -1, -1}, {-1, -1, 1}, {-1, 1, -1}}),
      from_rows3({{1, -1, 1}, {-1, 1, 1}, {1, 1, -1}}),
      from_rows3({{1, 1, 1}, {1, 1, -1}, {1, -1, -1}}),
      from_rows3({{1, 1, -1}, {1, 1, 1}, {-1, 1, -1}}),
      from_rows3({{1, -1, -1}, {-1, 1, -1}, {-1, -1, -1}}),
      from_rows3({{1, -1, 1}, {-1, -1, 1}, {1, 1, 1}}),
      from_rows3({{1, 1, 1}, {1, -1, -1}, {1, -1, 1}}),
      from_rows3({{1, 1, -1}, {1, -1, 1}, {-1, 1, 1}}),
      from_rows3({{1, -1, -1}, {-1, -1, -1}, {-1, -1, 1}}),
  };
  return listed;
}

UClass compute_relation(const IntMatrix& u) {
  const int t = u.rows();
  if (t != u.cols() || t < 1 || t > 3) throw DomainError("U must be t x t with t in {1, 2, 3}");
  for (int i = 0; i < t; ++i) {
    for (int j = 0; j < t; ++j) {
      if (u(i, j) != 1 && u(i, j) != -1) throw DomainError("U entries must be +-1");
    }
  }
  UClass c;
  c.t = t;
  if (t == 1) {
    c.kappa = 1;
    c.gamma = 0;
    c.family = "t1";
    c.preferred = u(0, 0) > 0 ? Variant::Y2 : Variant::Y1;
  } else if (t == 2) {
    c.gamma = u.trace();
    c.kappa = -u.small_determinant();
    if (c.kappa == -2 && c.gamma == 2) {
      c.family = "t2-a";
      c.preferred = Variant::Y2;
    } else if (c.kappa == -2 && c.gamma == -2) {
      c.family = "t2-b";
      c.preferred = Variant::Y1;
    } else {
      c.family = "t2-other";
    }
  } else {
    long minors = 0;
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) minors += u(i, i) * u(j, j) - u(i, j) * u(j, i);
    }
    c.theta = u.trace();
    c.gamma = -minors;
    c.kappa = u.small_determinant();
    c.family = "t3-unlisted";
  }
  return c;
}

bool relation_holds(const IntMatrix& u, const UClass& c) {
  const int t = u.rows();
  if (t != c.t) return false;
  const IntMatrix u2 = u * u;
  if (t <= 2) return u2 == scaled_identity(t, c.kappa) + scaled(u, c.gamma);
  return u2 * u == scaled_identity(t, c.kappa) + scaled(u, c.gamma) + scaled(u2, c.theta);
}

std::optional<UClass> classify_u(const IntMatrix& u) {
  UClass c = compute_relation(u);
  if (c.t == 3) {
    const auto& listed = listed_t3_matrices();
    const auto it = std::find(listed.begin(), listed.end(), u);
    if (it == listed.end()) return std::nullopt;
    if (it - listed.begin() < kFamilyOneCount) {
      c.family = "t3-1";
      c.preferred = Variant::Y1;
    } else {
      c.family = "t3-2";
      c.preferred = Variant::Y2;
    }
  }
  if (!relation_holds(u, c)) throw ArithmeticError("characteristic relation failed for U");
  return c;
}

// ---------------------------------------------------------------------------
// Epsilon

int Epsilon::compare(const QuadNum& c) const {
  const QuadNum one = QuadNum::rational(1, c.m());
  if (above) return scaled_root_compare(k, y, c + one);
  return -scaled_root_compare(k, y, one - c);
}

bool Epsilon::is_zero() const { return compare(QuadNum::rational(0, y.m())) == 0; }

double Epsilon::to_double() const { return scaled_root_to_float(k, y, above ? 1 : -1, Rational(above ? -1 : 1)); }

std::string Epsilon::expression() const {
  const std::string root = "sqrt(" + std::to_string(k) + ")*(" + y.to_string() + ")";
  return above ? root + " - 1" : "1 - " + root;
}

std::string Epsilon::decimal(int digits) const {
  return scaled_root_to_decimal(k, y, above ? 1 : -1, Rational(above ? -1 : 1), digits);
}

int compare_epsilon(const Epsilon& a, const Epsilon& b) {
  if (a.k != b.k) throw StructuralError("epsilon comparison across different orders");
  if (a.above && b.above) return quad_compare(a.y, b.y);
  if (!a.above && !b.above) return quad_compare(b.y, a.y);
  const QuadNum two = QuadNum::rational(2, a.y.m());
  const int c = scaled_root_compare(a.k, a.y + b.y, two);
  return a.above ? c : -c;
}

Epsilon epsilon_of(const QuadMatrix& y) {
  if (y.rows() == 0) throw DomainError("epsilon of an empty matrix");
  const int k = y.rows();
  int max_i = 0, max_j = 0, min_i = 0, min_j = 0;
  QuadNum ymax = y(0, 0).abs();
  QuadNum ymin = ymax;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < y.cols(); ++j) {
      const QuadNum a = y(i, j).abs();
      if (quad_compare(a, ymax) > 0) {
        ymax = a;
        max_i = i;
        max_j = j;
      }
      if (quad_compare(a, ymin) < 0) {
        ymin = a;
        min_i = i;
        min_j = j;
      }
    }
  }
  Epsilon e;
  e.k = std::uint64_t(k);
  // sqrt(k) ymax - 1 >= 1 - sqrt(k) ymin  <=>  sqrt(k) (ymax + ymin) >= 2.
  const bool above = scaled_root_compare(e.k, ymax + ymin, QuadNum::rational(2, y.radicand())) >= 0;
  e.above = above;
  e.y = above ? ymax : ymin;
  e.row = above ? max_i : min_i;
  e.col = above ? max_j : min_j;
  return e;
}

// ---------------------------------------------------------------------------
// Reductions

namespace {

void require_admissible(const BlockSplit& split) {
  split.validate();
  if (split.t * split.t >= split.order()) {
    throw DomainError("t = " + std::to_string(split.t) + " requires t < sqrt(4n), but 4n = " +
                      std::to_string(split.order()));
  }
}

EpsHadamard with_provenance(const BlockSplit& split, QuadMatrix y, std::string method, Variant variant,
                            std::optional<UClass> cls) {
  EpsHadamard e;
  e.k = y.rows();
  e.order4n = split.order();
  e.t = split.t;
  e.epsilon = epsilon_of(y);
  e.y = std::move(y);
  e.method = std::move(method);
  e.variant = variant;
  e.uclass = std::move(cls);
  e.row_select = split.row_select;
  e.col_select = split.col_select;
  e.row_signs = split.row_signs;
  e.col_signs = split.col_signs;
  return e;
}

void require_orthogonal(const QuadMatrix& y) {
  const auto r = check_orthogonal(y);
  if (!r.orthogonal) throw ArithmeticError("reduction is not orthogonal: " + r.detail);
}

QuadMatrix schur_matrix(const BlockSplit& split, Variant variant) {
  const int t = split.t;
  const int n4 = split.order();
  const std::uint64_t m = field_radicand(n4);
  const QuadNum alpha = sqrt_order(n4);
  const QuadNum inv_alpha = alpha.inverse();
  const QuadNum inv_alpha2 = inv_alpha * inv_alpha;
  const int s = form_of(t, variant) == ReductionForm::Minus ? 1 : -1;

  const IntMatrix u = split.u();
  const IntMatrix v = split.v();
  const IntMatrix w = split.w();
  const IntMatrix d = split.d();

  QuadMatrix mat = QuadMatrix::identity(t, m);
  const QuadNum step = inv_alpha * Rational(s);
  for (int i = 0; i < t; ++i) {
    for (int j = 0; j < t; ++j) mat(i, j) += step * Rational(u(i, j));
  }
  const QuadMatrix inv = mat.inverse();

  const int k = d.rows();
  // P = W * inv (k x t), then Y = D/a - s * P V / a^2.
  QuadMatrix p(k, t, m);
  for (int i = 0; i < k; ++i) {
    for (int l = 0; l < t; ++l) {
      QuadNum acc = QuadNum::rational(0, m);
      for (int j = 0; j < t; ++j) acc += inv(j, l) * Rational(w(i, j));
      p(i, l) = acc;
    }
  }
  QuadMatrix y(k, k, m);
  const QuadNum coeff = inv_alpha2 * Rational(-s);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      QuadNum acc = QuadNum::rational(0, m);
      for (int l = 0; l < t; ++l) acc += p(i, l) * Rational(v(l, j));
      y(i, j) = inv_alpha * Rational(d(i, j)) + coeff * acc;
    }
  }
  return y;
}

QuadMatrix closed_matrix(const BlockSplit& split, const UClass& cls, Variant variant) {
  const int n4 = split.order();
  const std::uint64_t m = field_radicand(n4);
  const QuadNum alpha = sqrt_order(n4);
  const QuadNum inv_alpha = alpha.inverse();
  const ReductionForm form = form_of(split.t, variant);
  const int s = form == ReductionForm::Minus ? 1 : -1;

  const IntMatrix u = split.u();
  const InverseFormula f = inverse_formula(u, cls, form, n4);
  const IntMatrix v = split.v();
  const IntMatrix w = split.w();
  const IntMatrix d = split.d();
  const IntMatrix wv = w * v;
  const IntMatrix wx = w * f.x;
  const IntMatrix wxv = wx * v;
  const IntMatrix wx2v = (wx * f.x) * v;

  const QuadNum scale = inv_alpha * inv_alpha * Rational(-s);
  const QuadNum k0 = scale * f.c0;
  const QuadNum k1 = scale * f.c1;
  const QuadNum k2 = scale * f.c2;
  const int k = d.rows();
  QuadMatrix y(k, k, m);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      QuadNum acc = inv_alpha * Rational(d(i, j));
      if (wv(i, j) != 0) acc += k0 * Rational(wv(i, j));
      if (wxv(i, j) != 0) acc += k1 * Rational(wxv(i, j));
      if (wx2v(i, j) != 0 && !f.c2.is_zero()) acc += k2 * Rational(wx2v(i, j));
      y(i, j) = acc;
    }
  }
  return y;
}

// Closed form when the class is known, elimination otherwise; no orthogonality check.
EpsHadamard reduce_unchecked(const BlockSplit& split, Variant variant, const std::optional<UClass>& cls) {
  if (cls) return with_provenance(split, closed_matrix(split, *cls, variant), "closed-form", variant, cls);
  return with_provenance(split, schur_matrix(split, variant), "schur", variant, std::nullopt);
}

}  // namespace

EpsHadamard schur_reduce(const BlockSplit& split, Variant variant) {
  require_admissible(split);
  QuadMatrix y = schur_matrix(split, variant);
  require_orthogonal(y);
  std::optional<UClass> cls;
  try {
    cls = classify_u(split.u());
  } catch (const ArithmeticError&) {
  }
  return with_provenance(split, std::move(y), "schur", variant, cls);
}

InverseFormula inverse_formula(const IntMatrix& u, const UClass& c, ReductionForm form, int order4n) {
  const QuadNum alpha = sqrt_order(order4n);
  const std::uint64_t m = alpha.m();
  const bool minus = form == ReductionForm::Minus;
  InverseFormula f;
  f.x = minus ? u : scaled(u, -1);
  const auto q = [m](long v) { return QuadNum::rational(Rational(v), m); };
  if (c.t <= 2) {
    const long kappa = c.kappa;
    const long gamma = minus ? c.gamma : -c.gamma;
    f.denominator = alpha * alpha + q(gamma) * alpha - q(kappa);
    if (f.denominator.sign() == 0) throw ArithmeticError("vanishing denominator a^2 + gamma a - kappa");
    const QuadNum r = alpha / f.denominator;
    f.c0 = r * (alpha + q(gamma));
    f.c1 = -r;
    f.c2 = q(0);
  } else {
    const long kappa = minus ? c.kappa : -c.kappa;
    const long gamma = c.gamma;
    const long theta = minus ? c.theta : -c.theta;
    const QuadNum a2 = alpha * alpha;
    f.denominator = a2 * alpha + q(theta) * a2 - q(gamma) * alpha + q(kappa);
    if (f.denominator.sign() == 0) throw ArithmeticError("vanishing denominator a^3 + theta a^2 - gamma a + kappa");
    const QuadNum r = alpha / f.denominator;
    f.c0 = r * (alpha * (alpha + q(theta)) - q(gamma));
    f.c1 = -(r * (alpha + q(theta)));
    f.c2 = r;
  }
  return f;
}

QuadMatrix inverse_formula_matrix(const InverseFormula& f, std::uint64_t m) {
  const int t = f.x.rows();
  const IntMatrix x2 = f.x * f.x;
  QuadMatrix r(t, t, m);
  for (int i = 0; i < t; ++i) {
    for (int j = 0; j < t; ++j) {
      QuadNum v = f.c1 * Rational(f.x(i, j)) + f.c2 * Rational(x2(i, j));
      if (i == j) v += f.c0;
      r(i, j) = v;
    }
  }
  return r;
}

EpsHadamard closed_form(const BlockSplit& split, const UClass& uclass, Variant variant) {
  require_admissible(split);
  if (uclass.t != split.t || !relation_holds(split.u(), uclass)) {
    throw DomainError("U does not satisfy the relation of class " + uclass.family);
  }
  QuadMatrix y = closed_matrix(split, uclass, variant);
  require_orthogonal(y);
  return with_provenance(split, std::move(y), "closed-form", variant, uclass);
}

EpsHadamard direct_normalized(const SignMatrix& h) {
  if (!is_hadamard(h).ok) throw DomainError("direct normalization needs a Hadamard matrix");
  const int k = h.order();
  const QuadNum inv = sqrt_order(k).inverse();
  QuadMatrix y(k, k, inv.m());
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) y(i, j) = inv * Rational(h(i, j));
  }
  EpsHadamard e;
  e.k = k;
  e.order4n = k;
  e.t = 0;
  e.epsilon = epsilon_of(y);
  e.y = std::move(y);
  e.method = "direct";
  return e;
}

// ---------------------------------------------------------------------------
// Search

namespace {

std::vector<std::vector<int>> combinations(int n, int t) {
  std::vector<std::vector<int>> out;
  std::vector<int> c(t);
  for (int i = 0; i < t; ++i) c[i] = i;
  while (true) {
    out.push_back(c);
    int i = t - 1;
    while (i >= 0 && c[i] == n - t + i) --i;
    if (i < 0) break;
    ++c[i];
    for (int j = i + 1; j < t; ++j) c[j] = c[j - 1] + 1;
  }
  return out;
}

struct Candidate {
  std::optional<EpsHadamard> best;
  long index = -1;
};

// True when (e, idx) beats the current best: smaller epsilon, then smaller index.
bool improves(const Candidate& cur, const EpsHadamard& e, long idx) {
  if (!cur.best) return true;
  const int c = compare_epsilon(e.epsilon, cur.best->epsilon);
  return c < 0 || (c == 0 && idx < cur.index);
}

}  // namespace

EpsHadamard best_reduction(const SignMatrix& h, int t, const SearchOptions& options) {
  if (t < 1 || t > 3) throw DomainError("t must be 1, 2 or 3, got " + std::to_string(t));
  if (!is_hadamard(h).ok) throw DomainError("best_reduction needs a Hadamard matrix");
  if (t * t >= h.order()) {
    throw DomainError("t = " + std::to_string(t) + " requires t < sqrt(4n), but 4n = " + std::to_string(h.order()));
  }
  const auto source = std::make_shared<const SignMatrix>(normalize(verified(h)));
  const int n = h.order();

  std::vector<std::vector<int>> combos;
  long sign_patterns = 1;
  if (options.scope == Scope::CornerOnly) {
    combos.push_back(BlockSplit::corner(source, t).row_select);
  } else {
    combos = combinations(n, t);
    if (options.scope == Scope::PermutationsAndNegations) sign_patterns = 1L << (2 * t - 1);
  }
  const long nc = static_cast<long>(combos.size());
  const long total = nc * nc * sign_patterns;
  const long limit = std::min(total, std::max(1L, options.cap));

  const auto make_split = [&](long idx) {
    BlockSplit s;
    s.source = source;
    s.t = t;
    const long si = idx % sign_patterns;
    const long ci = (idx / sign_patterns) % nc;
    const long ri = idx / (sign_patterns * nc);
    s.row_select = combos[ri];
    s.col_select = combos[ci];
    s.row_signs.assign(t, 1);
    s.col_signs.assign(t, 1);
    for (int b = 0; b < 2 * t - 1; ++b) {
      if (!(si >> b & 1)) continue;
      if (b < t - 1) {
        s.row_signs[b + 1] = -1;
      } else {
        s.col_signs[b - (t - 1)] = -1;
      }
    }
    return s;
  };

  const auto scan = [&](long begin, long end) {
    Candidate local;
    for (long idx = begin; idx < end; ++idx) {
      const BlockSplit split = make_split(idx);
      const auto cls = classify_u(split.u());
      for (Variant v : {Variant::Y2, Variant::Y1}) {
        EpsHadamard e = reduce_unchecked(split, v, cls);
        if (improves(local, e, idx)) {
          local.best = std::move(e);
          local.index = idx;
        }
      }
    }
    return local;
  };

  const int threads = std::max(1, std::min<int>(options.threads, static_cast<int>(limit)));
  std::vector<Candidate> partial(threads);
  if (threads == 1) {
    partial[0] = scan(0, limit);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (int w = 0; w < threads; ++w) {
      const long begin = limit * w / threads;
      const long end = limit * (w + 1) / threads;
      pool.emplace_back([&, w, begin, end] {
        try {
          partial[w] = scan(begin, end);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  Candidate best;
  for (auto& c : partial) {
    if (c.best && improves(best, *c.best, c.index)) best = std::move(c);
  }

  require_orthogonal(best.best->y);
  EpsHadamard result = std::move(*best.best);
  if (total > limit) {
    throw SearchCapExceeded("search scope " + to_string(options.scope) + " has " + std::to_string(total) +
                                " splits, cap is " + std::to_string(options.cap),
                            std::move(result));
  }
  return result;
}

std::optional<BlockSplit> place_u(std::shared_ptr<const SignMatrix> h, const IntMatrix& u) {
  const int t = u.rows();
  const auto combos = combinations(h->order(), t);
  for (const auto& rows : combos) {
    for (const auto& cols : combos) {
      std::vector<int> cs(t), rs(t);
      for (int j = 0; j < t; ++j) cs[j] = int((*h)(rows[0], cols[j]) * u(0, j));
      for (int i = 0; i < t; ++i) rs[i] = int((*h)(rows[i], cols[0]) * cs[0] * u(i, 0));
      bool ok = true;
      for (int i = 0; i < t && ok; ++i) {
        for (int j = 0; j < t && ok; ++j) ok = rs[i] * (*h)(rows[i], cols[j]) * cs[j] == u(i, j);
      }
      if (!ok) continue;
      BlockSplit s;
      s.source = h;
      s.t = t;
      s.row_select = rows;
      s.col_select = cols;
      s.row_signs = rs;
      s.col_signs = cs;
      return s;
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Diagnostics

std::pair<QuadNum, QuadNum> entry_window(int order4n, int t) {
  const QuadNum alpha = sqrt_order(order4n);
  const std::uint64_t m = alpha.m();
  const QuadNum tq = QuadNum::rational(t, m);
  const QuadNum one = QuadNum::rational(1, m);
  const QuadNum gap = alpha - tq;
  if (gap.sign() <= 0) throw DomainError("entry window needs t < sqrt(4n)");
  const QuadNum r = tq / gap;
  const QuadNum inv_alpha = alpha.inverse();
  return {(one - r) * inv_alpha, (one + r) * inv_alpha};
}

std::optional<WindowViolation> check_entry_window(const QuadMatrix& y, int order4n, int t) {
  const auto [lo, hi] = entry_window(order4n, t);
  for (int i = 0; i < y.rows(); ++i) {
    for (int j = 0; j < y.cols(); ++j) {
      const QuadNum a = y(i, j).abs();
      if (quad_compare(a, lo) < 0 || quad_compare(a, hi) > 0) return WindowViolation{i, j, y(i, j)};
    }
  }
  return std::nullopt;
}

SeriesResidual series_inverse_check(const QuadMatrix& u_hat, int sign, int terms) {
  if (sign != 1 && sign != -1) throw DomainError("series sign must be +-1");
  if (terms < 0) throw DomainError("series term count must be >= 0");
  const int t = u_hat.rows();
  const std::uint64_t m = u_hat.radicand();
  QuadNum mu = QuadNum::rational(0, m);
  for (int i = 0; i < t; ++i) {
    for (int j = 0; j < t; ++j) {
      if (quad_compare(u_hat(i, j).abs(), mu) > 0) mu = u_hat(i, j).abs();
    }
  }
  const QuadNum ratio = mu * Rational(t);
  const QuadNum one = QuadNum::rational(1, m);
  if (quad_compare(ratio, one) >= 0) throw DomainError("Neumann series needs t * max|U^_ij| < 1");

  SeriesResidual r;
  const QuadMatrix step = u_hat.scaled(QuadNum::rational(-sign, m));
  r.exact = (QuadMatrix::identity(t, m) + u_hat.scaled(QuadNum::rational(sign, m))).inverse();
  QuadMatrix power = QuadMatrix::identity(t, m);
  r.partial = power;
  for (int k = 1; k <= terms; ++k) {
    power = power * step;
    r.partial = r.partial + power;
  }
  r.max_residual = QuadNum::rational(0, m);
  for (int i = 0; i < t; ++i) {
    for (int j = 0; j < t; ++j) {
      const QuadNum diff = (r.exact(i, j) - r.partial(i, j)).abs();
      if (quad_compare(diff, r.max_residual) > 0) r.max_residual = diff;
    }
  }
  // sum_{r > terms} t^(r-1) mu^r = t^terms mu^(terms+1) / (1 - t mu).
  QuadNum tail = mu;
  for (int k = 0; k < terms; ++k) tail = tail * ratio;
  r.tail_bound = tail / (one - ratio);
  r.within_bound = quad_compare(r.max_residual, r.tail_bound) <= 0;
  return r;
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json rational_to_json(const Rational& r) {
  return nlohmann::json::array({r.numerator().get_str(), r.denominator().get_str()});
}

Rational rational_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_string() || !j[1].is_string()) {
    throw ParseError("rational must be [\"p\", \"q\"]");
  }
  const Rational r = Rational::parse(j[0].get<std::string>() + "/" + j[1].get<std::string>());
  if (rational_to_json(r) != j) throw ParseError("rational not in lowest terms: " + j.dump());
  return r;
}

nlohmann::json quad_to_json(const QuadNum& x) {
  return nlohmann::json{{"a", rational_to_json(x.a())}, {"b", rational_to_json(x.b())}};
}

QuadNum quad_from_json(const nlohmann::json& j, std::uint64_t m) {
  try {
    return QuadNum(rational_from_json(j.at("a")), rational_from_json(j.at("b")), m);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed field element: ") + e.what());
  } catch (const DomainError& e) {
    throw ParseError(std::string("malformed field element: ") + e.what());
  }
}

namespace {

nlohmann::json uclass_to_json(const UClass& c) {
  nlohmann::json j{{"t", c.t}, {"kappa", c.kappa}, {"gamma", c.gamma}, {"theta", c.theta}, {"family", c.family}};
  j["preferred"] = c.preferred ? nlohmann::json(to_string(*c.preferred)) : nlohmann::json(nullptr);
  return j;
}

UClass uclass_from_json(const nlohmann::json& j) {
  UClass c;
  c.t = j.at("t").get<int>();
  c.kappa = j.at("kappa").get<long>();
  c.gamma = j.at("gamma").get<long>();
  c.theta = j.at("theta").get<long>();
  c.family = j.at("family").get<std::string>();
  if (!j.at("preferred").is_null()) c.preferred = parse_variant(j.at("preferred").get<std::string>());
  return c;
}

}  // namespace

nlohmann::json epsilon_to_json(const Epsilon& e) {
  nlohmann::json exact{{"k", e.k},
                       {"y", quad_to_json(e.y)},
                       {"side", e.above ? "above" : "below"},
                       {"row", e.row},
                       {"col", e.col},
                       {"expr", e.expression()}};
  return nlohmann::json{{"exact", std::move(exact)}, {"float", e.to_double()}};
}

Epsilon epsilon_from_json(const nlohmann::json& j, std::uint64_t m) {
  try {
    const auto& exact = j.at("exact");
    Epsilon e;
    e.k = exact.at("k").get<std::uint64_t>();
    e.y = quad_from_json(exact.at("y"), m);
    const auto side = exact.at("side").get<std::string>();
    if (side != "above" && side != "below") throw ParseError("epsilon side must be above or below");
    e.above = side == "above";
    e.row = exact.at("row").get<int>();
    e.col = exact.at("col").get<int>();
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("malformed epsilon: ") + ex.what());
  }
}

nlohmann::json epsh_to_json(const EpsHadamard& e) {
  nlohmann::json entries = nlohmann::json::array();
  for (int i = 0; i < e.y.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < e.y.cols(); ++j) row.push_back(quad_to_json(e.y(i, j)));
    entries.push_back(std::move(row));
  }
  nlohmann::json prov{{"method", e.method},
                      {"rows", e.row_select},
                      {"cols", e.col_select},
                      {"row_signs", e.row_signs},
                      {"col_signs", e.col_signs},
                      {"source", e.source}};
  prov["variant"] = e.variant ? nlohmann::json(to_string(*e.variant)) : nlohmann::json(nullptr);
  prov["u_class"] = e.uclass ? uclass_to_json(*e.uclass) : nlohmann::json(nullptr);
  return nlohmann::json{{"k", e.k},
                        {"m", e.order4n},
                        {"t", e.t},
                        {"entries", std::move(entries)},
                        {"epsilon", epsilon_to_json(e.epsilon)},
                        {"provenance", std::move(prov)}};
}

EpsHadamard epsh_from_json(const nlohmann::json& j, bool certify) {
  try {
    EpsHadamard e;
    e.k = j.at("k").get<int>();
    e.order4n = j.at("m").get<int>();
    e.t = j.at("t").get<int>();
    if (e.k <= 0 || e.order4n - e.t != e.k) throw ParseError("inconsistent k, m, t");
    const std::uint64_t m = field_radicand(e.order4n);
    const auto& entries = j.at("entries");
    if (!entries.is_array() || static_cast<int>(entries.size()) != e.k) throw ParseError("entries must have k rows");
    e.y = QuadMatrix(e.k, e.k, m);
    for (int i = 0; i < e.k; ++i) {
      if (static_cast<int>(entries[i].size()) != e.k) throw ParseError("entries must have k columns");
      for (int c = 0; c < e.k; ++c) e.y(i, c) = quad_from_json(entries[i][c], m);
    }
    if (certify) {
      const auto orth = check_orthogonal(e.y);
      if (!orth.orthogonal) throw ParseError("matrix is not orthogonal: " + orth.detail);
    }
    e.epsilon = epsilon_of(e.y);
    const Epsilon stored = epsilon_from_json(j.at("epsilon"), m);
    if (certify && (stored.k != e.epsilon.k || compare_epsilon(stored, e.epsilon) != 0)) {
      throw ParseError("stored epsilon " + stored.expression() + " differs from recomputed " +
                       e.epsilon.expression());
    }
    const auto& prov = j.at("provenance");
    e.method = prov.at("method").get<std::string>();
    e.row_select = prov.at("rows").get<std::vector<int>>();
    e.col_select = prov.at("cols").get<std::vector<int>>();
    e.row_signs = prov.at("row_signs").get<std::vector<int>>();
    e.col_signs = prov.at("col_signs").get<std::vector<int>>();
    e.source = prov.at("source").get<std::string>();
    if (!prov.at("variant").is_null()) e.variant = parse_variant(prov.at("variant").get<std::string>());
    if (!prov.at("u_class").is_null()) e.uclass = uclass_from_json(prov.at("u_class"));
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("malformed epsilon-Hadamard JSON: ") + ex.what());
  }
}

}  // namespace armub
