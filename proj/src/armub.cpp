#include "armub/armub.hpp"

#include <map>
#include <sstream>

namespace armub {

SparseBasis::SparseBasis(std::shared_ptr<const Rbd> rbd, std::shared_ptr<const EpsHadamard> y, int class_index)
    : rbd_(std::move(rbd)), y_(std::move(y)), class_(class_index) {}

int SparseBasis::block_of_vector(int v) const { return v / rbd_->k; }
int SparseBasis::row_of_vector(int v) const { return v % rbd_->k; }

SparseVector SparseBasis::vector_at(int index) const {
  if (index < 0 || index >= rbd_->d) {
    throw DomainError("vector index " + std::to_string(index) + " outside [0, " + std::to_string(rbd_->d) + ")");
  }
  const Block& b = block(block_of_vector(index));
  const int row = row_of_vector(index);
  SparseVector out;
  out.entries.reserve(b.size());
  for (std::size_t j = 0; j < b.size(); ++j) out.entries.emplace_back(b[j], y_->y(row, int(j)));
  return out;
}

BasisSet assemble(std::shared_ptr<const Rbd> rbd, std::shared_ptr<const EpsHadamard> y) {
  if (!rbd || !y) throw DomainError("assemble needs a design and a matrix");
  if (y->k != rbd->k) {
    throw DomainError("matrix order " + std::to_string(y->k) + " differs from block size " + std::to_string(rbd->k));
  }
  const auto orth = check_orthogonal(y->y);
  if (!orth.orthogonal) throw DomainError("matrix is not orthogonal: " + orth.detail);
  const auto cert = verify_rbd(*rbd, true);
  if (!cert.valid) throw DomainError("design fails verification: " + cert.violations.front());

  BasisSet bs;
  bs.rbd = rbd;
  bs.y = y;
  bs.bases.reserve(rbd->classes.size());
  for (std::size_t c = 0; c < rbd->classes.size(); ++c) bs.bases.emplace_back(rbd, y, static_cast<int>(c));
  return bs;
}

QuadNum sparse_dot(const SparseVector& a, const SparseVector& b, std::uint64_t m) {
  QuadNum acc = QuadNum::rational(0, m);
  std::size_t i = 0, j = 0;
  while (i < a.entries.size() && j < b.entries.size()) {
    if (a.entries[i].first < b.entries[j].first) {
      ++i;
    } else if (a.entries[i].first > b.entries[j].first) {
      ++j;
    } else {
      acc += a.entries[i].second * b.entries[j].second;
      ++i;
      ++j;
    }
  }
  return acc;
}

QuadMatrix dense_basis(const SparseBasis& b, std::uint64_t m) {
  const int d = b.dimension();
  QuadMatrix out(d, d, m);
  for (int v = 0; v < d; ++v) {
    for (const auto& [x, value] : b.vector_at(v).entries) out(x, v) = value;
  }
  return out;
}

nlohmann::json basis_set_to_json(const BasisSet& bs, int triplet_limit) {
  nlohmann::json j{{"d", bs.d()}, {"k", bs.k()}, {"bases", bs.count()}, {"m", bs.y->order4n}};
  j["layout"] = "vector v of basis c: block v / k of class c, row v % k of Y";
  if (bs.d() > triplet_limit) return j;

  // Distinct Y values, in first-seen order.
  std::vector<QuadNum> values;
  std::map<std::pair<std::string, std::string>, int> index;
  const auto value_id = [&](const QuadNum& q) {
    const auto key = std::make_pair(q.a().to_string(), q.b().to_string());
    const auto [it, inserted] = index.emplace(key, static_cast<int>(values.size()));
    if (inserted) values.push_back(q);
    return it->second;
  };
  nlohmann::json bases = nlohmann::json::array();
  for (const auto& b : bs.bases) {
    nlohmann::json triplets = nlohmann::json::array();
    for (int v = 0; v < bs.d(); ++v) {
      for (const auto& [x, q] : b.vector_at(v).entries) triplets.push_back({x, v, value_id(q)});
    }
    bases.push_back({{"class", b.class_index()}, {"triplets", std::move(triplets)}});
  }
  nlohmann::json vals = nlohmann::json::array();
  for (const auto& q : values) vals.push_back(quad_to_json(q));
  j["values"] = std::move(vals);
  j["triplets"] = std::move(bases);
  return j;
}

std::string basis_set_to_csv(const BasisSet& bs) {
  if (bs.d() > 256) throw ResourceError("dense CSV export is limited to d <= 256");
  const std::uint64_t m = bs.y->y.radicand();
  std::ostringstream os;
  os << "basis,row";
  for (int c = 0; c < bs.d(); ++c) os << ",v" << c;
  os << "\n";
  for (const auto& b : bs.bases) {
    const QuadMatrix dense = dense_basis(b, m);
    for (int r = 0; r < bs.d(); ++r) {
      os << b.class_index() << "," << r;
      for (int c = 0; c < bs.d(); ++c) os << "," << quad_to_decimal(dense(r, c), 15);
      os << "\n";
    }
  }
  return os.str();
}

}  // namespace armub
