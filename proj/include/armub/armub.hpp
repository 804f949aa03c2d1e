#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "armub/epsh.hpp"
#include "armub/rbd.hpp"

namespace armub {

struct SparseVector {
  std::vector<std::pair<int, QuadNum>> entries;  // increasing coordinates
};

/// Basis of R^d generated by one parallel class and the shared matrix Y.
/// Vector v lives on block v / k of the class and carries row v % k of Y;
/// values are produced on demand from the shared design and Y.
class SparseBasis {
 public:
  SparseBasis(std::shared_ptr<const Rbd> rbd, std::shared_ptr<const EpsHadamard> y, int class_index);

  int dimension() const { return rbd_->d; }
  int class_index() const { return class_; }
  int block_of_vector(int v) const;
  int row_of_vector(int v) const;
  const Block& block(int b) const { return rbd_->classes[class_][b]; }

  /// Throws DomainError when index is outside [0, d).
  SparseVector vector_at(int index) const;

 private:
  std::shared_ptr<const Rbd> rbd_;
  std::shared_ptr<const EpsHadamard> y_;
  int class_;
};

struct BasisSet {
  std::shared_ptr<const Rbd> rbd;
  std::shared_ptr<const EpsHadamard> y;
  std::vector<SparseBasis> bases;

  int d() const { return rbd->d; }
  int k() const { return rbd->k; }
  int count() const { return static_cast<int>(bases.size()); }
};

/// One basis per parallel class. Requires y.k == rbd.k and y orthogonal;
/// each basis is certified orthonormal (blocks partition the points and
/// every block carries the orthogonal Y). Throws DomainError on mismatch.
BasisSet assemble(std::shared_ptr<const Rbd> rbd, std::shared_ptr<const EpsHadamard> y);

/// Exact inner product of two sparse vectors.
QuadNum sparse_dot(const SparseVector& a, const SparseVector& b, std::uint64_t m);

/// Dense d x d matrix with the basis vectors as columns (small d only).
QuadMatrix dense_basis(const SparseBasis& b, std::uint64_t m);

/// Sparse triplet export: [coordinate, vector, value index] into "values".
/// Triplets are included only for d <= triplet_limit.
nlohmann::json basis_set_to_json(const BasisSet& bs, int triplet_limit = 1024);
/// CSV of the dense bases (d <= 256), one block of d rows per basis, floats.
std::string basis_set_to_csv(const BasisSet& bs);

}  // namespace armub
