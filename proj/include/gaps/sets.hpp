#pragma once

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SparseLU>
#include <Eigen/SparseQR>

#include <atomic>
#include <memory>
#include <string>
#include <vector>

#include "gaps/types.hpp"

namespace gaps {

/// A nonempty closed convex set with an exact Euclidean projection.
///
/// Sets are immutable after construction (cached factorizations included)
/// and safe to share across threads; all operations are pure.
class ConvexSet {
 public:
  virtual ~ConvexSet() = default;

  virtual Index dim() const = 0;

  /// Nearest point of the set: argmin_{y in set} ||y - x||_2.
  virtual Vector project(const Vector& x) const = 0;

  /// Euclidean distance ||project(x) - x||_2. Computed from the projection
  /// unless a subclass has a cheaper exact expression.
  virtual double distance(const Vector& x) const;

  /// True when the projection is an affine map of x.
  virtual bool is_affine() const { return false; }

  virtual std::string name() const = 0;

 protected:
  void require_dim(const Vector& x) const;
};

using SetPtr = std::shared_ptr<const ConvexSet>;

class NonnegativeOrthant final : public ConvexSet {
 public:
  explicit NonnegativeOrthant(Index n);
  Index dim() const override { return n_; }
  Vector project(const Vector& x) const override;
  double distance(const Vector& x) const override;  // ||min(x, 0)||_2
  std::string name() const override { return "nonneg"; }

 private:
  Index n_;
};

/// Axis-aligned box {x : lower <= x <= upper}; bounds may be infinite.
class Box final : public ConvexSet {
 public:
  Box(Vector lower, Vector upper);
  Index dim() const override { return lower_.size(); }
  Vector project(const Vector& x) const override;
  std::string name() const override { return "box"; }

  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }

 private:
  Vector lower_, upper_;
};

/// {(t, u) in R x R^{n-1} : ||u||_2 <= t}; the leading coordinate is t.
class SecondOrderCone final : public ConvexSet {
 public:
  explicit SecondOrderCone(Index n);
  Index dim() const override { return n_; }
  Vector project(const Vector& x) const override;
  std::string name() const override { return "soc"; }

 private:
  Index n_;
};

class ZeroCone final : public ConvexSet {
 public:
  explicit ZeroCone(Index n);
  Index dim() const override { return n_; }
  Vector project(const Vector& x) const override;
  bool is_affine() const override { return true; }
  std::string name() const override { return "zero"; }

 private:
  Index n_;
};

class FreeSpace final : public ConvexSet {
 public:
  explicit FreeSpace(Index n);
  Index dim() const override { return n_; }
  Vector project(const Vector& x) const override;
  double distance(const Vector&) const override { return 0.0; }
  bool is_affine() const override { return true; }
  std::string name() const override { return "free"; }

 private:
  Index n_;
};

/// {x : A x = b} with the factorization computed once and reused.
///
/// Dense matrices project through the normal equations
/// z = x - A'(AA')^{-1}(Ax - b); sparse ones solve the indefinite system
/// [I A'; A 0][z; l] = [x; b]. When those factorizations break down on
/// redundant rows, a rank-revealing decomposition (complete-orthogonal for
/// dense, QR of A' for sparse) computes the same projection exactly, with
/// least-norm multipliers. Inconsistent equations (an empty set) are
/// rejected rather than regularized.
class AffineSubspace final : public ConvexSet {
 public:
  AffineSubspace(Matrix a, Vector b);
  AffineSubspace(SparseMatrix a, Vector b);

  AffineSubspace(const AffineSubspace&) = delete;
  AffineSubspace& operator=(const AffineSubspace&) = delete;

  Index dim() const override { return n_; }
  Vector project(const Vector& x) const override;
  bool is_affine() const override { return true; }
  std::string name() const override { return "affine"; }

  Index rows() const { return m_; }
  bool is_sparse() const { return sparse_; }
  const Matrix& dense_matrix() const { return dense_a_; }
  const SparseMatrix& sparse_matrix() const { return sparse_a_; }
  const Vector& rhs() const { return b_; }

  /// A x - b, without projecting.
  Vector equation_residual(const Vector& x) const;
  double equation_residual_norm(const Vector& x) const;

  /// Number of projections performed since construction.
  long projection_count() const { return projections_.load(); }

 private:
  enum class Factorization { NormalEquations, DenseLeastNorm, SparseKkt, SparseLeastNorm };

  using SparseQr = Eigen::SparseQR<SparseMatrix, Eigen::COLAMDOrdering<int>>;

  void factorize_dense();
  void factorize_sparse();
  void factorize_sparse_least_norm();
  bool consistent() const;
  Vector project_impl(const Vector& x) const;

  Index m_ = 0, n_ = 0;
  bool sparse_ = false;
  Matrix dense_a_;
  SparseMatrix sparse_a_;
  Vector b_;

  Factorization factorization_ = Factorization::NormalEquations;
  Eigen::LLT<Matrix> gram_llt_;
  std::unique_ptr<Eigen::CompleteOrthogonalDecomposition<Matrix>> cod_;
  std::unique_ptr<Eigen::SparseLU<SparseMatrix>> kkt_sparse_;
  std::unique_ptr<SparseQr> row_space_qr_;  // QR of A', for redundant rows
  Index row_space_rank_ = 0;
  Vector particular_;  // least-norm solution of A z = b

  mutable std::atomic<long> projections_{0};
};

/// Cartesian product of sets; projects componentwise.
class ProductSet final : public ConvexSet {
 public:
  explicit ProductSet(std::vector<SetPtr> components);
  Index dim() const override { return dim_; }
  Vector project(const Vector& x) const override;
  bool is_affine() const override;
  std::string name() const override;

  const std::vector<SetPtr>& components() const { return components_; }
  const std::vector<Index>& offsets() const { return offsets_; }

 private:
  std::vector<SetPtr> components_;
  std::vector<Index> offsets_;
  Index dim_ = 0;
};

/// Relaxed projection x + relaxation * (project(x) - x) with
/// relaxation in (0, 2]: 1 is the plain projection, 2 the reflection.
class RelaxedProjector {
 public:
  RelaxedProjector(SetPtr set, double relaxation);

  Vector apply(const Vector& x) const;

  const SetPtr& set() const { return set_; }
  double relaxation() const { return relaxation_; }

 private:
  SetPtr set_;
  double relaxation_;
};

}  // namespace gaps
