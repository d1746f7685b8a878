#include "gaps/sets.hpp"

#include <cmath>
#include <utility>

namespace gaps {

void ConvexSet::require_dim(const Vector& x) const {
  if (x.size() != dim()) {
    throw DimensionError(name() + ": vector of size " + std::to_string(x.size()) +
                         " does not match set dimension " + std::to_string(dim()));
  }
}

double ConvexSet::distance(const Vector& x) const { return (project(x) - x).norm(); }

NonnegativeOrthant::NonnegativeOrthant(Index n) : n_(n) {
  if (n < 1) throw ConfigError("nonneg: dimension must be positive");
}

Vector NonnegativeOrthant::project(const Vector& x) const {
  require_dim(x);
  return x.cwiseMax(0.0);
}

double NonnegativeOrthant::distance(const Vector& x) const {
  require_dim(x);
  return x.cwiseMin(0.0).norm();
}

Box::Box(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size()) throw DimensionError("box: bound sizes differ");
  if (lower_.size() < 1) throw ConfigError("box: dimension must be positive");
  for (Index i = 0; i < lower_.size(); ++i) {
    if (std::isnan(lower_[i]) || std::isnan(upper_[i]) || lower_[i] > upper_[i]) {
      throw ConfigError("box: bounds must satisfy lower <= upper");
    }
  }
}

Vector Box::project(const Vector& x) const {
  require_dim(x);
  return x.cwiseMax(lower_).cwiseMin(upper_);
}

SecondOrderCone::SecondOrderCone(Index n) : n_(n) {
  if (n < 1) throw ConfigError("soc: dimension must be positive");
}

Vector SecondOrderCone::project(const Vector& x) const {
  require_dim(x);
  const double t = x[0];
  const double u = x.tail(n_ - 1).norm();
  if (u <= t) return x;                       // inside the cone
  if (u <= -t) return Vector::Zero(n_);       // inside the polar cone
  Vector z(n_);
  const double scale = 0.5 * (1.0 + t / u);   // u > |t| >= 0 here
  z[0] = scale * u;
  z.tail(n_ - 1) = scale * x.tail(n_ - 1);
  return z;
}

ZeroCone::ZeroCone(Index n) : n_(n) {
  if (n < 1) throw ConfigError("zero: dimension must be positive");
}

Vector ZeroCone::project(const Vector& x) const {
  require_dim(x);
  return Vector::Zero(n_);
}

FreeSpace::FreeSpace(Index n) : n_(n) {
  if (n < 1) throw ConfigError("free: dimension must be positive");
}

Vector FreeSpace::project(const Vector& x) const {
  require_dim(x);
  return x;
}

AffineSubspace::AffineSubspace(Matrix a, Vector b)
    : m_(a.rows()), n_(a.cols()), sparse_(false), dense_a_(std::move(a)), b_(std::move(b)) {
  if (b_.size() != m_) throw DimensionError("affine: rhs size does not match row count");
  if (m_ < 1 || n_ < 1) throw ConfigError("affine: matrix must be nonempty");
  factorize_dense();
}

AffineSubspace::AffineSubspace(SparseMatrix a, Vector b)
    : m_(a.rows()), n_(a.cols()), sparse_(true), sparse_a_(std::move(a)), b_(std::move(b)) {
  if (b_.size() != m_) throw DimensionError("affine: rhs size does not match row count");
  if (m_ < 1 || n_ < 1) throw ConfigError("affine: matrix must be nonempty");
  sparse_a_.makeCompressed();
  factorize_sparse();
}

void AffineSubspace::factorize_dense() {
  gram_llt_.compute(dense_a_ * dense_a_.transpose());
  if (gram_llt_.info() == Eigen::Success) {
    factorization_ = Factorization::NormalEquations;
    if (consistent()) return;
  }
  // Cholesky of AA' broke down: the rows are redundant or the equations
  // inconsistent. A rank-revealing decomposition settles which, and prices
  // the projection exactly through least-norm multipliers.
  cod_ = std::make_unique<Eigen::CompleteOrthogonalDecomposition<Matrix>>();
  cod_->setThreshold(1e-12);
  cod_->compute(dense_a_);
  factorization_ = Factorization::DenseLeastNorm;
  if (!consistent()) {
    throw FactorizationError("affine: equations are inconsistent (the set is empty)");
  }
}

void AffineSubspace::factorize_sparse() {
  SparseMatrix kkt(n_ + m_, n_ + m_);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(n_) + 2 * static_cast<std::size_t>(sparse_a_.nonZeros()));
  for (Index i = 0; i < n_; ++i) trips.emplace_back(i, i, 1.0);
  for (Index k = 0; k < sparse_a_.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(sparse_a_, k); it; ++it) {
      trips.emplace_back(n_ + it.row(), it.col(), it.value());
      trips.emplace_back(it.col(), n_ + it.row(), it.value());
    }
  }
  kkt.setFromTriplets(trips.begin(), trips.end());
  kkt_sparse_ = std::make_unique<Eigen::SparseLU<SparseMatrix>>();
  kkt_sparse_->compute(kkt);
  if (kkt_sparse_->info() == Eigen::Success) {
    factorization_ = Factorization::SparseKkt;
    if (consistent()) return;
  }
  factorize_sparse_least_norm();
  factorization_ = Factorization::SparseLeastNorm;
  if (!consistent()) {
    throw FactorizationError("affine: equations are inconsistent (the set is empty)");
  }
}

// QR of A' spans the row space with the leading rank columns of Q, so the
// projection is x - Q_r Q_r'(x - z0) with z0 a particular solution.
void AffineSubspace::factorize_sparse_least_norm() {
  SparseMatrix at = sparse_a_.transpose();
  at.makeCompressed();
  row_space_qr_ = std::make_unique<SparseQr>();
  row_space_qr_->compute(at);
  if (row_space_qr_->info() != Eigen::Success) {
    throw FactorizationError("affine: sparse QR factorization failed");
  }
  row_space_rank_ = row_space_qr_->rank();
  if (row_space_rank_ < 1) {
    throw FactorizationError("affine: constraint matrix is numerically zero");
  }
  // particular solution from R' w = P' b on the leading rank rows
  const Vector pb = row_space_qr_->colsPermutation().transpose() * b_;
  const SparseMatrix r_top =
      SparseMatrix(row_space_qr_->matrixR().topLeftCorner(row_space_rank_, row_space_rank_));
  const SparseMatrix r_top_t = SparseMatrix(r_top.transpose());
  Vector w = Vector::Zero(n_);
  w.head(row_space_rank_) =
      r_top_t.triangularView<Eigen::Lower>().solve(pb.head(row_space_rank_).eval());
  particular_ = row_space_qr_->matrixQ() * w;
}

// Sanity check on the factorization: the projection of the origin must land
// on the set. Catches rank deficiency that slipped past the factorization.
bool AffineSubspace::consistent() const {
  const Vector z0 = project_impl(Vector::Zero(n_));
  if (!z0.allFinite()) return false;
  const double scale = sparse_ ? sparse_a_.norm() : dense_a_.norm();
  return equation_residual_norm(z0) <= 1e-8 * (1.0 + b_.norm() + scale * z0.norm());
}

Vector AffineSubspace::project_impl(const Vector& x) const {
  switch (factorization_) {
    case Factorization::NormalEquations:
      return x - dense_a_.transpose() * gram_llt_.solve(dense_a_ * x - b_);
    case Factorization::DenseLeastNorm:
      return x - cod_->solve(dense_a_ * x - b_);
    case Factorization::SparseKkt: {
      Vector rhs(n_ + m_);
      rhs.head(n_) = x;
      rhs.tail(m_) = b_;
      return kkt_sparse_->solve(rhs).head(n_);
    }
    case Factorization::SparseLeastNorm: {
      Vector u = row_space_qr_->matrixQ().transpose() * Vector(x - particular_);
      u.tail(n_ - row_space_rank_).setZero();
      return x - row_space_qr_->matrixQ() * u;
    }
  }
  return x;  // unreachable
}

Vector AffineSubspace::project(const Vector& x) const {
  require_dim(x);
  projections_.fetch_add(1, std::memory_order_relaxed);
  return project_impl(x);
}

Vector AffineSubspace::equation_residual(const Vector& x) const {
  require_dim(x);
  if (sparse_) return sparse_a_ * x - b_;
  return dense_a_ * x - b_;
}

double AffineSubspace::equation_residual_norm(const Vector& x) const {
  return equation_residual(x).norm();
}

ProductSet::ProductSet(std::vector<SetPtr> components) : components_(std::move(components)) {
  if (components_.empty()) throw ConfigError("product: at least one component required");
  offsets_.reserve(components_.size());
  for (const auto& c : components_) {
    if (!c) throw ConfigError("product: null component");
    offsets_.push_back(dim_);
    dim_ += c->dim();
  }
}

Vector ProductSet::project(const Vector& x) const {
  require_dim(x);
  Vector out(dim_);
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const Index off = offsets_[i];
    const Index len = components_[i]->dim();
    out.segment(off, len) = components_[i]->project(x.segment(off, len));
  }
  return out;
}

bool ProductSet::is_affine() const {
  for (const auto& c : components_) {
    if (!c->is_affine()) return false;
  }
  return true;
}

std::string ProductSet::name() const {
  std::string out = "product(";
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (i > 0) out += "x";
    out += components_[i]->name();
  }
  return out + ")";
}

RelaxedProjector::RelaxedProjector(SetPtr set, double relaxation)
    : set_(std::move(set)), relaxation_(relaxation) {
  if (!set_) throw ConfigError("relaxed projector: null set");
  if (!(relaxation_ > 0.0) || !(relaxation_ <= 2.0)) {
    throw ConfigError("relaxed projector: relaxation must lie in (0, 2]");
  }
}

Vector RelaxedProjector::apply(const Vector& x) const {
  return x + relaxation_ * (set_->project(x) - x);
}

}  // namespace gaps
