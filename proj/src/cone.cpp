#include "gaps/cone.hpp"

#include <vector>

namespace gaps {

namespace {

SetPtr dual_primitive(const SetPtr& set) {
  if (std::dynamic_pointer_cast<const NonnegativeOrthant>(set)) return set;
  if (std::dynamic_pointer_cast<const SecondOrderCone>(set)) return set;
  if (std::dynamic_pointer_cast<const ZeroCone>(set)) {
    return std::make_shared<FreeSpace>(set->dim());
  }
  if (std::dynamic_pointer_cast<const FreeSpace>(set)) {
    return std::make_shared<ZeroCone>(set->dim());
  }
  throw ConfigError("dual cone: unsupported component '" + set->name() + "'");
}

}  // namespace

SetPtr dual_cone(const SetPtr& cone) {
  if (!cone) throw ConfigError("dual cone: null set");
  if (auto product = std::dynamic_pointer_cast<const ProductSet>(cone)) {
    std::vector<SetPtr> duals;
    duals.reserve(product->components().size());
    for (const auto& c : product->components()) duals.push_back(dual_cone(c));
    return std::make_shared<ProductSet>(std::move(duals));
  }
  return dual_primitive(cone);
}

EmbeddedFeasibility embed(const ConeProgram& p) {
  const Index m = p.rows();
  const Index n = p.cols();
  if (p.b.size() != m || p.c.size() != n) {
    throw DimensionError("embed: b/c sizes do not match the matrix");
  }
  if (!p.cone || p.cone->dim() != m) {
    throw DimensionError("embed: cone dimension must equal the row count");
  }

  // Stacked variable z = (x, s, y), n + 2m entries; m + n + 1 equations.
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(3 * static_cast<std::size_t>(p.a.nonZeros()) + static_cast<std::size_t>(m + n));
  for (Index k = 0; k < p.a.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(p.a, k); it; ++it) {
      trips.emplace_back(it.row(), it.col(), it.value());               // A x
      trips.emplace_back(m + it.col(), n + m + it.row(), -it.value());  // -A' y
    }
  }
  for (Index i = 0; i < m; ++i) trips.emplace_back(i, n + i, 1.0);  // + s
  for (Index j = 0; j < n; ++j) {
    if (p.c[j] != 0.0) trips.emplace_back(m + n, j, p.c[j]);  // c' x
  }
  for (Index i = 0; i < m; ++i) {
    if (p.b[i] != 0.0) trips.emplace_back(m + n, n + m + i, p.b[i]);  // + b' y
  }
  SparseMatrix block(m + n + 1, n + 2 * m);
  block.setFromTriplets(trips.begin(), trips.end());

  Vector rhs(m + n + 1);
  rhs.head(m) = p.b;
  rhs.segment(m, n) = p.c;
  rhs[m + n] = 0.0;

  EmbeddedFeasibility e;
  e.program = p;
  e.affine = std::make_shared<AffineSubspace>(std::move(block), std::move(rhs));
  e.coneset = std::make_shared<ProductSet>(
      std::vector<SetPtr>{std::make_shared<FreeSpace>(n), p.cone, dual_cone(p.cone)});
  return e;
}

PrimalDualSolution recover(const EmbeddedFeasibility& e, const Vector& z) {
  const Index n = e.n();
  const Index m = e.m();
  if (z.size() != n + 2 * m) throw DimensionError("recover: stacked vector has wrong size");
  PrimalDualSolution sol;
  sol.x = z.head(n);
  sol.s = z.segment(n, m);
  sol.y = z.tail(m);
  sol.objective = e.program.c.dot(sol.x);
  sol.objective_gap = sol.objective + e.program.b.dot(sol.y);
  sol.primal_residual = (e.program.a * sol.x + sol.s - e.program.b).norm();
  sol.dual_residual = (e.program.a.transpose() * sol.y + e.program.c).norm();
  return sol;
}

}  // namespace gaps
