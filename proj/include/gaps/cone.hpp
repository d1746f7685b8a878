#pragma once

#include <memory>

#include "gaps/sets.hpp"
#include "gaps/types.hpp"

namespace gaps {

/// minimize c'x  subject to  A x + s = b,  s in K,
/// with K a product of {zero, nonneg, soc} cones of total dimension m.
struct ConeProgram {
  SparseMatrix a;  ///< m x n
  Vector b;        ///< m
  Vector c;        ///< n
  SetPtr cone;     ///< K

  Index rows() const { return a.rows(); }
  Index cols() const { return a.cols(); }
};

/// Componentwise dual cone: nonneg and soc are self-dual, zero and free are
/// dual to each other. Throws ConfigError for non-cone components (box,
/// affine, ...).
SetPtr dual_cone(const SetPtr& cone);

/// Two-set feasibility form of the primal-dual optimality system over the
/// stacked variable z = (x, s, y):
///
///   [ A   I   0 ] [x]   [b]
///   [ 0   0  -A'] [s] = [c]        and   (x, s, y) in R^n x K x K*.
///   [ c'  0   b'] [y]   [0]
///
/// The last row encodes the zero duality gap c'x + b'y = 0.
struct EmbeddedFeasibility {
  ConeProgram program;
  std::shared_ptr<const AffineSubspace> affine;  ///< (m+n+1) x (n+2m), stored sparse
  SetPtr coneset;                                ///< FreeSpace(n) x K x K*

  Index n() const { return program.cols(); }
  Index m() const { return program.rows(); }
};

EmbeddedFeasibility embed(const ConeProgram& p);

struct PrimalDualSolution {
  Vector x, s, y;
  double objective = 0.0;        ///< c'x
  double objective_gap = 0.0;    ///< c'x + b'y
  double primal_residual = 0.0;  ///< ||A x + s - b||
  double dual_residual = 0.0;    ///< ||A' y + c||
};

/// Slices z = (x, s, y) back into program variables and computes the
/// optimality diagnostics.
PrimalDualSolution recover(const EmbeddedFeasibility& e, const Vector& z);

}  // namespace gaps
