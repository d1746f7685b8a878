#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gaps/gap.hpp"
#include "gaps/linesearch.hpp"
#include "gaps/types.hpp"

namespace gaps {

enum class StepperKind {
  Nominal,              ///< fixed step alpha every iteration
  BasicLineSearch,      ///< residual-direction search on triggered iterations
  ProjectedLineSearch,  ///< search along the projection of the ray onto the first set
};

std::string to_string(StepperKind kind);

/// Termination test evaluated on monitored candidate points: converged when
/// merit(z) <= tol. The merit of a feasibility criterion is the largest
/// constraint violation.
struct Criterion {
  std::function<double(const Vector&)> merit;
  double tol = 1e-10;

  bool satisfied(const Vector& z) const { return merit(z) <= tol; }
};

/// Feasibility merit over the given sets: affine sets contribute their
/// equation residual ||A z - b||, every other set its Euclidean distance.
/// A candidate projected onto one of the sets satisfies that set's term
/// exactly, so the tolerance is carried entirely by the remaining terms.
Criterion feasibility_criterion(std::vector<SetPtr> sets, double tol);

struct SolveOptions {
  StepperKind stepper = StepperKind::Nominal;
  long max_iter = 10'000'000;
  LineSearchConfig line_search;
  bool record_history = true;
  /// Stop when ||r|| <= residual_zero_tol * (1 + ||x||) regardless of the
  /// monitored criterion (the trigger cosine would divide by zero).
  double residual_zero_tol = 1e-15;
};

struct SolveStats {
  long ls_triggered = 0;
  long ls_accepted = 0;
  long candidates_evaluated = 0;
  /// Iteration indices whose step came from an accepted search.
  std::vector<long> accepted_iterations;
};

struct SolveResult {
  Vector solution;
  long iterations = 0;
  bool converged = false;
  /// Which monitored sequence produced the solution:
  /// "projection_chain", "first_set", or "iterate" (residual-zero exit).
  std::string monitor;
  double final_residual_norm = 0.0;
  /// Criterion merit of the returned solution.
  double solution_merit = 0.0;
  std::vector<double> residual_norm_history;
  SolveStats stats;
};

/// Runs the averaged iteration from x0 until a monitored candidate satisfies
/// the criterion or max_iter steps were taken. Candidates are checked in the
/// order projection chain, then first-set projection; the first hit
/// terminates. The projected stepper requires exactly two sets with the
/// first one affine and is rejected at setup otherwise.
SolveResult solve(const GapOperator& op, const Vector& x0, const Criterion& criterion,
                  const SolveOptions& opts = {});

}  // namespace gaps
