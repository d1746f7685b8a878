#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gaps/sets.hpp"
#include "gaps/types.hpp"

namespace gaps {

/// Parameter regimes under which the relaxed-projection iteration is an
/// averaged fixed-point iteration.
enum class Regime {
  /// Every relaxation strictly inside (0, 2); the composition is
  /// beta-averaged and the outer step may exceed 1 (up to 1/beta).
  AveragedComposition,
  /// Outer step in (0, 1); at most one relaxation equals 2, so the
  /// composition is merely nonexpansive.
  NonexpansiveComposition,
  /// Two sets, both relaxations equal to 2 (a reflection pair), outer step
  /// in (0, 1). Douglas-Rachford iteration for feasibility problems.
  DouglasRachford,
};

std::string to_string(Regime regime);

/// Relaxation parameters of the iteration
///   x_{k+1} = x_k + alpha * (S x_k - x_k),
/// where S composes one relaxed projection per set. alphas[0] belongs to the
/// set applied first.
struct GapConfig {
  double alpha = 1.0;
  std::vector<double> alphas;
};

/// Averagedness parameter of the composed relaxed projections:
///   beta = (sum_i a_i/(2-a_i)) / (1 + sum_i a_i/(2-a_i)) in (0, 1).
/// Requires every relaxation strictly inside (0, 2).
double beta(std::span<const double> alphas);

/// Returns the regime satisfied by cfg, preferring AveragedComposition
/// (it yields the smallest averagedness constant). Throws ConfigError with
/// a diagnosis of every violated bound when no regime holds.
Regime validate(const GapConfig& cfg);

/// Averagedness constant of the full iteration map: alpha * beta under
/// AveragedComposition, alpha otherwise. Always in (0, 1).
double averagedness_constant(const GapConfig& cfg);

/// One application of the iteration map.
struct TStep {
  Vector next;      ///< x + alpha * residual
  Vector residual;  ///< S x - x
};

/// The composed relaxed-projection operator S together with the outer
/// relaxation, i.e. the map T = (1 - alpha) Id + alpha S.
class GapOperator {
 public:
  /// sets[0] is applied first; cfg.alphas[i] pairs with sets[i].
  GapOperator(std::vector<SetPtr> sets, GapConfig cfg);

  Index dim() const { return dim_; }
  int num_sets() const { return static_cast<int>(stages_.size()); }
  const GapConfig& config() const { return config_; }
  Regime regime() const { return regime_; }
  const std::vector<RelaxedProjector>& stages() const { return stages_; }

  /// S x: the relaxed projections applied in order.
  Vector apply_composition(const Vector& x) const;

  /// Same but records each stage's output (stage_outputs[i] holds the value
  /// after i+1 relaxed projections).
  Vector apply_composition(const Vector& x, std::vector<Vector>& stage_outputs) const;

  /// T x and the residual S x - x.
  TStep apply(const Vector& x) const;

  /// Points tested against the termination criterion: the exact projection
  /// of x onto the first set, and the cascade of exact projections through
  /// all sets. Labels: "first_set", "projection_chain". In the
  /// Douglas-Rachford regime the first-set projection is the sequence that
  /// approaches the intersection, while the iterates themselves need not.
  std::vector<std::pair<std::string, Vector>> monitored_candidates(const Vector& x) const;

 private:
  std::vector<RelaxedProjector> stages_;
  GapConfig config_;
  Regime regime_;
  Index dim_ = 0;
};

}  // namespace gaps
