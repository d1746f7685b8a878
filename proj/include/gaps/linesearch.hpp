#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>

#include "gaps/gap.hpp"
#include "gaps/sets.hpp"
#include "gaps/types.hpp"

namespace gaps {

enum class SearchStrategy {
  ForwardTracking,  ///< geometric scan, largest accepted step wins
  GoldenSection,    ///< minimizes the candidate residual; projected search only
};

struct LineSearchConfig {
  /// Required relative residual decrease for accepting a searched step.
  double epsilon = 0.01;
  /// Largest admissible step; <= 0 means alpha * tracking_factor^max_candidates.
  double alpha_max = 0.0;
  double tracking_factor = 1.4;
  int max_candidates = 18;
  /// Search only when cos(angle(r, r_nominal)) >= 1 - trigger_tol.
  double trigger_tol = 1e-4;
  SearchStrategy strategy = SearchStrategy::ForwardTracking;

  double effective_alpha_max(double alpha) const;
};

/// True when the residual direction is essentially unchanged between the
/// iterate and its nominal step (cosine within tol of 1). Iterates moving
/// along a straight line coincide with slow convergence, and that is when
/// long steps tend to be acceptable. Zero-norm inputs never trigger.
bool should_trigger(const Vector& r, const Vector& r_nominal, double tol);

struct TrackResult {
  std::optional<double> best;  ///< largest accepted step, if any
  int evaluated = 0;
};

/// Scans alpha0*factor, alpha0*factor^2, ... while <= alpha_max, at most
/// max_candidates points. Rejections before the first acceptance keep the
/// scan going; the first rejection after an acceptance ends it.
TrackResult forward_track(const std::function<bool(double)>& accept, double alpha0,
                          double factor, double alpha_max, int max_candidates);

struct MinTrackResult {
  std::optional<double> best;
  double best_value = 0.0;
  int evaluated = 0;
};

/// Same geometric scan, but tracking the minimum of a value function: stops
/// at the first candidate that is worse than its predecessor (for a convex
/// objective everything beyond is worse too) and returns the best point.
MinTrackResult forward_track_min(const std::function<double(double)>& value, double alpha0,
                                 double factor, double alpha_max, int max_candidates);

/// Golden-section minimization of a unimodal phi on [lo, hi]. Returns the
/// bracket midpoint once the bracket is narrower than tol, or the best
/// evaluated point if max_eval runs out first.
double golden_section(const std::function<double(double)>& phi, double lo, double hi,
                      double tol, int max_eval, int* evaluations = nullptr);

/// Evaluates the composed operator along rays x + t r and commits chosen
/// steps. The solver drives one evaluator per run; evaluators own the
/// current iterate.
class GapEvaluator {
 public:
  virtual ~GapEvaluator() = default;

  virtual void reset(const Vector& x0) = 0;
  const Vector& x() const { return x_; }
  const Vector& ray_direction() const { return r_; }

  /// S x for the current iterate; cached until the iterate moves.
  virtual const Vector& composition_value() = 0;

  /// Fixes the search direction for the current iterate. Must be called
  /// before evaluating ray points or advancing.
  virtual void prepare_ray(const Vector& r) = 0;

  /// Fixed-point residual S(x + t r) - (x + t r).
  virtual Vector ray_residual(double t) = 0;
  double ray_residual_norm(double t) { return ray_residual(t).norm(); }

  /// Moves the iterate to x + t r.
  virtual void advance(double t) = 0;

  /// Moves the iterate to an explicit point lying in the first set.
  virtual void advance_to(const Vector& x_new) = 0;

  /// Exact projection of the current iterate onto the first set.
  virtual Vector first_set_projection() = 0;

 protected:
  void require_ray() const;

  Vector x_, r_;
  bool ray_ready_ = false;
};

/// Plain evaluator: every ray point costs a full application of S.
class DirectEvaluator final : public GapEvaluator {
 public:
  explicit DirectEvaluator(const GapOperator& op);

  void reset(const Vector& x0) override;
  const Vector& composition_value() override;
  void prepare_ray(const Vector& r) override;
  Vector ray_residual(double t) override;
  void advance(double t) override;
  void advance_to(const Vector& x_new) override;
  Vector first_set_projection() override;

 private:
  const GapOperator& op_;
  std::vector<Vector> stage_outputs_;
  Vector sx_;
  bool sx_valid_ = false;
};

/// Exploits an affine leading block of the composition. With
/// S = S2 S1 and S1 affine (S1 v = F v + h), the value S1 x is carried
/// between iterations via S1 x_{k+1} = S1 x_k + t F r_k, so pricing a ray
/// point only applies S2 -- no projection onto the affine sets is performed
/// while candidates are evaluated. One extra application of S1 (at the
/// origin, for h) initializes the cache.
class CachedAffineEvaluator final : public GapEvaluator {
 public:
  /// Splits op at its longest leading run of affine sets; throws ConfigError
  /// when the first set is not affine.
  explicit CachedAffineEvaluator(const GapOperator& op);

  void reset(const Vector& x0) override;
  const Vector& composition_value() override;
  void prepare_ray(const Vector& r) override;
  Vector ray_residual(double t) override;
  void advance(double t) override;
  void advance_to(const Vector& x_new) override;
  Vector first_set_projection() override;

  /// Exact projection of the ray point onto the first set,
  /// P(x + t r) = P x + t * slope, available once the ray is prepared.
  /// Only defined when the affine block is a single set.
  Vector projected_ray_point(double t);

  int prefix_size() const { return static_cast<int>(prefix_.size()); }
  const Vector& cached_prefix_value() const { return s1x_; }

 private:
  Vector prefix_apply(const Vector& v) const;
  Vector suffix_apply(Vector v) const;

  static constexpr long kRefreshInterval = 8192;

  std::vector<RelaxedProjector> prefix_, suffix_;
  Vector offset_;  ///< S1(0)
  Vector s1x_;     ///< S1 x for the current iterate
  Vector fr_;      ///< F r for the prepared ray
  Vector sx_;
  Vector proj_base_, proj_slope_;
  bool sx_valid_ = false;
  bool proj_ray_ready_ = false;
  long steps_since_refresh_ = 0;
};

/// Builds the evaluator matching the operator: cached when the first set is
/// affine, direct otherwise.
std::unique_ptr<GapEvaluator> make_evaluator(const GapOperator& op, bool allow_cache = true);

struct LineSearchOutcome {
  bool accepted = false;
  double alpha_k = 0.0;  ///< step actually taken along the residual
  int candidates_evaluated = 0;
  Vector next_x;
  double next_residual_norm = 0.0;
};

/// Residual-direction search: accepts the largest step t in
/// (alpha, alpha_max] whose ray residual satisfies
///   ||r(x + t r)|| <= (1 - epsilon) * ||r(nominal)||.
/// Falls back to the nominal step when nothing qualifies. Always forward
/// tracking; the residual along the ray is not known to be unimodal.
LineSearchOutcome residual_line_search(GapEvaluator& ev, double alpha,
                                       double nominal_residual_norm,
                                       const LineSearchConfig& cfg);

/// Bookkeeping for the projected search: the acceptance test compares
/// against the residual recorded at the iteration following the last
/// accepted search (the starting residual before any acceptance).
struct ProjectedLsState {
  double reference_residual_norm = std::numeric_limits<double>::infinity();
  long last_ls_iteration = -1;
};

/// Projected search for two sets with the first one affine: candidates are
/// projected back onto the first set, x(t) = P(x + t r), and their residual
/// norm collapses to alpha2 * dist(x(t), target). That value is convex in t,
/// so golden-section search is admissible here.
LineSearchOutcome projected_line_search(CachedAffineEvaluator& ev, const ConvexSet& target,
                                        double alpha, double alpha2,
                                        double nominal_residual_norm,
                                        const ProjectedLsState& pls,
                                        const LineSearchConfig& cfg);

}  // namespace gaps
