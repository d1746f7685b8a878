#include "gaps/linesearch.hpp"

#include <cmath>
#include <stdexcept>

namespace gaps {

double LineSearchConfig::effective_alpha_max(double alpha) const {
  if (alpha_max > 0.0) return alpha_max;
  return alpha * std::pow(tracking_factor, max_candidates);
}

bool should_trigger(const Vector& r, const Vector& r_nominal, double tol) {
  const double rn = r.norm();
  const double bn = r_nominal.norm();
  if (rn <= 0.0 || bn <= 0.0) return false;
  return r.dot(r_nominal) / (rn * bn) >= 1.0 - tol;
}

TrackResult forward_track(const std::function<bool(double)>& accept, double alpha0,
                          double factor, double alpha_max, int max_candidates) {
  if (!(factor > 1.0)) throw ConfigError("forward tracking: factor must exceed 1");
  TrackResult out;
  double t = alpha0;
  for (int j = 0; j < max_candidates; ++j) {
    t *= factor;
    if (t > alpha_max) break;
    ++out.evaluated;
    if (accept(t)) {
      out.best = t;
    } else if (out.best) {
      break;  // first rejection after an acceptance
    }
  }
  return out;
}

MinTrackResult forward_track_min(const std::function<double(double)>& value, double alpha0,
                                 double factor, double alpha_max, int max_candidates) {
  if (!(factor > 1.0)) throw ConfigError("forward tracking: factor must exceed 1");
  MinTrackResult out;
  out.best_value = std::numeric_limits<double>::infinity();
  double t = alpha0;
  double previous = std::numeric_limits<double>::infinity();
  for (int j = 0; j < max_candidates; ++j) {
    t *= factor;
    if (t > alpha_max) break;
    const double v = value(t);
    ++out.evaluated;
    if (v < out.best_value) {
      out.best_value = v;
      out.best = t;
    }
    if (v > previous) break;  // past the valley
    previous = v;
  }
  return out;
}

double golden_section(const std::function<double(double)>& phi, double lo, double hi,
                      double tol, int max_eval, int* evaluations) {
  if (!(hi > lo)) throw ConfigError("golden section: empty interval");
  constexpr double kInv = 0.6180339887498949;  // 1/phi
  double a = lo, b = hi;
  double c = b - kInv * (b - a);
  double d = a + kInv * (b - a);
  int evals = 0;
  double best_t = 0.5 * (a + b);
  double best_f = std::numeric_limits<double>::infinity();
  auto eval = [&](double t) {
    const double f = phi(t);
    ++evals;
    if (f < best_f) {
      best_f = f;
      best_t = t;
    }
    return f;
  };
  if (max_eval < 2) {
    if (evaluations) *evaluations = 0;
    return best_t;
  }
  double fc = eval(c);
  double fd = eval(d);
  while (b - a > tol && evals < max_eval) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInv * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInv * (b - a);
      fd = eval(d);
    }
  }
  if (evaluations) *evaluations = evals;
  return (b - a) <= tol ? 0.5 * (a + b) : best_t;
}

void GapEvaluator::require_ray() const {
  if (!ray_ready_) {
    throw std::logic_error("evaluator: ray not prepared for the current iterate (stale cache)");
  }
}

DirectEvaluator::DirectEvaluator(const GapOperator& op) : op_(op) {}

void DirectEvaluator::reset(const Vector& x0) {
  if (x0.size() != op_.dim()) throw DimensionError("evaluator: start point dimension mismatch");
  x_ = x0;
  sx_valid_ = false;
  ray_ready_ = false;
}

const Vector& DirectEvaluator::composition_value() {
  if (!sx_valid_) {
    sx_ = op_.apply_composition(x_, stage_outputs_);
    sx_valid_ = true;
  }
  return sx_;
}

void DirectEvaluator::prepare_ray(const Vector& r) {
  r_ = r;
  ray_ready_ = true;
}

Vector DirectEvaluator::ray_residual(double t) {
  require_ray();
  const Vector xt = x_ + t * r_;
  return op_.apply_composition(xt) - xt;
}

void DirectEvaluator::advance(double t) {
  require_ray();
  x_ += t * r_;
  sx_valid_ = false;
  ray_ready_ = false;
}

void DirectEvaluator::advance_to(const Vector& x_new) {
  x_ = x_new;
  sx_valid_ = false;
  ray_ready_ = false;
}

Vector DirectEvaluator::first_set_projection() {
  composition_value();
  return x_ + (stage_outputs_[0] - x_) / op_.stages()[0].relaxation();
}

CachedAffineEvaluator::CachedAffineEvaluator(const GapOperator& op) {
  const auto& stages = op.stages();
  if (!stages[0].set()->is_affine()) {
    throw ConfigError("cached evaluator: the first set must be affine");
  }
  std::size_t i = 0;
  while (i < stages.size() && stages[i].set()->is_affine()) prefix_.push_back(stages[i++]);
  while (i < stages.size()) suffix_.push_back(stages[i++]);
  offset_ = prefix_apply(Vector::Zero(op.dim()));
}

Vector CachedAffineEvaluator::prefix_apply(const Vector& v) const {
  Vector y = v;
  for (const auto& stage : prefix_) y = stage.apply(y);
  return y;
}

Vector CachedAffineEvaluator::suffix_apply(Vector v) const {
  for (const auto& stage : suffix_) v = stage.apply(v);
  return v;
}

void CachedAffineEvaluator::reset(const Vector& x0) {
  if (x0.size() != offset_.size()) throw DimensionError("evaluator: start point dimension mismatch");
  x_ = x0;
  s1x_ = prefix_apply(x0);
  sx_valid_ = false;
  ray_ready_ = false;
  proj_ray_ready_ = false;
  steps_since_refresh_ = 0;
}

const Vector& CachedAffineEvaluator::composition_value() {
  if (!sx_valid_) {
    sx_ = suffix_apply(s1x_);
    sx_valid_ = true;
  }
  return sx_;
}

void CachedAffineEvaluator::prepare_ray(const Vector& r) {
  r_ = r;
  fr_ = prefix_apply(r) - offset_;
  ray_ready_ = true;
  proj_ray_ready_ = false;
}

Vector CachedAffineEvaluator::ray_residual(double t) {
  require_ray();
  return suffix_apply(s1x_ + t * fr_) - (x_ + t * r_);
}

void CachedAffineEvaluator::advance(double t) {
  require_ray();
  x_ += t * r_;
  s1x_ += t * fr_;
  // The cache only accumulates rounding; refresh it on long runs.
  if (++steps_since_refresh_ >= kRefreshInterval) {
    s1x_ = prefix_apply(x_);
    steps_since_refresh_ = 0;
  }
  sx_valid_ = false;
  ray_ready_ = false;
  proj_ray_ready_ = false;
}

void CachedAffineEvaluator::advance_to(const Vector& x_new) {
  // The new iterate lies in the affine block's set, so S1 fixes it.
  x_ = x_new;
  s1x_ = x_new;
  steps_since_refresh_ = 0;
  sx_valid_ = false;
  ray_ready_ = false;
  proj_ray_ready_ = false;
}

Vector CachedAffineEvaluator::first_set_projection() {
  if (prefix_.size() == 1) {
    return x_ + (s1x_ - x_) / prefix_[0].relaxation();
  }
  return prefix_[0].set()->project(x_);
}

Vector CachedAffineEvaluator::projected_ray_point(double t) {
  require_ray();
  if (prefix_.size() != 1) {
    throw std::logic_error("projected ray point needs a single affine leading set");
  }
  if (!proj_ray_ready_) {
    const double a1 = prefix_[0].relaxation();
    proj_base_ = x_ + (s1x_ - x_) / a1;
    proj_slope_ = (fr_ - (1.0 - a1) * r_) / a1;
    proj_ray_ready_ = true;
  }
  return proj_base_ + t * proj_slope_;
}

std::unique_ptr<GapEvaluator> make_evaluator(const GapOperator& op, bool allow_cache) {
  if (allow_cache && op.stages()[0].set()->is_affine()) {
    return std::make_unique<CachedAffineEvaluator>(op);
  }
  return std::make_unique<DirectEvaluator>(op);
}

LineSearchOutcome residual_line_search(GapEvaluator& ev, double alpha,
                                       double nominal_residual_norm,
                                       const LineSearchConfig& cfg) {
  const double threshold = (1.0 - cfg.epsilon) * nominal_residual_norm;
  double accepted_norm = 0.0;
  const TrackResult track = forward_track(
      [&](double t) {
        const double v = ev.ray_residual_norm(t);
        if (v <= threshold) {
          accepted_norm = v;
          return true;
        }
        return false;
      },
      alpha, cfg.tracking_factor, cfg.effective_alpha_max(alpha), cfg.max_candidates);

  LineSearchOutcome out;
  out.candidates_evaluated = track.evaluated;
  if (track.best) {
    out.accepted = true;
    out.alpha_k = *track.best;
    out.next_x = ev.x() + out.alpha_k * ev.ray_direction();
    out.next_residual_norm = accepted_norm;
  } else {
    out.alpha_k = alpha;
    out.next_x = ev.x() + alpha * ev.ray_direction();
    out.next_residual_norm = nominal_residual_norm;
  }
  return out;
}

LineSearchOutcome projected_line_search(CachedAffineEvaluator& ev, const ConvexSet& target,
                                        double alpha, double alpha2,
                                        double nominal_residual_norm,
                                        const ProjectedLsState& pls,
                                        const LineSearchConfig& cfg) {
  const double threshold = (1.0 - cfg.epsilon) * pls.reference_residual_norm;
  const double hi = cfg.effective_alpha_max(alpha);
  // ||r(x(t))|| for a candidate already in the affine set collapses to the
  // scaled distance from the other set.
  auto value = [&](double t) { return alpha2 * target.distance(ev.projected_ray_point(t)); };

  LineSearchOutcome out;
  std::optional<double> chosen;
  double chosen_norm = 0.0;

  if (cfg.strategy == SearchStrategy::GoldenSection) {
    int evals = 0;
    const double t = golden_section(value, alpha, hi, 0.01 * (hi - alpha), cfg.max_candidates, &evals);
    out.candidates_evaluated = evals;
    if (t > alpha) {
      const double v = value(t);
      ++out.candidates_evaluated;
      if (v <= threshold) {
        chosen = t;
        chosen_norm = v;
      }
    }
  } else {
    // The objective is convex in the step, so track to its valley rather
    // than to the largest step that still clears the acceptance bound.
    const MinTrackResult track =
        forward_track_min(value, alpha, cfg.tracking_factor, hi, cfg.max_candidates);
    out.candidates_evaluated = track.evaluated;
    if (track.best && track.best_value <= threshold) {
      chosen = track.best;
      chosen_norm = track.best_value;
    }
  }

  if (chosen) {
    out.accepted = true;
    out.alpha_k = *chosen;
    out.next_x = ev.projected_ray_point(*chosen);
    out.next_residual_norm = chosen_norm;
  } else {
    out.alpha_k = alpha;
    out.next_x = ev.x() + alpha * ev.ray_direction();
    out.next_residual_norm = nominal_residual_norm;
  }
  return out;
}

}  // namespace gaps
