#include "gaps/solver.hpp"

#include <limits>
#include <utility>

namespace gaps {

std::string to_string(StepperKind kind) {
  switch (kind) {
    case StepperKind::Nominal: return "none";
    case StepperKind::BasicLineSearch: return "basic";
    case StepperKind::ProjectedLineSearch: return "projected";
  }
  return "?";
}

Criterion feasibility_criterion(std::vector<SetPtr> sets, double tol) {
  Criterion crit;
  crit.tol = tol;
  crit.merit = [sets = std::move(sets)](const Vector& z) {
    double worst = 0.0;
    for (const auto& set : sets) {
      const auto* affine = dynamic_cast<const AffineSubspace*>(set.get());
      const double v = affine ? affine->equation_residual_norm(z) : set->distance(z);
      if (v > worst) worst = v;
    }
    return worst;
  };
  return crit;
}

namespace {

struct BestCandidate {
  double merit = std::numeric_limits<double>::infinity();
  Vector point;
  std::string label;

  void offer(double m, const Vector& z, const char* l) {
    if (m < merit) {
      merit = m;
      point = z;
      label = l;
    }
  }
};

}  // namespace

SolveResult solve(const GapOperator& op, const Vector& x0, const Criterion& criterion,
                  const SolveOptions& opts) {
  if (x0.size() != op.dim()) throw DimensionError("solve: start point dimension mismatch");
  const auto& stages = op.stages();
  if (opts.stepper == StepperKind::ProjectedLineSearch) {
    if (op.num_sets() != 2) {
      throw ConfigError("projected line search: exactly two sets required");
    }
    if (!stages[0].set()->is_affine()) {
      throw ConfigError("projected line search: the first set must be affine");
    }
  }

  const double alpha = op.config().alpha;
  LineSearchConfig ls = opts.line_search;
  ls.alpha_max = ls.effective_alpha_max(alpha);

  const bool want_cache = opts.stepper != StepperKind::Nominal;
  std::unique_ptr<GapEvaluator> ev = make_evaluator(op, want_cache);
  auto* cached = dynamic_cast<CachedAffineEvaluator*>(ev.get());
  if (opts.stepper == StepperKind::ProjectedLineSearch && (!cached || cached->prefix_size() != 1)) {
    throw ConfigError("projected line search: the first set must be a single affine block");
  }
  ev->reset(x0);

  SolveResult res;
  ProjectedLsState pls;
  bool refresh_reference = true;  // pick up the starting residual
  BestCandidate best;

  auto finish = [&](Vector solution, long k, bool converged, std::string monitor, double merit,
                    double rn) {
    res.solution = std::move(solution);
    res.iterations = k;
    res.converged = converged;
    res.monitor = std::move(monitor);
    res.solution_merit = merit;
    res.final_residual_norm = rn;
    return res;
  };

  for (long k = 0;; ++k) {
    const Vector& sx = ev->composition_value();
    Vector r = sx - ev->x();
    const double rn = r.norm();
    if (opts.record_history) res.residual_norm_history.push_back(rn);
    if (refresh_reference) {
      pls.reference_residual_norm = rn;
      refresh_reference = false;
    }

    // Termination is tested on the monitored projected candidates, not on
    // the iterate itself.
    Vector first = ev->first_set_projection();
    Vector chain = first;
    for (std::size_t i = 1; i < stages.size(); ++i) chain = stages[i].set()->project(chain);

    const double chain_merit = criterion.merit(chain);
    best.offer(chain_merit, chain, "projection_chain");
    if (chain_merit <= criterion.tol) {
      return finish(std::move(chain), k, true, "projection_chain", chain_merit, rn);
    }
    const double first_merit = criterion.merit(first);
    best.offer(first_merit, first, "first_set");
    if (first_merit <= criterion.tol) {
      return finish(std::move(first), k, true, "first_set", first_merit, rn);
    }

    // Residual numerically zero: the iterate cannot move any further.
    if (rn <= opts.residual_zero_tol * (1.0 + ev->x().norm())) {
      return finish(std::move(best.point), k, false, best.label, best.merit, rn);
    }
    if (k >= opts.max_iter) {
      return finish(std::move(best.point), k, false, best.label, best.merit, rn);
    }

    ev->prepare_ray(r);
    switch (opts.stepper) {
      case StepperKind::Nominal:
        ev->advance(alpha);
        break;
      case StepperKind::BasicLineSearch: {
        const Vector r_nom = ev->ray_residual(alpha);
        if (should_trigger(r, r_nom, ls.trigger_tol)) {
          ++res.stats.ls_triggered;
          const LineSearchOutcome out = residual_line_search(*ev, alpha, r_nom.norm(), ls);
          res.stats.candidates_evaluated += out.candidates_evaluated;
          if (out.accepted) {
            ++res.stats.ls_accepted;
            res.stats.accepted_iterations.push_back(k);
            ev->advance(out.alpha_k);
          } else {
            ev->advance(alpha);
          }
        } else {
          ev->advance(alpha);
        }
        break;
      }
      case StepperKind::ProjectedLineSearch: {
        const Vector r_nom = ev->ray_residual(alpha);
        bool stepped = false;
        if (should_trigger(r, r_nom, ls.trigger_tol)) {
          ++res.stats.ls_triggered;
          const LineSearchOutcome out = projected_line_search(
              *cached, *stages[1].set(), alpha, op.config().alphas[1], r_nom.norm(), pls, ls);
          res.stats.candidates_evaluated += out.candidates_evaluated;
          if (out.accepted) {
            ++res.stats.ls_accepted;
            res.stats.accepted_iterations.push_back(k);
            cached->advance_to(out.next_x);
            pls.last_ls_iteration = k;
            refresh_reference = true;  // reference becomes the next residual
            stepped = true;
          }
        }
        if (!stepped) ev->advance(alpha);
        break;
      }
    }
  }
}

}  // namespace gaps
