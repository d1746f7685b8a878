// Acceptance suite: exercises the solver's headline guarantees end to end
// and prints one pass/fail line per check. Returns the number of failures.

#include <algorithm>

#include <Eigen/LU>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gaps/bench.hpp"
#include "gaps/cone.hpp"
#include "gaps/gap.hpp"
#include "gaps/io.hpp"
#include "gaps/linesearch.hpp"
#include "gaps/solver.hpp"

using namespace gaps;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define REQUIRE_MSG(cond, ...)                                    \
  do {                                                            \
    if (!(cond)) {                                                \
      char buf_[512];                                             \
      std::snprintf(buf_, sizeof(buf_), __VA_ARGS__);             \
      throw Failure(std::string(buf_) + " (check: " #cond ")");   \
    }                                                             \
  } while (0)

std::mt19937_64 rng_;  // reseeded at the top of every criterion

Vector rand_vec(Index n, double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, scale);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = dist(rng_);
  return v;
}

Matrix rand_mat(Index rows, Index cols) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = dist(rng_);
  }
  return m;
}

std::shared_ptr<const AffineSubspace> affine_through(const Vector& z, Index rows) {
  const Matrix a = rand_mat(rows, z.size());
  return std::make_shared<AffineSubspace>(a, Vector(a * z));
}

// Second set together with a strictly interior-ish member.
struct SecondSet {
  SetPtr set;
  Vector member;
};

SecondSet random_second_set(Index n, int kind) {
  SecondSet out;
  switch (kind % 3) {
    case 0: {
      out.set = std::make_shared<NonnegativeOrthant>(n);
      out.member = rand_vec(n).cwiseAbs() + Vector::Constant(n, 0.2);
      break;
    }
    case 1: {
      const Vector lo = rand_vec(n, 1.0).array() - 2.0;
      out.set = std::make_shared<Box>(lo, Vector(lo.array() + 3.0));
      out.member = lo + Vector::Constant(n, 1.0);
      break;
    }
    default: {
      out.set = std::make_shared<SecondOrderCone>(n);
      Vector u = rand_vec(n - 1);
      out.member = Vector(n);
      out.member[0] = u.norm() + 0.5;
      out.member.tail(n - 1) = u;
      break;
    }
  }
  return out;
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double median_iterations(const std::vector<RunRecord>& recs) {
  std::vector<double> iters;
  for (const auto& r : recs) iters.push_back(static_cast<double>(r.iterations));
  return median(iters);
}

long converged_count(const std::vector<RunRecord>& recs) {
  long n = 0;
  for (const auto& r : recs) n += r.converged ? 1 : 0;
  return n;
}

std::vector<RunRecord> over_seeds(double alpha1, StepperKind mode, long max_iter) {
  std::vector<RunRecord> recs;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ExperimentSpec spec;
    spec.seed = seed;
    spec.mode = mode;
    spec.max_iter = max_iter;
    const FeasibilityInstance inst = generate_instance(spec);
    recs.push_back(run_single(inst, alpha1, spec));
  }
  return recs;
}

// --- criteria ---------------------------------------------------------

void fixed_points_of_the_iteration_map() {
  rng_.seed(1001);
  for (int inst = 0; inst < 50; ++inst) {
    const Index n = 4 + static_cast<Index>(inst % 17);  // dimensions up to 20
    SecondSet second = random_second_set(n, inst);
    const Vector z = second.member;
    auto affine = affine_through(z, 1 + static_cast<Index>(inst % 3));

    GapConfig cfg;
    if (inst % 2 == 0) {
      cfg.alphas = {1.0 + 0.8 * ((inst % 5) / 5.0), 1.2};
      cfg.alpha = 0.9 / beta(cfg.alphas);
    } else {
      cfg.alphas = {1.5, 2.0};  // one reflection
      cfg.alpha = 0.3 + 0.6 * ((inst % 7) / 7.0);
    }
    GapOperator op({affine, second.set}, cfg);
    const double move = (op.apply(z).next - z).norm();
    REQUIRE_MSG(move <= 1e-12 * (1.0 + z.norm()),
                "instance %d: intersection point moved by %.3e", inst, move);
  }
}

void averaged_contraction_inequality() {
  rng_.seed(1002);
  const Index n = 8;
  const Vector z = rand_vec(n).cwiseAbs() + Vector::Constant(n, 0.2);
  auto affine = affine_through(z, 3);
  auto orthant = std::make_shared<NonnegativeOrthant>(n);

  struct Setting {
    double a1, a2, alpha;
  };
  const std::vector<Setting> settings = {
      {1.0, 1.0, 1.0},
      {1.9, 1.9, 0.85 / beta(std::array{1.9, 1.9})},
      {1.5, 2.0, 0.7},
      {2.0, 2.0, 0.5},
  };
  for (const auto& s : settings) {
    GapConfig cfg;
    cfg.alpha = s.alpha;
    cfg.alphas = {s.a1, s.a2};
    GapOperator op({affine, orthant}, cfg);
    const double kappa = averagedness_constant(cfg);
    for (int i = 0; i < 200; ++i) {
      const Vector x = rand_vec(n, 2.0);
      const Vector y = rand_vec(n, 2.0);
      const Vector tx = op.apply(x).next;
      const Vector ty = op.apply(y).next;
      const double lhs = (tx - ty).squaredNorm();
      const double drift = ((x - tx) - (y - ty)).squaredNorm();
      const double rhs = (x - y).squaredNorm() - (1.0 - kappa) / kappa * drift;
      REQUIRE_MSG(lhs <= rhs + 1e-9 * (1.0 + (x - y).squaredNorm()),
                  "a1=%.2f alpha=%.2f pair %d: averaged inequality violated by %.3e",
                  s.a1, s.alpha, i, lhs - rhs);
    }
  }
}

void relaxed_fixed_points_match_membership() {
  rng_.seed(1003);
  std::vector<SetPtr> sets;
  sets.push_back(std::make_shared<NonnegativeOrthant>(6));
  sets.push_back(std::make_shared<Box>(Vector::Constant(5, -1.0), Vector::Constant(5, 1.5)));
  Vector lo = Vector::Constant(4, -kInf);
  lo[0] = 0.0;
  sets.push_back(std::make_shared<Box>(lo, Vector::Constant(4, kInf)));
  sets.push_back(std::make_shared<SecondOrderCone>(5));
  sets.push_back(std::make_shared<ZeroCone>(4));
  sets.push_back(std::make_shared<FreeSpace>(4));
  sets.push_back(affine_through(rand_vec(7), 3));
  sets.push_back(std::make_shared<ProductSet>(std::vector<SetPtr>{
      std::make_shared<NonnegativeOrthant>(2), std::make_shared<SecondOrderCone>(3)}));

  for (const SetPtr& set : sets) {
    for (double a : {0.5, 1.0, 1.5, 2.0}) {
      RelaxedProjector rp(set, a);
      for (int i = 0; i < 40; ++i) {
        const Vector x = rand_vec(set->dim(), 2.0);
        const double scale = 1.0 + x.norm();
        const double dist = set->distance(x);
        const double move = (rp.apply(x) - x).norm();
        if (dist <= 1e-12 * scale) {
          REQUIRE_MSG(move <= 1e-11 * scale, "%s a=%.1f: member moved %.3e",
                      set->name().c_str(), a, move);
        } else {
          REQUIRE_MSG(move > 1e-12 * scale, "%s a=%.1f: outside point fixed (dist %.3e)",
                      set->name().c_str(), a, dist);
        }
        const Vector m = set->project(rand_vec(set->dim(), 2.0));
        REQUIRE_MSG((rp.apply(m) - m).norm() <= 1e-12 * (1.0 + m.norm()),
                    "%s a=%.1f: projected member moved", set->name().c_str(), a);
      }
    }
  }
}

void projected_search_identity_and_convexity() {
  rng_.seed(1004);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int inst = 0; inst < 100; ++inst) {
    const Index n = 4 + static_cast<Index>(inst % 12);
    SecondSet second = random_second_set(n, inst);
    auto affine = affine_through(second.member, 1 + static_cast<Index>(inst % 3));
    const double a2 = 0.25 + 1.75 * unif(rng_);

    GapConfig cfg;
    cfg.alphas = {1.4, a2};
    cfg.alpha = 0.6;
    GapOperator op({affine, second.set}, cfg);

    const Vector x = rand_vec(n, 2.0);
    const Vector r = op.apply_composition(x) - x;
    for (int j = 0; j < 4; ++j) {
      const double t = 3.0 * unif(rng_);
      const Vector cand = affine->project(x + t * r);
      const double lhs = (op.apply_composition(cand) - cand).norm();
      const double rhs = a2 * second.set->distance(cand);
      REQUIRE_MSG(std::abs(lhs - rhs) <= 1e-10 * (1.0 + rhs),
                  "instance %d: residual %.12e vs scaled distance %.12e", inst, lhs, rhs);
    }
    auto phi = [&](double t) { return second.set->distance(affine->project(x + t * r)); };
    for (int j = 0; j < 4; ++j) {
      const double ta = 6.0 * unif(rng_) - 3.0;
      const double tb = 6.0 * unif(rng_) - 3.0;
      const double mid = phi(0.5 * (ta + tb));
      const double avg = 0.5 * (phi(ta) + phi(tb));
      REQUIRE_MSG(mid <= avg + 1e-9, "instance %d: midpoint convexity violated by %.3e",
                  inst, mid - avg);
    }
  }
}

void cached_candidates_price_correctly_and_cheaply() {
  rng_.seed(1005);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int inst = 0; inst < 100; ++inst) {
    const Index n = 5 + static_cast<Index>(inst % 12);
    SecondSet second = random_second_set(n, inst);
    auto affine = affine_through(second.member, 1 + static_cast<Index>(inst % 4));

    GapConfig cfg;
    cfg.alphas = {0.5 + 1.4 * unif(rng_), 0.5 + 1.4 * unif(rng_)};
    cfg.alpha = 0.5;
    GapOperator op({affine, second.set}, cfg);

    CachedAffineEvaluator cached(op);
    const Vector x0 = rand_vec(n, 2.0);
    cached.reset(x0);
    const Vector r = cached.composition_value() - cached.x();
    cached.prepare_ray(r);

    std::array<double, 10> steps{};
    std::array<double, 10> via_cache{};
    for (auto& t : steps) t = 0.5 + 3.0 * unif(rng_);

    const long before = affine->projection_count();
    for (int j = 0; j < 10; ++j) via_cache[j] = cached.ray_residual_norm(steps[j]);
    REQUIRE_MSG(affine->projection_count() == before,
                "instance %d: candidate pricing touched the affine set (%ld -> %ld)",
                inst, before, affine->projection_count());

    for (int j = 0; j < 10; ++j) {
      const Vector xt = x0 + steps[j] * r;
      const double direct = (op.apply_composition(xt) - xt).norm();
      REQUIRE_MSG(std::abs(via_cache[j] - direct) <= 1e-9 * (1.0 + direct),
                  "instance %d t=%.3f: cached %.12e direct %.12e", inst, steps[j],
                  via_cache[j], direct);
    }
  }
}

void residual_histories_behave() {
  // nominal and basic searches keep the residual non-increasing
  for (double a1 : {1.0, 1.95}) {
    for (StepperKind mode : {StepperKind::Nominal, StepperKind::BasicLineSearch}) {
      ExperimentSpec spec;
      spec.seed = 1;
      spec.mode = mode;
      spec.max_iter = 100000;
      spec.record_history = true;
      const FeasibilityInstance inst = generate_instance(spec);

      GapConfig cfg;
      cfg.alphas = {a1, a1};
      cfg.alpha = outer_alpha(a1, a1);
      GapOperator op({inst.affine, inst.orthant}, cfg);
      SolveOptions opts;
      opts.stepper = mode;
      opts.max_iter = spec.max_iter;
      opts.record_history = true;
      const SolveResult res = solve(op, inst.x0, inst.criterion, opts);
      REQUIRE_MSG(res.converged, "a1=%.2f mode=%s: run did not converge", a1,
                  to_string(mode).c_str());
      for (std::size_t k = 1; k < res.residual_norm_history.size(); ++k) {
        REQUIRE_MSG(res.residual_norm_history[k] <=
                        res.residual_norm_history[k - 1] + 1e-12,
                    "a1=%.2f mode=%s: residual grew at iteration %zu", a1,
                    to_string(mode).c_str(), k);
      }
    }
  }

  // projected search: residuals recorded after accepted steps shrink by
  // at least the factor 1 - epsilon
  for (double a1 : {1.95, 2.0}) {
    ExperimentSpec spec;
    spec.seed = 1;
    spec.mode = StepperKind::ProjectedLineSearch;
    spec.max_iter = 100000;
    spec.record_history = true;
    const FeasibilityInstance inst = generate_instance(spec);

    GapConfig cfg;
    cfg.alphas = {a1, a1};
    cfg.alpha = outer_alpha(a1, a1);
    GapOperator op({inst.affine, inst.orthant}, cfg);
    SolveOptions opts;
    opts.stepper = StepperKind::ProjectedLineSearch;
    opts.max_iter = spec.max_iter;
    opts.record_history = true;
    const SolveResult res = solve(op, inst.x0, inst.criterion, opts);
    REQUIRE_MSG(res.converged, "a1=%.2f projected: run did not converge", a1);

    const double eps = opts.line_search.epsilon;
    double reference = res.residual_norm_history.front();
    for (long k : res.stats.accepted_iterations) {
      const std::size_t next = static_cast<std::size_t>(k) + 1;
      if (next >= res.residual_norm_history.size()) break;
      const double recorded = res.residual_norm_history[next];
      REQUIRE_MSG(recorded <= (1.0 - eps) * reference + 1e-12,
                  "a1=%.2f: accepted step at %ld left residual %.3e vs reference %.3e",
                  a1, k, recorded, reference);
      reference = recorded;
    }
  }
}

void benchmark_orderings_reproduce() {
  // (a) plain alternating projections
  const auto nominal_1 = over_seeds(1.0, StepperKind::Nominal, 100000);
  const double med_a = median_iterations(nominal_1);
  REQUIRE_MSG(converged_count(nominal_1) >= 3, "(a) too few converged runs");
  REQUIRE_MSG(med_a >= 1e3 && med_a <= 3e4, "(a) median iterations %.0f outside [1e3, 3e4]",
              med_a);

  // (b) strong over-relaxation
  const auto nominal_195 = over_seeds(1.95, StepperKind::Nominal, 100000);
  const double med_b = median_iterations(nominal_195);
  REQUIRE_MSG(converged_count(nominal_195) >= 3, "(b) too few converged runs");
  REQUIRE_MSG(med_b >= 50 && med_b <= 2000, "(b) median iterations %.0f outside [50, 2000]",
              med_b);

  // (c) the reflection pair stalls
  const auto nominal_2 = over_seeds(2.0, StepperKind::Nominal, 100000);
  REQUIRE_MSG(converged_count(nominal_2) <= 2,
              "(c) reflection pair converged in %ld/5 runs within 1e5 iterations",
              converged_count(nominal_2));

  // (d) the basic search beats plain alternating projections by at least 2x
  const auto basic_1 = over_seeds(1.0, StepperKind::BasicLineSearch, 100000);
  const double med_d = median_iterations(basic_1);
  REQUIRE_MSG(converged_count(basic_1) >= 3, "(d) too few converged runs");
  REQUIRE_MSG(med_d * 2.0 <= med_a, "(d) basic search median %.0f not 2x under nominal %.0f",
              med_d, med_a);

  // (e) the projected search fixes the reflection pair
  const auto projected_2 = over_seeds(2.0, StepperKind::ProjectedLineSearch, 5000);
  REQUIRE_MSG(converged_count(projected_2) >= 3, "(e) too few converged runs");
  REQUIRE_MSG(median_iterations(projected_2) <= 5000, "(e) median iterations %.0f above 5e3",
              median_iterations(projected_2));

  // (f) projected search at 1.95 is no slower than nominal
  const auto projected_195 = over_seeds(1.95, StepperKind::ProjectedLineSearch, 100000);
  REQUIRE_MSG(converged_count(projected_195) >= 3, "(f) too few converged runs");
  REQUIRE_MSG(median_iterations(projected_195) <= med_b,
              "(f) projected median %.0f above nominal %.0f", median_iterations(projected_195),
              med_b);

  std::printf("        medians: nominal@1 %.0f | nominal@1.95 %.0f | basic@1 %.0f | "
              "projected@2 %.0f | projected@1.95 %.0f\n",
              med_a, med_b, med_d, median_iterations(projected_2),
              median_iterations(projected_195));
}

void cone_program_end_to_end() {
  // maximize x1 + 2 x2 over x1 <= 2, x2 <= 3, x1 + x2 <= 4, x >= 0
  ConeProgram p;
  Matrix a(5, 2);
  a << 1, 0, 0, 1, 1, 1, -1, 0, 0, -1;
  p.a = a.sparseView();
  p.b = Vector(5);
  p.b << 2, 3, 4, 0, 0;
  p.c = Vector(2);
  p.c << -1, -2;
  p.cone = std::make_shared<ProductSet>(
      std::vector<SetPtr>{std::make_shared<NonnegativeOrthant>(5)});

  // brute-force vertex enumeration fixes the optimum before solving
  double best = 0.0;
  for (int i = 0; i < 5; ++i) {
    for (int j = i + 1; j < 5; ++j) {
      Matrix pair(2, 2);
      pair.row(0) = a.row(i);
      pair.row(1) = a.row(j);
      if (std::abs(pair.determinant()) < 1e-12) continue;
      Vector rhs(2);
      rhs << p.b[i], p.b[j];
      const Vector v = pair.fullPivLu().solve(rhs);
      if (((a * v).array() <= p.b.array() + 1e-9).all()) best = std::min(best, p.c.dot(v));
    }
  }
  REQUIRE_MSG(std::abs(best - (-7.0)) <= 1e-9, "vertex oracle expected -7, got %.12f", best);

  const EmbeddedFeasibility e = embed(p);
  GapConfig cfg;
  cfg.alphas = {1.95, 1.95};
  cfg.alpha = outer_alpha(1.95, 1.95);
  GapOperator op({e.affine, e.coneset}, cfg);
  const Criterion crit = feasibility_criterion({e.affine, e.coneset}, 1e-8);
  SolveOptions opts;
  opts.stepper = StepperKind::ProjectedLineSearch;
  opts.max_iter = 200000;
  opts.record_history = false;
  const SolveResult res = solve(op, Vector::Zero(op.dim()), crit, opts);
  REQUIRE_MSG(res.converged, "embedded program did not converge in %ld iterations",
              res.iterations);

  const PrimalDualSolution sol = recover(e, res.solution);
  REQUIRE_MSG(std::abs(sol.objective_gap) <= 1e-6, "duality gap %.3e above 1e-6",
              sol.objective_gap);
  REQUIRE_MSG(sol.primal_residual <= 1e-6, "primal residual %.3e above 1e-6",
              sol.primal_residual);
  REQUIRE_MSG(sol.dual_residual <= 1e-6, "dual residual %.3e above 1e-6", sol.dual_residual);
  REQUIRE_MSG(std::abs(sol.objective - best) <= 1e-4, "objective %.8f vs oracle %.8f",
              sol.objective, best);
}

void sweeps_are_reproducible() {
  ExperimentSpec spec;
  spec.m = 20;
  spec.n = 40;
  spec.seed = 7;
  spec.tol = 1e-9;
  spec.max_iter = 20000;
  spec.mode = StepperKind::ProjectedLineSearch;
  spec.alpha_grid = {1.0, 1.5, 1.95};

  const auto dir = std::filesystem::temp_directory_path();
  const auto path1 = dir / "gaps_acceptance_sweep1.csv";
  const auto path2 = dir / "gaps_acceptance_sweep2.csv";
  emit_csv(run_sweep(spec), path1);
  emit_csv(run_sweep(spec), path2);

  auto read_without_walltime = [](const std::filesystem::path& path) {
    std::ifstream in(path);
    std::vector<std::string> rows;
    std::string line;
    while (std::getline(in, line)) {
      rows.push_back(line.substr(0, line.rfind(',')));
    }
    return rows;
  };
  const auto rows1 = read_without_walltime(path1);
  const auto rows2 = read_without_walltime(path2);
  std::filesystem::remove(path1);
  std::filesystem::remove(path2);

  REQUIRE_MSG(rows1.size() == 4, "expected header + 3 rows, got %zu", rows1.size());
  REQUIRE_MSG(rows1 == rows2, "CSV rows differ between identical sweeps");
}

}  // namespace

int main() {
  struct Entry {
    int number;
    const char* name;
    std::function<void()> body;
  };
  const std::vector<Entry> entries = {
      {1, "intersection points are fixed points", fixed_points_of_the_iteration_map},
      {2, "averaged contraction inequality", averaged_contraction_inequality},
      {3, "relaxed fixed points match membership", relaxed_fixed_points_match_membership},
      {4, "projected-search identity and convexity", projected_search_identity_and_convexity},
      {5, "cached candidate pricing", cached_candidates_price_correctly_and_cheaply},
      {6, "residual history guarantees", residual_histories_behave},
      {7, "benchmark orderings", benchmark_orderings_reproduce},
      {8, "cone program end to end", cone_program_end_to_end},
      {9, "sweep reproducibility", sweeps_are_reproducible},
  };

  int failures = 0;
  for (const auto& entry : entries) {
    const auto start = std::chrono::steady_clock::now();
    try {
      entry.body();
      const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
      std::printf("[PASS] %d. %s (%.1fs)\n", entry.number, entry.name, dt.count());
    } catch (const std::exception& e) {
      const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
      std::printf("[FAIL] %d. %s (%.1fs): %s\n", entry.number, entry.name, dt.count(),
                  e.what());
      ++failures;
    }
  }
  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  return failures;
}
