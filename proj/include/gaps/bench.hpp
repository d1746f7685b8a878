#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gaps/sets.hpp"
#include "gaps/solver.hpp"
#include "gaps/types.hpp"

namespace gaps {

/// Deterministic standard-normal stream. The algorithm is part of the
/// output contract so runs reproduce across platforms:
///   - mt19937_64 seeded with `seed`;
///   - uniforms u1 = ((next() >> 11) + 1) * 2^-53 in (0, 1],
///              u2 =  (next() >> 11)      * 2^-53 in [0, 1);
///   - Box-Muller: sqrt(-2 ln u1) * (cos, sin)(2 pi u2), cosine value first;
///   - matrices fill row by row.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}

  double next();
  Vector vector(Index n);
  Matrix matrix(Index rows, Index cols);

 private:
  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

struct ExperimentSpec {
  int m = 50;
  int n = 100;
  double p_scale = 1e-7;
  std::uint64_t seed = 1;
  /// Values of alpha1 = alpha2 swept over; empty means 1.0, 1.05, ..., 2.0.
  std::vector<double> alpha_grid;
  StepperKind mode = StepperKind::Nominal;
  double tol = 1e-10;
  long max_iter = 10'000'000;
  /// Overrides the 0.85/beta rule when set.
  std::optional<double> alpha_override;
  LineSearchConfig line_search;
  bool record_history = false;
};

/// Random feasibility instance: find z with Q (z - p) = 0 and z >= 0, where
/// Q is m x n standard normal and p = p_scale * ones (so z = p is feasible).
/// Drawn from NormalSampler(seed): first Q, then the start point x0.
///
/// A direction d >= 0, d != 0 with Q d = 0 would put an entire ray of the
/// affine set inside the orthant and make the instance far easier, so such
/// matrices are discarded: Q is accepted only once a certificate y with
/// Q' y >= 1 is found (no nonnegative null direction can exist then), and
/// rejected draws continue the same random stream. This keeps generation
/// deterministic per seed.
struct FeasibilityInstance {
  std::shared_ptr<const AffineSubspace> affine;
  std::shared_ptr<const NonnegativeOrthant> orthant;
  Vector p;
  Vector x0;
  Criterion criterion;  ///< ||Q(z - p)|| <= tol and dist(z, orthant) <= tol
};

FeasibilityInstance generate_instance(const ExperimentSpec& spec);

/// Outer relaxation rule: 0.85 / beta(alpha1, alpha2); at the reflection
/// pair alpha1 = alpha2 = 2 (where beta is undefined) the constant 0.85 is
/// used directly, since there the outer step itself is the averagedness
/// constant.
double outer_alpha(double alpha1, double alpha2);

struct RunRecord {
  double alpha1 = 0.0;
  double alpha = 0.0;
  std::string mode;
  long iterations = 0;
  bool converged = false;
  long ls_triggered = 0;
  long ls_accepted = 0;
  long candidates_total = 0;
  double final_residual = 0.0;  ///< criterion merit of the returned point
  double wall_time_s = 0.0;
};

RunRecord run_single(const FeasibilityInstance& inst, double alpha1, const ExperimentSpec& spec);

/// One run per grid value on a single shared instance. Grid points may run
/// on parallel threads (cap with GAPS_NUM_THREADS); records are returned
/// sorted by (alpha1, mode) regardless.
std::vector<RunRecord> run_sweep(const ExperimentSpec& spec);

/// CSV with the fixed header
/// alpha1,alpha,mode,iterations,converged,ls_triggered,ls_accepted,candidates_total,final_residual,wall_time_s
/// one row per record, sorted by (alpha1, mode). Throws IoError when the
/// record list is empty.
void emit_csv(const std::vector<RunRecord>& records, const std::filesystem::path& path);

std::vector<double> default_alpha_grid();

}  // namespace gaps
