#include "gaps/bench.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <thread>

#include "gaps/gap.hpp"

namespace gaps {

double NormalSampler::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = static_cast<double>((rng_() >> 11) + 1) * 0x1p-53;
  const double u2 = static_cast<double>(rng_() >> 11) * 0x1p-53;
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

Vector NormalSampler::vector(Index n) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = next();
  return v;
}

Matrix NormalSampler::matrix(Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = next();
  }
  return m;
}

namespace {

// Certifies that no d >= 0, d != 0 solves Q d = 0, by exhibiting y with
// Q' y >= 1 (the two systems are mutually exclusive and jointly exhaustive).
// The certificate is searched with the solver itself on the feasibility
// problem {(y, w) : Q' y = w} intersected with free x {w >= 1}; failure to
// converge counts as "a ray may exist" and the matrix is discarded.
bool orthant_ray_free(const Matrix& q) {
  const Index m = q.rows();
  const Index n = q.cols();
  Matrix a(n, m + n);
  a.leftCols(m) = q.transpose();
  a.rightCols(n) = -Matrix::Identity(n, n);
  auto graph = std::make_shared<AffineSubspace>(a, Vector::Zero(n));

  Vector lower = Vector::Constant(m + n, -std::numeric_limits<double>::infinity());
  lower.tail(n).setOnes();
  auto target = std::make_shared<Box>(lower, Vector::Constant(m + n, std::numeric_limits<double>::infinity()));

  GapConfig cfg;
  cfg.alphas = {1.9, 1.9};
  cfg.alpha = 0.85 / beta(cfg.alphas);
  const GapOperator op({graph, target}, cfg);

  SolveOptions opts;
  opts.stepper = StepperKind::Nominal;
  opts.max_iter = 5000;
  opts.record_history = false;
  const Criterion crit = feasibility_criterion({graph, target}, 1e-6);
  return solve(op, Vector::Zero(m + n), crit, opts).converged;
}

}  // namespace

FeasibilityInstance generate_instance(const ExperimentSpec& spec) {
  if (spec.m < 1 || spec.n < 1) throw ConfigError("instance: m and n must be positive");
  NormalSampler sampler(spec.seed);
  Matrix q = sampler.matrix(spec.m, spec.n);
  int draws = 1;
  while (!orthant_ray_free(q)) {
    if (++draws > 64) throw ConfigError("instance: no ray-free matrix found for this seed");
    q = sampler.matrix(spec.m, spec.n);
  }
  FeasibilityInstance inst;
  inst.p = Vector::Constant(spec.n, spec.p_scale);
  inst.affine = std::make_shared<AffineSubspace>(q, Vector(q * inst.p));
  inst.orthant = std::make_shared<NonnegativeOrthant>(spec.n);
  inst.x0 = sampler.vector(spec.n);
  inst.criterion = feasibility_criterion({inst.affine, inst.orthant}, spec.tol);
  return inst;
}

double outer_alpha(double alpha1, double alpha2) {
  if (alpha1 == 2.0 && alpha2 == 2.0) return 0.85;
  const std::array<double, 2> alphas{alpha1, alpha2};
  return 0.85 / beta(alphas);
}

RunRecord run_single(const FeasibilityInstance& inst, double alpha1, const ExperimentSpec& spec) {
  GapConfig cfg;
  cfg.alphas = {alpha1, alpha1};
  cfg.alpha = spec.alpha_override ? *spec.alpha_override : outer_alpha(alpha1, alpha1);
  const GapOperator op({inst.affine, inst.orthant}, cfg);

  SolveOptions opts;
  opts.stepper = spec.mode;
  opts.max_iter = spec.max_iter;
  opts.line_search = spec.line_search;
  opts.record_history = spec.record_history;

  const auto start = std::chrono::steady_clock::now();
  const SolveResult res = solve(op, inst.x0, inst.criterion, opts);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

  RunRecord rec;
  rec.alpha1 = alpha1;
  rec.alpha = cfg.alpha;
  rec.mode = to_string(spec.mode);
  rec.iterations = res.iterations;
  rec.converged = res.converged;
  rec.ls_triggered = res.stats.ls_triggered;
  rec.ls_accepted = res.stats.ls_accepted;
  rec.candidates_total = res.stats.candidates_evaluated;
  rec.final_residual = res.solution_merit;
  rec.wall_time_s = elapsed.count();
  return rec;
}

std::vector<double> default_alpha_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(1.0 + 0.05 * i);
  return grid;
}

namespace {

unsigned thread_cap() {
  unsigned cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("GAPS_NUM_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) cap = std::min<unsigned>(cap, static_cast<unsigned>(v));
  }
  return cap;
}

}  // namespace

std::vector<RunRecord> run_sweep(const ExperimentSpec& spec) {
  const FeasibilityInstance inst = generate_instance(spec);
  const std::vector<double> grid = spec.alpha_grid.empty() ? default_alpha_grid() : spec.alpha_grid;

  std::vector<RunRecord> records(grid.size());
  const unsigned nthreads = std::min<unsigned>(thread_cap(), static_cast<unsigned>(grid.size()));
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < grid.size(); ++i) records[i] = run_single(inst, grid[i], spec);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next.fetch_add(1); i < grid.size(); i = next.fetch_add(1)) {
        records[i] = run_single(inst, grid[i], spec);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
    return a.alpha1 != b.alpha1 ? a.alpha1 < b.alpha1 : a.mode < b.mode;
  });
  return records;
}

void emit_csv(const std::vector<RunRecord>& records, const std::filesystem::path& path) {
  if (records.empty()) throw IoError("emit_csv: no records to write");
  std::vector<RunRecord> sorted = records;
  std::sort(sorted.begin(), sorted.end(), [](const RunRecord& a, const RunRecord& b) {
    return a.alpha1 != b.alpha1 ? a.alpha1 < b.alpha1 : a.mode < b.mode;
  });
  std::ofstream out(path);
  if (!out) throw IoError("emit_csv: cannot write " + path.string());
  out << "alpha1,alpha,mode,iterations,converged,ls_triggered,ls_accepted,"
         "candidates_total,final_residual,wall_time_s\n";
  out << std::setprecision(17) << std::boolalpha;
  for (const RunRecord& r : sorted) {
    out << r.alpha1 << ',' << r.alpha << ',' << r.mode << ',' << r.iterations << ','
        << r.converged << ',' << r.ls_triggered << ',' << r.ls_accepted << ','
        << r.candidates_total << ',' << r.final_residual << ',' << r.wall_time_s << '\n';
  }
  if (!out) throw IoError("emit_csv: write failed for " + path.string());
}

}  // namespace gaps
