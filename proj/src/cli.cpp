#include "gaps/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gaps/bench.hpp"
#include "gaps/cone.hpp"
#include "gaps/gap.hpp"
#include "gaps/io.hpp"
#include "gaps/solver.hpp"

namespace gaps {

namespace {

constexpr int kExitUnconverged = 2;
constexpr int kExitInvalid = 1;

struct CommonFlags {
  double alpha1 = 1.95;
  double alpha2 = 1.95;
  std::optional<double> alpha;
  StepperKind mode = StepperKind::ProjectedLineSearch;
  double tol = 1e-10;
  long max_iter = 10'000'000;
  LineSearchConfig ls;
  std::optional<std::uint64_t> seed;
};

void add_config_flags(CLI::App& cmd, CommonFlags& f, bool with_alphas) {
  static const std::map<std::string, StepperKind> modes{
      {"none", StepperKind::Nominal},
      {"basic", StepperKind::BasicLineSearch},
      {"projected", StepperKind::ProjectedLineSearch}};
  static const std::map<std::string, SearchStrategy> strategies{
      {"forward", SearchStrategy::ForwardTracking},
      {"golden", SearchStrategy::GoldenSection}};
  cmd.add_option("--mode", f.mode, "Stepper: none, basic, or projected")
      ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));
  if (with_alphas) {
    cmd.add_option("--alpha1", f.alpha1, "Relaxation of the first set's projection");
    cmd.add_option("--alpha2", f.alpha2, "Relaxation of the second set's projection");
  }
  cmd.add_option("--alpha", f.alpha, "Outer step length (default 0.85/beta)");
  cmd.add_option("--eps", f.ls.epsilon, "Required relative residual decrease")->check(CLI::Range(0.0, 1.0));
  cmd.add_option("--alpha-max", f.ls.alpha_max, "Largest step the search may take");
  cmd.add_option("--trigger-tol", f.ls.trigger_tol, "Cosine slack in the search trigger");
  cmd.add_option("--tol", f.tol, "Termination tolerance");
  cmd.add_option("--max-iter", f.max_iter, "Iteration cap");
  cmd.add_option("--strategy", f.ls.strategy, "Step search: forward or golden")
      ->transform(CLI::CheckedTransformer(strategies, CLI::ignore_case));
  cmd.add_option("--seed", f.seed, "Seed for generated data");
}

GapConfig make_config(const CommonFlags& f) {
  GapConfig cfg;
  cfg.alphas = {f.alpha1, f.alpha2};
  cfg.alpha = f.alpha ? *f.alpha : outer_alpha(f.alpha1, f.alpha2);
  return cfg;
}

void print_result(const SolveResult& res) {
  std::cout << "converged:  " << (res.converged ? "yes" : "no") << "\n"
            << "iterations: " << res.iterations << "\n"
            << "monitor:    " << res.monitor << "\n"
            << "residual:   " << res.solution_merit << "\n";
  if (res.stats.ls_triggered > 0) {
    std::cout << "line search: " << res.stats.ls_accepted << " accepted / "
              << res.stats.ls_triggered << " triggered, " << res.stats.candidates_evaluated
              << " candidates\n";
  }
}

void write_solution(const std::filesystem::path& path, const Vector& z,
                    const PrimalDualSolution* pd) {
  nlohmann::json doc;
  auto dump = [](const Vector& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
  };
  doc["z"] = dump(z);
  if (pd) {
    doc["x"] = dump(pd->x);
    doc["s"] = dump(pd->s);
    doc["y"] = dump(pd->y);
    doc["objective"] = pd->objective;
    doc["objective_gap"] = pd->objective_gap;
    doc["primal_residual"] = pd->primal_residual;
    doc["dual_residual"] = pd->dual_residual;
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << doc.dump(2) << "\n";
}

int cmd_solve(const std::string& file, const CommonFlags& f, const std::string& out_path) {
  std::shared_ptr<const AffineSubspace> affine;
  SetPtr second;
  std::optional<EmbeddedFeasibility> embedded;

  if (is_cone_program_file(file)) {
    embedded = embed(read_cone_program(file));
    affine = embedded->affine;
    second = embedded->coneset;
  } else {
    const FeasibilityProblem fp = read_feasibility_problem(file);
    affine = fp.affine;
    second = fp.second;
  }

  const GapOperator op({affine, second}, make_config(f));
  const Criterion crit = feasibility_criterion({affine, second}, f.tol);
  Vector x0 = Vector::Zero(affine->dim());
  if (f.seed) x0 = NormalSampler(*f.seed).vector(affine->dim());

  SolveOptions opts;
  opts.stepper = f.mode;
  opts.max_iter = f.max_iter;
  opts.line_search = f.ls;
  opts.record_history = false;

  const SolveResult res = solve(op, x0, crit, opts);
  print_result(res);

  std::optional<PrimalDualSolution> pd;
  if (embedded) {
    pd = recover(*embedded, res.solution);
    std::cout << "objective:  " << pd->objective << "\n"
              << "gap:        " << pd->objective_gap << "\n"
              << "primal res: " << pd->primal_residual << "\n"
              << "dual res:   " << pd->dual_residual << "\n";
  }
  if (!out_path.empty()) write_solution(out_path, res.solution, pd ? &*pd : nullptr);
  return res.converged ? 0 : kExitUnconverged;
}

int cmd_sweep(const CommonFlags& f, const ExperimentSpec& base, const std::vector<double>& grid,
              const std::string& out_path) {
  ExperimentSpec spec = base;
  spec.mode = f.mode;
  spec.tol = f.tol;
  spec.max_iter = f.max_iter;
  spec.line_search = f.ls;
  spec.alpha_override = f.alpha;
  if (f.seed) spec.seed = *f.seed;
  if (!grid.empty()) spec.alpha_grid = grid;

  const std::vector<RunRecord> records = run_sweep(spec);
  emit_csv(records, out_path);
  long failures = 0;
  for (const auto& r : records) {
    if (!r.converged) ++failures;
  }
  std::cout << "wrote " << records.size() << " runs to " << out_path;
  if (failures > 0) std::cout << " (" << failures << " hit the iteration cap)";
  std::cout << "\n";
  return 0;
}

int cmd_embed(const std::string& file, const std::string& out_path) {
  const EmbeddedFeasibility e = embed(read_cone_program(file));
  write_embedded_feasibility(out_path, e);
  std::cout << "wrote " << out_path << " (" << e.affine->rows() << " equations, "
            << e.affine->dim() << " variables)\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Alternating relaxed projections for convex feasibility and cone programs"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string in_file, out_path;

  CLI::App* solve_cmd = app.add_subcommand("solve", "Solve a feasibility or cone-program file");
  solve_cmd->add_option("file", in_file, "Problem file (JSON)")->required()->check(CLI::ExistingFile);
  add_config_flags(*solve_cmd, flags, /*with_alphas=*/true);
  solve_cmd->add_option("--out", out_path, "Write the solution to this file");

  ExperimentSpec base;
  std::vector<double> grid;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Sweep alpha1=alpha2 on a random instance");
  add_config_flags(*sweep_cmd, flags, /*with_alphas=*/false);
  sweep_cmd->add_option("--m", base.m, "Equation count")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--n", base.n, "Variable count")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--p-scale", base.p_scale, "Scale of the interior shift");
  sweep_cmd->add_option("--grid", grid, "Relaxation values (default 1.0 to 2.0 step 0.05)")
      ->delimiter(',');
  sweep_cmd->add_option("--out", out_path, "CSV output path")->required();

  CLI::App* embed_cmd = app.add_subcommand("embed", "Embed a cone program as a feasibility file");
  embed_cmd->add_option("file", in_file, "Cone program file (JSON)")->required()->check(CLI::ExistingFile);
  embed_cmd->add_option("--out", out_path, "Feasibility output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (solve_cmd->parsed()) return cmd_solve(in_file, flags, out_path);
    if (sweep_cmd->parsed()) return cmd_sweep(flags, base, grid, out_path);
    return cmd_embed(in_file, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
}

}  // namespace gaps
