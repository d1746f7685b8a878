#include "gaps/gap.hpp"

#include <cmath>
#include <sstream>

namespace gaps {

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::AveragedComposition: return "averaged-composition";
    case Regime::NonexpansiveComposition: return "nonexpansive-composition";
    case Regime::DouglasRachford: return "douglas-rachford";
  }
  return "?";
}

double beta(std::span<const double> alphas) {
  if (alphas.empty()) throw ConfigError("beta: needs at least one relaxation");
  double sum = 0.0;
  for (double a : alphas) {
    if (!(a > 0.0) || !(a < 2.0)) {
      throw ConfigError("beta: undefined unless every relaxation lies strictly inside (0, 2)");
    }
    sum += a / (2.0 - a);
  }
  return sum / (1.0 + sum);
}

namespace {

// Appends the bounds of `cfg` violated by each regime; empty result means the
// regime holds.
std::string check_averaged_composition(const GapConfig& cfg) {
  std::ostringstream out;
  bool inner_ok = true;
  for (std::size_t i = 0; i < cfg.alphas.size(); ++i) {
    if (!(cfg.alphas[i] > 0.0) || !(cfg.alphas[i] < 2.0)) {
      out << " alphas[" << i << "]=" << cfg.alphas[i] << " not in (0,2);";
      inner_ok = false;
    }
  }
  if (inner_ok) {
    const double b = beta(cfg.alphas);
    if (!(cfg.alpha > 0.0) || !(cfg.alpha < 1.0 / b)) {
      out << " alpha=" << cfg.alpha << " not in (0," << 1.0 / b << ");";
    }
  }
  return out.str();
}

std::string check_nonexpansive_composition(const GapConfig& cfg) {
  std::ostringstream out;
  if (!(cfg.alpha > 0.0) || !(cfg.alpha < 1.0)) {
    out << " alpha=" << cfg.alpha << " not in (0,1);";
  }
  int reflections = 0;
  for (std::size_t i = 0; i < cfg.alphas.size(); ++i) {
    if (!(cfg.alphas[i] > 0.0) || !(cfg.alphas[i] <= 2.0)) {
      out << " alphas[" << i << "]=" << cfg.alphas[i] << " not in (0,2];";
    } else if (cfg.alphas[i] == 2.0) {
      ++reflections;
    }
  }
  if (reflections > 1) out << " more than one relaxation equals 2;";
  return out.str();
}

std::string check_douglas_rachford(const GapConfig& cfg) {
  std::ostringstream out;
  if (!(cfg.alpha > 0.0) || !(cfg.alpha < 1.0)) {
    out << " alpha=" << cfg.alpha << " not in (0,1);";
  }
  if (cfg.alphas.size() != 2) {
    out << " needs exactly two sets;";
  } else if (cfg.alphas[0] != 2.0 || cfg.alphas[1] != 2.0) {
    out << " both relaxations must equal 2;";
  }
  return out.str();
}

}  // namespace

Regime validate(const GapConfig& cfg) {
  if (cfg.alphas.empty()) throw ConfigError("config: needs at least one relaxation");
  for (double a : cfg.alphas) {
    if (!std::isfinite(a)) throw ConfigError("config: relaxations must be finite");
  }
  if (!std::isfinite(cfg.alpha)) throw ConfigError("config: alpha must be finite");

  const std::string v1 = check_averaged_composition(cfg);
  if (v1.empty()) return Regime::AveragedComposition;
  const std::string v2 = check_nonexpansive_composition(cfg);
  if (v2.empty()) return Regime::NonexpansiveComposition;
  const std::string v3 = check_douglas_rachford(cfg);
  if (v3.empty()) return Regime::DouglasRachford;

  throw ConfigError("no admissible relaxation regime: averaged-composition:" + v1 +
                    " nonexpansive-composition:" + v2 + " douglas-rachford:" + v3);
}

double averagedness_constant(const GapConfig& cfg) {
  const Regime regime = validate(cfg);
  if (regime == Regime::AveragedComposition) return cfg.alpha * beta(cfg.alphas);
  return cfg.alpha;
}

GapOperator::GapOperator(std::vector<SetPtr> sets, GapConfig cfg) : config_(std::move(cfg)) {
  if (sets.empty()) throw ConfigError("operator: needs at least one set");
  if (sets.size() != config_.alphas.size()) {
    throw ConfigError("operator: one relaxation per set required (alphas[0] pairs with the set applied first)");
  }
  regime_ = validate(config_);
  dim_ = sets[0]->dim();
  stages_.reserve(sets.size());
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (sets[i]->dim() != dim_) throw DimensionError("operator: sets live in different dimensions");
    stages_.emplace_back(std::move(sets[i]), config_.alphas[i]);
  }
}

Vector GapOperator::apply_composition(const Vector& x) const {
  Vector y = x;
  for (const auto& stage : stages_) y = stage.apply(y);
  return y;
}

Vector GapOperator::apply_composition(const Vector& x, std::vector<Vector>& stage_outputs) const {
  stage_outputs.clear();
  stage_outputs.reserve(stages_.size());
  Vector y = x;
  for (const auto& stage : stages_) {
    y = stage.apply(y);
    stage_outputs.push_back(y);
  }
  return y;
}

TStep GapOperator::apply(const Vector& x) const {
  if (x.size() != dim_) throw DimensionError("operator: iterate dimension mismatch");
  TStep step;
  step.residual = apply_composition(x) - x;
  step.next = x + config_.alpha * step.residual;
  return step;
}

std::vector<std::pair<std::string, Vector>> GapOperator::monitored_candidates(const Vector& x) const {
  if (x.size() != dim_) throw DimensionError("operator: iterate dimension mismatch");
  std::vector<Vector> outputs;
  apply_composition(x, outputs);
  // Recover the exact first projection from the relaxed stage output.
  Vector first = x + (outputs[0] - x) / stages_[0].relaxation();
  Vector chain = first;
  for (std::size_t i = 1; i < stages_.size(); ++i) chain = stages_[i].set()->project(chain);
  return {{"first_set", std::move(first)}, {"projection_chain", std::move(chain)}};
}

}  // namespace gaps
