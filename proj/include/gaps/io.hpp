#pragma once

#include <filesystem>
#include <memory>

#include "gaps/cone.hpp"
#include "gaps/sets.hpp"

namespace gaps {

/// Two-set feasibility problem read from disk: find z with
/// A (z - offset) = rhs and z in the product of the named sets.
struct FeasibilityProblem {
  std::shared_ptr<const AffineSubspace> affine;  ///< folded to {z : A z = rhs + A offset}
  SetPtr second;
  Index n = 0;
};

/// Cone program file (JSON):
///   {"m":..,"n":..,"A":[[row,col,value],..],"b":[..],"c":[..],
///    "cones":[{"type":"zero"|"nonneg"|"soc","dim":..},..]}
/// Unknown cone types are rejected.
ConeProgram read_cone_program(const std::filesystem::path& path);
void write_cone_program(const std::filesystem::path& path, const ConeProgram& p);

/// Feasibility problem file (JSON):
///   {"n":..,
///    "affine":{"m":..,"A":[[row,col,value],..],"rhs":[..],"offset":[..]},
///    "sets":[{"type":"free"|"zero"|"nonneg"|"soc","dim":..} |
///            {"type":"box","dim":..,"lower":[..],"upper":[..]},..]}
FeasibilityProblem read_feasibility_problem(const std::filesystem::path& path);

/// Writes the embedding of a cone program as a feasibility problem file
/// (offset zero, sets free(n) x K x K*).
void write_embedded_feasibility(const std::filesystem::path& path, const EmbeddedFeasibility& e);

/// True when the JSON file at path holds a cone program (has a "cones"
/// field) rather than a feasibility problem.
bool is_cone_program_file(const std::filesystem::path& path);

}  // namespace gaps
