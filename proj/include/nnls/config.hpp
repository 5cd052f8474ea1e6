#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nnls/constants.hpp"
#include "nnls/params.hpp"
#include "nnls/potential.hpp"
#include "nnls/solver.hpp"

namespace nnls {

/// Declarative experiment description.  One JSON file drives thresholds,
/// solves, sweeps and verification; every defaulted knob is echoed back into
/// reports so runs are reproducible from the report alone.
struct ExperimentConfig {
  ProblemParams params;                  ///< alpha here only when given directly
  std::optional<double> alpha_factor;    ///< alpha = factor * alpha_ref threshold
  std::string alpha_ref = "alpha_V";     ///< alpha_V | alpha_tilde_V
  nlohmann::json potential_spec = {{"kind", "zero"}};

  Branch branch = Branch::LocalMin;
  int M = 2048;
  std::optional<double> r_abs;
  double r_factor = 2.0;  ///< r = r_factor * r_alpha when r_abs is absent
  double s = 1.0;

  SolverTolerances solver_tol;
  Tolerances constants_tol;

  std::vector<double> sweep_r_factors;  ///< multiples of r_alpha
  std::vector<double> sweep_alphas;     ///< absolute masses
  std::vector<double> s_grid;
  struct AlphaBisect {
    double lo = 0.0, hi = 0.0;
    int steps = 0;
  };
  std::optional<AlphaBisect> alpha_bisect;

  std::string output_dir = ".";
  std::optional<std::string> constants_cache;

  static ExperimentConfig parse(const nlohmann::json& j);
  static ExperimentConfig parse_file(const std::string& path);

  RadialPotential potential() const { return RadialPotential::from_json(potential_spec); }

  /// Full configuration with every default filled in.
  nlohmann::ordered_json echo() const;
};

/// "a:b:n" → n geometrically spaced values from a to b.
std::vector<double> parse_geometric_axis(const std::string& spec);
/// "a:b:n" → n linearly spaced values from a to b.
std::vector<double> parse_linear_axis(const std::string& spec);

}  // namespace nnls
