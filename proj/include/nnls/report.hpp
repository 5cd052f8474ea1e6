#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "nnls/config.hpp"
#include "nnls/solver.hpp"

namespace nnls {

/// One named verification with its measured value and the bound that decided
/// it.  Soft checks are the empirical-boundedness surrogates; everything tied
/// to an identity, a sign or a printed inequality is hard.
struct Check {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  std::string relation;  ///< "<=", "<", ">", ">=", "in", "=="
  bool pass = false;
  bool hard = true;
  nlohmann::ordered_json to_json() const;
};

struct RunReport {
  nlohmann::ordered_json config;
  nlohmann::ordered_json constants;
  nlohmann::ordered_json hypothesis;
  nlohmann::ordered_json thresholds;
  std::vector<nlohmann::ordered_json> results;
  std::vector<Check> checks;
  nlohmann::ordered_json environment;

  bool any_hard_failure() const;
  bool any_soft_failure() const;
  /// 0 all pass, 2 soft-only failures, 3 hard failure
  int exit_grade() const;
  nlohmann::ordered_json to_json() const;
};

/// Resolves alpha_factor configs against the computed thresholds and returns
/// the validated parameter set.
ValidatedParams resolve_alpha(const ExperimentConfig& cfg, const ConstantsTable& constants,
                              const PotentialNorms& norms);

ConstantsTable constants_for(const ExperimentConfig& cfg);

nlohmann::ordered_json constants_to_json(const ConstantsTable& table);
nlohmann::ordered_json thresholds_to_json(const ThresholdReport& rep);
nlohmann::ordered_json hypothesis_to_json(const HypothesisReport& rep);
nlohmann::ordered_json solve_result_to_json(const SolveResult& res, const ValidatedParams& params,
                                            const ExperimentConfig& cfg, bool embed_profile);

/// Named identity/sign checks for a solve result, tolerances pinned from the
/// config.
std::vector<Check> checks_for_solve(const SolveResult& res, const ValidatedParams& params,
                                    const ThresholdReport& thr, const SolverTolerances& tol);

/// CSV row block for sweeps (schema documented in the README; one row per
/// solve, bit-stable formatting).
std::string sweep_csv_header();
std::string sweep_csv_row(const SolveResult& res, const ValidatedParams& params);

// --- operation drivers (each returns a complete report) ---

RunReport run_thresholds(const ExperimentConfig& cfg);
RunReport run_solve(const ExperimentConfig& cfg, bool embed_profile = true);
RunReport run_sweep(const ExperimentConfig& cfg, std::string* csv_out);
RunReport run_homotopy(const ExperimentConfig& cfg);
/// Re-runs every identity check on a stored result JSON.
RunReport run_verify(const nlohmann::json& stored_result);
/// thresholds → hypothesis checks → solve or sweep → verification
RunReport run_experiment(const ExperimentConfig& cfg, std::string* csv_out = nullptr);

}  // namespace nnls
