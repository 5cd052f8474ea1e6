#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nnls/constants.hpp"
#include "nnls/params.hpp"
#include "nnls/potential.hpp"
#include "nnls/radial.hpp"
#include "nnls/thresholds.hpp"

namespace nnls {

enum class Branch { LocalMin, MountainPass };

const char* to_string(Branch b);
Branch branch_from_string(const std::string& name);

struct SolverTolerances {
  double res_rel = 1e-8;    ///< converged when residual_norm ≤ res_rel·(1+∫|∇u|²)
  double mass_rel = 1e-10;
  double poh = 1e-6;
  int max_iterations = 200000;
  int path_points = 33;
  int string_max_iterations = 4000;
  double string_stall = 1e-7;
  int clip_every = 50;
  double tail_floor = 1e-8;  ///< admissible u(0.9R)/sup u at the whole-space stamp
};

struct Diagnostics {
  double sup_u = 0.0;
  double grad_norm_sq = 0.0;  ///< ∫|∇u|²
  double tail_rate = 0.0;
  double tail_quality = 0.0;
  std::vector<Bump> bumps;
};

struct SolveResult {
  RadialFunction u;
  double lambda = 0.0;
  double lambda_ls = 0.0;  ///< least-squares multiplier (consistency diagnostic)
  EnergyBreakdown energy;
  Branch branch = Branch::LocalMin;
  double s = 1.0;
  double r = 0.0;
  double residual_norm = 0.0;
  double pohozaev = 0.0;
  double energy_balance = 0.0;
  double boundary_flux = 0.0;  ///< Pohozaev boundary term magnitude
  double mass_error = 0.0;     ///< |mass - α|/α
  int iterations = 0;
  bool converged = false;
  bool whole_space = false;  ///< Pohozaev evaluated without the boundary term
  Diagnostics diag;
};

/// Discretized path on the mass sphere with pinned endpoints.
struct PathState {
  GridPtr grid;
  std::vector<RadialFunction> points;  ///< all of mass α
  std::vector<double> energies;
  double s = 1.0;
  Functional functional = Functional::QScaled;
  int max_index() const;
};

/// Orchestrates both solution branches on B_r plus the two limit processes
/// (s-homotopy and r-continuation).  Immutable after construction; each solve
/// is deterministic given its arguments.
class Solver {
 public:
  Solver(ValidatedParams params, RadialPotential V, const ConstantsTable& constants,
         SolverTolerances tol = {});

  const ValidatedParams& params() const { return params_; }
  const SolverTolerances& tolerances() const { return tol_; }
  const PotentialNorms& norms() const { return norms_; }

  /// Threshold report for the regime (computed once, cached).
  const ThresholdReport& thresholds(Regime regime) const;

  /// The dilated-eigenfunction starting point of the local-minimum branch.
  RadialFunction initial_guess_local(double r, int M) const;

  SolveResult solve_local_min(double r, int M,
                              const RadialFunction* warm_start = nullptr) const;

  PathState build_mp_endpoints_and_path(double r, int M, double s) const;

  /// String-method minimax followed by residual-norm refinement at the path
  /// maximum.  The functional is E_{r,s} (s on the q-term) for β ≤ 0 and the
  /// fully scaled functional for β > 0.
  SolveResult solve_mountain_pass(PathState& path) const;
  SolveResult solve_mountain_pass(double r, int M, double s = 1.0) const;

  /// Warm refinement from a given point (used by homotopy/continuation).
  SolveResult refine_saddle(const RadialFunction& start, double s) const;

  std::vector<SolveResult> s_homotopy(double r, int M, const std::vector<double>& s_grid) const;

  std::vector<SolveResult> continuation_in_r(const std::vector<double>& r_list, int M0,
                                             Branch branch) const;

  /// Stamps the largest-radius result as the whole-space approximation: the
  /// tail must be exponential and negligible at 0.9·r_max, and the Pohozaev
  /// identity is re-evaluated without the boundary term.
  SolveResult rn_limit_solve(const SolveResult& at_r_max) const;

  Functional mp_functional() const {
    return params_.beta() > 0.0 ? Functional::AllScaled : Functional::QScaled;
  }

 private:
  struct Work;  // per-grid scratch (potential samples etc.)

  Work make_work(GridPtr grid, Functional f, double s) const;
  SolveResult finalize(const Work& w, RadialFunction u, Branch branch, int iterations,
                       bool converged) const;
  const EigenResult& eigen_for(int M) const;
  void descend_energy(const Work& w, RadialFunction& u, int max_iters, double cap_grad_sq,
                      int* iterations, bool* hit_cap, double* out_residual) const;
  enum class PhiOutcome { Converged, Stalled, Budget };
  PhiOutcome phi_descent(const Work& w, RadialFunction& u, double cap_grad_sq, int max_iters,
                         int* iterations, double* out_residual) const;
  PhiOutcome newton_polish(const Work& w, RadialFunction& u, int max_iters, int* iterations,
                           double* out_residual) const;

  ValidatedParams params_;
  RadialPotential V_;
  const ConstantsTable& constants_;
  SolverTolerances tol_;
  PotentialNorms norms_;
  mutable std::map<int, EigenResult> eigen_cache_;
  mutable std::map<Regime, ThresholdReport> threshold_cache_;
};

}  // namespace nnls
