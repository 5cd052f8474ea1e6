#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nnls/grid.hpp"

namespace nnls {

struct Provenance {
  std::string method;
  std::string resolution;
  double error_estimate = 0.0;
};

struct Tolerances {
  double quad_rel = 1e-9;
  double shoot_residual = 1e-10;
  double eigen_rel = 1e-10;
  bool operator==(const Tolerances&) const = default;
};

struct GnConstant {
  double value = 0.0;
  double shooting_a = 0.0;        ///< ground-state height Q(0)
  double shooting_residual = 0.0; ///< |Q| at the truncation radius
  double decay_radius = 0.0;
  double l2 = 0.0;                ///< ∫Q² dx
  double kinetic = 0.0;           ///< ∫|∇Q|² dx
  double ls = 0.0;                ///< ∫Q^s dx
  std::vector<double> sample_s;   ///< integration nodes of the final shot
  std::vector<double> sample_q;
  Provenance prov;
};

struct EigenResult {
  double theta = 0.0;   ///< principal Dirichlet eigenvalue on B_1
  RadialFunction v1;    ///< eigenfunction, ∫v1² = 1, positive
  double error_estimate = 0.0;
};

/// Best constant S of D^{1,2} ↪ L^{2*} as the quotient ‖∇U‖₂²/‖U‖_{2*}² on
/// the bubble U(s) = (1+s²)^{-(N-2)/2}, by radial quadrature on [0,R] with
/// asymptotic tail correction, refined until two resolutions agree to
/// quad_rel.  Throws QuadratureNotConverged otherwise.
double aubin_talenti(int N, const Tolerances& tol, Provenance* prov = nullptr);

/// The same quotient evaluated on the rescaled bubble U(λ·); used by tests of
/// the exact scale invariance.
double aubin_talenti_rescaled(int N, double lambda, int M);

/// Best Gagliardo-Nirenberg constant
///   C_{N,s} = ‖Q‖_s^s / (‖Q‖₂^{(2s-N(s-2))/2} ‖∇Q‖₂^{N(s-2)/2})
/// on the ground state of -ΔQ + Q = Q^{s-1}, computed by adaptive shooting
/// with quadrature carried along the integration.
GnConstant gn_best_constant(int N, double s, const Tolerances& tol,
                            double max_step = 0.25);

/// Principal Dirichlet eigenpair of -Δ on the unit ball at one resolution
/// (inverse iteration on the discrete operator).
EigenResult ball_eigen_single(int N, int M, const Tolerances& tol);

/// Richardson-extrapolated eigenvalue over grids M and 2M; the eigenfunction
/// is returned at resolution 2M.
EigenResult ball_principal_eigenvalue(int N, const Tolerances& tol, int M = 2048,
                                      Provenance* prov = nullptr);

/// One-shot table of all analysis constants consumed by the thresholds.
class ConstantsTable {
 public:
  ConstantsTable() = default;

  int N() const { return N_; }
  double S() const { return S_; }
  double theta1() const { return eigen_.theta; }
  const RadialFunction& eigenfunction() const { return eigen_.v1; }
  const Tolerances& tolerances() const { return tol_; }

  bool has_gn(double s) const;
  const GnConstant& gn(double s) const;          ///< throws if s was not computed
  double C(double s) const { return gn(s).value; }

  const Provenance& S_provenance() const { return S_prov_; }
  const Provenance& theta_provenance() const { return theta_prov_; }
  const std::map<double, GnConstant>& gn_entries() const { return gn_; }

  nlohmann::json to_json() const;
  static ConstantsTable from_json(const nlohmann::json& j);

 private:
  friend ConstantsTable compute_constants(int N, const std::vector<double>& s_exponents,
                                          const Tolerances& tol,
                                          const std::optional<std::string>& cache_dir);
  int N_ = 0;
  double S_ = 0.0;
  Provenance S_prov_;
  EigenResult eigen_;
  Provenance theta_prov_;
  std::map<double, GnConstant> gn_;
  Tolerances tol_;
};

/// Builds (or loads from `cache_dir`/constants.json, keyed by N, s and the
/// tolerance triple) the table with S, θ₁ and C_{N,s} for each requested s.
ConstantsTable compute_constants(int N, const std::vector<double>& s_exponents,
                                 const Tolerances& tol = {},
                                 const std::optional<std::string>& cache_dir = std::nullopt);

}  // namespace nnls
