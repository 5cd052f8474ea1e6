#pragma once

#include <functional>
#include <utility>
#include <limits>

#include "nnls/constants.hpp"
#include "nnls/params.hpp"
#include "nnls/potential.hpp"

namespace nnls {

/// Domain data of the reference domain Ω (the unit ball): the principal
/// Dirichlet eigenvalue θ and the volume |Ω|.
struct OmegaData {
  double theta = 0.0;
  double volume = 0.0;
  static OmegaData unit_ball(const ConstantsTable& constants);
};

/// Scalar inputs shared by all threshold formulas.
struct ThresholdInputs {
  double nu_minus = 0.0;  ///< ‖V₋‖_{N/2}·S^{-1}
  double nu_full = 0.0;   ///< ‖V‖_{N/2}·S^{-1}
  double Cp = 0.0;        ///< C_{N,p}
  double Cq = 0.0;        ///< C_{N,q}
  double theta = 0.0;
  double volume = 0.0;
  double v_inf = 0.0;
  double vtilde_inf = 0.0;
};

ThresholdInputs make_inputs(const ValidatedParams& params, const PotentialNorms& norms,
                            const ConstantsTable& constants, const OmegaData& omega);

/// Admissible-mass threshold of the β>0 local-minimum branch.  Requires
/// β > 0 and ‖V₋‖_{N/2} < S.
double alpha_V(const ValidatedParams& params, const ThresholdInputs& in);

/// Admissible-mass threshold of the β>0 mountain-pass branch; also exposes
/// the exponent aggregate A_pq and A = (C_{N,q}/q)(A_pq + 1).
struct AlphaTilde {
  double value = 0.0;
  double A_pq = 0.0;
  double A = 0.0;
};
AlphaTilde alpha_tilde_V(const ValidatedParams& params, const ThresholdInputs& in);

/// Callable bundle of the geometry functions.  Argument conventions:
///   h_mp(t)    — t is the dilation scale of v_t (mountain-pass upper bound)
///   h_loc(t)   — t = ‖∇u‖₂ (β>0 local-minimum geometry)
///   phi(t)     — t = ‖∇u‖₂
///   f_lower(T) — T = ∫|∇u|² (mountain-pass lower bound function)
///   g(T)       — T = ∫|∇u|², the simplified minorant of f on [t₂,∞)
struct GeometryBundle {
  Regime regime;
  std::function<double(double)> h_mp;
  std::function<double(double)> h_loc;
  std::function<double(double)> phi;
  std::function<double(double)> f_lower;
  std::function<double(double)> g;
};

GeometryBundle geometry_functions(const ValidatedParams& params, const ThresholdInputs& in,
                                  Regime regime);

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

/// Distinguished abscissae and levels of the geometry.  Fields that do not
/// exist in the active regime stay NaN.
struct GeometryPoints {
  double T_alpha_level = kUnset;   ///< max of h_mp (an energy level)
  double T_alpha_radius = kUnset;  ///< argmax of h_loc (a ‖∇u‖₂ scale)
  double R1 = kUnset, R2 = kUnset; ///< roots of h_loc around T_alpha_radius
  double t0 = kUnset;              ///< positive root of h_mp
  double t1 = kUnset;              ///< first crossing of h_mp with the MP lower bound
  double t_bar = kUnset;           ///< maximizer of phi
  double t_g = kUnset;             ///< maximizer of g
  double t2 = kUnset;              ///< inflection threshold of f (f''<=0 iff t>=t2)
  double t_alpha = kUnset;         ///< maximizer of h_mp (β>0 MP, closed form)
  double t_tilde = kUnset;         ///< maximizer of f (β≤0, closed form)
  double mp_lower = kUnset;
  double mp_upper = kUnset;
};

GeometryPoints critical_points_of_geometry(const GeometryBundle& bundle,
                                           const ValidatedParams& params,
                                           const ThresholdInputs& in);

/// Minimal admissible domain scale for the active regime.
double r_alpha(const ValidatedParams& params, const ThresholdInputs& in, Regime regime,
               const GeometryPoints& pts);

/// Mountain-pass energy sandwich (lower, upper) for the active MP regime.
std::pair<double, double> energy_sandwich(Regime regime, const GeometryPoints& pts);

/// The uniform kinetic bound for β ≤ 0 solutions:
///   4N/(N(q-2)-4)·((q-2)/2·T + α(‖Ṽ‖_∞/(2N) + (q-2)/4·‖V‖_∞)).
double h1_apriori_bound(const ValidatedParams& params, const ThresholdInputs& in,
                        double T_alpha_level);

struct ThresholdReport {
  Regime regime = Regime::BetaPositiveLocalMin;
  double alpha_V = kUnset;
  double alpha_tilde_V = kUnset;
  double A_pq = kUnset;
  double A = kUnset;
  GeometryPoints points;
  double mp_lower = kUnset;
  double mp_upper = kUnset;
  double r_alpha = kUnset;
  double h1_apriori = kUnset;
  ThresholdInputs inputs;
};

/// Evaluates everything defined in the given regime.  Throws RegimeMismatch
/// or HypothesisViolated when preconditions fail.
ThresholdReport compute_thresholds(const ValidatedParams& params, const PotentialNorms& norms,
                                   const ConstantsTable& constants, Regime regime);

/// Regime implied by the branch request; rejects a local-minimum request with
/// β ≤ 0.  The α admissibility gates live in compute_thresholds.
Regime resolve_regime(const ValidatedParams& params, bool mountain_pass);

}  // namespace nnls
