#pragma once

#include <string>
#include <vector>

#include "nnls/grid.hpp"
#include "nnls/params.hpp"
#include "nnls/potential.hpp"

namespace nnls {

/// Which energy functional is active.  `Full` is the unperturbed functional,
/// `QScaled` carries the homotopy weight s on the q-term only, `AllScaled`
/// carries it on both nonlinear terms.
enum class Functional { Full, QScaled, AllScaled };

const char* to_string(Functional f);

/// Homotopy weight applied to the q-term / p-term for a given functional.
inline double q_weight(Functional f, double s) { return f == Functional::Full ? 1.0 : s; }
inline double p_weight(Functional f, double s) { return f == Functional::AllScaled ? s : 1.0; }

struct EnergyBreakdown {
  double kinetic = 0.0;    ///< ½ ∫|∇u|²
  double potential = 0.0;  ///< ½ ∫V u²
  double p_term = 0.0;     ///< (β/p) ∫|u|^p
  double q_term = 0.0;     ///< (1/q) ∫|u|^q
  double s = 1.0;
  double wq = 1.0;         ///< homotopy weight multiplying q_term
  double wp = 1.0;         ///< homotopy weight multiplying p_term
  double total = 0.0;      ///< kinetic + potential - wq*q_term - wp*p_term
};

/// ∫ u² dx
double mass(const RadialFunction& u);

/// ∫ |∇u|² dx as the cell-difference Dirichlet form a(u,u).  This is the
/// value paired exactly with the discrete Laplacian: <-Δu, v> = a(u,v).
double kinetic(const RadialFunction& u);

/// ∫ |∇u|² dx through the independent route: centered differences for u' at
/// the nodes (u'(0)=0 by symmetry, one-sided 3-point at s=R) integrated with
/// the node quadrature.  Differs from kinetic() at the discretization order;
/// the energy-balance verifier feeds on the mismatch.
double kinetic_nodal(const RadialFunction& u);

/// ∫ |u|^s dx  (the s-th power of the L^s norm)
double lp_integral(const RadialFunction& u, double s);

double sup_norm(const RadialFunction& u);

/// Nodal derivative used by diagnostics: centered in the interior, u'(0)=0,
/// one-sided 3-point at s=R.
std::vector<double> nodal_derivative(const RadialFunction& u);

/// One-sided 3-point u'(R).
double boundary_derivative(const RadialFunction& u);

/// (-Δ_h u) defined through the gradient pairing: <-Δ_h u, v>_w = a(u,v) for
/// all Dirichlet grid functions, exactly.
std::vector<double> neg_laplacian(const RadialFunction& u);

/// Potential samples on a grid (value and Ṽ = s·V').
struct PotentialOnGrid {
  std::vector<double> v;
  std::vector<double> vtilde;
  static PotentialOnGrid sample(const RadialPotential& V, const RadialGrid& grid);
};

EnergyBreakdown energy(const RadialFunction& u, Functional f, double s,
                       const PotentialOnGrid& V, const ValidatedParams& params);

struct MultiplierResult {
  std::vector<double> field;  ///< residual field -Δu + Vu + λu - nonlinearity
  double lambda = 0.0;
  double residual_norm = 0.0;  ///< quadrature L² norm of the field
};

/// Lagrange multiplier from
///   λ = -(1/mass)(∫|∇u|² + ∫Vu² - wp·β∫|u|^p - wq·∫|u|^q)
/// and the discretized residual field of the stationarity equation.
MultiplierResult residual_and_multiplier(const RadialFunction& u, Functional f, double s,
                                         const PotentialOnGrid& V, const ValidatedParams& params);

/// Least-squares multiplier: the λ minimizing ‖-Δu+Vu+λu-nonlinearity‖₂.
double least_squares_multiplier(const RadialFunction& u, Functional f, double s,
                                const PotentialOnGrid& V, const ValidatedParams& params);

/// |Pohozaev defect| on the ball B_R:
///   (N-2)/(2N)∫|∇u|² + (1/2N) σ_{N-1} R^N |u'(R)|² + (1/2N)∫Ṽu² + ½∫Vu²
///   + (λ/2)∫u² - (wq/q)∫|u|^q - (wp β/p)∫|u|^p.
/// With include_boundary = false this is the whole-space version (valid once
/// the tail is negligible).
double pohozaev_residual(const RadialFunction& u, double lambda, Functional f, double s,
                         const PotentialOnGrid& V, const ValidatedParams& params,
                         bool include_boundary = true);

/// |∫|∇u|² + ∫Vu² + λ∫u² - wp·β∫|u|^p - wq·∫|u|^q| with the kinetic term on
/// the independent nodal route, so the value measures discretization defect
/// rather than reproducing the multiplier formula.
double energy_balance_residual(const RadialFunction& u, double lambda, Functional f, double s,
                               const PotentialOnGrid& V, const ValidatedParams& params);

struct TailFit {
  double rate = 0.0;     ///< least-squares slope of log u over the window
  double quality = 0.0;  ///< R² of the fit
  int points = 0;
  bool exponential() const { return rate < 0.0 && quality > 0.99; }
};

/// Fits log u(s) = a + rate·s on the window [0.6R, 0.9R].  Throws
/// WindowDegenerate when fewer than 8 window nodes carry values above the
/// floating floor.
TailFit tail_decay_fit(const RadialFunction& u);

struct Bump {
  double location = 0.0;
  double height = 0.0;
  double dist_to_boundary = 0.0;
};

/// Local maxima of u above `threshold`, with s=0 counted when u(0) tops its
/// neighbor.  Used to detect mass drifting toward |x| = R.
std::vector<Bump> bump_tracker(const RadialFunction& u, double threshold);

/// Dilation v_t(x) = t^{N/2} u(t x) realized by grid remapping: same node
/// count, radius R/t, values scaled.  Mass is preserved exactly and the
/// Dirichlet form scales by exactly t².
RadialFunction dilate(const RadialFunction& u, double t);

/// Cubic-Hermite (monotone) interpolation of u onto another grid; values
/// outside the source radius are zero.
RadialFunction resample(const RadialFunction& u, GridPtr target);

/// u rescaled to mass exactly `target_mass`.
void rescale_mass(RadialFunction& u, double target_mass);

/// ‖u - v‖_{H¹}² = ∫|∇(u-v)|² + ∫(u-v)² for functions on the same grid.
double h1_distance_sq(const RadialFunction& u, const RadialFunction& v);

/// Profile round-trip formats: CSV (columns s,u) and a small binary format
/// with grid metadata header (R, M, N) for warm starts.
void write_profile_csv(const RadialFunction& u, const std::string& path);
void write_profile_bin(const RadialFunction& u, const std::string& path);
RadialFunction read_profile_bin(const std::string& path);

}  // namespace nnls
