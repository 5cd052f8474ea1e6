#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace nnls {

class RadialGrid;
class ConstantsTable;

enum class PotentialKind { Zero, PowerDecay, Custom };

/// Radial potential V(|x|) with its radial derivative and Ṽ(s) = s·V'(s)
/// (the radial form of ∇V·x).  PowerDecay is V(s) = -c/(1+s^τ); Custom is a
/// table interpolated by a monotone cubic (derivative from the interpolant).
class RadialPotential {
 public:
  static RadialPotential zero();
  static RadialPotential power_decay(double c, double tau);
  static RadialPotential custom(std::vector<double> radii, std::vector<double> values);
  static RadialPotential from_json(const nlohmann::json& spec);
  nlohmann::json to_json() const;

  PotentialKind kind() const { return kind_; }
  bool is_zero() const { return kind_ == PotentialKind::Zero; }
  double c() const { return c_; }
  double tau() const { return tau_; }

  double value(double s) const;
  double deriv(double s) const;
  double vtilde(double s) const { return s * deriv(s); }

 private:
  RadialPotential() = default;
  PotentialKind kind_ = PotentialKind::Zero;
  double c_ = 0.0;
  double tau_ = 0.0;
  // custom table (monotone cubic: Fritsch-Carlson slopes)
  std::vector<double> radii_;
  std::vector<double> values_;
  std::vector<double> slopes_;
};

/// The five norms every hypothesis and threshold formula needs.
struct PotentialNorms {
  double vminus_n2 = 0.0;       ///< ‖V₋‖_{N/2}
  double v_n2 = 0.0;            ///< ‖V‖_{N/2}
  double vtilde_plus_n2 = 0.0;  ///< ‖Ṽ₊‖_{N/2}
  double v_inf = 0.0;           ///< ‖V‖_∞
  double vtilde_inf = 0.0;      ///< ‖Ṽ‖_∞
};

/// N-dimensional radial quadrature of the N/2-norms on the given grid, with
/// the closed-form tail bound  ∫_R^∞ c^{N/2} s^{N-1-τN/2} ds  added for
/// PowerDecay.  Throws TailNotIntegrable when τ·N/2 ≤ N.
PotentialNorms potential_norms(const RadialPotential& V, int N, const RadialGrid& grid);

/// Norms on an internally chosen grid large enough for the tail bound to be
/// negligible relative to the computed norms.
PotentialNorms potential_norms_auto(const RadialPotential& V, int N);

struct HypothesisReport {
  bool v0_holds = false;
  double v0_margin = 0.0;           ///< S - ‖V₋‖_{N/2}
  double vtilde_plus_margin = 0.0;  ///< 2S - ‖Ṽ₊‖_{N/2}
  bool v1_sufficient_holds = false;
  bool sign_changing_head = false;  ///< V > 0 somewhere at small radius (allowed, flagged)
  double c0 = 0.0;                  ///< fitted lower-bound constant in s·V'(s) ≥ c0 s^{-τ0}
  double tau0 = 0.0;
  std::vector<double> samples;      ///< radii where the sufficient condition was checked
  PotentialNorms norms;
};

/// Report-only check of the machine-checkable surrogates: (V0) through the
/// computed norms, and the sufficient decay condition s·V'(s) ≥ c0·s^{-τ0}
/// sampled on a geometric sequence of radii (for radial V the transversal
/// condition is automatic).  The liminf condition itself is not certified.
HypothesisReport check_hypotheses(const RadialPotential& V, int N, double sobolev_S);

}  // namespace nnls
