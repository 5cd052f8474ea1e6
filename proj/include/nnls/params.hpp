#pragma once

#include <string>

namespace nnls {

/// Problem data for  -Δu + V(x)u + λu = |u|^{q-2}u + β|u|^{p-2}u,  ∫u² = α,
/// with the mass-subcritical/supercritical exponent split
/// 2 < p < 2 + 4/N < q < 2N/(N-2).
struct ProblemParams {
  int dim = 3;        ///< space dimension N ≥ 3
  double p = 3.0;     ///< mass-subcritical exponent
  double q = 5.0;     ///< mass-supercritical exponent
  double beta = 1.0;  ///< coefficient of the p-term
  double alpha = 1.0; ///< prescribed mass ∫u²
};

/// Which variational setting a computation targets.  The functional geometry
/// depends on the sign of β and on the solution branch.
enum class Regime {
  BetaNonpositiveMP,
  BetaPositiveLocalMin,
  BetaPositiveMP,
};

const char* to_string(Regime regime);
Regime regime_from_string(const std::string& name);

/// Parameter tuple that passed all exponent inequalities.  Construct through
/// validate_params; carries the derived exponents every formula consumes.
class ValidatedParams {
 public:
  int N() const { return params_.dim; }
  double p() const { return params_.p; }
  double q() const { return params_.q; }
  double beta() const { return params_.beta; }
  double alpha() const { return params_.alpha; }
  const ProblemParams& raw() const { return params_; }

  double two_star() const { return 2.0 * params_.dim / (params_.dim - 2.0); }
  double mass_critical() const { return 2.0 + 4.0 / params_.dim; }
  /// N(s-2)/2, the dilation exponent of the s-term
  double dilation_exponent(double s) const { return params_.dim * (s - 2.0) / 2.0; }

 private:
  friend ValidatedParams validate_params(const ProblemParams& params);
  explicit ValidatedParams(const ProblemParams& params) : params_(params) {}
  ProblemParams params_;
};

/// Checks N ≥ 3, 2 < p < 2+4/N < q < 2N/(N-2) and α > 0.  Throws
/// ExponentOrderViolation naming the violated inequality, or NonpositiveMass.
ValidatedParams validate_params(const ProblemParams& params);

}  // namespace nnls
