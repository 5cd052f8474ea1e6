#include "nnls/params.hpp"

#include <cmath>
#include <sstream>

#include "nnls/errors.hpp"

namespace nnls {

const char* to_string(Regime regime) {
  switch (regime) {
    case Regime::BetaNonpositiveMP: return "BetaNonpositiveMP";
    case Regime::BetaPositiveLocalMin: return "BetaPositiveLocalMin";
    case Regime::BetaPositiveMP: return "BetaPositiveMP";
  }
  return "Unknown";
}

Regime regime_from_string(const std::string& name) {
  if (name == "BetaNonpositiveMP") return Regime::BetaNonpositiveMP;
  if (name == "BetaPositiveLocalMin") return Regime::BetaPositiveLocalMin;
  if (name == "BetaPositiveMP") return Regime::BetaPositiveMP;
  fail(ErrorCode::ConfigInvalid, "unknown regime '" + name + "'");
}

ValidatedParams validate_params(const ProblemParams& params) {
  std::ostringstream msg;
  if (params.dim < 3) {
    msg << "N >= 3 violated (N = " << params.dim << ")";
    fail(ErrorCode::ExponentOrderViolation, msg.str());
  }
  const double mass_crit = 2.0 + 4.0 / params.dim;
  const double two_star = 2.0 * params.dim / (params.dim - 2.0);
  if (!(params.p > 2.0)) {
    msg << "p > 2 violated (p = " << params.p << ")";
    fail(ErrorCode::ExponentOrderViolation, msg.str());
  }
  if (!(params.p < mass_crit)) {
    msg << "p < 2+4/N violated (p = " << params.p << ", 2+4/N = " << mass_crit << ")";
    fail(ErrorCode::ExponentOrderViolation, msg.str());
  }
  if (!(params.q > mass_crit)) {
    msg << "q > 2+4/N violated (q = " << params.q << ", 2+4/N = " << mass_crit << ")";
    fail(ErrorCode::ExponentOrderViolation, msg.str());
  }
  if (!(params.q < two_star)) {
    msg << "q < 2N/(N-2) violated (q = " << params.q << ", 2N/(N-2) = " << two_star << ")";
    fail(ErrorCode::ExponentOrderViolation, msg.str());
  }
  if (!(params.alpha > 0.0) || !std::isfinite(params.alpha)) {
    msg << "alpha > 0 violated (alpha = " << params.alpha << ")";
    fail(ErrorCode::NonpositiveMass, msg.str());
  }
  if (!std::isfinite(params.beta)) {
    fail(ErrorCode::ConfigInvalid, "beta must be finite");
  }
  return ValidatedParams(params);
}

}  // namespace nnls
