#include "nnls/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nnls/detail/pchip.hpp"
#include "nnls/errors.hpp"
#include "nnls/grid.hpp"

namespace nnls {

using detail::pchip_eval;
using detail::pchip_slopes;

RadialPotential RadialPotential::zero() {
  RadialPotential V;
  V.kind_ = PotentialKind::Zero;
  return V;
}

RadialPotential RadialPotential::power_decay(double c, double tau) {
  if (!(c > 0.0)) fail(ErrorCode::ConfigInvalid, "power_decay requires c > 0");
  if (!(tau > 0.0)) fail(ErrorCode::ConfigInvalid, "power_decay requires tau > 0");
  RadialPotential V;
  V.kind_ = PotentialKind::PowerDecay;
  V.c_ = c;
  V.tau_ = tau;
  return V;
}

RadialPotential RadialPotential::custom(std::vector<double> radii, std::vector<double> values) {
  if (radii.size() != values.size() || radii.size() < 2)
    fail(ErrorCode::ConfigInvalid, "custom potential needs matching radii/values with >= 2 entries");
  for (size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1]))
      fail(ErrorCode::ConfigInvalid, "custom potential radii must be strictly increasing");
  RadialPotential V;
  V.kind_ = PotentialKind::Custom;
  V.radii_ = std::move(radii);
  V.values_ = std::move(values);
  V.slopes_ = pchip_slopes(V.radii_, V.values_);
  return V;
}

RadialPotential RadialPotential::from_json(const nlohmann::json& spec) {
  if (!spec.is_object() || !spec.contains("kind"))
    fail(ErrorCode::ConfigInvalid, "potential spec needs a \"kind\" field");
  const std::string kind = spec.at("kind").get<std::string>();
  if (kind == "zero") return zero();
  if (kind == "power_decay")
    return power_decay(spec.at("c").get<double>(), spec.at("tau").get<double>());
  if (kind == "custom")
    return custom(spec.at("radii").get<std::vector<double>>(),
                  spec.at("values").get<std::vector<double>>());
  fail(ErrorCode::ConfigInvalid, "unknown potential kind '" + kind + "'");
}

nlohmann::json RadialPotential::to_json() const {
  nlohmann::json j;
  switch (kind_) {
    case PotentialKind::Zero:
      j["kind"] = "zero";
      break;
    case PotentialKind::PowerDecay:
      j["kind"] = "power_decay";
      j["c"] = c_;
      j["tau"] = tau_;
      break;
    case PotentialKind::Custom:
      j["kind"] = "custom";
      j["radii"] = radii_;
      j["values"] = values_;
      break;
  }
  return j;
}

double RadialPotential::value(double s) const {
  switch (kind_) {
    case PotentialKind::Zero: return 0.0;
    case PotentialKind::PowerDecay: return -c_ / (1.0 + std::pow(s, tau_));
    case PotentialKind::Custom: return pchip_eval(radii_, values_, slopes_, s).value;
  }
  return 0.0;
}

double RadialPotential::deriv(double s) const {
  switch (kind_) {
    case PotentialKind::Zero: return 0.0;
    case PotentialKind::PowerDecay: {
      if (s <= 0.0) return 0.0;
      const double z = std::pow(s, tau_);
      const double den = 1.0 + z;
      return c_ * tau_ * z / (s * den * den);
    }
    case PotentialKind::Custom: return pchip_eval(radii_, values_, slopes_, s).deriv;
  }
  return 0.0;
}

PotentialNorms potential_norms(const RadialPotential& V, int N, const RadialGrid& grid) {
  PotentialNorms out;
  if (V.is_zero()) return out;
  const double half_n = N / 2.0;
  if (V.kind() == PotentialKind::PowerDecay && !(V.tau() * half_n > N)) {
    std::ostringstream msg;
    msg << "tau*N/2 = " << V.tau() * half_n << " <= N = " << N
        << "; the N/2-norm of the power-decay tail diverges";
    fail(ErrorCode::TailNotIntegrable, msg.str());
  }
  double iv = 0.0, ivm = 0.0, ivtp = 0.0;
  const auto& w = grid.node_weights();
  for (int i = 0; i <= grid.M(); ++i) {
    const double s = grid.node(i);
    const double v = V.value(s);
    const double vt = V.vtilde(s);
    iv += w[i] * std::pow(std::abs(v), half_n);
    if (v < 0.0) ivm += w[i] * std::pow(-v, half_n);
    if (vt > 0.0) ivtp += w[i] * std::pow(vt, half_n);
    out.v_inf = std::max(out.v_inf, std::abs(v));
    out.vtilde_inf = std::max(out.vtilde_inf, std::abs(vt));
  }
  if (V.kind() == PotentialKind::PowerDecay) {
    // |V| <= c s^{-tau} and |Vtilde| <= c tau s^{-tau} beyond the grid
    const double R = grid.R();
    const double expo = V.tau() * half_n - N;  // > 0, checked above
    const double sigma = grid.sphere_area();
    const double tail_v = sigma * std::pow(V.c(), half_n) * std::pow(R, -expo) / expo;
    const double tail_vt = sigma * std::pow(V.c() * V.tau(), half_n) * std::pow(R, -expo) / expo;
    iv += tail_v;
    ivm += tail_v;
    ivtp += tail_vt;
    // sup norms in closed form: |V| peaks at 0, s V'(s) = c tau z/(1+z)^2 at z = s^tau
    out.v_inf = V.c();
    out.vtilde_inf = V.c() * V.tau() / 4.0;
  }
  out.v_n2 = std::pow(iv, 1.0 / half_n);
  out.vminus_n2 = std::pow(ivm, 1.0 / half_n);
  out.vtilde_plus_n2 = std::pow(ivtp, 1.0 / half_n);
  return out;
}

PotentialNorms potential_norms_auto(const RadialPotential& V, int N) {
  if (V.is_zero()) return PotentialNorms{};
  // the closed-form tail remainder is added analytically, so the grid only
  // needs to resolve the head; the remainder bias decays like R^{-tau}
  double R = 64.0;
  if (V.kind() == PotentialKind::PowerDecay && V.tau() < 3.0) R = 512.0;
  const int M = 1 << 15;
  RadialGrid grid(R, M, N);
  return potential_norms(V, N, grid);
}

HypothesisReport check_hypotheses(const RadialPotential& V, int N, double sobolev_S) {
  HypothesisReport rep;
  rep.norms = potential_norms_auto(V, N);
  rep.v0_margin = sobolev_S - rep.norms.vminus_n2;
  rep.v0_holds = rep.v0_margin > 0.0;
  rep.vtilde_plus_margin = 2.0 * sobolev_S - rep.norms.vtilde_plus_n2;

  // sufficient decay condition sampled on a geometric sequence of radii:
  // s·V'(s) > 0 with log-log decay rate no worse than some finite tau0
  const double s_min = 1.0, s_max = 4096.0;
  bool positive = true;
  std::vector<double> samp, vt;
  for (double s = s_min; s <= s_max; s *= 2.0) {
    const double val = V.vtilde(s);
    samp.push_back(s);
    vt.push_back(val);
    if (!(val > 0.0)) positive = false;
  }
  rep.samples = samp;
  if (positive) {
    // choose tau0 as the steepest pairwise log-log slope, then c0 as the
    // smallest sampled value of s^{tau0}·Vtilde(s)
    double tau0 = 0.0;
    for (size_t i = 1; i < samp.size(); ++i) {
      const double slope = -(std::log(vt[i]) - std::log(vt[i - 1])) /
                           (std::log(samp[i]) - std::log(samp[i - 1]));
      tau0 = std::max(tau0, slope);
    }
    rep.tau0 = tau0;
    double c0 = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < samp.size(); ++i)
      c0 = std::min(c0, vt[i] * std::pow(samp[i], tau0));
    rep.c0 = c0;
    rep.v1_sufficient_holds = c0 > 0.0 && std::isfinite(c0);
  }

  // flag sign-changing behavior at small radii (allowed, reported)
  for (double s = 0.0; s <= 2.0; s += 0.125)
    if (V.value(s) > 0.0) rep.sign_changing_head = true;
  return rep;
}

}  // namespace nnls
