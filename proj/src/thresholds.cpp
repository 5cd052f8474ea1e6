#include "nnls/thresholds.hpp"

#include <cmath>
#include <sstream>

#include "nnls/errors.hpp"

namespace nnls {

OmegaData OmegaData::unit_ball(const ConstantsTable& constants) {
  return OmegaData{constants.theta1(), RadialGrid::unit_ball_volume(constants.N())};
}

ThresholdInputs make_inputs(const ValidatedParams& params, const PotentialNorms& norms,
                            const ConstantsTable& constants, const OmegaData& omega) {
  ThresholdInputs in;
  const double S = constants.S();
  in.nu_minus = norms.vminus_n2 / S;
  in.nu_full = norms.v_n2 / S;
  in.Cp = constants.C(params.p());
  in.Cq = constants.C(params.q());
  in.theta = omega.theta;
  in.volume = omega.volume;
  in.v_inf = norms.v_inf;
  in.vtilde_inf = norms.vtilde_inf;
  return in;
}

namespace {

// exponents that recur in every formula
struct Expo {
  double N, p, q;
  double nq;  // N(q-2)
  double np;  // N(p-2)
  double aq;  // (2q-N(q-2))/4, mass exponent of the q-term GN bound
  double ap;  // (2p-N(p-2))/4
  explicit Expo(const ValidatedParams& P)
      : N(P.N()),
        p(P.p()),
        q(P.q()),
        nq(P.N() * (P.q() - 2.0)),
        np(P.N() * (P.p() - 2.0)),
        aq((2.0 * P.q() - P.N() * (P.q() - 2.0)) / 4.0),
        ap((2.0 * P.p() - P.N() * (P.p() - 2.0)) / 4.0) {}
};

void require_v0(const ThresholdInputs& in) {
  if (!(in.nu_minus < 1.0)) {
    std::ostringstream msg;
    msg << "positive margin needed: ||V_-||_{N/2}/S = " << in.nu_minus << " >= 1";
    fail(ErrorCode::HypothesisViolated, msg.str());
  }
}

void require_beta_positive(const ValidatedParams& params, const char* what) {
  if (!(params.beta() > 0.0)) {
    std::ostringstream msg;
    msg << what << " is defined only for beta > 0 (got beta = " << params.beta() << ")";
    fail(ErrorCode::RegimeMismatch, msg.str());
  }
}

double golden_max(const std::function<double(double)>& f, double lo, double hi, double tol_rel) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol_rel * (std::abs(b) + std::abs(a)) + 1e-300) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi, double f_lo) {
  double a = lo, b = hi, fa = f_lo;
  for (int it = 0; it < 200 && (b - a) > 1e-15 * (std::abs(a) + std::abs(b)); ++it) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if ((fa <= 0.0) == (fm <= 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

// first crossing of f(t) = level scanning down from t_max on a log grid
double first_crossing_below(const std::function<double(double)>& f, double t_max, double level) {
  const int scan = 4000;
  double t_prev = t_max;
  for (int j = 1; j <= scan; ++j) {
    const double t = t_max * std::pow(1e-9, static_cast<double>(j) / scan);
    if (f(t) < level) {
      return bisect_root([&](double x) { return f(x) - level; }, t, t_prev, f(t) - level);
    }
    t_prev = t;
  }
  fail(ErrorCode::BracketNotFound, "geometry function never drops below the target level");
}

}  // namespace

double alpha_V(const ValidatedParams& params, const ThresholdInputs& in) {
  require_beta_positive(params, "alpha_V");
  require_v0(in);
  const Expo e(params);
  const double base1 = (1.0 - in.nu_minus) / (2.0 * e.N * (e.q - e.p));
  const double base2 = e.q * (4.0 - e.np) / in.Cq;
  const double base3 = e.p * (e.nq - 4.0) / (params.beta() * in.Cp);
  return std::pow(base1, e.N / 2.0) * std::pow(base2, (4.0 - e.np) / (2.0 * (e.q - e.p))) *
         std::pow(base3, (e.nq - 4.0) / (2.0 * (e.q - e.p)));
}

AlphaTilde alpha_tilde_V(const ValidatedParams& params, const ThresholdInputs& in) {
  require_beta_positive(params, "alpha_tilde_V");
  require_v0(in);
  const Expo e(params);
  AlphaTilde out;
  out.A_pq = (e.q - 2.0) * (e.nq - 4.0) / ((e.p - 2.0) * (4.0 - e.np));
  out.A = in.Cq / e.q * (out.A_pq + 1.0);
  out.value = std::pow(2.0 * (1.0 - in.nu_minus) / e.nq, e.N / 2.0) *
              std::pow(out.A, -e.N / 2.0) *
              std::pow(e.p * in.Cq * out.A_pq / (params.beta() * e.q * in.Cp),
                       (e.nq - 4.0) / (2.0 * (e.q - e.p)));
  return out;
}

GeometryBundle geometry_functions(const ValidatedParams& params, const ThresholdInputs& in,
                                  Regime regime) {
  require_v0(in);
  const Expo e(params);
  const double beta = params.beta();
  const double alpha = params.alpha();
  const double theta = in.theta;
  const double vol = in.volume;
  const double Cp = in.Cp, Cq = in.Cq;
  const double num = 1.0 - in.nu_minus;
  const double nuf = 1.0 + in.nu_full;

  GeometryBundle b;
  b.regime = regime;

  if (regime == Regime::BetaNonpositiveMP) {
    // the p-term enters the dilation bound with -β ≥ 0
    b.h_mp = [=](double t) {
      return 0.5 * nuf * t * t * theta * alpha -
             beta * Cp / e.p * std::pow(alpha, e.p / 2.0) * std::pow(theta, e.np / 4.0) *
                 std::pow(t, e.np / 2.0) -
             1.0 / (2.0 * e.q) * std::pow(alpha, e.q / 2.0) * std::pow(vol, (2.0 - e.q) / 2.0) *
                 std::pow(t, e.nq / 2.0);
    };
    // ... and is dropped from the lower bound
    b.f_lower = [=](double T) {
      return 0.5 * num * T - Cq / e.q * std::pow(alpha, e.aq) * std::pow(T, e.nq / 4.0);
    };
  } else {
    b.h_mp = [=](double t) {
      return 0.5 * nuf * t * t * theta * alpha -
             1.0 / (2.0 * e.q) * std::pow(alpha, e.q / 2.0) * std::pow(vol, (2.0 - e.q) / 2.0) *
                 std::pow(t, e.nq / 2.0);
    };
    b.f_lower = [=](double T) {
      return 0.5 * num * T - beta * Cp / e.p * std::pow(alpha, e.ap) * std::pow(T, e.np / 4.0) -
             Cq / e.q * std::pow(alpha, e.aq) * std::pow(T, e.nq / 4.0);
    };
  }

  b.h_loc = [=](double t) {
    return 0.5 * num * t * t - beta * Cp / e.p * std::pow(alpha, e.ap) * std::pow(t, e.np / 2.0) -
           Cq / e.q * std::pow(alpha, e.aq) * std::pow(t, e.nq / 2.0);
  };
  b.phi = [=](double t) {
    return 0.5 * num * std::pow(t, (4.0 - e.np) / 2.0) -
           Cq / e.q * std::pow(alpha, e.aq) * std::pow(t, e.N * (e.q - e.p) / 2.0);
  };
  const double A =
      Cq / e.q * ((e.q - 2.0) * (e.nq - 4.0) / ((e.p - 2.0) * (4.0 - e.np)) + 1.0);
  b.g = [=](double T) {
    return 0.5 * num * T - A * std::pow(alpha, e.aq) * std::pow(T, e.nq / 4.0);
  };
  return b;
}

GeometryPoints critical_points_of_geometry(const GeometryBundle& bundle,
                                           const ValidatedParams& params,
                                           const ThresholdInputs& in) {
  require_v0(in);
  const Expo e(params);
  const double alpha = params.alpha();
  const double num = 1.0 - in.nu_minus;
  const double nuf = 1.0 + in.nu_full;
  GeometryPoints pts;

  // positive root of the two-term dilation bound, closed form; exact for the
  // β>0 mountain-pass h and a scanning seed for β≤0
  const double t0_two_term =
      std::pow(nuf * e.q * in.theta * std::pow(alpha, (2.0 - e.q) / 2.0) *
                   std::pow(in.volume, (e.q - 2.0) / 2.0),
               2.0 / (e.nq - 4.0));

  if (bundle.regime == Regime::BetaNonpositiveMP) {
    pts.t_tilde = std::pow(2.0 * e.q / (e.nq * in.Cq) * num *
                               std::pow(alpha, (e.q * (e.N - 2.0) - 2.0 * e.N) / 4.0),
                           4.0 / (e.nq - 4.0));
    pts.mp_lower = (e.nq - 4.0) * num / (2.0 * e.nq) *
                   std::pow(2.0 * e.q * num / (e.nq * in.Cq * std::pow(alpha, e.aq)),
                            4.0 / (e.nq - 4.0));

    double lo = t0_two_term, hi = t0_two_term;
    int k = 0;
    while (bundle.h_mp(hi) > 0.0) {
      lo = hi;
      hi *= 2.0;
      if (++k > 200) fail(ErrorCode::BracketNotFound, "h stays positive while scanning for t0");
    }
    while (bundle.h_mp(lo) <= 0.0) {
      hi = lo;
      lo *= 0.5;
      if (++k > 400)
        fail(ErrorCode::BracketNotFound, "h stays nonpositive while scanning for t0");
    }
    pts.t0 = bisect_root(bundle.h_mp, lo, hi, bundle.h_mp(lo));

    const double arg = golden_max(bundle.h_mp, 1e-8 * pts.t0, pts.t0, 1e-14);
    pts.T_alpha_level = bundle.h_mp(arg);
    pts.mp_upper = pts.T_alpha_level;
    if (pts.T_alpha_level < pts.mp_lower)
      fail(ErrorCode::BracketNotFound,
           "max of h lies below the mountain-pass lower bound (sign pattern: h < bound "
           "everywhere); regime or hypothesis violation");
    pts.t1 = first_crossing_below(bundle.h_mp, arg, pts.mp_lower);
    return pts;
  }

  pts.t_bar = std::pow(e.q * (4.0 - e.np) * num / (2.0 * e.N * (e.q - e.p) * in.Cq),
                       2.0 / (e.nq - 4.0)) *
              std::pow(alpha, (e.nq - 2.0 * e.q) / (2.0 * (e.nq - 4.0)));

  if (bundle.regime == Regime::BetaPositiveLocalMin) {
    if (bundle.h_loc(pts.t_bar) <= 0.0)
      fail(ErrorCode::BracketNotFound,
           "h(t_bar) <= 0: the local-minimum geometry needs alpha < alpha_V");
    double lo = pts.t_bar, hi = pts.t_bar;
    int k = 0;
    while (bundle.h_loc(lo) > 0.0 && k++ < 300) lo *= 0.5;
    while (bundle.h_loc(hi) > 0.0 && k++ < 600) hi *= 2.0;
    if (bundle.h_loc(lo) > 0.0 || bundle.h_loc(hi) > 0.0)
      fail(ErrorCode::BracketNotFound, "h does not change sign around t_bar");
    pts.T_alpha_radius = golden_max(bundle.h_loc, lo, hi, 1e-14);
    pts.R1 = bisect_root(bundle.h_loc, lo, pts.T_alpha_radius, bundle.h_loc(lo));
    pts.R2 = bisect_root(bundle.h_loc, pts.T_alpha_radius, hi,
                         bundle.h_loc(pts.T_alpha_radius));
    return pts;
  }

  // BetaPositiveMP: everything in closed form
  pts.t0 = t0_two_term;
  pts.t_alpha =
      std::pow(4.0 * e.q * nuf * in.theta / e.nq * std::pow(alpha, (2.0 - e.q) / 2.0) *
                   std::pow(in.volume, (e.q - 2.0) / 2.0),
               2.0 / (e.nq - 4.0));
  pts.T_alpha_level = bundle.h_mp(pts.t_alpha);
  pts.t2 = std::pow(params.beta() * e.q * in.Cp * (e.p - 2.0) * (4.0 - e.np) /
                        (e.p * in.Cq * (e.q - 2.0) * (e.nq - 4.0)),
                    4.0 / (e.N * (e.q - e.p))) *
           std::pow(alpha, (e.N - 2.0) / e.N);
  const double A =
      in.Cq / e.q * ((e.q - 2.0) * (e.nq - 4.0) / ((e.p - 2.0) * (4.0 - e.np)) + 1.0);
  pts.t_g = std::pow(2.0 * num / (e.nq * A), 4.0 / (e.nq - 4.0)) *
            std::pow(alpha, (e.nq - 2.0 * e.q) / (e.nq - 4.0));
  pts.mp_lower = (e.nq - 4.0) / 4.0 * std::pow(2.0 * num / e.nq, e.nq / (e.nq - 4.0)) *
                 std::pow(A, 4.0 / (4.0 - e.nq)) *
                 std::pow(alpha, (e.nq - 2.0 * e.q) / (e.nq - 4.0));
  pts.mp_upper = (e.nq - 4.0) / 2.0 * std::pow(in.theta * nuf / e.nq, e.nq / (e.nq - 4.0)) *
                 std::pow(4.0 * e.q, 4.0 / (e.nq - 4.0)) *
                 std::pow(in.volume, 2.0 * (e.q - 2.0) / (e.nq - 4.0)) *
                 std::pow(alpha, (e.nq - 2.0 * e.q) / (e.nq - 4.0));
  if (pts.T_alpha_level < pts.mp_lower)
    fail(ErrorCode::BracketNotFound,
         "max of h lies below the mountain-pass lower bound (sign pattern: h < bound "
         "everywhere); regime or hypothesis violation");
  pts.t1 = first_crossing_below(bundle.h_mp, pts.t_alpha, pts.mp_lower);
  return pts;
}

double r_alpha(const ValidatedParams& params, const ThresholdInputs& in, Regime regime,
               const GeometryPoints& pts) {
  const Expo e(params);
  const double alpha = params.alpha();
  switch (regime) {
    case Regime::BetaPositiveLocalMin: {
      // second argument in the orientation that makes E(dilated eigenfunction)
      // nonpositive: base (2β/p)α^{(p-2)/2}(θ(1+ν))^{-1}|Ω|^{(2-p)/2} under the
      // negative exponent 2/(N(p-2)-4); the companion display prints the
      // reciprocal base under the same exponent
      const double base = 2.0 * params.beta() / e.p * std::pow(alpha, (e.p - 2.0) / 2.0) /
                          (in.theta * (1.0 + in.nu_full)) *
                          std::pow(in.volume, (2.0 - e.p) / 2.0);
      const double second = std::pow(base, 2.0 / (e.np - 4.0));
      return std::max(std::sqrt(in.theta * alpha) / pts.T_alpha_radius, second);
    }
    case Regime::BetaNonpositiveMP:
      return std::max(
          {1.0 / pts.t0, 1.0 / pts.t1, std::sqrt(2.0 * in.theta * alpha / pts.t_tilde)});
    case Regime::BetaPositiveMP:
      return std::max(
          {1.0 / pts.t0, 1.0 / pts.t1, std::sqrt(2.0 * in.theta * alpha / pts.t_g)});
  }
  fail(ErrorCode::RegimeMismatch, "unknown regime");
}

std::pair<double, double> energy_sandwich(Regime regime, const GeometryPoints& pts) {
  if (regime == Regime::BetaPositiveLocalMin)
    fail(ErrorCode::RegimeMismatch, "the energy sandwich applies to the mountain-pass regimes");
  return {pts.mp_lower, pts.mp_upper};
}

double h1_apriori_bound(const ValidatedParams& params, const ThresholdInputs& in,
                        double T_alpha_level) {
  const Expo e(params);
  return 4.0 * e.N / (e.nq - 4.0) *
         ((e.q - 2.0) / 2.0 * T_alpha_level +
          params.alpha() * (in.vtilde_inf / (2.0 * e.N) + (e.q - 2.0) / 4.0 * in.v_inf));
}

ThresholdReport compute_thresholds(const ValidatedParams& params, const PotentialNorms& norms,
                                   const ConstantsTable& constants, Regime regime) {
  if (regime != Regime::BetaNonpositiveMP && !(params.beta() > 0.0))
    fail(ErrorCode::RegimeMismatch, "beta <= 0 admits only the mountain-pass branch");
  if (regime == Regime::BetaNonpositiveMP && params.beta() > 0.0)
    fail(ErrorCode::RegimeMismatch, "BetaNonpositiveMP requires beta <= 0");

  ThresholdReport rep;
  rep.regime = regime;
  const OmegaData omega = OmegaData::unit_ball(constants);
  rep.inputs = make_inputs(params, norms, constants, omega);
  require_v0(rep.inputs);

  if (params.beta() > 0.0) {
    rep.alpha_V = alpha_V(params, rep.inputs);
    const AlphaTilde at = alpha_tilde_V(params, rep.inputs);
    rep.alpha_tilde_V = at.value;
    rep.A_pq = at.A_pq;
    rep.A = at.A;
    if (regime == Regime::BetaPositiveLocalMin && !(params.alpha() < rep.alpha_V)) {
      std::ostringstream msg;
      msg << "local-minimum branch requires alpha < alpha_V (alpha = " << params.alpha()
          << ", alpha_V = " << rep.alpha_V << ")";
      fail(ErrorCode::RegimeMismatch, msg.str());
    }
    if (regime == Regime::BetaPositiveMP && !(params.alpha() < rep.alpha_tilde_V)) {
      std::ostringstream msg;
      msg << "mountain-pass branch with beta > 0 requires alpha < alpha_tilde_V (alpha = "
          << params.alpha() << ", alpha_tilde_V = " << rep.alpha_tilde_V << ")";
      fail(ErrorCode::RegimeMismatch, msg.str());
    }
  }

  const GeometryBundle bundle = geometry_functions(params, rep.inputs, regime);
  rep.points = critical_points_of_geometry(bundle, params, rep.inputs);
  rep.mp_lower = rep.points.mp_lower;
  rep.mp_upper = rep.points.mp_upper;
  rep.r_alpha = r_alpha(params, rep.inputs, regime, rep.points);
  if (regime == Regime::BetaNonpositiveMP)
    rep.h1_apriori = h1_apriori_bound(params, rep.inputs, rep.points.T_alpha_level);
  return rep;
}

Regime resolve_regime(const ValidatedParams& params, bool mountain_pass) {
  if (params.beta() > 0.0)
    return mountain_pass ? Regime::BetaPositiveMP : Regime::BetaPositiveLocalMin;
  if (!mountain_pass)
    fail(ErrorCode::RegimeMismatch,
         "the local-minimum branch exists only for beta > 0; use the mountain-pass branch");
  return Regime::BetaNonpositiveMP;
}

}  // namespace nnls
