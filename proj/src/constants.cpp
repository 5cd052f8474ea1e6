#include "nnls/constants.hpp"

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "nnls/detail/tridiag.hpp"
#include "nnls/errors.hpp"
#include "nnls/radial.hpp"

namespace nnls {

namespace {

double binom_real(double a, int k) {
  double r = 1.0;
  for (int j = 0; j < k; ++j) r *= (a - j) / (k - j);
  return r;
}

// ∫_R^∞ s^{m}(1+s²)^{-N} ds by the asymptotic series in s^{-2}; valid for
// 2N - m > 1 and converges fast for R ≳ 8.
double bubble_tail(double R, int m, int N) {
  double sum = 0.0;
  for (int k = 0; k < 60; ++k) {
    const double ck = binom_real(-N, k);  // (1+x)^{-N} = Σ ck x^k with x = s^{-2}
    const double expo = 2.0 * N + 2.0 * k - m - 1.0;
    const double term = ck * std::pow(R, -expo) / expo;
    sum += term;
    if (std::abs(term) < 1e-30 * (std::abs(sum) + 1e-300)) break;
  }
  return sum;
}

// quotient ‖∇U_λ‖₂² / ‖U_λ‖_{2*}² with U_λ(s) = (1+(λs)²)^{-(N-2)/2}
double bubble_quotient(int N, double lambda, double R, int M) {
  auto grid = make_grid(R, M, N);
  const auto& w = grid->node_weights();
  const double sigma = grid->sphere_area();
  double num = 0.0, den = 0.0;
  for (int i = 0; i <= M; ++i) {
    const double s = grid->node(i);
    const double z = lambda * s;
    const double base = 1.0 + z * z;
    const double du = -(N - 2.0) * lambda * lambda * s * std::pow(base, -N / 2.0);
    num += w[i] * du * du;
    den += w[i] * std::pow(base, -static_cast<double>(N));
  }
  // tails: substitute z = λs
  num += sigma * (N - 2.0) * (N - 2.0) * std::pow(lambda, 2.0 - N) * bubble_tail(lambda * R, N + 1, N);
  den += sigma * std::pow(lambda, -static_cast<double>(N)) * bubble_tail(lambda * R, N - 1, N);
  return num / std::pow(den, (N - 2.0) / static_cast<double>(N));
}

}  // namespace

double aubin_talenti_rescaled(int N, double lambda, int M) {
  // remap the domain with the bubble: the discrete quotient is then exactly
  // scale invariant, not just up to quadrature error
  return bubble_quotient(N, lambda, 64.0 / lambda, M);
}

double aubin_talenti(int N, const Tolerances& tol, Provenance* prov) {
  if (N < 3) fail(ErrorCode::ConfigInvalid, "Sobolev quotient needs N >= 3");
  const double R = 64.0;
  int M = 4096;
  double prev = bubble_quotient(N, 1.0, R, M);
  for (int it = 0; it < 8; ++it) {
    M *= 2;
    const double cur = bubble_quotient(N, 1.0, R, M);
    const double diff = std::abs(cur - prev) / std::abs(cur);
    if (diff <= tol.quad_rel) {
      if (prov) {
        std::ostringstream res;
        res << "R=" << R << ", M=" << M;
        *prov = Provenance{"bubble quadrature with asymptotic tail", res.str(), diff};
      }
      return cur;
    }
    prev = cur;
  }
  fail(ErrorCode::QuadratureNotConverged, "Sobolev quotient did not stabilize under refinement");
}

// ---------------------------------------------------------------------------
// Gagliardo-Nirenberg ground state by shooting
// ---------------------------------------------------------------------------

namespace {

struct OdeState {
  double Q, P;       // profile and derivative
  double I2, IK, Is; // ∫Q²s^{N-1}, ∫P²s^{N-1}, ∫|Q|^s s^{N-1}
};

OdeState ode_rhs(double s, const OdeState& y, int N, double sexp) {
  const double aq = std::abs(y.Q);
  const double nonlin = std::pow(aq, sexp - 2.0) * y.Q;
  const double w = std::pow(s, N - 1.0);
  OdeState d;
  d.Q = y.P;
  d.P = -(N - 1.0) / s * y.P + y.Q - nonlin;
  d.I2 = y.Q * y.Q * w;
  d.IK = y.P * y.P * w;
  d.Is = std::pow(aq, sexp) * w;
  return d;
}

OdeState axpy(const OdeState& y, double hstep, const OdeState& d) {
  return {y.Q + hstep * d.Q, y.P + hstep * d.P, y.I2 + hstep * d.I2, y.IK + hstep * d.IK,
          y.Is + hstep * d.Is};
}

// Cash-Karp embedded RK45 step; returns error estimate through *err.
OdeState rkck_step(double s, const OdeState& y, double hstep, int N, double sexp, double* err) {
  static constexpr double a2 = 0.2, a3 = 0.3, a4 = 0.6, a5 = 1.0, a6 = 0.875;
  static constexpr double b21 = 0.2;
  static constexpr double b31 = 3.0 / 40.0, b32 = 9.0 / 40.0;
  static constexpr double b41 = 0.3, b42 = -0.9, b43 = 1.2;
  static constexpr double b51 = -11.0 / 54.0, b52 = 2.5, b53 = -70.0 / 27.0, b54 = 35.0 / 27.0;
  static constexpr double b61 = 1631.0 / 55296.0, b62 = 175.0 / 512.0, b63 = 575.0 / 13824.0,
                          b64 = 44275.0 / 110592.0, b65 = 253.0 / 4096.0;
  static constexpr double c1 = 37.0 / 378.0, c3 = 250.0 / 621.0, c4 = 125.0 / 594.0,
                          c6 = 512.0 / 1771.0;
  static constexpr double d1 = c1 - 2825.0 / 27648.0, d3 = c3 - 18575.0 / 48384.0,
                          d4 = c4 - 13525.0 / 55296.0, d5 = -277.0 / 14336.0,
                          d6 = c6 - 0.25;
  const OdeState k1 = ode_rhs(s, y, N, sexp);
  const OdeState k2 = ode_rhs(s + a2 * hstep, axpy(y, hstep * b21, k1), N, sexp);
  OdeState t = y;
  auto acc = [&](std::initializer_list<std::pair<double, const OdeState*>> terms) {
    OdeState r = y;
    for (auto& [cc, kk] : terms) r = axpy(r, hstep * cc, *kk);
    return r;
  };
  const OdeState k3 = ode_rhs(s + a3 * hstep, acc({{b31, &k1}, {b32, &k2}}), N, sexp);
  const OdeState k4 = ode_rhs(s + a4 * hstep, acc({{b41, &k1}, {b42, &k2}, {b43, &k3}}), N, sexp);
  const OdeState k5 =
      ode_rhs(s + a5 * hstep, acc({{b51, &k1}, {b52, &k2}, {b53, &k3}, {b54, &k4}}), N, sexp);
  const OdeState k6 = ode_rhs(
      s + a6 * hstep, acc({{b61, &k1}, {b62, &k2}, {b63, &k3}, {b64, &k4}, {b65, &k5}}), N, sexp);
  OdeState out = y;
  out = axpy(out, hstep * c1, k1);
  out = axpy(out, hstep * c3, k3);
  out = axpy(out, hstep * c4, k4);
  out = axpy(out, hstep * c6, k6);
  const std::array<double, 5> e = {
      hstep * (d1 * k1.Q + d3 * k3.Q + d4 * k4.Q + d5 * k5.Q + d6 * k6.Q),
      hstep * (d1 * k1.P + d3 * k3.P + d4 * k4.P + d5 * k5.P + d6 * k6.P),
      hstep * (d1 * k1.I2 + d3 * k3.I2 + d4 * k4.I2 + d5 * k5.I2 + d6 * k6.I2),
      hstep * (d1 * k1.IK + d3 * k3.IK + d4 * k4.IK + d5 * k5.IK + d6 * k6.IK),
      hstep * (d1 * k1.Is + d3 * k3.Is + d4 * k4.Is + d5 * k5.Is + d6 * k6.Is)};
  double emax = 0.0;
  const std::array<double, 5> scale = {std::abs(y.Q) + 1.0, std::abs(y.P) + 1.0,
                                       std::abs(y.I2) + 1.0, std::abs(y.IK) + 1.0,
                                       std::abs(y.Is) + 1.0};
  for (int i = 0; i < 5; ++i) emax = std::max(emax, std::abs(e[i]) / scale[i]);
  *err = emax;
  (void)t;
  return out;
}

enum class ShotOutcome { Crossed, Undershot, Undecided };

struct ShotResult {
  ShotOutcome outcome = ShotOutcome::Undecided;
  double s_end = 0.0;
  OdeState y{};
  std::vector<double> nodes_s;
  std::vector<double> nodes_q;
};

// Integrate from the series start until the trajectory classifies, Q decays
// below `floor`, or s exceeds s_max.
ShotResult shoot(double a, int N, double sexp, double floor, double s_max,
                 double max_step = 0.25, bool keep_profile = false) {
  const double s0 = 1e-6;
  const double g0 = a - std::pow(a, sexp - 1.0);
  OdeState y;
  y.Q = a + g0 * s0 * s0 / (2.0 * N);
  y.P = g0 * s0 / N;
  y.I2 = a * a * std::pow(s0, N) / N;
  y.IK = 0.0;
  y.Is = std::pow(a, sexp) * std::pow(s0, N) / N;

  double s = s0;
  double hstep = 1e-4;
  const double rtol = 1e-12;
  bool was_decreasing = false;
  ShotResult out;
  if (keep_profile) {
    out.nodes_s.push_back(0.0);
    out.nodes_q.push_back(a);
  }
  while (s < s_max) {
    double err = 0.0;
    OdeState ynew = rkck_step(s, y, hstep, N, sexp, &err);
    if (err > rtol) {
      hstep *= std::max(0.2, 0.9 * std::pow(rtol / err, 0.25));
      continue;
    }
    s += hstep;
    y = ynew;
    if (keep_profile) {
      out.nodes_s.push_back(s);
      out.nodes_q.push_back(y.Q);
    }
    if (err > 0.0) hstep *= std::min(5.0, 0.9 * std::pow(rtol / err, 0.2));
    hstep = std::min(hstep, max_step);

    if (y.Q <= 0.0) {
      out.outcome = ShotOutcome::Crossed;
      break;
    }
    if (y.P < 0.0) was_decreasing = true;
    if (was_decreasing && y.P >= 0.0) {
      out.outcome = ShotOutcome::Undershot;
      break;
    }
    if (was_decreasing && y.Q < floor) break;  // decayed cleanly
  }
  out.s_end = s;
  out.y = y;
  return out;
}

}  // namespace

GnConstant gn_best_constant(int N, double sexp, const Tolerances& tol, double max_step) {
  if (!(sexp > 2.0) || !(sexp < 2.0 * N / (N - 2.0)))
    fail(ErrorCode::ConfigInvalid, "GN exponent must satisfy 2 < s < 2N/(N-2)");
  const double s_max = 200.0;
  const double classify_floor = std::numeric_limits<double>::min() * 1e10;

  double a_lo = std::pow(sexp / 2.0, 1.0 / (sexp - 2.0));  // zero-energy height: undershoots
  double a_hi = 2.0 * a_lo;
  int grow = 0;
  while (shoot(a_hi, N, sexp, classify_floor, s_max, max_step).outcome != ShotOutcome::Crossed) {
    a_hi *= 2.0;
    if (++grow > 60)
      fail(ErrorCode::ShootingBracketLost, "no sign change found while growing the shooting height");
  }
  for (int it = 0; it < 200 && (a_hi - a_lo) > 1e-16 * a_hi; ++it) {
    const double mid = 0.5 * (a_lo + a_hi);
    const auto r = shoot(mid, N, sexp, classify_floor, s_max, max_step);
    if (r.outcome == ShotOutcome::Crossed)
      a_hi = mid;
    else
      a_lo = mid;
  }
  const double a_star = 0.5 * (a_lo + a_hi);

  // final integration with the quadrature carried along; truncate where the
  // tail is clean and append the exponential remainder
  const auto fin = shoot(a_star, N, sexp, 1e-12, s_max, max_step, true);
  if (fin.s_end >= s_max && fin.y.Q > 1e-8)
    fail(ErrorCode::GroundStateNotDecayed, "ground-state tail above tolerance at s_max");
  const double R0 = fin.s_end;
  const double Q0 = std::max(fin.y.Q, 0.0);
  double I2 = fin.y.I2, IK = fin.y.IK, Is = fin.y.Is;
  if (Q0 > 0.0 && fin.y.P < 0.0) {
    const double mu = -fin.y.P / Q0;  // local decay rate
    const double wN = std::pow(R0, N - 1.0);
    I2 += Q0 * Q0 * wN / (2.0 * mu);
    IK += fin.y.P * fin.y.P * wN / (2.0 * mu);
    Is += std::pow(Q0, sexp) * wN / (sexp * mu);
  }

  const double sigma = RadialGrid::unit_sphere_area(N);
  const double l2 = sigma * I2;
  const double kin = sigma * IK;
  const double ls = sigma * Is;
  const double e2 = (2.0 * sexp - N * (sexp - 2.0)) / 4.0;
  const double ek = N * (sexp - 2.0) / 4.0;
  GnConstant out;
  out.value = ls / (std::pow(l2, e2) * std::pow(kin, ek));
  out.l2 = l2;
  out.kinetic = kin;
  out.ls = ls;
  out.sample_s = fin.nodes_s;
  out.sample_q = fin.nodes_q;
  out.shooting_a = a_star;
  out.shooting_residual = std::abs(fin.y.Q);
  out.decay_radius = R0;
  std::ostringstream res;
  res << "a*=" << a_star << ", truncation radius " << R0;
  out.prov = Provenance{"radial shooting, Cash-Karp RK45, rtol 1e-12", res.str(),
                        std::max(out.shooting_residual, tol.shoot_residual)};
  if (out.shooting_residual > 1e-6)
    fail(ErrorCode::GroundStateNotDecayed, "shooting residual above tolerance");
  return out;
}

// ---------------------------------------------------------------------------
// principal Dirichlet eigenvalue on the unit ball
// ---------------------------------------------------------------------------

EigenResult ball_eigen_single(int N, int M, const Tolerances& tol) {
  auto grid = make_grid(1.0, M, N);
  const auto& cw = grid->cell_weights();
  const auto& w = grid->node_weights();
  const double h2 = grid->h() * grid->h();

  // interior DOFs are nodes 0..M-1 (node M is the Dirichlet boundary)
  std::vector<double> diag(M), sub(M - 1), sup(M - 1);
  for (int i = 0; i < M; ++i) {
    diag[i] = (i > 0 ? cw[i - 1] : 0.0) / h2 + cw[i] / h2;
    if (i < M - 1) {
      sub[i] = -cw[i] / h2;
      sup[i] = -cw[i] / h2;
    }
  }

  RadialFunction v(grid);
  for (int i = 0; i < M; ++i) {
    const double s = grid->node(i);
    v[i] = 1.0 - s * s;
  }
  rescale_mass(v, 1.0);

  auto residual_of = [&](const RadialFunction& vec, double th) {
    const auto lap = neg_laplacian(vec);
    double res = 0.0;
    for (int i = 0; i < M; ++i) {
      const double d = lap[i] - th * vec[i];
      res += w[i] * d * d;
    }
    return std::sqrt(res);
  };

  double theta = 0.0, theta_prev = -1.0;
  double best_res = std::numeric_limits<double>::infinity();
  int no_gain = 0;
  const int maxit = 4000;
  int it = 0;
  bool settled = false;
  for (; it < maxit; ++it) {
    std::vector<double> rhs(M);
    for (int i = 0; i < M; ++i) rhs[i] = w[i] * v[i];
    auto x = detail::solve_tridiag(sub, diag, sup, rhs);
    for (int i = 0; i < M; ++i) v[i] = x[i];
    v.enforce_dirichlet();
    rescale_mass(v, 1.0);
    theta = kinetic(v);  // Rayleigh quotient with unit mass
    if (theta_prev > 0.0 && std::abs(theta - theta_prev) <= 1e-15 * theta) {
      // keep polishing the eigenvector until the residual hits its floor
      const double res = residual_of(v, theta);
      if (res <= 1e-13 * theta) {
        settled = true;
        break;
      }
      if (res < 0.9 * best_res) {
        best_res = res;
        no_gain = 0;
      } else if (++no_gain >= 5) {
        settled = true;  // rounding floor reached
        break;
      }
    }
    theta_prev = theta;
  }
  if (!settled)
    fail(ErrorCode::EigenIterationStalled, "inverse iteration did not settle");
  if (v[0] < 0.0)
    for (auto& val : v.values()) val = -val;
  (void)tol;
  EigenResult out;
  out.theta = theta;
  out.v1 = v;
  out.error_estimate = std::abs(theta - theta_prev);
  return out;
}

EigenResult ball_principal_eigenvalue(int N, const Tolerances& tol, int M, Provenance* prov) {
  const EigenResult coarse = ball_eigen_single(N, M, tol);
  EigenResult fine = ball_eigen_single(N, 2 * M, tol);
  const double extrapolated = (4.0 * fine.theta - coarse.theta) / 3.0;
  const double err = std::abs(fine.theta - coarse.theta) / 3.0;
  fine.theta = extrapolated;
  fine.error_estimate = err;
  if (prov) {
    std::ostringstream res;
    res << "inverse iteration, Richardson over M=" << M << "," << 2 * M;
    *prov = Provenance{"discrete radial Laplacian eigen solve", res.str(), err};
  }
  return fine;
}

// ---------------------------------------------------------------------------
// table + cache
// ---------------------------------------------------------------------------

bool ConstantsTable::has_gn(double s) const {
  for (const auto& [k, v] : gn_)
    if (std::abs(k - s) < 1e-12) return true;
  return false;
}

const GnConstant& ConstantsTable::gn(double s) const {
  for (const auto& [k, v] : gn_)
    if (std::abs(k - s) < 1e-12) return v;
  std::ostringstream msg;
  msg << "C_{N,s} was not computed for s = " << s;
  fail(ErrorCode::Internal, msg.str());
}

namespace {

nlohmann::json prov_to_json(const Provenance& p) {
  return {{"method", p.method}, {"resolution", p.resolution}, {"error_estimate", p.error_estimate}};
}

Provenance prov_from_json(const nlohmann::json& j) {
  return {j.at("method").get<std::string>(), j.at("resolution").get<std::string>(),
          j.at("error_estimate").get<double>()};
}

}  // namespace

nlohmann::json ConstantsTable::to_json() const {
  nlohmann::json j;
  j["N"] = N_;
  j["tolerances"] = {{"quad_rel", tol_.quad_rel},
                     {"shoot_residual", tol_.shoot_residual},
                     {"eigen_rel", tol_.eigen_rel}};
  j["S"] = {{"value", S_}, {"provenance", prov_to_json(S_prov_)}};
  j["theta1"] = {{"value", eigen_.theta},
                 {"error_estimate", eigen_.error_estimate},
                 {"provenance", prov_to_json(theta_prov_)},
                 {"eigenfunction",
                  {{"R", eigen_.v1.grid().R()},
                   {"M", eigen_.v1.grid().M()},
                   {"values", eigen_.v1.values()}}}};
  nlohmann::json gns = nlohmann::json::array();
  for (const auto& [s, g] : gn_) {
    gns.push_back({{"s", s},
                   {"value", g.value},
                   {"shooting_a", g.shooting_a},
                   {"shooting_residual", g.shooting_residual},
                   {"decay_radius", g.decay_radius},
                   {"l2", g.l2},
                   {"kinetic", g.kinetic},
                   {"ls", g.ls},
                   {"provenance", prov_to_json(g.prov)}});
  }
  j["gn"] = gns;
  return j;
}

ConstantsTable ConstantsTable::from_json(const nlohmann::json& j) {
  ConstantsTable t;
  t.N_ = j.at("N").get<int>();
  const auto& jt = j.at("tolerances");
  t.tol_ = Tolerances{jt.at("quad_rel").get<double>(), jt.at("shoot_residual").get<double>(),
                      jt.at("eigen_rel").get<double>()};
  t.S_ = j.at("S").at("value").get<double>();
  t.S_prov_ = prov_from_json(j.at("S").at("provenance"));
  const auto& je = j.at("theta1");
  t.eigen_.theta = je.at("value").get<double>();
  t.eigen_.error_estimate = je.at("error_estimate").get<double>();
  t.theta_prov_ = prov_from_json(je.at("provenance"));
  const auto& jef = je.at("eigenfunction");
  auto grid = make_grid(jef.at("R").get<double>(), jef.at("M").get<int>(), t.N_);
  t.eigen_.v1 = RadialFunction(grid, jef.at("values").get<std::vector<double>>());
  for (const auto& g : j.at("gn")) {
    GnConstant c;
    c.value = g.at("value").get<double>();
    c.shooting_a = g.at("shooting_a").get<double>();
    c.shooting_residual = g.at("shooting_residual").get<double>();
    c.decay_radius = g.at("decay_radius").get<double>();
    c.l2 = g.value("l2", 0.0);
    c.kinetic = g.value("kinetic", 0.0);
    c.ls = g.value("ls", 0.0);
    c.prov = prov_from_json(g.at("provenance"));  // profile samples are not cached
    t.gn_[g.at("s").get<double>()] = c;
  }
  return t;
}

ConstantsTable compute_constants(int N, const std::vector<double>& s_exponents,
                                 const Tolerances& tol,
                                 const std::optional<std::string>& cache_dir) {
  namespace fs = std::filesystem;
  std::optional<fs::path> cache_path;
  if (cache_dir) cache_path = fs::path(*cache_dir) / "constants.json";

  if (cache_path && fs::exists(*cache_path)) {
    try {
      std::ifstream in(*cache_path);
      nlohmann::json j;
      in >> j;
      ConstantsTable cached = ConstantsTable::from_json(j);
      bool usable = cached.N() == N && cached.tolerances() == tol;
      for (double s : s_exponents) usable = usable && cached.has_gn(s);
      if (usable) return cached;
    } catch (...) {
      // stale or foreign cache: recompute
    }
  }

  ConstantsTable t;
  t.N_ = N;
  t.tol_ = tol;
  t.S_ = aubin_talenti(N, tol, &t.S_prov_);
  t.eigen_ = ball_principal_eigenvalue(N, tol, 2048, &t.theta_prov_);
  for (double s : s_exponents) {
    if (!t.has_gn(s)) t.gn_[s] = gn_best_constant(N, s, tol);
  }

  if (cache_path) {
    std::error_code ec;
    fs::create_directories(cache_path->parent_path(), ec);
    std::ofstream out(*cache_path);
    if (out) out << t.to_json().dump(1) << '\n';
  }
  return t;
}

}  // namespace nnls
