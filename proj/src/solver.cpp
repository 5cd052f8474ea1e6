#include "nnls/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nnls/detail/pchip.hpp"
#include "nnls/detail/tridiag.hpp"
#include "nnls/errors.hpp"

#include <cstdio>
#include <cstdlib>

namespace nnls {

const char* to_string(Branch b) {
  return b == Branch::LocalMin ? "local" : "mp";
}

Branch branch_from_string(const std::string& name) {
  if (name == "local") return Branch::LocalMin;
  if (name == "mp") return Branch::MountainPass;
  fail(ErrorCode::ConfigInvalid, "unknown branch '" + name + "' (expected local|mp)");
}

int PathState::max_index() const {
  int arg = 0;
  for (int k = 1; k < static_cast<int>(energies.size()); ++k)
    if (energies[k] > energies[arg]) arg = k;
  return arg;
}


namespace {
bool trace_enabled() {
  static const bool on = std::getenv("NNLS_TRACE") != nullptr;
  return on;
}
}  // namespace

struct Solver::Work {
  GridPtr grid;
  PotentialOnGrid V;
  Functional f = Functional::Full;
  double s = 1.0;
};

Solver::Solver(ValidatedParams params, RadialPotential V, const ConstantsTable& constants,
               SolverTolerances tol)
    : params_(params), V_(std::move(V)), constants_(constants), tol_(tol) {
  norms_ = potential_norms_auto(V_, params_.N());
}

const ThresholdReport& Solver::thresholds(Regime regime) const {
  auto it = threshold_cache_.find(regime);
  if (it == threshold_cache_.end()) {
    it = threshold_cache_
             .emplace(regime, compute_thresholds(params_, norms_, constants_, regime))
             .first;
  }
  return it->second;
}

const EigenResult& Solver::eigen_for(int M) const {
  auto it = eigen_cache_.find(M);
  if (it == eigen_cache_.end())
    it = eigen_cache_.emplace(M, ball_eigen_single(params_.N(), M, constants_.tolerances()))
             .first;
  return it->second;
}

Solver::Work Solver::make_work(GridPtr grid, Functional f, double s) const {
  Work w;
  w.grid = grid;
  w.V = PotentialOnGrid::sample(V_, *grid);
  w.f = f;
  w.s = s;
  return w;
}

namespace {

double dot_w(const RadialGrid& grid, const std::vector<double>& a, const std::vector<double>& b) {
  const auto& w = grid.node_weights();
  double sum = 0.0;
  const size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; ++i) sum += w[i] * a[i] * b[i];
  return sum;
}

// d solving (A + kappa W) d = W g on the interior nodes.
std::vector<double> precondition(const RadialGrid& grid, const std::vector<double>& g,
                                 double kappa) {
  const int M = grid.M();
  const double h2 = grid.h() * grid.h();
  const auto& cw = grid.cell_weights();
  const auto& w = grid.node_weights();
  std::vector<double> diag(M), off(M - 1), rhs(M);
  for (int i = 0; i < M; ++i) {
    diag[i] = ((i > 0 ? cw[i - 1] : 0.0) + cw[i]) / h2 + kappa * w[i];
    if (i < M - 1) off[i] = -cw[i] / h2;
    rhs[i] = w[i] * g[i];
  }
  auto d = detail::solve_tridiag(off, diag, off, rhs);
  d.push_back(0.0);  // boundary node
  return d;
}

void project_tangent(const RadialGrid& grid, std::vector<double>& d, const RadialFunction& u) {
  const double num = dot_w(grid, d, u.values());
  const double den = dot_w(grid, u.values(), u.values());
  const double c = num / den;
  for (size_t i = 0; i < d.size(); ++i) d[i] -= c * u.values()[i];
}

void take_step(RadialFunction& out, const RadialFunction& u, const std::vector<double>& d,
               double eta, double alpha) {
  for (int i = 0; i < u.size(); ++i) out[i] = u[i] - eta * d[i];
  out.enforce_dirichlet();
  rescale_mass(out, alpha);
}

void clip_negatives(RadialFunction& u, double alpha) {
  for (int i = 0; i < u.size(); ++i) u[i] = std::abs(u[i]);
  rescale_mass(u, alpha);
}

#ifndef NDEBUG
void debug_gn_check(const ConstantsTable& constants, const ValidatedParams& params,
                    const RadialFunction& u) {
  const double k = kinetic(u);
  const double eps_disc = std::abs(kinetic_nodal(u) - k) / std::max(k, 1e-300);
  const double slack = 1e-6 + 4.0 * eps_disc;  // near-extremal iterates cross by O(h^2)
  for (double s : {params.p(), params.q()}) {
    const double lhs = lp_integral(u, s);
    const double m = mass(u);
    const double rhs = constants.C(s) *
                       std::pow(m, (2.0 * s - params.N() * (s - 2.0)) / 4.0) *
                       std::pow(k, params.N() * (s - 2.0) / 4.0);
    if (lhs > rhs * (1.0 + slack))
      fail(ErrorCode::Internal, "iterate violates the Gagliardo-Nirenberg bound");
  }
}
#endif

}  // namespace

// ---------------------------------------------------------------------------
// energy descent (local-minimum branch and string evolution)
// ---------------------------------------------------------------------------

void Solver::descend_energy(const Work& w, RadialFunction& u, int max_iters, double cap_grad_sq,
                            int* iterations, bool* hit_cap, double* out_residual) const {
  const double alpha = params_.alpha();
  double eta = 0.5;
  int cap_streak = 0;
  int tiny_streak = 0;
  RadialFunction trial(w.grid);
  *hit_cap = false;
  int it = 0;
  for (; it < max_iters; ++it) {
    const auto mr = residual_and_multiplier(u, w.f, w.s, w.V, params_);
    const double kin = kinetic(u);
    if (mr.residual_norm <= tol_.res_rel * (1.0 + kin)) {
      *out_residual = mr.residual_norm;
      *iterations += it;
      return;
    }
    const double kappa = 1.0 + std::abs(mr.lambda) + norms_.v_inf;
    auto d = precondition(*w.grid, mr.field, kappa);
    project_tangent(*w.grid, d, u);
    double slope = dot_w(*w.grid, mr.field, d);
    if (!(slope > 0.0)) {
      d = mr.field;
      project_tangent(*w.grid, d, u);
      slope = dot_w(*w.grid, mr.field, d);
    }
    const double E0 = energy(u, w.f, w.s, w.V, params_).total;
    eta = std::min(eta * 1.6, 1e4);
    bool accepted = false;
    bool cap_blocked = false;
    for (int ls = 0; ls < 70; ++ls) {
      take_step(trial, u, d, eta, alpha);
      if (cap_grad_sq > 0.0 && kinetic(trial) > cap_grad_sq) {
        cap_blocked = true;
        eta *= 0.5;
        continue;
      }
      const double Ev = energy(trial, w.f, w.s, w.V, params_).total;
      if (Ev <= E0 - 1e-4 * eta * slope) {
        accepted = true;
        break;
      }
      eta *= 0.5;
    }
    if (trace_enabled() && it % 500 == 0)
      std::fprintf(stderr, "[energy] it=%d E=%.12e rn=%.3e eta=%.2e acc=%d\n", it, E0,
                   mr.residual_norm, eta, accepted ? 1 : 0);
    if (!accepted) {
      if (cap_blocked && ++cap_streak > 20) {
        *hit_cap = true;
        *iterations += it;
        *out_residual = mr.residual_norm;
        return;
      }
      if (!cap_blocked) {
        // energy decrements hit the floating floor; the residual polish
        // phase takes over from here
        *iterations += it;
        *out_residual = mr.residual_norm;
        return;
      }
    } else {
      cap_streak = 0;
      const double Ev = energy(trial, w.f, w.s, w.V, params_).total;
      if (E0 - Ev <= 8.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(E0))) {
        if (++tiny_streak > 8) {
          // at the floating floor of the energy; hand off to the polish phase
          u = trial;
          *iterations += it;
          *out_residual = mr.residual_norm;
          return;
        }
      } else {
        tiny_streak = 0;
      }
      u = trial;
      if (tol_.clip_every > 0 && it % tol_.clip_every == tol_.clip_every - 1) {
        clip_negatives(u, alpha);
#ifndef NDEBUG
        debug_gn_check(constants_, params_, u);
#endif
      }
    }
  }
  *iterations += it;
  const auto mr = residual_and_multiplier(u, w.f, w.s, w.V, params_);
  *out_residual = mr.residual_norm;
}

// ---------------------------------------------------------------------------
// result assembly
// ---------------------------------------------------------------------------

SolveResult Solver::finalize(const Work& w, RadialFunction u, Branch branch, int iterations,
                             bool converged) const {
  SolveResult res;
  const auto mr = residual_and_multiplier(u, w.f, w.s, w.V, params_);
  res.lambda = mr.lambda;
  res.lambda_ls = least_squares_multiplier(u, w.f, w.s, w.V, params_);
  res.residual_norm = mr.residual_norm;
  res.energy = energy(u, w.f, w.s, w.V, params_);
  res.branch = branch;
  res.s = w.s;
  res.r = w.grid->R();
  res.pohozaev = pohozaev_residual(u, mr.lambda, w.f, w.s, w.V, params_, true);
  res.energy_balance = energy_balance_residual(u, mr.lambda, w.f, w.s, w.V, params_);
  const double uR = boundary_derivative(u);
  res.boundary_flux = w.grid->sphere_area() * std::pow(w.grid->R(), params_.N()) * uR * uR /
                      (2.0 * params_.N());
  res.mass_error = std::abs(mass(u) - params_.alpha()) / params_.alpha();
  res.iterations = iterations;
  res.converged = converged;
  res.diag.sup_u = sup_norm(u);
  res.diag.grad_norm_sq = kinetic(u);
  try {
    const TailFit fit = tail_decay_fit(u);
    res.diag.tail_rate = fit.rate;
    res.diag.tail_quality = fit.quality;
  } catch (const Error&) {
    res.diag.tail_rate = std::numeric_limits<double>::quiet_NaN();
    res.diag.tail_quality = 0.0;
  }
  res.diag.bumps = bump_tracker(u, 0.01 * res.diag.sup_u);
  res.u = std::move(u);
  return res;
}

// ---------------------------------------------------------------------------
// local-minimum branch
// ---------------------------------------------------------------------------

RadialFunction Solver::initial_guess_local(double r, int M) const {
  const auto& thr = thresholds(Regime::BetaPositiveLocalMin);
  if (!(r > thr.r_alpha)) {
    std::ostringstream msg;
    msg << "local-minimum branch needs r > r_alpha = " << thr.r_alpha << " (got r = " << r << ")";
    fail(ErrorCode::RegimeMismatch, msg.str());
  }
  const auto& eig = eigen_for(M);
  auto grid = make_grid(r, M, params_.N());
  RadialFunction u(grid);
  const double scale = std::sqrt(params_.alpha()) * std::pow(r, -params_.N() / 2.0);
  for (int i = 0; i < M; ++i) u[i] = scale * eig.v1[i];
  u.enforce_dirichlet();
  rescale_mass(u, params_.alpha());
  const double cap = thr.points.T_alpha_radius * thr.points.T_alpha_radius;
  if (!(kinetic(u) <= cap))
    fail(ErrorCode::OutsideTrustRegion,
         "dilated eigenfunction violates the gradient cap; refine the grid");
  return u;
}

SolveResult Solver::solve_local_min(double r, int M, const RadialFunction* warm_start) const {
  const auto& thr = thresholds(Regime::BetaPositiveLocalMin);
  auto grid = make_grid(r, M, params_.N());
  Work w = make_work(grid, Functional::Full, 1.0);
  RadialFunction u;
  if (warm_start != nullptr) {
    u = (warm_start->grid().M() == M && warm_start->grid().R() == r)
            ? *warm_start
            : resample(*warm_start, grid);
    rescale_mass(u, params_.alpha());
  } else {
    u = initial_guess_local(r, M);
  }
  const double cap = thr.points.T_alpha_radius * thr.points.T_alpha_radius;
  int iterations = 0;
  bool hit_cap = false;
  double residual = 0.0;
  descend_energy(w, u, tol_.max_iterations, cap, &iterations, &hit_cap, &residual);
  bool converged = residual <= tol_.res_rel * (1.0 + kinetic(u));
  if (hit_cap && !converged)
    fail(ErrorCode::HitTrustBoundary,
         "descent stalled on the gradient cap; hypotheses or configuration violated");
  if (!converged) {
    // energy decrements bottom out near the minimum; Newton finishes
    const PhiOutcome outcome = newton_polish(w, u, 200, &iterations, &residual);
    converged = outcome == PhiOutcome::Converged;
  }
  if (!converged) fail(ErrorCode::MaxIterations, "local-minimum descent did not converge");
  if (!(kinetic(u) < cap * (1.0 - 1e-9)))
    fail(ErrorCode::HitTrustBoundary, "converged point is not interior to the trust region");
  return finalize(w, std::move(u), Branch::LocalMin, iterations, converged);
}

// ---------------------------------------------------------------------------
// mountain-pass branch
// ---------------------------------------------------------------------------

namespace {

// v_t(x) = t^{N/2} sqrt(alpha) v1(t x) realized on the solve grid.
RadialFunction dilated_eigen(const GridPtr& grid, const EigenResult& eig, double t,
                             double alpha, int N) {
  const int Me = eig.v1.grid().M();
  std::vector<double> x(Me + 1), y(Me + 1);
  for (int i = 0; i <= Me; ++i) {
    x[i] = eig.v1.grid().node(i);
    y[i] = eig.v1[i];
  }
  const auto slopes = detail::pchip_slopes(x, y);
  RadialFunction u(grid);
  const double scale = std::sqrt(alpha) * std::pow(t, N / 2.0);
  for (int i = 0; i < grid->M(); ++i) {
    const double arg = t * grid->node(i);
    u[i] = arg >= 1.0 ? 0.0 : scale * detail::pchip_eval(x, y, slopes, arg).value;
  }
  u.enforce_dirichlet();
  rescale_mass(u, alpha);
  return u;
}

}  // namespace

PathState Solver::build_mp_endpoints_and_path(double r, int M, double s) const {
  const Regime regime =
      params_.beta() > 0.0 ? Regime::BetaPositiveMP : Regime::BetaNonpositiveMP;
  const auto& thr = thresholds(regime);
  if (!(r > thr.r_alpha)) {
    std::ostringstream msg;
    msg << "mountain-pass branch needs r > r_alpha = " << thr.r_alpha << " (got r = " << r
        << ")";
    fail(ErrorCode::RegimeMismatch, msg.str());
  }
  if (!(s >= 0.5 && s <= 1.0))
    fail(ErrorCode::ConfigInvalid, "homotopy parameter must lie in [1/2, 1]");

  const double sep =
      regime == Regime::BetaPositiveMP ? thr.points.t_g : thr.points.t_tilde;
  const double r_tilde = std::max(
      1.0 / thr.points.t1, std::sqrt(2.0 * thr.inputs.theta * params_.alpha() / sep));
  const double t0 = thr.points.t0;

  auto grid = make_grid(r, M, params_.N());
  const auto& eig = eigen_for(M);
  PathState path;
  path.grid = grid;
  path.s = s;
  path.functional = mp_functional();
  Work w = make_work(grid, path.functional, s);

  const int P = tol_.path_points;
  path.points.reserve(P);
  for (int k = 0; k < P; ++k) {
    const double tau = static_cast<double>(k) / (P - 1);
    const double t = tau * t0 + (1.0 - tau) / r_tilde;
    path.points.push_back(dilated_eigen(grid, eig, t, params_.alpha(), params_.N()));
  }
  path.energies.resize(P);
  for (int k = 0; k < P; ++k)
    path.energies[k] = energy(path.points[k], path.functional, s, w.V, params_).total;

  if (!(path.energies.back() <= 1e-10 * (1.0 + std::abs(path.energies.back()))))
    fail(ErrorCode::EndpointEnergyPositive,
         "E(u1) > 0 on the grid; refine the grid or enlarge r");
  const double k0 = kinetic(path.points.front());
  const double k1 = kinetic(path.points.back());
  if (!(k0 < sep && sep < k1)) {
    std::ostringstream msg;
    msg << "endpoint gradient separation violated: " << k0 << " < " << sep << " < " << k1;
    fail(ErrorCode::Internal, msg.str());
  }
  return path;
}

namespace {

// redistribute path points along energy-weighted arclength
void reparametrize(PathState& path, double alpha) {
  const int P = static_cast<int>(path.points.size());
  const auto& grid = *path.grid;
  double emin = path.energies[0], emax = path.energies[0];
  for (double e : path.energies) {
    emin = std::min(emin, e);
    emax = std::max(emax, e);
  }
  const double span = std::max(emax - emin, 1e-300);
  std::vector<double> cum(P, 0.0);
  for (int k = 1; k < P; ++k) {
    RadialFunction diff(path.points[k].grid_ptr());
    for (int i = 0; i < diff.size(); ++i) diff[i] = path.points[k][i] - path.points[k - 1][i];
    const double len = std::sqrt(mass(diff));
    const double emid = std::max(path.energies[k], path.energies[k - 1]);
    const double wgt = 1.0 + 3.0 * (emid - emin) / span;
    cum[k] = cum[k - 1] + len * wgt;
  }
  const double total = cum[P - 1];
  if (!(total > 0.0)) return;
  std::vector<RadialFunction> fresh;
  fresh.reserve(P);
  fresh.push_back(path.points.front());
  for (int m = 1; m < P - 1; ++m) {
    const double target = total * m / (P - 1);
    int k = 1;
    while (k < P - 1 && cum[k] < target) ++k;
    const double seg = cum[k] - cum[k - 1];
    const double theta = seg > 0.0 ? (target - cum[k - 1]) / seg : 0.0;
    RadialFunction v(path.grid);
    for (int i = 0; i < v.size(); ++i)
      v[i] = (1.0 - theta) * path.points[k - 1][i] + theta * path.points[k][i];
    v.enforce_dirichlet();
    rescale_mass(v, alpha);
    fresh.push_back(std::move(v));
  }
  fresh.push_back(path.points.back());
  path.points = std::move(fresh);
  (void)grid;
}

}  // namespace

Solver::PhiOutcome Solver::phi_descent(const Work& w, RadialFunction& u, double cap_grad_sq,
                                       int max_iters, int* iterations,
                                       double* out_residual) const {
  const double alpha = params_.alpha();
  const double pm2 = params_.p() - 2.0, qm2 = params_.q() - 2.0;
  const double beta = params_.beta();
  const double wq = q_weight(w.f, w.s), wp = p_weight(w.f, w.s);

  auto hessian_apply = [&](const RadialFunction& at, double lambda,
                           const std::vector<double>& vec) {
    RadialFunction vfun(w.grid);
    for (int i = 0; i < vfun.size(); ++i) vfun[i] = vec[i];
    vfun.enforce_dirichlet();
    auto out = neg_laplacian(vfun);
    for (int i = 0; i < w.grid->M(); ++i) {
      const double a = std::abs(at[i]);
      const double fp = wq * (params_.q() - 1.0) * std::pow(a, qm2) +
                        wp * beta * (params_.p() - 1.0) * std::pow(a, pm2);
      out[i] += (w.V.v[i] + lambda - fp) * vec[i];
    }
    return out;
  };

  RadialFunction trial(w.grid);
  double eta = 0.25;
  int it = 0;
  for (; it < max_iters; ++it) {
    const auto mr = residual_and_multiplier(u, w.f, w.s, w.V, params_);
    const double kin = kinetic(u);
    if (mr.residual_norm <= tol_.res_rel * (1.0 + kin)) {
      *iterations += it;
      *out_residual = mr.residual_norm;
      return PhiOutcome::Converged;
    }

    auto grad = hessian_apply(u, mr.lambda, mr.field);
    for (auto& gval : grad) gval *= 2.0;
    project_tangent(*w.grid, grad, u);
    const double kappa = 1.0 + std::abs(mr.lambda) + norms_.v_inf;
    auto d = precondition(*w.grid, grad, kappa);
    project_tangent(*w.grid, d, u);
    double slope = dot_w(*w.grid, grad, d);
    if (!(slope > 0.0)) {
      d = grad;
      slope = dot_w(*w.grid, grad, d);
    }
    const double phi0 = mr.residual_norm * mr.residual_norm;
    eta = std::min(eta * 1.5, 1e3);
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      take_step(trial, u, d, eta, alpha);
      if (cap_grad_sq > 0.0 && kinetic(trial) > cap_grad_sq) {
        eta *= 0.5;
        continue;
      }
      const auto mt = residual_and_multiplier(trial, w.f, w.s, w.V, params_);
      if (mt.residual_norm * mt.residual_norm <= phi0 - 1e-4 * eta * slope) {
        accepted = true;
        break;
      }
      eta *= 0.5;
    }
    if (trace_enabled() && it % 100 == 0)
      std::fprintf(stderr, "[phi] it=%d rn=%.6e tol=%.3e eta=%.2e acc=%d slope=%.3e\n", it,
                   mr.residual_norm, tol_.res_rel * (1.0 + kin), eta, accepted ? 1 : 0, slope);
    if (!accepted) {
      *iterations += it;
      *out_residual = mr.residual_norm;
      return PhiOutcome::Stalled;
    }
    u = trial;
  }
  *iterations += it;
  const auto mr = residual_and_multiplier(u, w.f, w.s, w.V, params_);
  *out_residual = mr.residual_norm;
  return PhiOutcome::Budget;
}

Solver::PhiOutcome Solver::newton_polish(const Work& w, RadialFunction& u, int max_iters,
                                         int* iterations, double* out_residual) const {
  const int M = w.grid->M();
  const auto& wts = w.grid->node_weights();
  const auto& cw = w.grid->cell_weights();
  const double h2 = w.grid->h() * w.grid->h();
  const double alpha = params_.alpha();
  const double beta = params_.beta();
  const double wq = q_weight(w.f, w.s), wp = p_weight(w.f, w.s);
  const double pm2 = params_.p() - 2.0, qm2 = params_.q() - 2.0;

  auto field_at = [&](const RadialFunction& at, double lambda) {
    auto out = neg_laplacian(at);
    for (int i = 0; i < M; ++i) {
      const double a = std::abs(at[i]);
      out[i] += (w.V.v[i] + lambda) * at[i] -
                (wq * std::pow(a, qm2) + wp * beta * std::pow(a, pm2)) * at[i];
    }
    out[M] = 0.0;
    return out;
  };
  auto merit_of = [&](const std::vector<double>& field, double mass_defect) {
    double rn2 = 0.0;
    for (int i = 0; i < M; ++i) rn2 += wts[i] * field[i] * field[i];
    return rn2 + mass_defect * mass_defect;
  };

  double lambda = residual_and_multiplier(u, w.f, w.s, w.V, params_).lambda;
  RadialFunction trial(w.grid);
  int it = 0;
  for (; it < max_iters; ++it) {
    const auto field = field_at(u, lambda);
    const double mdef = mass(u) - alpha;
    double rn2 = 0.0;
    for (int i = 0; i < M; ++i) rn2 += wts[i] * field[i] * field[i];
    const double rn = std::sqrt(rn2);
    if (rn <= tol_.res_rel * (1.0 + kinetic(u)) &&
        std::abs(mdef) <= 0.1 * tol_.mass_rel * alpha) {
      rescale_mass(u, alpha);
      *iterations += it;
      *out_residual = rn;
      return PhiOutcome::Converged;
    }

    // bordered system: [J, Wu; (Wu)^T, 0] [du; dl] = -[W field; C]
    std::vector<double> diag(M), off(M - 1), rhs(M), wu(M);
    for (int i = 0; i < M; ++i) {
      const double a = std::abs(u[i]);
      const double fp = wq * (params_.q() - 1.0) * std::pow(a, qm2) +
                        wp * beta * (params_.p() - 1.0) * std::pow(a, pm2);
      diag[i] = ((i > 0 ? cw[i - 1] : 0.0) + cw[i]) / h2 + wts[i] * (w.V.v[i] + lambda - fp);
      if (i < M - 1) off[i] = -cw[i] / h2;
      rhs[i] = wts[i] * field[i];
      wu[i] = wts[i] * u[i];
    }
    const auto a_sol = detail::solve_tridiag(off, diag, off, rhs);
    const auto b_sol = detail::solve_tridiag(off, diag, off, wu);
    double Sa = 0.0, Sb = 0.0;
    for (int i = 0; i < M; ++i) {
      Sa += wu[i] * a_sol[i];
      Sb += wu[i] * b_sol[i];
    }
    const double C = 0.5 * mdef;
    if (!(std::abs(Sb) > 0.0) || !std::isfinite(Sa) || !std::isfinite(Sb)) break;
    const double dl = (C - Sa) / Sb;
    const double merit0 = merit_of(field, mdef);
    bool accepted = false;
    double step = 1.0;
    for (int ls = 0; ls < 40; ++ls) {
      for (int i = 0; i < M; ++i) trial[i] = u[i] + step * (-a_sol[i] - dl * b_sol[i]);
      trial.enforce_dirichlet();
      const double lt = lambda + step * dl;
      const auto ft = field_at(trial, lt);
      const double mt = merit_of(ft, mass(trial) - alpha);
      if (std::isfinite(mt) && mt <= merit0 * (1.0 - 1e-4 * step)) {
        u = trial;
        lambda = lt;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  *iterations += it;
  const auto mr = residual_and_multiplier(u, w.f, w.s, w.V, params_);
  *out_residual = mr.residual_norm;
  return PhiOutcome::Stalled;
}

SolveResult Solver::refine_saddle(const RadialFunction& start, double s) const {
  const Regime regime =
      params_.beta() > 0.0 ? Regime::BetaPositiveMP : Regime::BetaNonpositiveMP;
  const auto& thr = thresholds(regime);
  Work w = make_work(start.grid_ptr(), mp_functional(), s);
  RadialFunction u = start;
  rescale_mass(u, params_.alpha());
  const double cap_grad = regime == Regime::BetaNonpositiveMP ? 1.5 * thr.h1_apriori : 0.0;
  int it = 0;
  double rn = 0.0;
  // Newton first: its basin is local, which keeps warm starts on their branch
  RadialFunction attempt = u;
  PhiOutcome outcome = newton_polish(w, attempt, 100, &it, &rn);
  if (outcome != PhiOutcome::Converged) {
    // globalize with residual descent from the original start, then finish
    attempt = u;
    outcome = phi_descent(w, attempt, cap_grad, 300, &it, &rn);
    if (outcome != PhiOutcome::Converged) outcome = newton_polish(w, attempt, 200, &it, &rn);
  }
  if (outcome != PhiOutcome::Converged)
    fail(ErrorCode::SaddleRefinementDiverged,
         "saddle refinement stalled away from a critical point");
  return finalize(w, std::move(attempt), Branch::MountainPass, it, true);
}

namespace {

void check_sandwich(double level, double lo, double hi) {
  const double slack = 1e-7 * (1.0 + std::abs(hi));
  if (!(level >= lo - slack && level <= hi + slack)) {
    std::ostringstream msg;
    msg << "converged level " << level << " outside the sandwich [" << lo << ", " << hi << "]";
    fail(ErrorCode::SandwichViolated, msg.str());
  }
}

}  // namespace

SolveResult Solver::solve_mountain_pass(PathState& path) const {
  const Regime regime =
      params_.beta() > 0.0 ? Regime::BetaPositiveMP : Regime::BetaNonpositiveMP;
  const auto& thr = thresholds(regime);
  Work w = make_work(path.grid, path.functional, path.s);
  const double alpha = params_.alpha();
  const int P = static_cast<int>(path.points.size());
  const double cap_grad =
      regime == Regime::BetaNonpositiveMP ? 1.5 * thr.h1_apriori : 0.0;

  std::vector<double> eta(P, 0.05);
  RadialFunction trial(path.grid);
  double emax_prev = std::numeric_limits<double>::infinity();
  int stall = 0, boundary_max = 0;
  // points that fell below the barrier-relevant range stay put: the minimax
  // only cares about the ridge, and the downhill side is unbounded below
  const double E_freeze = std::min(0.0, path.energies.back());
  for (int iter = 0; iter < tol_.string_max_iterations; ++iter) {
    for (int k = 1; k < P - 1; ++k) {
      auto& u = path.points[k];
      if (path.energies[k] < E_freeze) continue;
      const auto mr = residual_and_multiplier(u, w.f, w.s, w.V, params_);
      const double kappa = 1.0 + std::abs(mr.lambda) + norms_.v_inf;
      auto d = precondition(*path.grid, mr.field, kappa);
      project_tangent(*path.grid, d, u);
      double slope = dot_w(*path.grid, mr.field, d);
      if (!(slope > 0.0)) continue;
      const double dnorm = std::sqrt(dot_w(*path.grid, d, d));
      const double eta_cap = 0.1 * std::sqrt(alpha) / (dnorm + 1e-300);
      const double E0 = path.energies[k];
      bool accepted = false;
      eta[k] = std::min(eta[k] * 1.4, eta_cap);
      for (int ls = 0; ls < 10; ++ls) {
        take_step(trial, u, d, eta[k], alpha);
        if (cap_grad > 0.0 && kinetic(trial) > cap_grad) {
          eta[k] *= 0.5;
          continue;
        }
        const double Ev = energy(trial, w.f, w.s, w.V, params_).total;
        if (Ev <= E0) {
          accepted = true;
          path.energies[k] = Ev;
          break;
        }
        eta[k] *= 0.5;
      }
      if (accepted) u = trial;
    }
    reparametrize(path, alpha);
    for (int k = 0; k < P; ++k)
      path.energies[k] = energy(path.points[k], w.f, w.s, w.V, params_).total;

    const int arg = path.max_index();
    if (arg == 0 || arg == P - 1) {
      if (++boundary_max > 10)
        fail(ErrorCode::PathCollapsed,
             "path maximum migrated to an endpoint; mountain-pass geometry violated");
    } else {
      boundary_max = 0;
    }
    const double emax = path.energies[arg];
    if (std::abs(emax - emax_prev) <= tol_.string_stall * (1.0 + std::abs(emax))) {
      if (++stall > 25) break;
    } else {
      stall = 0;
    }
    emax_prev = emax;
  }

  const int arg = path.max_index();
  if (arg == 0 || arg == P - 1)
    fail(ErrorCode::PathCollapsed, "string ended with its maximum at an endpoint");
  SolveResult res = refine_saddle(path.points[arg], path.s);

  // positivity pass: the limit profile is nonnegative
  if (res.converged) {
    double neg = 0.0;
    for (int i = 0; i < res.u.size(); ++i) neg = std::min(neg, res.u[i]);
    if (neg < 0.0) {
      RadialFunction cleaned = res.u;
      clip_negatives(cleaned, alpha);
      SolveResult redo = refine_saddle(cleaned, path.s);
      if (redo.converged) res = std::move(redo);
    }
  }

  check_sandwich(res.energy.total, thr.mp_lower, thr.mp_upper);
  return res;
}

SolveResult Solver::solve_mountain_pass(double r, int M, double s) const {
  // the string phase only needs to land in the saddle's basin; run it at a
  // coarse resolution and polish at the requested one
  const int M_string = std::min(M, 1024);
  PathState path = build_mp_endpoints_and_path(r, M_string, s);
  SolveResult coarse = solve_mountain_pass(path);
  if (M_string == M) return coarse;

  auto grid = make_grid(r, M, params_.N());
  RadialFunction warm = resample(coarse.u, grid);
  rescale_mass(warm, params_.alpha());
  SolveResult res = refine_saddle(warm, s);
  const Regime regime =
      params_.beta() > 0.0 ? Regime::BetaPositiveMP : Regime::BetaNonpositiveMP;
  const auto& thr = thresholds(regime);
  check_sandwich(res.energy.total, thr.mp_lower, thr.mp_upper);
  return res;
}

// ---------------------------------------------------------------------------
// limit processes
// ---------------------------------------------------------------------------

std::vector<SolveResult> Solver::s_homotopy(double r, int M,
                                            const std::vector<double>& s_grid) const {
  if (s_grid.empty()) fail(ErrorCode::ConfigInvalid, "empty homotopy grid");
  for (size_t i = 1; i < s_grid.size(); ++i)
    if (!(s_grid[i] > s_grid[i - 1]))
      fail(ErrorCode::ConfigInvalid, "homotopy grid must be increasing");
  if (std::abs(s_grid.back() - 1.0) > 1e-12)
    fail(ErrorCode::ConfigInvalid, "homotopy grid must end at s = 1");

  std::vector<SolveResult> chain;
  for (double s : s_grid) {
    try {
      if (chain.empty()) {
        chain.push_back(solve_mountain_pass(r, M, s));
      } else {
        try {
          chain.push_back(refine_saddle(chain.back().u, s));
        } catch (const Error&) {
          chain.push_back(solve_mountain_pass(r, M, s));
        }
      }
    } catch (Error& e) {
      std::ostringstream msg;
      msg << "homotopy failed at s = " << s << ": " << e.what();
      fail(e.code(), msg.str());
    }
    if (chain.size() >= 2) {
      const double prev = chain[chain.size() - 2].energy.total;
      const double cur = chain.back().energy.total;
      if (!(cur <= prev + 1e-6 * (1.0 + std::abs(prev))))
        fail(ErrorCode::Internal, "homotopy level increased along s beyond tolerance");
    }
  }
  return chain;
}

std::vector<SolveResult> Solver::continuation_in_r(const std::vector<double>& r_list, int M0,
                                                   Branch branch) const {
  if (r_list.empty()) fail(ErrorCode::ConfigInvalid, "empty radius list");
  for (size_t i = 1; i < r_list.size(); ++i)
    if (!(r_list[i] > r_list[i - 1]))
      fail(ErrorCode::ConfigInvalid, "radius list must be increasing");

  std::vector<SolveResult> results;
  const double r0 = r_list.front();
  for (double r : r_list) {
    // keep the spacing h fixed across the sweep so warm starts re-embed
    int M = static_cast<int>(std::lround(M0 * r / r0));
    if (M % 2 != 0) ++M;
    try {
      if (results.empty()) {
        results.push_back(branch == Branch::LocalMin ? solve_local_min(r, M)
                                                     : solve_mountain_pass(r, M, 1.0));
      } else {
        auto grid = make_grid(r, M, params_.N());
        RadialFunction warm = resample(results.back().u, grid);
        // continue the tail exponentially past the old radius: the far-field
        // recurrence sustains it, while zeros would satisfy the discrete
        // equations trivially and leave the window unfit
        const double rate = results.back().diag.tail_rate;
        if (std::isfinite(rate) && rate < 0.0) {
          const double R_prev = results.back().r;
          int anchor = -1;
          for (int i = grid->M(); i >= 0; --i) {
            if (grid->node(i) <= 0.9 * R_prev && warm[i] > 0.0) {
              anchor = i;
              break;
            }
          }
          if (anchor >= 0) {
            const double s0 = grid->node(anchor);
            const double u0 = warm[anchor];
            for (int i = anchor + 1; i <= grid->M(); ++i) {
              const double e = rate * (grid->node(i) - s0);
              warm[i] = e < -700.0 ? 0.0 : u0 * std::exp(e);
            }
            warm.enforce_dirichlet();
          }
        }
        rescale_mass(warm, params_.alpha());
        if (branch == Branch::LocalMin) {
          results.push_back(solve_local_min(r, M, &warm));
        } else {
          try {
            results.push_back(refine_saddle(warm, 1.0));
          } catch (const Error&) {
            results.push_back(solve_mountain_pass(r, M, 1.0));
          }
        }
      }
    } catch (Error& e) {
      std::ostringstream msg;
      msg << "continuation lost the branch at r = " << r << " (" << e.what() << "); "
          << results.size() << " of " << r_list.size() << " radii completed";
      fail(ErrorCode::BranchLost, msg.str());
    }
  }
  return results;
}

SolveResult Solver::rn_limit_solve(const SolveResult& at_r_max) const {
  if (!at_r_max.converged)
    fail(ErrorCode::TailNotDecayed, "whole-space stamp requires a converged solve");
  const RadialFunction& u = at_r_max.u;
  const TailFit fit = tail_decay_fit(u);
  if (!fit.exponential())
    fail(ErrorCode::TailNotDecayed, "tail is not cleanly exponential; increase r_max");
  const int i9 = static_cast<int>(0.9 * u.grid().M());
  const double sup = sup_norm(u);
  if (!(std::abs(u[i9]) <= tol_.tail_floor * sup))
    fail(ErrorCode::TailNotDecayed, "boundary influence above the configured floor");

  SolveResult res = at_r_max;
  Work w = make_work(u.grid_ptr(), Functional::Full, 1.0);
  res.whole_space = true;
  res.pohozaev = pohozaev_residual(u, res.lambda, w.f, 1.0, w.V, params_, false);
  return res;
}

}  // namespace nnls
