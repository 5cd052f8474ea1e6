#include "nnls/radial.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>

#include "nnls/detail/pchip.hpp"
#include "nnls/errors.hpp"
#include "nnls/format.hpp"

namespace nnls {

const char* to_string(Functional f) {
  switch (f) {
    case Functional::Full: return "full";
    case Functional::QScaled: return "q_scaled";
    case Functional::AllScaled: return "all_scaled";
  }
  return "unknown";
}

double mass(const RadialFunction& u) {
  const auto& w = u.grid().node_weights();
  double sum = 0.0;
  for (int i = 0; i < u.size(); ++i) sum += w[i] * u[i] * u[i];
  return sum;
}

double kinetic(const RadialFunction& u) {
  const auto& cw = u.grid().cell_weights();
  const double h = u.grid().h();
  double sum = 0.0;
  for (int i = 0; i < u.grid().M(); ++i) {
    const double du = (u[i + 1] - u[i]) / h;
    sum += cw[i] * du * du;
  }
  return sum;
}

std::vector<double> nodal_derivative(const RadialFunction& u) {
  const int M = u.grid().M();
  const double h = u.grid().h();
  std::vector<double> du(M + 1, 0.0);
  du[0] = 0.0;  // radial symmetry
  for (int i = 1; i < M; ++i) du[i] = (u[i + 1] - u[i - 1]) / (2.0 * h);
  du[M] = (3.0 * u[M] - 4.0 * u[M - 1] + u[M - 2]) / (2.0 * h);
  return du;
}

double boundary_derivative(const RadialFunction& u) {
  const int M = u.grid().M();
  const double h = u.grid().h();
  return (3.0 * u[M] - 4.0 * u[M - 1] + u[M - 2]) / (2.0 * h);
}

double kinetic_nodal(const RadialFunction& u) {
  const auto du = nodal_derivative(u);
  const auto& w = u.grid().node_weights();
  double sum = 0.0;
  for (int i = 0; i < u.size(); ++i) sum += w[i] * du[i] * du[i];
  return sum;
}

double lp_integral(const RadialFunction& u, double s) {
  const auto& w = u.grid().node_weights();
  double sum = 0.0;
  for (int i = 0; i < u.size(); ++i) sum += w[i] * std::pow(std::abs(u[i]), s);
  return sum;
}

double sup_norm(const RadialFunction& u) {
  double m = 0.0;
  for (int i = 0; i < u.size(); ++i) m = std::max(m, std::abs(u[i]));
  return m;
}

std::vector<double> neg_laplacian(const RadialFunction& u) {
  const int M = u.grid().M();
  const double h2 = u.grid().h() * u.grid().h();
  const auto& cw = u.grid().cell_weights();
  const auto& w = u.grid().node_weights();
  std::vector<double> out(M + 1, 0.0);
  for (int i = 0; i < M; ++i) {
    double v = -cw[i] * (u[i + 1] - u[i]);
    if (i > 0) v += cw[i - 1] * (u[i] - u[i - 1]);
    out[i] = v / (h2 * w[i]);
  }
  out[M] = 0.0;  // Dirichlet node carries no equation
  return out;
}

PotentialOnGrid PotentialOnGrid::sample(const RadialPotential& V, const RadialGrid& grid) {
  PotentialOnGrid out;
  out.v.resize(grid.M() + 1);
  out.vtilde.resize(grid.M() + 1);
  for (int i = 0; i <= grid.M(); ++i) {
    const double s = grid.node(i);
    out.v[i] = V.value(s);
    out.vtilde[i] = V.vtilde(s);
  }
  return out;
}

namespace {

struct Integrals {
  double kin, pot, lp, lq, m;
};

Integrals collect(const RadialFunction& u, const PotentialOnGrid& V,
                  const ValidatedParams& params) {
  const auto& w = u.grid().node_weights();
  Integrals I{kinetic(u), 0.0, 0.0, 0.0, 0.0};
  const double p = params.p(), q = params.q();
  for (int i = 0; i < u.size(); ++i) {
    const double a = std::abs(u[i]);
    const double a2 = a * a;
    I.pot += w[i] * V.v[i] * a2;
    I.lp += w[i] * std::pow(a, p);
    I.lq += w[i] * std::pow(a, q);
    I.m += w[i] * a2;
  }
  return I;
}

}  // namespace

EnergyBreakdown energy(const RadialFunction& u, Functional f, double s,
                       const PotentialOnGrid& V, const ValidatedParams& params) {
  const Integrals I = collect(u, V, params);
  EnergyBreakdown e;
  e.kinetic = 0.5 * I.kin;
  e.potential = 0.5 * I.pot;
  e.p_term = params.beta() / params.p() * I.lp;
  e.q_term = I.lq / params.q();
  e.s = s;
  e.wq = q_weight(f, s);
  e.wp = p_weight(f, s);
  e.total = e.kinetic + e.potential - e.wq * e.q_term - e.wp * e.p_term;
  return e;
}

MultiplierResult residual_and_multiplier(const RadialFunction& u, Functional f, double s,
                                         const PotentialOnGrid& V,
                                         const ValidatedParams& params) {
  const Integrals I = collect(u, V, params);
  if (!(I.m > 0.0)) fail(ErrorCode::NonpositiveMass, "multiplier needs mass(u) > 0");
  const double wq = q_weight(f, s);
  const double wp = p_weight(f, s);
  const double beta = params.beta();
  MultiplierResult out;
  out.lambda = -(I.kin + I.pot - wp * beta * I.lp - wq * I.lq) / I.m;

  out.field = neg_laplacian(u);
  const double pm2 = params.p() - 2.0, qm2 = params.q() - 2.0;
  const int M = u.grid().M();
  for (int i = 0; i < M; ++i) {
    const double a = std::abs(u[i]);
    const double nonlin = (wq * std::pow(a, qm2) + wp * beta * std::pow(a, pm2)) * u[i];
    out.field[i] += V.v[i] * u[i] + out.lambda * u[i] - nonlin;
  }
  const auto& w = u.grid().node_weights();
  double nrm = 0.0;
  for (int i = 0; i < M; ++i) nrm += w[i] * out.field[i] * out.field[i];
  out.residual_norm = std::sqrt(nrm);
  return out;
}

double least_squares_multiplier(const RadialFunction& u, Functional f, double s,
                                const PotentialOnGrid& V, const ValidatedParams& params) {
  // minimize over λ the quadrature norm of -Δu + Vu + λu - nonlinearity
  const auto lap = neg_laplacian(u);
  const double wq = q_weight(f, s);
  const double wp = p_weight(f, s);
  const double beta = params.beta();
  const double pm2 = params.p() - 2.0, qm2 = params.q() - 2.0;
  const auto& w = u.grid().node_weights();
  double num = 0.0, den = 0.0;
  for (int i = 0; i < u.grid().M(); ++i) {
    const double a = std::abs(u[i]);
    const double base =
        lap[i] + V.v[i] * u[i] - (wq * std::pow(a, qm2) + wp * beta * std::pow(a, pm2)) * u[i];
    num += w[i] * base * u[i];
    den += w[i] * u[i] * u[i];
  }
  if (!(den > 0.0)) fail(ErrorCode::NonpositiveMass, "least-squares multiplier needs mass > 0");
  return -num / den;
}

double pohozaev_residual(const RadialFunction& u, double lambda, Functional f, double s,
                         const PotentialOnGrid& V, const ValidatedParams& params,
                         bool include_boundary) {
  const Integrals I = collect(u, V, params);
  const int N = params.N();
  const double wq = q_weight(f, s);
  const double wp = p_weight(f, s);
  const auto& w = u.grid().node_weights();
  double ivt = 0.0;
  for (int i = 0; i < u.size(); ++i) ivt += w[i] * V.vtilde[i] * u[i] * u[i];

  double res = (N - 2.0) / (2.0 * N) * I.kin + ivt / (2.0 * N) + 0.5 * I.pot +
               0.5 * lambda * I.m - wq / params.q() * I.lq - wp * params.beta() / params.p() * I.lp;
  if (include_boundary) {
    const double uR = boundary_derivative(u);
    const double R = u.grid().R();
    res += u.grid().sphere_area() * std::pow(R, N) * uR * uR / (2.0 * N);
  }
  return std::abs(res);
}

double energy_balance_residual(const RadialFunction& u, double lambda, Functional f, double s,
                               const PotentialOnGrid& V, const ValidatedParams& params) {
  const Integrals I = collect(u, V, params);
  const double wq = q_weight(f, s);
  const double wp = p_weight(f, s);
  const double kin = kinetic_nodal(u);
  return std::abs(kin + I.pot + lambda * I.m - wp * params.beta() * I.lp - wq * I.lq);
}

TailFit tail_decay_fit(const RadialFunction& u) {
  const double R = u.grid().R();
  const double lo = 0.6 * R, hi = 0.9 * R;
  const double floor = 1e-280;
  std::vector<double> xs, ys;
  for (int i = 0; i <= u.grid().M(); ++i) {
    const double s = u.grid().node(i);
    if (s < lo || s > hi) continue;
    if (!(u[i] > floor)) continue;
    xs.push_back(s);
    ys.push_back(std::log(u[i]));
  }
  if (xs.size() < 8)
    fail(ErrorCode::WindowDegenerate,
         "fewer than 8 usable nodes in the tail window [0.6R, 0.9R]");
  const int n = static_cast<int>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double det = n * sxx - sx * sx;
  const double slope = (n * sxy - sx * sy) / det;
  const double icept = (sy - slope * sx) / n;
  double ss_res = 0.0, ss_tot = 0.0;
  const double ymean = sy / n;
  for (int i = 0; i < n; ++i) {
    const double e = ys[i] - (icept + slope * xs[i]);
    ss_res += e * e;
    ss_tot += (ys[i] - ymean) * (ys[i] - ymean);
  }
  TailFit fit;
  fit.rate = slope;
  fit.quality = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
  fit.points = n;
  return fit;
}

std::vector<Bump> bump_tracker(const RadialFunction& u, double threshold) {
  std::vector<Bump> bumps;
  const int M = u.grid().M();
  const double R = u.grid().R();
  auto push = [&](int i) {
    bumps.push_back(Bump{u.grid().node(i), u[i], R - u.grid().node(i)});
  };
  if (M >= 1 && u[0] > threshold && u[0] > u[1]) push(0);
  for (int i = 1; i < M; ++i) {
    if (u[i] <= threshold) continue;
    if (u[i] > u[i - 1] && u[i] >= u[i + 1]) push(i);
  }
  return bumps;
}

RadialFunction dilate(const RadialFunction& u, double t) {
  if (!(t > 0.0)) fail(ErrorCode::ConfigInvalid, "dilation parameter must be positive");
  auto grid = make_grid(u.grid().R() / t, u.grid().M(), u.grid().dim());
  std::vector<double> vals(u.values());
  const double scale = std::pow(t, u.grid().dim() / 2.0);
  for (auto& v : vals) v *= scale;
  return RadialFunction(std::move(grid), std::move(vals));
}

RadialFunction resample(const RadialFunction& u, GridPtr target) {
  const int M = u.grid().M();
  std::vector<double> x(M + 1), y(M + 1);
  for (int i = 0; i <= M; ++i) {
    x[i] = u.grid().node(i);
    y[i] = u[i];
  }
  const auto d = detail::pchip_slopes(x, y);
  RadialFunction out(target);
  for (int i = 0; i < target->M(); ++i) {
    const double s = target->node(i);
    out[i] = (s >= u.grid().R()) ? 0.0 : detail::pchip_eval(x, y, d, s).value;
  }
  out.enforce_dirichlet();
  return out;
}

void rescale_mass(RadialFunction& u, double target_mass) {
  const double m = mass(u);
  if (!(m > 0.0)) fail(ErrorCode::NonpositiveMass, "cannot rescale a zero function");
  const double c = std::sqrt(target_mass / m);
  for (auto& v : u.values()) v *= c;
}

double h1_distance_sq(const RadialFunction& u, const RadialFunction& v) {
  if (u.size() != v.size()) fail(ErrorCode::ConfigInvalid, "h1 distance needs matching grids");
  RadialFunction d(u.grid_ptr());
  for (int i = 0; i < u.size(); ++i) d[i] = u[i] - v[i];
  return kinetic(d) + mass(d);
}

void write_profile_csv(const RadialFunction& u, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoFailure, "cannot open " + path);
  out << "s,u\n";
  for (int i = 0; i < u.size(); ++i)
    out << format_double(u.grid().node(i)) << ',' << format_double(u[i]) << '\n';
  if (!out) fail(ErrorCode::IoFailure, "write failed on " + path);
}

namespace {
constexpr char kProfileMagic[8] = {'N', 'N', 'L', 'S', 'P', 'R', 'F', '1'};
}

void write_profile_bin(const RadialFunction& u, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoFailure, "cannot open " + path);
  out.write(kProfileMagic, 8);
  const double R = u.grid().R();
  const std::int64_t M = u.grid().M();
  const std::int64_t N = u.grid().dim();
  out.write(reinterpret_cast<const char*>(&R), sizeof(R));
  out.write(reinterpret_cast<const char*>(&M), sizeof(M));
  out.write(reinterpret_cast<const char*>(&N), sizeof(N));
  out.write(reinterpret_cast<const char*>(u.values().data()),
            static_cast<std::streamsize>(sizeof(double) * u.values().size()));
  if (!out) fail(ErrorCode::IoFailure, "write failed on " + path);
}

RadialFunction read_profile_bin(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoFailure, "cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kProfileMagic, 8) != 0)
    fail(ErrorCode::IoFailure, "not a profile file: " + path);
  double R;
  std::int64_t M, N;
  in.read(reinterpret_cast<char*>(&R), sizeof(R));
  in.read(reinterpret_cast<char*>(&M), sizeof(M));
  in.read(reinterpret_cast<char*>(&N), sizeof(N));
  if (!in) fail(ErrorCode::IoFailure, "truncated profile header: " + path);
  auto grid = make_grid(R, static_cast<int>(M), static_cast<int>(N));
  std::vector<double> vals(M + 1);
  in.read(reinterpret_cast<char*>(vals.data()),
          static_cast<std::streamsize>(sizeof(double) * vals.size()));
  if (!in) fail(ErrorCode::IoFailure, "truncated profile data: " + path);
  return RadialFunction(std::move(grid), std::move(vals));
}

}  // namespace nnls
