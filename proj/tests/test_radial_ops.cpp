#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "nnls/constants.hpp"
#include "nnls/errors.hpp"
#include "nnls/radial.hpp"

using namespace nnls;

namespace {

ValidatedParams std_params(double beta = 1.0, double alpha = 1.0) {
  return validate_params({3, 3.0, 5.0, beta, alpha});
}

RadialFunction gaussian(GridPtr g, double width = 1.0) {
  return RadialFunction::from(g, [width](double s) { return std::exp(-s * s / width); });
}

}  // namespace

TEST_CASE("energy functionals collapse at s = 1 and weight the q-term at s = 1/2") {
  auto g = make_grid(8.0, 256, 3);
  auto u = gaussian(g);
  const auto params = std_params();
  const auto V = PotentialOnGrid::sample(RadialPotential::power_decay(0.1, 4.0), *g);

  const auto e_full = energy(u, Functional::Full, 1.0, V, params);
  const auto e_q1 = energy(u, Functional::QScaled, 1.0, V, params);
  const auto e_a1 = energy(u, Functional::AllScaled, 1.0, V, params);
  CHECK(e_full.total == doctest::Approx(e_q1.total).epsilon(1e-15));
  CHECK(e_full.total == doctest::Approx(e_a1.total).epsilon(1e-15));

  const auto e_qh = energy(u, Functional::QScaled, 0.5, V, params);
  CHECK(e_qh.wq == 0.5);
  CHECK(e_qh.wp == 1.0);
  CHECK(e_qh.q_term == doctest::Approx(e_q1.q_term));  // the term itself is unweighted
  CHECK(e_q1.total - e_qh.total == doctest::Approx(-0.5 * e_q1.q_term).epsilon(1e-13));

  const auto e_ah = energy(u, Functional::AllScaled, 0.5, V, params);
  CHECK(e_ah.wp == 0.5);

  // representation invariant: total equals the signed sum of parts
  CHECK(e_ah.total ==
        e_ah.kinetic + e_ah.potential - e_ah.wq * e_ah.q_term - e_ah.wp * e_ah.p_term);

  RadialFunction zero(g);
  CHECK(energy(zero, Functional::Full, 1.0, V, params).total == 0.0);
}

TEST_CASE("multiplier is invariant under u -> -u and matches the least-squares fit") {
  auto g = make_grid(8.0, 512, 3);
  auto u = gaussian(g, 2.0);
  const auto params = std_params();
  const auto V = PotentialOnGrid::sample(RadialPotential::zero(), *g);
  const auto mr = residual_and_multiplier(u, Functional::Full, 1.0, V, params);
  RadialFunction neg = u;
  for (int i = 0; i < neg.size(); ++i) neg[i] = -neg[i];
  const auto mr2 = residual_and_multiplier(neg, Functional::Full, 1.0, V, params);
  CHECK(mr.lambda == doctest::Approx(mr2.lambda).epsilon(1e-14));
  const double ls = least_squares_multiplier(u, Functional::Full, 1.0, V, params);
  CHECK(std::abs(mr.lambda - ls) / (1.0 + std::abs(mr.lambda)) <= 1e-12);
}

TEST_CASE("the discrete eigenpair satisfies the linear stationarity equation") {
  Tolerances tol;
  const auto eig = ball_eigen_single(3, 512, tol);
  // -Δ v1 = θ v1 at the interior nodes, in the quadrature norm
  const auto lap = neg_laplacian(eig.v1);
  const auto& w = eig.v1.grid().node_weights();
  double err = 0.0;
  for (int i = 0; i < 512; ++i) {
    const double d = lap[i] - eig.theta * eig.v1[i];
    err += w[i] * d * d;
  }
  CHECK(std::sqrt(err) <= 1e-9);

  // tiny-amplitude nonlinear residual reduces to the linear one
  const auto params = validate_params({3, 3.0, 5.0, 0.0, 1e-16});
  RadialFunction v = eig.v1;
  rescale_mass(v, 1e-16);
  const auto V = PotentialOnGrid::sample(RadialPotential::zero(), v.grid());
  const auto mr = residual_and_multiplier(v, Functional::Full, 1.0, V, params);
  CHECK(mr.lambda == doctest::Approx(-eig.theta).epsilon(1e-10));
  CHECK(mr.residual_norm <= 1e-12);
}

TEST_CASE("pohozaev residual is large away from critical points") {
  auto g = make_grid(8.0, 512, 3);
  auto u = gaussian(g);
  const auto params = std_params();
  const auto V = PotentialOnGrid::sample(RadialPotential::zero(), *g);
  const auto mr = residual_and_multiplier(u, Functional::Full, 1.0, V, params);
  CHECK(pohozaev_residual(u, mr.lambda, Functional::Full, 1.0, V, params) > 1e-2);
}

TEST_CASE("tail fit recovers a synthetic exponential rate") {
  auto g = make_grid(20.0, 2048, 3);
  auto u = RadialFunction::from(g, [](double s) { return std::exp(-2.0 * s); });
  const auto fit = tail_decay_fit(u);
  CHECK(fit.rate == doctest::Approx(-2.0).epsilon(1e-3));
  CHECK(fit.quality > 0.9999);
  CHECK(fit.exponential());

  RadialFunction flat(g);  // all zeros in the window
  CHECK_THROWS_AS(tail_decay_fit(flat), Error);
}

TEST_CASE("bump tracker finds origin and off-center bumps") {
  auto g = make_grid(10.0, 1024, 3);
  auto one = gaussian(g);
  const auto b1 = bump_tracker(one, 0.01);
  REQUIRE(b1.size() == 1);
  CHECK(b1[0].location == 0.0);
  CHECK(b1[0].dist_to_boundary == doctest::Approx(10.0));

  auto two = RadialFunction::from(g, [](double s) {
    return std::exp(-s * s) + std::exp(-(s - 5.0) * (s - 5.0));
  });
  const auto b2 = bump_tracker(two, 0.01);
  REQUIRE(b2.size() == 2);
  CHECK(b2[1].location == doctest::Approx(5.0).epsilon(1e-2));
}

TEST_CASE("profile formats round-trip") {
  namespace fs = std::filesystem;
  auto g = make_grid(5.0, 128, 4);
  auto u = gaussian(g, 1.7);
  const auto dir = fs::temp_directory_path();
  const auto bin = (dir / "nnls_test_profile.bin").string();
  const auto csv = (dir / "nnls_test_profile.csv").string();
  write_profile_bin(u, bin);
  const auto back = read_profile_bin(bin);
  CHECK(back.grid().R() == u.grid().R());
  CHECK(back.grid().M() == u.grid().M());
  CHECK(back.grid().dim() == u.grid().dim());
  for (int i = 0; i < u.size(); ++i) CHECK(back[i] == u[i]);  // bit-exact
  write_profile_csv(u, csv);
  std::remove(bin.c_str());
  std::remove(csv.c_str());
  CHECK_THROWS_AS(read_profile_bin((dir / "missing_profile.bin").string()), Error);
}

TEST_CASE("energy balance at a formula-multiplier point measures the dual kinetic route") {
  auto g = make_grid(8.0, 512, 3);
  auto u = gaussian(g, 2.0);
  rescale_mass(u, 1.0);
  const auto params = std_params();
  const auto V = PotentialOnGrid::sample(RadialPotential::zero(), *g);
  const auto mr = residual_and_multiplier(u, Functional::Full, 1.0, V, params);
  const double bal = energy_balance_residual(u, mr.lambda, Functional::Full, 1.0, V, params);
  CHECK(bal == doctest::Approx(std::abs(kinetic_nodal(u) - kinetic(u))).epsilon(1e-10));
}
