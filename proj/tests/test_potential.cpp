#include <doctest.h>

#include <cmath>

#include "nnls/errors.hpp"
#include "nnls/grid.hpp"
#include "nnls/potential.hpp"
#include "oracles.hpp"

using namespace nnls;

TEST_CASE("zero potential has vanishing norms") {
  RadialGrid grid(32.0, 512, 3);
  const auto n = potential_norms(RadialPotential::zero(), 3, grid);
  CHECK(n.vminus_n2 == 0.0);
  CHECK(n.v_n2 == 0.0);
  CHECK(n.vtilde_plus_n2 == 0.0);
  CHECK(n.v_inf == 0.0);
  CHECK(n.vtilde_inf == 0.0);
}

TEST_CASE("slowly decaying tails are rejected") {
  RadialGrid grid(32.0, 512, 3);
  try {
    potential_norms(RadialPotential::power_decay(1.0, 1.5), 3, grid);  // 1.5*3/2 = 2.25 <= 3
    FAIL("expected TailNotIntegrable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TailNotIntegrable);
  }
  CHECK_NOTHROW(potential_norms(RadialPotential::power_decay(1.0, 2.5), 3, grid));
}

TEST_CASE("power-decay N/2 norm matches an independent adaptive quadrature") {
  const auto V = RadialPotential::power_decay(0.1, 4.0);
  const auto n = potential_norms_auto(V, 3);
  // ||V_-||_{3/2}^{3/2} = sigma * int_0^inf (0.1/(1+s^4))^{3/2} s^2 ds
  const double sigma = RadialGrid::unit_sphere_area(3);
  const double integral = oracle::adaptive_halfline([](double s) {
    return std::pow(0.1 / (1.0 + s * s * s * s), 1.5) * s * s;
  });
  const double expect = std::pow(sigma * integral, 2.0 / 3.0);
  CHECK(n.vminus_n2 == doctest::Approx(expect).epsilon(1e-8));
  CHECK(n.v_n2 == doctest::Approx(expect).epsilon(1e-8));  // V <= 0 everywhere
  CHECK(n.v_inf == doctest::Approx(0.1).epsilon(1e-12));
  // ||Vtilde||_inf = c*tau/4 attained at s = 1
  CHECK(n.vtilde_inf == doctest::Approx(0.1).epsilon(1e-6));
}

TEST_CASE("the N/2 norm scales linearly in c") {
  const auto n1 = potential_norms_auto(RadialPotential::power_decay(0.05, 4.0), 3);
  const auto n2 = potential_norms_auto(RadialPotential::power_decay(0.10, 4.0), 3);
  CHECK(n2.vminus_n2 == doctest::Approx(2.0 * n1.vminus_n2).epsilon(1e-12));
}

TEST_CASE("Vtilde is nonnegative for radially increasing potentials") {
  const auto V = RadialPotential::power_decay(0.3, 3.0);
  for (double s = 0.0; s < 64.0; s += 0.37) CHECK(V.vtilde(s) >= 0.0);
}

TEST_CASE("hypothesis report for the zero potential") {
  const double S = 5.4779040895;
  const auto rep = check_hypotheses(RadialPotential::zero(), 3, S);
  CHECK(rep.v0_holds);
  CHECK(rep.v0_margin == doctest::Approx(S));
  CHECK_FALSE(rep.v1_sufficient_holds);  // derivative identically zero
}

TEST_CASE("v0 flips exactly at the linear crossing c* = S/||V_-(c=1)||") {
  const double S = 5.4779040895;
  const double norm_unit = potential_norms_auto(RadialPotential::power_decay(1.0, 4.0), 3).vminus_n2;
  const double c_star = S / norm_unit;
  const auto below = check_hypotheses(RadialPotential::power_decay(0.999 * c_star, 4.0), 3, S);
  const auto above = check_hypotheses(RadialPotential::power_decay(1.001 * c_star, 4.0), 3, S);
  CHECK(below.v0_holds);
  CHECK_FALSE(above.v0_holds);
}

TEST_CASE("power-decay satisfies the sampled sufficient decay condition") {
  const double S = 5.4779040895;
  const auto rep = check_hypotheses(RadialPotential::power_decay(0.1, 4.0), 3, S);
  CHECK(rep.v0_holds);
  CHECK(rep.v1_sufficient_holds);
  CHECK(rep.c0 > 0.0);
  CHECK(rep.tau0 >= 3.9);  // s V'(s) ~ c tau s^{-tau}
  CHECK(rep.samples.size() >= 8);
}

TEST_CASE("custom potentials interpolate their table monotonically") {
  std::vector<double> radii, values;
  for (double s = 0.0; s <= 16.0; s += 0.25) {
    radii.push_back(s);
    values.push_back(-0.1 / (1.0 + std::pow(s, 4.0)));
  }
  const auto V = RadialPotential::custom(radii, values);
  const auto ref = RadialPotential::power_decay(0.1, 4.0);
  for (double s = 0.05; s < 15.0; s += 0.173) {
    CHECK(V.value(s) == doctest::Approx(ref.value(s)).epsilon(5e-3));
    CHECK(V.value(s) <= 0.0);
  }
  CHECK(V.value(100.0) == 0.0);  // zero beyond the table
  const auto n = potential_norms_auto(V, 3);
  const auto nref = potential_norms_auto(ref, 3);
  CHECK(n.vminus_n2 == doctest::Approx(nref.vminus_n2).epsilon(1e-2));
}

TEST_CASE("potential JSON specs round-trip") {
  const auto V = RadialPotential::from_json({{"kind", "power_decay"}, {"c", 0.1}, {"tau", 4.0}});
  CHECK(V.kind() == PotentialKind::PowerDecay);
  CHECK(V.value(0.0) == doctest::Approx(-0.1));
  const auto j = V.to_json();
  CHECK(j.at("kind") == "power_decay");
  CHECK_THROWS_AS(RadialPotential::from_json({{"kind", "mystery"}}), Error);
  CHECK_NOTHROW(RadialPotential::from_json({{"kind", "zero"}}));
}
