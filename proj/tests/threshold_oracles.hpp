// MPFR transcriptions of the printed threshold formulas, shared by the unit
// and acceptance suites.
#pragma once

#include <random>

#include "nnls/errors.hpp"
#include "nnls/thresholds.hpp"
#include "oracles.hpp"

namespace threshold_oracle {

using namespace nnls;
using oracle::Real;

struct Tuple {
  ValidatedParams params;
  ThresholdInputs in;
};

// some random tuples are internally incoherent (arbitrary constants need not
// order the sandwich bounds); samplers below retry until the geometry holds
inline Tuple random_tuple(std::mt19937_64& rng, bool beta_positive) {
  std::uniform_int_distribution<int> dims(3, 5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const int N = dims(rng);
  const double mc = 2.0 + 4.0 / N;
  const double ts = 2.0 * N / (N - 2.0);
  const double p = 2.0 + (mc - 2.0) * (0.15 + 0.7 * U(rng));
  const double q = mc + (ts - mc) * (0.15 + 0.7 * U(rng));
  const double beta = beta_positive ? 0.1 + 3.0 * U(rng) : -3.0 * U(rng);
  const double alpha = 0.05 + 4.0 * U(rng);
  ThresholdInputs in;
  in.nu_minus = 0.85 * U(rng);
  in.nu_full = in.nu_minus + 0.1 * U(rng);
  in.Cp = 0.05 + U(rng);
  in.Cq = 0.005 + 0.1 * U(rng);
  in.theta = 5.0 + 10.0 * U(rng);
  in.volume = 0.5 + 4.0 * U(rng);
  in.v_inf = U(rng);
  in.vtilde_inf = U(rng);
  return Tuple{validate_params({N, p, q, beta, alpha}), in};
}

// MPFR transcriptions of the printed expressions -----------------------------

inline Real alpha_V_oracle(const Tuple& t) {
  const Real N(t.params.N()), p(t.params.p()), q(t.params.q());
  const Real np = N * (p - Real(2)), nq = N * (q - Real(2));
  const Real b1 = (Real(1) - Real(t.in.nu_minus)) / (Real(2) * N * (q - p));
  const Real b2 = q * (Real(4) - np) / Real(t.in.Cq);
  const Real b3 = p * (nq - Real(4)) / (Real(t.params.beta()) * Real(t.in.Cp));
  return pow(b1, N / Real(2)) * pow(b2, (Real(4) - np) / (Real(2) * (q - p))) *
         pow(b3, (nq - Real(4)) / (Real(2) * (q - p)));
}

inline Real alpha_tilde_oracle(const Tuple& t, Real* A_out) {
  const Real N(t.params.N()), p(t.params.p()), q(t.params.q());
  const Real np = N * (p - Real(2)), nq = N * (q - Real(2));
  const Real Apq = (q - Real(2)) * (nq - Real(4)) / ((p - Real(2)) * (Real(4) - np));
  const Real A = Real(t.in.Cq) / q * Apq + Real(t.in.Cq) / q;
  if (A_out) *A_out = A;
  return pow(Real(2) * (Real(1) - Real(t.in.nu_minus)) / nq, N / Real(2)) *
         pow(A, Real(0) - N / Real(2)) *
         pow(p * Real(t.in.Cq) * Apq / (Real(t.params.beta()) * q * Real(t.in.Cp)),
             (nq - Real(4)) / (Real(2) * (q - p)));
}

inline Real t_tilde_oracle(const Tuple& t) {
  const Real N(t.params.N()), q(t.params.q());
  const Real nq = N * (q - Real(2));
  const Real al(t.params.alpha());
  return pow(Real(2) * q / (nq * Real(t.in.Cq)) * (Real(1) - Real(t.in.nu_minus)) *
                 pow(al, (q * (N - Real(2)) - Real(2) * N) / Real(4)),
             Real(4) / (nq - Real(4)));
}

inline Real mp_lower_neg_oracle(const Tuple& t) {
  const Real N(t.params.N()), q(t.params.q());
  const Real nq = N * (q - Real(2));
  const Real one_minus(1.0 - t.in.nu_minus);
  const Real al(t.params.alpha());
  const Real aq = (Real(2) * q - nq) / Real(4);
  return (nq - Real(4)) * one_minus / (Real(2) * N * (q - Real(2))) *
         pow(Real(2) * q * one_minus / (nq * Real(t.in.Cq) * pow(al, aq)),
             Real(4) / (nq - Real(4)));
}

inline Real t_bar_oracle(const Tuple& t) {
  const Real N(t.params.N()), p(t.params.p()), q(t.params.q());
  const Real np = N * (p - Real(2)), nq = N * (q - Real(2));
  const Real al(t.params.alpha());
  return pow(q * (Real(4) - np) * (Real(1) - Real(t.in.nu_minus)) /
                 (Real(2) * N * (q - p) * Real(t.in.Cq)),
             Real(2) / (nq - Real(4))) *
         pow(al, (nq - Real(2) * q) / (Real(2) * (nq - Real(4))));
}

inline Real t0_pos_oracle(const Tuple& t) {
  const Real N(t.params.N()), q(t.params.q());
  const Real nq = N * (q - Real(2));
  const Real al(t.params.alpha());
  return pow((Real(1) + Real(t.in.nu_full)) * q * Real(t.in.theta) *
                 pow(al, (Real(2) - q) / Real(2)) *
                 pow(Real(t.in.volume), (q - Real(2)) / Real(2)),
             Real(2) / (nq - Real(4)));
}

inline Real t_alpha_oracle(const Tuple& t) {
  const Real N(t.params.N()), q(t.params.q());
  const Real nq = N * (q - Real(2));
  const Real al(t.params.alpha());
  return pow(Real(4) * q * (Real(1) + Real(t.in.nu_full)) * Real(t.in.theta) / nq *
                 pow(al, (Real(2) - q) / Real(2)) *
                 pow(Real(t.in.volume), (q - Real(2)) / Real(2)),
             Real(2) / (nq - Real(4)));
}

inline Real t2_oracle(const Tuple& t) {
  const Real N(t.params.N()), p(t.params.p()), q(t.params.q());
  const Real np = N * (p - Real(2)), nq = N * (q - Real(2));
  const Real al(t.params.alpha());
  return pow(Real(t.params.beta()) * q * Real(t.in.Cp) * (p - Real(2)) * (Real(4) - np) /
                 (p * Real(t.in.Cq) * (q - Real(2)) * (nq - Real(4))),
             Real(4) / (N * (q - p))) *
         pow(al, (N - Real(2)) / N);
}

inline Real t_g_oracle(const Tuple& t, const Real& A) {
  const Real N(t.params.N()), q(t.params.q());
  const Real nq = N * (q - Real(2));
  const Real al(t.params.alpha());
  return pow(Real(2) * (Real(1) - Real(t.in.nu_minus)) / (nq * A), Real(4) / (nq - Real(4))) *
         pow(al, (nq - Real(2) * q) / (nq - Real(4)));
}

inline Real mp_lower_pos_oracle(const Tuple& t, const Real& A) {
  const Real N(t.params.N()), q(t.params.q());
  const Real nq = N * (q - Real(2));
  const Real al(t.params.alpha());
  return (nq - Real(4)) / Real(4) *
         pow(Real(2) * (Real(1) - Real(t.in.nu_minus)) / nq, nq / (nq - Real(4))) *
         pow(A, Real(4) / (Real(4) - nq)) * pow(al, (nq - Real(2) * q) / (nq - Real(4)));
}

inline Real mp_upper_pos_oracle(const Tuple& t) {
  const Real N(t.params.N()), q(t.params.q());
  const Real nq = N * (q - Real(2));
  const Real al(t.params.alpha());
  return (nq - Real(4)) / Real(2) *
         pow(Real(t.in.theta) * (Real(1) + Real(t.in.nu_full)) / nq, nq / (nq - Real(4))) *
         pow(Real(4) * q, Real(4) / (nq - Real(4))) *
         pow(Real(t.in.volume), Real(2) * (q - Real(2)) / (nq - Real(4))) *
         pow(al, (nq - Real(2) * q) / (nq - Real(4)));
}

inline Real h1_apriori_oracle(const Tuple& t, double T_level) {
  const Real N(t.params.N()), q(t.params.q());
  const Real nq = N * (q - Real(2));
  return Real(4) * N / (nq - Real(4)) *
         ((q - Real(2)) / Real(2) * Real(T_level) +
          Real(t.params.alpha()) * (Real(t.in.vtilde_inf) / (Real(2) * N) +
                                    (q - Real(2)) / Real(4) * Real(t.in.v_inf)));
}

inline bool rel_ok(double got, const Real& want, double tol = 1e-12) {
  const double w = want.to_double();
  return std::abs(got - w) <= tol * std::max(1.0, std::abs(w));
}


}  // namespace threshold_oracle
