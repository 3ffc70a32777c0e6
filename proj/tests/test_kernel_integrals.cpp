#include <doctest.h>

#include <cmath>
#include <random>

#include "fraclap/errors.hpp"
#include "fraclap/kernel_integrals.hpp"
#include "oracles.hpp"

using namespace fraclap;

TEST_CASE("C at tau = 0 is -1/(2 alpha)") {
  for (int k = 1; k <= 9; ++k) {
    const double a = 0.1 * k;
    CHECK(std::abs(eval_C(0.0, a) + 1.0 / (2.0 * a)) < 1e-10);
  }
}

TEST_CASE("C agrees with double-exponential quadrature") {
  for (double a : {0.15, 0.3, 0.5, 0.7, 0.85, 0.95}) {
    for (double tau : {-0.95, -0.7, -0.4, -0.1, 0.0, 0.2}) {
      if (!(tau < 2.0 * a)) continue;
      const double ref = oracle::C(tau, a);
      CAPTURE(a);
      CAPTURE(tau);
      CHECK(std::abs(eval_C(tau, a) - ref) <= 1e-9 * (1.0 + std::abs(ref)));
    }
  }
}

TEST_CASE("Ctilde is the beta function") {
  for (int i = 0; i < 9; ++i) {
    const double beta = -0.9 + 0.1 * i;
    for (int j = 1; j <= 9; ++j) {
      const double a = 0.1 * j;
      CAPTURE(beta);
      CAPTURE(a);
      CHECK(std::abs(eval_C_tilde(beta, a) - oracle::C_tilde(beta, a)) < 1e-8);
    }
  }
}

TEST_CASE("derivatives match central differences") {
  const double h = 1e-4;
  for (double a : {0.25, 0.5, 0.75}) {
    for (double tau : {-0.8, -0.5, -0.2, 0.1}) {
      if (!(tau + h < 2.0 * a)) continue;
      const auto [d1, d2] = eval_C_derivatives(tau, a);
      const double fp = eval_C(tau + h, a), f0 = eval_C(tau, a), fm = eval_C(tau - h, a);
      CAPTURE(tau);
      CHECK(std::abs(d1 - (fp - fm) / (2 * h)) <= 1e-5 * (1.0 + std::abs(d1)));
      CHECK(std::abs(d2 - (fp - 2 * f0 + fm) / (h * h)) <= 1e-3 * (1.0 + std::abs(d2)));
      const Jet j = eval_C_jet(tau, a);
      CHECK(j.v == doctest::Approx(f0).epsilon(1e-12));
      CHECK(j.d1 == doctest::Approx(d1).epsilon(1e-12));
    }
  }
}

TEST_CASE("C is symmetric about alpha - 1/2 and convex") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ua(0.1, 0.9), ut(0.0, 1.0);
  for (int k = 0; k < 40; ++k) {
    const double a = ua(rng);
    const double lo = -0.95, hi = 2.0 * a - 1.0 + 0.95;
    const double tau = lo + (hi - lo) * ut(rng);
    const double mirror = 2.0 * a - 1.0 - tau;
    const double c = eval_C(tau, a);
    CAPTURE(a);
    CAPTURE(tau);
    CHECK(std::abs(c - eval_C(mirror, a)) <= 1e-9 * (1.0 + std::abs(c)));
    CHECK(eval_C_derivatives(tau, a).second > 0.0);
  }
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(eval_C(-1.0, 0.5), DomainError);
  CHECK_THROWS_AS(eval_C(1.0, 0.5), DomainError);
  CHECK_THROWS_AS(eval_C(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(eval_C_tilde(0.1, 0.5), DomainError);
}
