#include <doctest.h>

#include <cmath>
#include <random>

#include "fraclap/barriers.hpp"
#include "fraclap/boundary_analysis.hpp"
#include "fraclap/critical_exponents.hpp"
#include "fraclap/errors.hpp"
#include "fraclap/fractional_operator.hpp"
#include "fraclap/kernel_integrals.hpp"
#include "oracles.hpp"

using namespace fraclap;

namespace {

double bump_apply_error(int n, double a) {
  const auto g = Grid1D::graded(n, 3.0);
  const auto op = assemble(g, a);
  const auto u = GridFunction::sample(g, [](double, double d) { return bump_value(d, 1.0); });
  const auto y = apply(op, u);
  double err = 0.0;
  for (int i = 0; i < n; ++i) err = std::max(err, std::abs(y.values[i] - oracle::bump_exact(1.0, a, g->d(i))));
  return err;
}

}  // namespace

TEST_CASE("bump oracles agree with each other") {
  for (double a : {0.25, 0.5, 0.75}) {
    for (double x : {0.01, 0.2, 0.5, 0.73, 0.97}) {
      CAPTURE(a);
      CAPTURE(x);
      const double e = oracle::bump_exact(1.0, a, x), q = oracle::bump_quadrature(1.0, a, x);
      CHECK(std::abs(e - q) <= 1e-9 * (1.0 + std::abs(e)));
    }
  }
}

TEST_CASE("semi-analytic bump operator matches the oracles") {
  for (double a : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    for (double x : {1e-4, 0.01, 0.2, 0.5, 0.73, 0.97}) {
      CAPTURE(a);
      CAPTURE(x);
      const double e = oracle::bump_exact(2.5, a, x);
      CHECK(std::abs(bump_operator(2.5, a, x) - e) <= 1e-9 * (1.0 + std::abs(e)));
    }
  }
}

TEST_CASE("semi-analytic power operator matches brute-force quadrature") {
  for (double a : {0.3, 0.5, 0.7}) {
    for (double tau : {-0.8, -0.5, -0.2, 0.0}) {
      for (double x : {1e-4, 1e-3, 1e-2, 0.06}) {
        CAPTURE(a);
        CAPTURE(tau);
        CAPTURE(x);
        const double ref = oracle::power_operator(tau, 0.1, a, x);
        const double got = power_operator(tau, 0.1, a, x);
        CHECK(std::abs(got - ref) <= 1e-7 * std::abs(ref) + 1e-9);
        CHECK(power_operator(tau, 0.1, a, 1.0 - x) == doctest::Approx(got).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("power operator signs follow tau0 at alpha = 1/2") {
  const auto kc = find_tau0(0.5);
  const auto d = collar_points(1e-4, 1e-2, 40);
  for (double tau : {-0.8, -0.2}) {
    double lo = INFINITY, hi = 0.0;
    for (double x : d) {
      const double v = power_operator(tau, 0.1, 0.5, x);
      CHECK((v > 0.0) == (tau > kc.tau0));
      const double q = std::abs(v) * std::pow(x, 1.0 - tau);
      lo = std::min(lo, q);
      hi = std::max(hi, q);
    }
    CAPTURE(tau);
    CHECK(lo > 0.0);
    CHECK(hi / lo < 1.5);
    // leading constant is C(tau)
    CHECK(lo <= std::abs(eval_C(tau, 0.5)) * 1.2);
    CHECK(hi >= std::abs(eval_C(tau, 0.5)) / 1.2);
  }
}

TEST_CASE("power operator refuses points below the floor") {
  CHECK_THROWS_AS(power_operator(-0.5, 0.1, 0.5, 1e-8), DomainError);
  CHECK_THROWS_AS(power_operator(-1.0, 0.1, 0.5, 0.2), DomainError);
  CHECK_THROWS_AS(power_operator(-0.5, 0.6, 0.5, 0.2), DomainError);
}

TEST_CASE("constants: tail is the indicator operator") {
  for (double a : {0.2, 0.5, 0.8}) {
    const auto g = Grid1D::graded(301, 3.0);
    const auto op = assemble(g, a);
    const auto one = apply(op, GridFunction::constant(g, 1.0));
    const auto zero = apply(op, GridFunction::constant(g, 0.0));
    CAPTURE(a);
    // interaction rows annihilate constants
    const Eigen::VectorXd rows = op.interaction * Eigen::VectorXd::Ones(g->size());
    CHECK(rows.cwiseAbs().maxCoeff() <= 1e-9 * op.tail.maxCoeff());
    for (int i = 0; i < g->size(); ++i) {
      CHECK(zero.values[i] == 0.0);
      CHECK(op.tail[i] > 0.0);
      CHECK(op.tail[i] == doctest::Approx(op.tail[g->mirror(i)]).epsilon(1e-12));
      const double ref = (std::pow(g->d(i), -2 * a) + std::pow(1 - g->d(i), -2 * a)) / (2 * a);
      CHECK(one.values[i] == doctest::Approx(ref).epsilon(1e-9));
      CHECK(indicator_operator(a, g->d(i)) == doctest::Approx(ref).epsilon(1e-14));
    }
  }
}

TEST_CASE("indicator operator sits in a d^(-2 alpha) band") {
  for (double a : {0.2, 0.5, 0.8}) {
    for (double d : collar_points(1e-6, 0.1, 30)) {
      const double q = indicator_operator(a, d) * std::pow(d, 2 * a);
      CHECK(q >= 1.0 / (2 * a));
      CHECK(q <= (1.0 + std::pow(0.1 / 0.9, 2 * a)) / (2 * a) + 1e-12);
    }
  }
}

TEST_CASE("matrix sign structure and symmetry") {
  const auto g = Grid1D::graded(200, 3.0);
  const auto op = assemble(g, 0.6);
  const Eigen::MatrixXd A = op.system_matrix();
  for (int i = 0; i < g->size(); ++i) {
    CHECK(A(i, i) > 0.0);
    for (int j = 0; j < g->size(); ++j) {
      if (i != j) CHECK(A(i, j) <= 0.0);
      CHECK(A(i, j) == doctest::Approx(A(g->mirror(i), g->mirror(j))).epsilon(1e-11));
    }
  }
  const auto u = GridFunction::sample(g, [](double, double d) { return std::pow(d, -0.3); });
  const auto y = apply(op, u);
  for (int i = 0; i < g->size(); ++i) CHECK(y.values[i] == doctest::Approx(y.values[g->mirror(i)]).epsilon(1e-10));
}

TEST_CASE("apply is linear") {
  const auto g = Grid1D::graded(150, 3.0);
  const auto ext = ExteriorData::power(1.0, -0.5, 0.2);
  const auto op = assemble(g, 0.4, ext);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  Eigen::VectorXd a(g->size()), b(g->size());
  for (int i = 0; i < g->size(); ++i) {
    a[i] = nd(rng);
    b[i] = nd(rng);
  }
  const double s = 1.7, t = -0.4;
  const auto ya = apply(op, GridFunction(g, a, ext)), yb = apply(op, GridFunction(g, b, ext));
  const auto y0 = apply(op, GridFunction::constant(g, 0.0, ext));
  const auto yab = apply(op, GridFunction(g, s * a + t * b, ext));
  // the exterior load is affine, so subtract it once per term
  const Eigen::VectorXd lin = s * (ya.values - y0.values) + t * (yb.values - y0.values) + y0.values;
  CHECK((yab.values - lin).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + lin.cwiseAbs().maxCoeff()));
  CHECK((y0.values - op.exterior_load).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("apply rejects mismatched grids and exterior data") {
  const auto g1 = Grid1D::graded(50), g2 = Grid1D::graded(51);
  const auto op = assemble(g1, 0.5);
  CHECK_THROWS_AS(apply(op, GridFunction::constant(g2, 1.0)), GridMismatch);
  CHECK_THROWS_AS(apply(op, GridFunction::constant(g1, 1.0, ExteriorData::power(1.0, -0.5, 0.1))), GridMismatch);
  CHECK_THROWS_AS(assemble(g1, 1.0), DomainError);
  CHECK_THROWS_AS(assemble(nullptr, 0.5), DomainError);
}

TEST_CASE("bump apply matches the oracle at probe nodes") {
  const int n = 2000;
  const auto g = Grid1D::graded(n, 3.0);
  const auto op = assemble(g, 0.5);
  const auto y = apply(op, GridFunction::sample(g, [](double, double d) { return bump_value(d, 1.0); }));
  for (int i : {n / 20, n / 5, n / 2, 3 * n / 4, n - 7}) {
    CAPTURE(g->x(i));
    CHECK(std::abs(y.values[i] - oracle::bump_quadrature(1.0, 0.5, g->d(i))) < 1e-4);
  }
}

TEST_CASE("bump apply error drops under refinement") {
  for (double a : {0.3, 0.7}) {
    const double e1 = bump_apply_error(250, a), e2 = bump_apply_error(500, a), e3 = bump_apply_error(1000, a);
    CAPTURE(a);
    CAPTURE(e1);
    CAPTURE(e2);
    CAPTURE(e3);
    CHECK(e1 / e2 >= 1.8);
    CHECK(e2 / e3 >= 1.8);
  }
}

TEST_CASE("exterior potential") {
  CHECK(exterior_potential(ExteriorData::zero(), 0.5, 0.3) == 0.0);
  for (double a : {0.3, 0.5, 0.7}) {
    for (double beta : {-0.8, -0.5, -0.1}) {
      const auto ext = ExteriorData::power(1.3, beta, 0.25);
      for (double x : {1e-5, 1e-3, 0.1, 0.5, 0.9}) {
        CAPTURE(a);
        CAPTURE(beta);
        CAPTURE(x);
        const double ref = oracle::exterior_potential(1.3, beta, 0.25, a, x);
        const double got = exterior_potential(ext, a, x);
        CHECK(got > 0.0);
        CHECK(got == doctest::Approx(ref).epsilon(1e-8));
      }
      CHECK(std::isfinite(weighted_l1_norm(ext, a)));
    }
  }
  // boundary rate beta - 2 alpha
  const auto ext = ExteriorData::power(1.0, -0.5, 0.25);
  std::vector<double> d = collar_points(1e-4, 1e-2, 40), v;
  for (double x : d) v.push_back(exterior_potential(ext, 0.5, x));
  const auto fit = fit_power(d, v, {1e-4, 1e-2});
  CHECK(std::abs(fit.exponent + 1.5) <= 0.05 * 1.5);
}
