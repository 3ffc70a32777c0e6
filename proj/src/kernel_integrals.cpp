#include "fraclap/kernel_integrals.hpp"

#include <cmath>
#include <sstream>

#include "fraclap/errors.hpp"

namespace fraclap {

void QuadratureConfig::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw DomainError("quadrature tolerances must be positive");
  if (max_subdivisions < 8) throw DomainError("max_subdivisions must be at least 8");
  if (!(split_radius > 0.0 && split_radius < 0.5)) throw DomainError("split_radius must lie in (0, 1/2)");
  if (!(tail_cut > 2.0)) throw DomainError("tail_cut must exceed 2");
}

namespace {

constexpr int kMaxTerms = 400;
constexpr double kSeriesEps = 1e-18;

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    std::ostringstream os;
    os << "alpha=" << alpha << " outside (0,1)";
    throw DomainError(os.str());
  }
}

template <class T>
T c_integral(const T& tau, double alpha, const QuadratureConfig& cfg) {
  const double a2 = 2.0 * alpha;
  const double s = cfg.split_radius;
  const double tc = cfg.tail_cut;

  // (0, s): |1-t|^tau + (1+t)^tau - 2 = 2 sum_{k>=1} binom(tau, 2k) t^(2k)
  T near(0.0);
  {
    T c(1.0);
    int n = 0;
    for (int k = 1;; ++k) {
      while (n < 2 * k) {
        c = c * (tau - T(double(n))) / double(n + 1);
        ++n;
      }
      const double e = 2.0 * k - a2;
      const T term = c * (2.0 * std::pow(s, e) / e);
      near += term;
      if (magnitude(term) <= kSeriesEps * std::max(1.0, magnitude(near))) break;
      if (k > kMaxTerms) throw ConvergenceError("C(tau): origin series did not converge");
    }
  }

  auto full = [&](double t) -> T {
    return (pow(1.0 - t, tau) + pow(1.0 + t, tau) - T(2.0)) * std::pow(t, -1.0 - a2);
  };
  auto outer = [&](double t) -> T { return (pow(1.0 + t, tau) - T(2.0)) * std::pow(t, -1.0 - a2); };

  T mid = integrate<T>(full, s, 1.0 - s, cfg);

  // (1-s, 1): the (1-t)^tau part as a power-weighted series, the rest is smooth
  T endpoint(0.0);
  {
    double c = 1.0;  // (1 + 2 alpha)_k / k!
    for (int k = 0;; ++k) {
      const T e = tau + T(double(k + 1));
      const T term = c * pow(s, e) / e;
      endpoint += term;
      if (k > 2 && magnitude(term) <= kSeriesEps * std::max(1.0, magnitude(endpoint))) break;
      if (k > kMaxTerms) throw ConvergenceError("C(tau): endpoint series did not converge");
      c *= (1.0 + a2 + k) / (k + 1.0);
    }
  }
  endpoint += integrate<T>(outer, 1.0 - s, 1.0, cfg);

  T far = integrate<T>(outer, 1.0, tc, cfg);

  // (tc, inf): (1+t)^tau = sum binom(tau,k) t^(tau-k)
  T tail(-2.0 * std::pow(tc, -a2) / a2);
  {
    T c(1.0);
    for (int k = 0;; ++k) {
      const T e = T(a2 + k) - tau;
      const T term = c * pow(tc, -e) / e;
      tail += term;
      if (k > 2 && magnitude(term) <= kSeriesEps * std::max(1.0, magnitude(tail))) break;
      if (k > kMaxTerms) throw ConvergenceError("C(tau): tail series did not converge");
      c = c * (tau - T(double(k))) / double(k + 1);
    }
  }
  return near + mid + endpoint + far + tail;
}

void check_tau(double tau, double alpha) {
  check_alpha(alpha);
  if (!(tau > -1.0 && tau < 2.0 * alpha)) {
    std::ostringstream os;
    os << "tau=" << tau << " outside (-1, 2 alpha) for alpha=" << alpha;
    throw DomainError(os.str());
  }
}

}  // namespace

double eval_C(double tau, double alpha, const QuadratureConfig& cfg) {
  check_tau(tau, alpha);
  cfg.validate();
  return c_integral<double>(tau, alpha, cfg);
}

Jet eval_C_jet(double tau, double alpha, const QuadratureConfig& cfg) {
  check_tau(tau, alpha);
  cfg.validate();
  return c_integral<Jet>(Jet::variable(tau), alpha, cfg);
}

std::pair<double, double> eval_C_derivatives(double tau, double alpha, const QuadratureConfig& cfg) {
  const Jet j = eval_C_jet(tau, alpha, cfg);
  return {j.d1, j.d2};
}

double eval_C_tilde(double beta, double alpha, const QuadratureConfig& cfg) {
  check_alpha(alpha);
  if (!(beta > -1.0 && beta <= 0.0)) {
    std::ostringstream os;
    os << "beta=" << beta << " outside (-1, 0]";
    throw DomainError(os.str());
  }
  cfg.validate();
  const double a2 = 2.0 * alpha;
  const double s = cfg.split_radius;
  const double tc = cfg.tail_cut;

  // (1, 1+s): u^beta (1+u)^(-1-2 alpha) expanded in u
  double near = 0.0;
  {
    double c = 1.0;
    for (int k = 0;; ++k) {
      const double e = k + beta + 1.0;
      const double term = c * std::pow(s, e) / e;
      near += term;
      if (k > 2 && std::abs(term) <= kSeriesEps * std::max(1.0, std::abs(near))) break;
      if (k > kMaxTerms) throw ConvergenceError("Ctilde: endpoint series did not converge");
      c *= -(1.0 + a2 + k) / (k + 1.0);
    }
  }
  const double mid = integrate<double>(
      [&](double t) { return std::pow(t - 1.0, beta) * std::pow(t, -1.0 - a2); }, 1.0 + s, tc, cfg);
  // (tc, inf): (t-1)^beta = t^beta sum binom(beta,k) (-1/t)^k
  double tail = 0.0;
  {
    double c = 1.0;
    for (int k = 0;; ++k) {
      const double e = a2 - beta + k;
      const double term = c * std::pow(tc, -e) / e;
      tail += term;
      if (k > 2 && std::abs(term) <= kSeriesEps * std::max(1.0, std::abs(tail))) break;
      if (k > kMaxTerms) throw ConvergenceError("Ctilde: tail series did not converge");
      c *= -(beta - k) / (k + 1.0);
    }
  }
  return near + mid + tail;
}

}  // namespace fraclap
