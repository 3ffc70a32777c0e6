#pragma once

#include <utility>
#include <vector>

#include "fraclap/critical_exponents.hpp"
#include "fraclap/grid.hpp"
#include "fraclap/quadrature.hpp"

namespace fraclap {

using Window = std::pair<double, double>;

struct RateFit {
  double exponent = 0.0;
  double intercept = 0.0;  // log of the prefactor
  double r_squared = 0.0;
  Window window{0.0, 0.0};
  double band_min = 0.0, band_max = 0.0;  // u d^(-exponent) over the window
  int samples = 0;
  // per-collar slopes; equal to exponent for plain samples
  double exponent_left = 0.0, exponent_right = 0.0;
  bool verified = false;  // band_min > 0
};

struct BandCheck {
  double min = 0.0, max = 0.0;
  bool verified = false;
};

inline constexpr double kBandRatioMax = 100.0;
inline constexpr int kMinFitNodes = 8;

// [max(5 min spacing, 1e-5), 0.02]
Window default_window(const Grid1D& g);

// Least squares of log v against log d over samples with d in the window.
RateFit fit_power(const std::vector<double>& d, const std::vector<double>& v, Window window);

// Fits each collar separately and averages the slopes.
RateFit fit_exponent(const GridFunction& u, Window window);

BandCheck check_band(const std::vector<double>& d, const std::vector<double>& v, double tau, Window window,
                     double band_ratio_max = kBandRatioMax);
BandCheck check_band(const GridFunction& u, double tau, Window window, double band_ratio_max = kBandRatioMax);

struct Prop32Report {
  double alpha = 0.0, tau = 0.0, tau0 = 0.0;
  int case_id = 0;  // 1: tau < tau0, 2: tau > tau0, 3: tau = tau0
  double expected_exponent = 0.0;
  bool sign_ok = false;
  RateFit fit;             // of |(-Delta)^alpha V_tau| (cases 1, 2)
  double band_inner = 0.0; // case 3: max |value| d^(-m) on the inner decade of the collar
  double band_outer = 0.0; // and on the outer decade
  bool passed = false;
  std::vector<double> d, value;
};

inline constexpr double kProp32RelTol = 0.03;

// Evaluates (-Delta)^alpha V_tau (delta = 0.1 profile) on the collar and checks
// the sign and rate for the case set by tau vs tau0.
Prop32Report verify_prop32(double alpha, double tau, const KernelConstants& kc, const std::vector<double>& collar,
                           double rel_tol = kProp32RelTol, const QuadratureConfig& cfg = {});

}  // namespace fraclap
