#include "fraclap/boundary_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fraclap/errors.hpp"
#include "fraclap/kernel_integrals.hpp"
#include "fraclap/fractional_operator.hpp"

namespace fraclap {

Window default_window(const Grid1D& g) { return {std::max(5.0 * g.min_spacing(), 1e-5), 0.02}; }

namespace {

void check_window(Window w) {
  if (!(w.first > 0.0 && w.first < w.second)) throw DomainError("fit window needs 0 < d_min < d_max");
}

struct Sample {
  std::vector<double> d, v;
};

Sample restrict(const std::vector<double>& d, const std::vector<double>& v, Window w) {
  Sample s;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] < w.first || d[i] > w.second) continue;
    if (!(v[i] > 0.0)) {
      std::ostringstream os;
      os << "fit: nonpositive value " << v[i] << " at d=" << d[i];
      throw DomainError(os.str());
    }
    s.d.push_back(d[i]);
    s.v.push_back(v[i]);
  }
  if (static_cast<int>(s.d.size()) < kMinFitNodes) {
    std::ostringstream os;
    os << "fit: only " << s.d.size() << " samples in [" << w.first << ", " << w.second << "]";
    throw DomainError(os.str());
  }
  return s;
}

void fill_band(RateFit& r, const Sample& s) {
  r.band_min = std::numeric_limits<double>::infinity();
  r.band_max = 0.0;
  for (std::size_t i = 0; i < s.d.size(); ++i) {
    const double b = s.v[i] * std::pow(s.d[i], -r.exponent);
    r.band_min = std::min(r.band_min, b);
    r.band_max = std::max(r.band_max, b);
  }
  r.verified = r.band_min > 0.0;
}

RateFit least_squares(const Sample& s, Window w) {
  const int m = static_cast<int>(s.d.size());
  double sx = 0, sy = 0;
  for (int i = 0; i < m; ++i) {
    sx += std::log(s.d[i]);
    sy += std::log(s.v[i]);
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < m; ++i) {
    const double dx = std::log(s.d[i]) - mx, dy = std::log(s.v[i]) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw DomainError("fit: samples share one distance");
  RateFit r;
  r.exponent = sxy / sxx;
  r.intercept = my - r.exponent * mx;
  const double sse = std::max(0.0, syy - r.exponent * sxy);
  r.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
  r.window = w;
  r.samples = m;
  r.exponent_left = r.exponent_right = r.exponent;
  fill_band(r, s);
  return r;
}

}  // namespace

RateFit fit_power(const std::vector<double>& d, const std::vector<double>& v, Window window) {
  check_window(window);
  if (d.size() != v.size()) throw DomainError("fit_power: column lengths differ");
  return least_squares(restrict(d, v, window), window);
}

RateFit fit_exponent(const GridFunction& u, Window window) {
  check_window(window);
  const auto& g = *u.grid;
  std::vector<double> dl, vl, dr, vr;
  for (int i = 0; i < u.size(); ++i) {
    (g.on_right(i) ? dr : dl).push_back(g.d(i));
    (g.on_right(i) ? vr : vl).push_back(u.values[i]);
  }
  const Sample sl = restrict(dl, vl, window), sr = restrict(dr, vr, window);
  const RateFit fl = least_squares(sl, window), fr = least_squares(sr, window);
  RateFit r;
  r.window = window;
  r.exponent_left = fl.exponent;
  r.exponent_right = fr.exponent;
  r.exponent = 0.5 * (fl.exponent + fr.exponent);
  r.intercept = 0.5 * (fl.intercept + fr.intercept);
  r.r_squared = std::min(fl.r_squared, fr.r_squared);
  r.samples = fl.samples + fr.samples;
  Sample both = sl;
  both.d.insert(both.d.end(), sr.d.begin(), sr.d.end());
  both.v.insert(both.v.end(), sr.v.begin(), sr.v.end());
  fill_band(r, both);
  return r;
}

BandCheck check_band(const std::vector<double>& d, const std::vector<double>& v, double tau, Window window,
                     double band_ratio_max) {
  check_window(window);
  const Sample s = restrict(d, v, window);
  BandCheck b;
  b.min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.d.size(); ++i) {
    const double q = s.v[i] * std::pow(s.d[i], -tau);
    b.min = std::min(b.min, q);
    b.max = std::max(b.max, q);
  }
  b.verified = b.min > 0.0 && b.max / b.min < band_ratio_max;
  return b;
}

BandCheck check_band(const GridFunction& u, double tau, Window window, double band_ratio_max) {
  std::vector<double> d(u.grid->distances().begin(), u.grid->distances().end());
  std::vector<double> v(u.values.data(), u.values.data() + u.size());
  return check_band(d, v, tau, window, band_ratio_max);
}

Prop32Report verify_prop32(double alpha, double tau, const KernelConstants& kc, const std::vector<double>& collar,
                           double rel_tol, const QuadratureConfig& cfg) {
  if (!(tau > -1.0 && tau < 0.0)) throw DomainError("verify_prop32: tau outside (-1, 0)");
  if (std::abs(kc.alpha - alpha) > 1e-14) throw DomainError("verify_prop32: constants for another alpha");
  if (collar.size() < static_cast<std::size_t>(kMinFitNodes)) throw DomainError("verify_prop32: collar too small");
  Prop32Report r;
  r.alpha = alpha;
  r.tau = tau;
  r.tau0 = kc.tau0;
  r.d = collar;
  std::sort(r.d.begin(), r.d.end());
  const double c = eval_C(tau, alpha, cfg);
  for (double d : r.d) r.value.push_back(power_operator(tau, 0.1, alpha, d, cfg, c));

  const double a2 = 2.0 * alpha;
  const Window w{r.d.front(), r.d.back()};
  if (std::abs(tau - kc.tau0) <= 1e-8) {
    r.case_id = 3;
    const double m = std::min(kc.tau0, 2.0 * kc.tau0 - a2 + 1.0);
    r.expected_exponent = m;
    // the normalized magnitude must not grow toward the boundary
    const double inner_hi = r.d.front() * 10.0, outer_lo = r.d.back() / 10.0;
    for (std::size_t i = 0; i < r.d.size(); ++i) {
      const double q = std::abs(r.value[i]) * std::pow(r.d[i], -m);
      if (r.d[i] <= inner_hi) r.band_inner = std::max(r.band_inner, q);
      if (r.d[i] >= outer_lo) r.band_outer = std::max(r.band_outer, q);
    }
    r.sign_ok = true;
    r.passed = std::isfinite(r.band_inner) && r.band_inner <= 2.0 * r.band_outer;
    return r;
  }
  r.case_id = tau < kc.tau0 ? 1 : 2;
  r.expected_exponent = tau - a2;
  const double sgn = r.case_id == 1 ? -1.0 : 1.0;
  r.sign_ok = std::all_of(r.value.begin(), r.value.end(), [&](double v) { return sgn * v > 0.0; });
  if (!r.sign_ok) return r;
  std::vector<double> mag;
  for (double v : r.value) mag.push_back(std::abs(v));
  r.fit = fit_power(r.d, mag, w);
  r.passed = std::abs(r.fit.exponent - r.expected_exponent) <= rel_tol * std::abs(r.expected_exponent);
  return r;
}

}  // namespace fraclap
