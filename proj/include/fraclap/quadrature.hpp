#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

#include "fraclap/errors.hpp"
#include "fraclap/jet.hpp"

namespace fraclap {

struct QuadratureConfig {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_subdivisions = 4000;
  double split_radius = 0.25;  // half-width of the series zones around t=0 and t=1
  double tail_cut = 4.0;       // closed-form tail starts here

  void validate() const;
};

namespace detail {

// 7-point Gauss / 15-point Kronrod pair on [-1, 1].
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
struct Segment {
  double a, b;
  T value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class T, class F>
Segment<T> kronrod15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const T fc = f(c);
  T gauss = fc * kWg[3];
  T kron = fc * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const T s = f(c - dx) + f(c + dx);
    kron += s * kWgk[j];
    if (j % 2 == 1) gauss += s * kWg[j / 2];
  }
  kron *= h;
  gauss *= h;
  return {a, b, kron, magnitude(kron - gauss)};
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod integration. T is double or Jet.
template <class T = double, class F>
T integrate(F&& f, double a, double b, const QuadratureConfig& cfg) {
  if (!(b > a)) return T(0.0);
  using Seg = detail::Segment<T>;
  std::priority_queue<Seg> heap;
  Seg first = detail::kronrod15<T>(f, a, b);
  T total = first.value;
  double err = first.error;
  heap.push(first);
  int count = 1;
  while (err > std::max(cfg.abs_tol, cfg.rel_tol * magnitude(total))) {
    if (count >= cfg.max_subdivisions) {
      throw ConvergenceError("adaptive quadrature: subdivision budget exhausted on [" +
                             std::to_string(a) + ", " + std::to_string(b) + "]");
    }
    Seg worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // interval at machine resolution
    heap.pop();
    Seg left = detail::kronrod15<T>(f, worst.a, mid);
    Seg right = detail::kronrod15<T>(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++count;
    if (count % 64 == 0) {
      // refresh running sums to stop drift
      T t(0.0);
      double e = 0.0;
      auto copy = heap;
      while (!copy.empty()) {
        t += copy.top().value;
        e += copy.top().error;
        copy.pop();
      }
      total = t;
      err = e;
    }
  }
  T t(0.0);
  while (!heap.empty()) {
    t += heap.top().value;
    heap.pop();
  }
  return t;
}

// Integrate over consecutive pieces of a sorted breakpoint list.
template <class T = double, class F>
T integrate_pieces(F&& f, const std::vector<double>& points, const QuadratureConfig& cfg) {
  T total(0.0);
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    if (points[k + 1] > points[k]) total += integrate<T>(f, points[k], points[k + 1], cfg);
  }
  return total;
}

// Generalized binomial coefficient binom(a, k) for real or jet a.
template <class T>
T binomial(const T& a, int k) {
  T c(1.0);
  for (int j = 0; j < k; ++j) c = c * (a - T(double(j))) / double(j + 1);
  return c;
}

}  // namespace fraclap
