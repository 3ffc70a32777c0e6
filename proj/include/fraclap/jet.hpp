#pragma once

#include <algorithm>
#include <cmath>

namespace fraclap {

// Truncated Taylor jet: value and first two derivatives in one scalar parameter.
struct Jet {
  double v = 0.0, d1 = 0.0, d2 = 0.0;

  Jet() = default;
  constexpr Jet(double value) : v(value) {}
  constexpr Jet(double value, double first, double second) : v(value), d1(first), d2(second) {}

  static constexpr Jet variable(double x) { return Jet(x, 1.0, 0.0); }

  Jet& operator+=(const Jet& o) {
    v += o.v;
    d1 += o.d1;
    d2 += o.d2;
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    v -= o.v;
    d1 -= o.d1;
    d2 -= o.d2;
    return *this;
  }
  Jet& operator*=(double s) {
    v *= s;
    d1 *= s;
    d2 *= s;
    return *this;
  }
};

inline Jet operator-(const Jet& a) { return {-a.v, -a.d1, -a.d2}; }
inline Jet operator+(Jet a, const Jet& b) { return a += b; }
inline Jet operator-(Jet a, const Jet& b) { return a -= b; }
inline Jet operator*(Jet a, double s) { return a *= s; }
inline Jet operator*(double s, Jet a) { return a *= s; }
inline Jet operator/(Jet a, double s) { return a *= 1.0 / s; }

inline Jet operator*(const Jet& a, const Jet& b) {
  return {a.v * b.v, a.d1 * b.v + a.v * b.d1, a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2};
}

inline Jet operator/(const Jet& a, const Jet& b) {
  const double q = a.v / b.v;
  const double q1 = (a.d1 - q * b.d1) / b.v;
  const double q2 = (a.d2 - 2.0 * q1 * b.d1 - q * b.d2) / b.v;
  return {q, q1, q2};
}

// base^e for a positive constant base.
inline Jet pow(double base, const Jet& e) {
  const double l = std::log(base);
  const double v = std::pow(base, e.v);
  return {v, v * l * e.d1, v * (l * l * e.d1 * e.d1 + l * e.d2)};
}

inline double pow(double base, double e) { return std::pow(base, e); }

inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(const Jet& j) {
  return std::max({std::abs(j.v), std::abs(j.d1), std::abs(j.d2)});
}

inline double value_of(double x) { return x; }
inline double value_of(const Jet& j) { return j.v; }

}  // namespace fraclap
