#include "fraclap/fractional_operator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <thread>

#include "fraclap/errors.hpp"
#include "fraclap/kernel_integrals.hpp"

namespace fraclap {

Eigen::MatrixXd OperatorMatrix::system_matrix() const {
  Eigen::MatrixXd m = interaction;
  m.diagonal() += tail;
  return m;
}

int default_thread_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("FRACLAP_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return std::min<int>(v, static_cast<int>(hw));
  }
  return static_cast<int>(hw);
}

namespace {

// int_0^eps s^j (1+s)^(-1-a2) ds
double kernel_moment_unit(int j, double eps, double a2) {
  if (eps <= 0.5) {
    double total = 0.0, c = 1.0;
    for (int k = 0; k < 200; ++k) {
      const double term = c * std::pow(eps, k + j + 1) / (k + j + 1);
      total += term;
      if (std::abs(term) < 1e-17 * std::abs(total)) break;
      c *= (-1.0 - a2 - k) / (k + 1.0);
    }
    return total;
  }
  const double lv = std::log1p(eps);
  double total = 0.0, binom = 1.0;
  for (int m = 0; m <= j; ++m) {
    if (m > 0) binom = binom * (j - m + 1) / m;
    const double e = m - a2;
    const double val = std::abs(e) < 1e-14 ? lv : std::expm1(e * lv) / e;  // log branch at m = 2 alpha
    total += ((j - m) % 2 == 0 ? binom : -binom) * val;
  }
  return total;
}

// int_0^H s^j (r0 + s)^(-1-a2) ds
double kernel_moment(int j, double r0, double H, double a2) {
  return std::pow(r0, j - a2) * kernel_moment_unit(j, H / r0, a2);
}

void assemble_row(const Grid1D& g, int i, double a2, bool corr, double* row) {
  const int n = g.size();
  std::fill(row, row + n, 0.0);
  const double hl = g.cell(i - 1), hr = g.cell(i);
  const double h = std::min(hl, hr);
  const double rho = 0.5 * g.d(i);
  double S = 0.0;  // int (z - c_l)(c_r - z) K over linear pieces near x_i

  for (int c = -1; c < n; ++c) {
    const double H = g.cell(c);
    if (c == i - 1 || c == i) {
      // remainder of the longer adjacent cell beyond the window
      const double len = c == i ? hr : hl;
      const int nb = c == i ? i + 1 : i - 1;
      if (len > h && nb >= 0 && nb < n) {
        const double m0 = kernel_moment(0, h, len - h, a2), m1 = kernel_moment(1, h, len - h, a2);
        row[nb] += (m1 + h * m0) / len;
        if (corr) {
          const double m2 = kernel_moment(2, h, len - h, a2);
          S += len * (m1 + h * m0) - (m2 + 2.0 * h * m1 + h * h * m0);
        }
      }
      continue;
    }
    const bool left = c < i;
    const double r0 = left ? -g.offset(i, c + 1) : g.offset(i, c);
    const double m0 = kernel_moment(0, r0, H, a2), m1 = kernel_moment(1, r0, H, a2);
    if (c == -1) {
      row[0] += m0;  // constant extension of u_0 on [0, x_0]
      continue;
    }
    if (c == n - 1) {
      row[n - 1] += m0;
      continue;
    }
    // s measured from the end nearer to x_i
    const double near_w = (H * m0 - m1) / H, far_w = m1 / H;
    if (left) {
      row[c] += far_w;
      row[c + 1] += near_w;
    } else {
      row[c] += near_w;
      row[c + 1] += far_w;
    }
    if (corr && r0 + 0.5 * H < rho) S += H * m1 - kernel_moment(2, r0, H, a2);
  }

  double w = std::pow(h, 2.0 - a2) / (2.0 - a2);
  if (corr) w = std::max(0.0, w - 0.5 * S);
  if (i > 0) row[i - 1] += 2.0 * w / (hl * (hl + hr));
  if (i < n - 1) row[i + 1] += 2.0 * w / (hr * (hl + hr));
}

}  // namespace

OperatorMatrix assemble(GridPtr grid, double alpha, const ExteriorData& exterior, const AssemblyOptions& opts) {
  if (!grid) throw DomainError("assemble: null grid");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("assemble: alpha must lie in (0,1)");
  exterior.validate();
  const int n = grid->size();
  const double a2 = 2.0 * alpha;
  const int half = (n + 1) / 2;

  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> w(half, n);
  const int threads = std::max(1, std::min(opts.threads > 0 ? opts.threads : default_thread_count(), half));
  auto work = [&](int t0) {
    for (int i = t0; i < half; i += threads) assemble_row(*grid, i, a2, opts.quadratic_correction, w.row(i).data());
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  if (!w.allFinite()) throw DomainError("assemble: non-finite kernel moment");

  OperatorMatrix op;
  op.alpha = alpha;
  op.grid = grid;
  op.exterior = exterior;
  op.interaction.setZero(n, n);
  for (int i = 0; i < half; ++i) {
    const double diag = w.row(i).sum();
    for (int j = 0; j < n; ++j) {
      const double v = j == i ? diag : -w(i, j);
      op.interaction(i, j) = v;
      op.interaction(n - 1 - i, n - 1 - j) = v;
    }
  }
  op.tail.resize(n);
  op.exterior_load.setZero(n);
  for (int i = 0; i < n; ++i) {
    op.tail[i] = indicator_operator(alpha, grid->d(i));
    if (!exterior.is_zero()) op.exterior_load[i] = -exterior_potential(exterior, alpha, grid->d(i));
  }
  return op;
}

GridFunction apply(const OperatorMatrix& op, const GridFunction& u) {
  if (!u.grid || !op.grid || !u.grid->same_as(*op.grid)) throw GridMismatch("apply: grid mismatch");
  if (!(u.exterior == op.exterior)) throw GridMismatch("apply: exterior data differs from assembly");
  Eigen::VectorXd y = op.interaction * u.values;
  y.array() += op.tail.array() * u.values.array() + op.exterior_load.array();
  return GridFunction(op.grid, std::move(y), u.exterior);
}

double indicator_operator(double alpha, double d) {
  const double a2 = 2.0 * alpha;
  return (std::pow(d, -a2) + std::pow(1.0 - d, -a2)) / a2;
}

namespace {

double distance_of(double x, const char* who) {
  if (!(x > 0.0 && x < 1.0)) throw DomainError(std::string(who) + ": point outside Omega");
  const double d = std::min(x, 1.0 - x);
  if (d < kDistanceFloor) {
    std::ostringstream os;
    os << who << ": d(x)=" << d << " below the floor " << kDistanceFloor;
    throw DomainError(os.str());
  }
  return d;
}

// int_0^inf [2f(x) - f(x+y) - f(x-y)] y^(-1-2a) dy for f smooth away from `breaks`.
// far(Y) must return int_Y^inf [f(x+y) + f(x-y)] y^(-1-2a) dy.
// f2x, f4x: second and fourth derivatives at x, used on (0, y0).
template <class F, class Far>
double second_difference(F&& f, double f2x, double f4x, double x, double alpha, const std::vector<double>& breaks,
                         Far&& far, const QuadratureConfig& cfg) {
  const double a2 = 2.0 * alpha;
  double dist = std::numeric_limits<double>::infinity();
  for (double b : breaks) dist = std::min(dist, std::abs(x - b));
  const double y0 = dist > 2e-6 ? std::min(1e-3, 0.5 * dist) : 1e-6;
  const double Y = cfg.tail_cut;
  const double fx = f(x);

  std::vector<double> pts = {y0, Y};
  for (double b : breaks) {
    const double y = std::abs(x - b);
    if (y > y0 && y < Y) pts.push_back(y);
  }
  std::sort(pts.begin(), pts.end());
  const double mid = integrate_pieces<double>(
      [&](double y) { return (2.0 * fx - f(x + y) - f(x - y)) * std::pow(y, -1.0 - a2); }, pts, cfg);
  const double near =
      -f2x * std::pow(y0, 2.0 - a2) / (2.0 - a2) - f4x / 12.0 * std::pow(y0, 4.0 - a2) / (4.0 - a2);
  const double tail = 2.0 * fx * std::pow(Y, -a2) / a2 - far(Y);
  return near + mid + tail;
}

}  // namespace

double power_operator(double tau, double delta, double alpha, double x, const QuadratureConfig& cfg,
                      std::optional<double> c_tau) {
  if (!(tau > -1.0 && tau <= 0.0)) throw DomainError("power_operator: tau outside (-1, 0]");
  if (!(delta > 0.0 && delta < 0.5)) throw DomainError("power_operator: delta outside (0, 1/2)");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("power_operator: alpha outside (0,1)");
  const double d = distance_of(x, "power_operator");
  const double a2 = 2.0 * alpha;
  const PowerProfile prof(tau, delta);

  // R = V - z_+^tau - (1-z)_+^tau is smooth except C2 seams at delta, 1-delta
  auto R = [&](double z) {
    if (z < delta) return -std::pow(1.0 - z, tau);
    if (z > 1.0 - delta) return -std::pow(z, tau);
    return prof.blend.value(std::min(z, 1.0 - z)) - std::pow(z, tau) - std::pow(1.0 - z, tau);
  };
  const double tt = tau * (tau - 1.0);
  const double r2 = d < delta ? -tt * std::pow(1.0 - d, tau - 2.0)
                              : prof.blend.d2(d) - tt * (std::pow(d, tau - 2.0) + std::pow(1.0 - d, tau - 2.0));
  const double t4 = tt * (tau - 2.0) * (tau - 3.0);
  const double r4 = d < delta ? -t4 * std::pow(1.0 - d, tau - 4.0)
                              : 24.0 * prof.blend.a4 + 120.0 * prof.blend.a5 * (0.5 - d) -
                                    t4 * (std::pow(d, tau - 4.0) + std::pow(1.0 - d, tau - 4.0));
  auto far = [&](double Y) {
    // R(x+y) = -(x+y)^tau, R(x-y) = -(1-x+y)^tau beyond Y
    double total = 0.0;
    for (double a : {d, 1.0 - d}) {
      double c = 1.0;
      for (int k = 0; k < 400; ++k) {
        const double term = c * std::pow(a, k) * std::pow(Y, tau - k - a2) / (a2 + k - tau);
        total += term;
        if (std::abs(term) < 1e-18 * std::abs(total) || c == 0.0) break;
        c *= (tau - k) / (k + 1.0);
      }
    }
    return -total;
  };
  const double rest = second_difference(R, r2, r4, d, alpha, {delta, 0.5, 1.0 - delta}, far, cfg);
  const double C = c_tau ? *c_tau : eval_C(tau, alpha, cfg);
  return -C * (std::pow(d, tau - a2) + std::pow(1.0 - d, tau - a2)) + rest;
}

double eval_on_power(double tau, double alpha, double x, const BarrierSpec& barrier, const QuadratureConfig& cfg) {
  for (const auto& t : barrier.terms) {
    if (t.kind == BarrierTerm::Kind::PowerDistance && t.tau == tau) return power_operator(tau, t.delta, alpha, x, cfg);
  }
  throw DomainError("eval_on_power: barrier has no power term with this exponent");
}

double bump_operator(double c, double alpha, double x, const QuadratureConfig& cfg) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("bump_operator: alpha outside (0,1)");
  const double d = distance_of(x, "bump_operator");
  auto f = [c](double z) { return bump_value(z, c); };
  const double f4 = 64.0 * c * (-72.0 + 360.0 * d - 360.0 * d * d);
  return second_difference(f, bump_second_derivative(d, c), f4, d, alpha, {0.0, 1.0}, [](double) { return 0.0; },
                           cfg);
}

double barrier_operator(const BarrierSpec& b, double alpha, double x, const QuadratureConfig& cfg) {
  const double d = distance_of(x, "barrier_operator");
  double v = 0.0;
  for (const auto& t : b.terms) {
    if (t.coefficient == 0.0) continue;
    switch (t.kind) {
      case BarrierTerm::Kind::PowerDistance: v += t.coefficient * power_operator(t.tau, t.delta, alpha, d, cfg); break;
      case BarrierTerm::Kind::Indicator: v += t.coefficient * indicator_operator(alpha, d); break;
      case BarrierTerm::Kind::Torsion: v -= t.coefficient; break;
      case BarrierTerm::Kind::Bump: v += t.coefficient * bump_operator(t.c, alpha, d, cfg); break;
    }
  }
  return v;
}

namespace {

// int_0^eta s^beta (a+s)^(-1-2 alpha) ds
double collar_integral(double a, double beta, double eta, double alpha, const QuadratureConfig& cfg) {
  const double a2 = 2.0 * alpha;
  const double X = eta / a;
  if (X >= 2.0) {
    double tail = 0.0, c = 1.0;
    for (int k = 0; k < 400; ++k) {
      const double term = c * std::pow(X, beta - a2 - k) / (a2 - beta + k);
      tail += term;
      if (std::abs(term) < 1e-18 * std::abs(tail)) break;
      c *= (-1.0 - a2 - k) / (k + 1.0);
    }
    return std::pow(a, beta - a2) * (eval_C_tilde(beta, alpha, cfg) - tail);
  }
  // t = X u^(1/(beta+1)) removes the endpoint singularity
  const double q = 1.0 / (beta + 1.0);
  const double inner =
      integrate<double>([&](double u) { return std::pow(1.0 + X * std::pow(u, q), -1.0 - a2); }, 0.0, 1.0, cfg);
  return std::pow(a, beta - a2) * std::pow(X, beta + 1.0) * q * inner;
}

double side_potential(const ExteriorData& g, double a, double alpha, const QuadratureConfig& cfg) {
  const double a2 = 2.0 * alpha;
  switch (g.kind) {
    case ExteriorData::Kind::Zero: return 0.0;
    case ExteriorData::Kind::PowerCollar:
      return g.kappa_g * (collar_integral(a, g.beta, g.eta, alpha, cfg) +
                          std::pow(g.eta, g.beta) * std::pow(a + g.eta, -a2) / a2);
    case ExteriorData::Kind::Tabulated: {
      const auto& d = g.table.d;
      const auto& v = g.table.value;
      double total = v.front() * (std::pow(a, -a2) - std::pow(a + d.front(), -a2)) / a2;
      for (std::size_t k = 0; k + 1 < d.size(); ++k) {
        total += integrate<double>([&](double s) { return g.table(s) * std::pow(a + s, -1.0 - a2); }, d[k], d[k + 1],
                                   cfg);
      }
      return total + v.back() * std::pow(a + d.back(), -a2) / a2;
    }
  }
  return 0.0;
}

// int_S^inf dr / (1 + r^q), S >= 2
double weight_tail(double S, double q) {
  double total = 0.0;
  for (int k = 0; k < 400; ++k) {
    const double e = q * (k + 1) - 1.0;
    const double term = std::pow(S, -e) / e;
    total += k % 2 == 0 ? term : -term;
    if (term < 1e-18 * std::abs(total)) break;
  }
  return total;
}

}  // namespace

double exterior_potential(const ExteriorData& exterior, double alpha, double x, const QuadratureConfig& cfg) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("exterior_potential: alpha outside (0,1)");
  if (!(x > 0.0 && x < 1.0)) throw DomainError("exterior_potential: point outside Omega");
  exterior.validate();
  const double d = std::min(x, 1.0 - x);
  return side_potential(exterior, d, alpha, cfg) + side_potential(exterior, 1.0 - d, alpha, cfg);
}

double weighted_l1_norm(const ExteriorData& g, double alpha, const QuadratureConfig& cfg) {
  g.validate();
  if (g.kind == ExteriorData::Kind::Zero) return 0.0;
  const double q = 1.0 + 2.0 * alpha;
  double total = 0.0;
  for (double shift : {0.0, 1.0}) {
    auto w = [&](double s) { return 1.0 / (1.0 + std::pow(s + shift, q)); };
    double s_end;  // start of the constant far field
    if (g.kind == ExteriorData::Kind::PowerCollar) {
      const double b1 = g.beta + 1.0;
      total += g.kappa_g / b1 *
               integrate<double>([&](double u) { return w(std::pow(u, 1.0 / b1)); }, 0.0, std::pow(g.eta, b1), cfg);
      s_end = g.eta;
    } else {
      const auto& d = g.table.d;
      total += integrate<double>([&](double s) { return std::abs(g.table(s)) * w(s); }, 0.0, d.back(), cfg);
      s_end = d.back();
    }
    const double far_value = std::abs(g(s_end + 1.0));
    const double S = std::max(2.0, s_end + shift);
    total += far_value * integrate<double>(w, s_end, S - shift, cfg);
    total += far_value * weight_tail(S, q);
  }
  if (!std::isfinite(total)) throw DomainError("weighted_l1_norm: exterior data not in L1_omega");
  return total;
}

}  // namespace fraclap
