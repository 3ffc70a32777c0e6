#pragma once

#include <Eigen/Dense>
#include <optional>

#include "fraclap/barrier_spec.hpp"
#include "fraclap/grid.hpp"
#include "fraclap/problem.hpp"
#include "fraclap/quadrature.hpp"

namespace fraclap {

// Discrete (-Delta)^alpha u(x_i) = sum_j interaction_ij u_j + tail_i u_i + exterior_load_i.
// Normalization: (-Delta)^alpha u(x) = int_R (u(x) - u(z)) |x - z|^(-1-2 alpha) dz.
struct OperatorMatrix {
  double alpha = 0.5;
  GridPtr grid;
  Eigen::MatrixXd interaction;
  Eigen::VectorXd tail;
  Eigen::VectorXd exterior_load;
  ExteriorData exterior;

  int size() const { return static_cast<int>(tail.size()); }
  // interaction + diag(tail)
  Eigen::MatrixXd system_matrix() const;
};

struct AssemblyOptions {
  int threads = 0;  // 0: FRACLAP_THREADS or hardware concurrency
  bool quadratic_correction = true;
};

// Thread count from FRACLAP_THREADS, capped by the hardware.
int default_thread_count();

OperatorMatrix assemble(GridPtr grid, double alpha, const ExteriorData& exterior = {},
                        const AssemblyOptions& opts = {});

GridFunction apply(const OperatorMatrix& op, const GridFunction& u);

// Below this distance the semi-analytic evaluators refuse to run.
inline constexpr double kDistanceFloor = 1e-6;

// (-Delta)^alpha V_tau(x) for the profile d^tau (collar) / quintic blend (interior).
// c_tau may carry a precomputed C(tau).
double power_operator(double tau, double delta, double alpha, double x, const QuadratureConfig& cfg = {},
                      std::optional<double> c_tau = std::nullopt);

// (-Delta)^alpha V_tau(x) with V_tau taken from the PowerDistance term of the barrier with this tau.
double eval_on_power(double tau, double alpha, double x, const BarrierSpec& barrier,
                     const QuadratureConfig& cfg = {});

// (-Delta)^alpha of a bump 64 c z^3(1-z)^3.
double bump_operator(double c, double alpha, double x, const QuadratureConfig& cfg = {});

// (-Delta)^alpha of chi_Omega: (x^(-2a) + (1-x)^(-2a)) / (2a), by distance.
double indicator_operator(double alpha, double d);

// (-Delta)^alpha of a whole barrier at x (torsion contributes -coefficient).
double barrier_operator(const BarrierSpec& b, double alpha, double x, const QuadratureConfig& cfg = {});

// G(x) = int_{Omega^c} g(z) |x - z|^(-1-2 alpha) dz.
double exterior_potential(const ExteriorData& exterior, double alpha, double x, const QuadratureConfig& cfg = {});

// int_{Omega^c} |g(y)| / (1 + |y|^(1+2 alpha)) dy.
double weighted_l1_norm(const ExteriorData& exterior, double alpha, const QuadratureConfig& cfg = {});

}  // namespace fraclap
