#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "fraclap/barriers.hpp"
#include "fraclap/critical_exponents.hpp"
#include "fraclap/fractional_operator.hpp"
#include "fraclap/problem.hpp"

namespace fraclap {

struct IterationConfig {
  // 0: node-wise 1.1 p max(|U_i|, |W_i|)^(p-1); otherwise a constant shift
  double lipschitz_shift = 0.0;
  int max_iters = 500;
  double sup_tol = 1e-9;  // stop when max_i |du_i| / (1 + |u_i|) < sup_tol
  double monotone_slack = 1e-12;
  std::vector<int> exhaustion_levels = {8, 16, 32, 64, 128};
  // after the last level, free every node except the few outermost ones needed
  // for the sub-solution to stay a discrete sub-solution
  bool terminal_level = true;

  void validate() const;
};

struct IterationTrace {
  std::vector<double> sup_change;  // max_i |du_i| / (1 + |u_i|)
  std::vector<bool> monotone;
  double min_increment = 0.0;   // most negative u_{k+1} - u_k seen, relative
  double final_residual = 0.0;  // max_i |r_i| / ((L_ii + shift_i)(1 + |u_i|))
  int iterations = 0;
  bool converged = false;
  bool all_monotone() const;
};

// (L + shift I) u = rhs - exterior_load.
GridFunction solve_linear(const OperatorMatrix& op, double shift, const GridFunction& rhs);

// Discrete residual L u + |u|^(p-1) u - f at every node.
Eigen::VectorXd discrete_residual(const ProblemParams& params, const OperatorMatrix& op, const Eigen::VectorXd& u);

// Jacobi-scaled relative residual: max_i |r_i| / ((L_ii + shift_i)(1 + |u_i|)) over the mask.
double scaled_residual(const ProblemParams& params, const OperatorMatrix& op, const Eigen::VectorXd& u,
                       const Eigen::VectorXd& shift, const std::vector<bool>& free_mask);

// Monotone iteration from sub on all nodes.
std::pair<GridFunction, IterationTrace> solve_semilinear(const ProblemParams& params, const OperatorMatrix& op,
                                                         const GridFunction& sub, const GridFunction& super,
                                                         const IterationConfig& cfg);

// Same on the free nodes only; the others keep the values of start.
std::pair<Eigen::VectorXd, IterationTrace> monotone_iteration(const ProblemParams& params, const OperatorMatrix& op,
                                                              const std::vector<bool>& free_mask,
                                                              const Eigen::VectorXd& start,
                                                              const Eigen::VectorXd& shift,
                                                              const IterationConfig& cfg);

struct BlowupLevel {
  int n = 0;           // 0 for the terminal level
  double d_cut = 0.0;  // free nodes have d > d_cut
  int free_count = 0;
  bool warm_start = true;
  GridFunction solution;
  IterationTrace trace;
};

struct BlowupResult {
  GridFunction solution;
  std::vector<BlowupLevel> levels;
  BarrierPair barriers;
  GridFunction sub, super;
  int fixed_per_side = 0;  // nodes held at W on each side in the terminal level
  bool levels_monotone = true;
  bool sandwich = true;
  bool positive = true;
};

struct BlowupOptions {
  SearchOptions search;
  std::optional<BarrierPair> barriers;  // skips the barrier search
  AssemblyOptions assembly;
};

BlowupResult solve_blowup(const ProblemParams& params, GridPtr grid, const KernelConstants& kc,
                          const IterationConfig& cfg, const BlowupOptions& opts = {});
BlowupResult solve_blowup(const ProblemParams& params, const OperatorMatrix& op, const BarrierPair& pair,
                          const IterationConfig& cfg);

struct ComparisonReport {
  bool ordered = true;
  std::vector<int> violations;  // nodes with v > u
  double max_violation = 0.0;
};

// Checks v <= u at every node.
ComparisonReport check_comparison(const OperatorMatrix& op, const GridFunction& u, const GridFunction& v,
                                  const ProblemParams& params, double slack = 1e-12);

}  // namespace fraclap
