#include "fraclap/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

#include "fraclap/errors.hpp"

namespace fraclap {

void IterationConfig::validate() const {
  if (!(lipschitz_shift >= 0.0)) throw ConfigError("lipschitz_shift must be >= 0");
  if (max_iters < 1) throw ConfigError("max_iters must be >= 1");
  if (!(sup_tol > 0.0)) throw ConfigError("sup_tol must be > 0");
  if (!(monotone_slack >= 0.0)) throw ConfigError("monotone_slack must be >= 0");
  for (std::size_t k = 0; k < exhaustion_levels.size(); ++k) {
    if (exhaustion_levels[k] < 3) throw ConfigError("exhaustion levels must be >= 3");
    if (k > 0 && exhaustion_levels[k] <= exhaustion_levels[k - 1]) {
      throw ConfigError("exhaustion levels must increase strictly");
    }
  }
}

bool IterationTrace::all_monotone() const {
  return std::all_of(monotone.begin(), monotone.end(), [](bool b) { return b; });
}

GridFunction solve_linear(const OperatorMatrix& op, double shift, const GridFunction& rhs) {
  if (!(shift >= 0.0)) throw DomainError("solve_linear: shift must be >= 0");
  if (!rhs.grid || !rhs.grid->same_as(*op.grid)) throw GridMismatch("solve_linear: grid mismatch");
  Eigen::MatrixXd m = op.system_matrix();
  m.diagonal().array() += shift;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  Eigen::VectorXd u = lu.solve(rhs.values - op.exterior_load);
  if (!u.allFinite()) throw ConvergenceError("solve_linear: singular system");
  return GridFunction(op.grid, std::move(u), op.exterior);
}

namespace {

Eigen::VectorXd source_at_nodes(const ProblemParams& params, const Grid1D& g) {
  Eigen::VectorXd f(g.size());
  for (int i = 0; i < g.size(); ++i) f[i] = params.source(g.d(i));
  return f;
}

Eigen::VectorXd power_term(const Eigen::VectorXd& u, double p) {
  return u.array().abs().pow(p - 1.0) * u.array();
}

Eigen::VectorXd nodewise_shift(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, double p, double constant) {
  const Eigen::VectorXd m = lo.array().abs().max(hi.array().abs());
  if (constant > 0.0) {
    const double need = p * std::pow(m.maxCoeff(), p - 1.0);
    if (constant < need) {
      std::ostringstream os;
      os << "lipschitz_shift " << constant << " below p max(|U|,|W|)^(p-1) = " << need;
      throw ConfigError(os.str());
    }
    return Eigen::VectorXd::Constant(lo.size(), constant);
  }
  return 1.1 * p * m.array().pow(p - 1.0);
}

bool exterior_nonneg(const ExteriorData& g) {
  switch (g.kind) {
    case ExteriorData::Kind::Zero: return true;
    case ExteriorData::Kind::PowerCollar: return g.kappa_g >= 0.0;
    case ExteriorData::Kind::Tabulated:
      return std::all_of(g.table.value.begin(), g.table.value.end(), [](double v) { return v >= 0.0; });
  }
  return false;
}

}  // namespace

Eigen::VectorXd discrete_residual(const ProblemParams& params, const OperatorMatrix& op, const Eigen::VectorXd& u) {
  Eigen::VectorXd r = op.interaction * u;
  r.array() += op.tail.array() * u.array() + op.exterior_load.array();
  return r + power_term(u, params.p) - source_at_nodes(params, *op.grid);
}

double scaled_residual(const ProblemParams& params, const OperatorMatrix& op, const Eigen::VectorXd& u,
                       const Eigen::VectorXd& shift, const std::vector<bool>& free_mask) {
  const Eigen::VectorXd r = discrete_residual(params, op, u);
  double worst = 0.0;
  for (int i = 0; i < r.size(); ++i) {
    if (!free_mask[i]) continue;
    const double diag = op.interaction(i, i) + op.tail[i] + shift[i];
    worst = std::max(worst, std::abs(r[i]) / (diag * (1.0 + std::abs(u[i]))));
  }
  return worst;
}

std::pair<Eigen::VectorXd, IterationTrace> monotone_iteration(const ProblemParams& params, const OperatorMatrix& op,
                                                              const std::vector<bool>& free_mask,
                                                              const Eigen::VectorXd& start,
                                                              const Eigen::VectorXd& shift,
                                                              const IterationConfig& cfg) {
  const int n = op.size();
  std::vector<int> F, X;
  for (int i = 0; i < n; ++i) (free_mask[i] ? F : X).push_back(i);
  const int nf = static_cast<int>(F.size());
  IterationTrace trace;
  Eigen::VectorXd u = start;
  if (nf == 0) {
    trace.converged = true;
    return {u, trace};
  }

  const Eigen::VectorXd f = source_at_nodes(params, *op.grid);
  Eigen::MatrixXd M(nf, nf);
  Eigen::VectorXd b(nf), D(nf), uf(nf);
  for (int a = 0; a < nf; ++a) {
    const int i = F[a];
    for (int c = 0; c < nf; ++c) M(a, c) = op.interaction(i, F[c]);
    M(a, a) += op.tail[i] + shift[i];
    double fixed = 0.0;
    for (int j : X) fixed += op.interaction(i, j) * start[j];
    b[a] = f[i] - op.exterior_load[i] - fixed;
    D[a] = shift[i];
    uf[a] = start[i];
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);

  trace.min_increment = 0.0;
  for (int k = 0; k < cfg.max_iters; ++k) {
    const Eigen::VectorXd rhs = b + (D.array() * uf.array()).matrix() - power_term(uf, params.p);
    Eigen::VectorXd next = lu.solve(rhs);
    if (!next.allFinite()) throw ConvergenceError("monotone iteration: non-finite iterate");
    const Eigen::VectorXd step = next - uf;
    const double rel_min = (step.array() / (1.0 + uf.array().abs())).minCoeff();
    trace.min_increment = std::min(trace.min_increment, rel_min);
    trace.monotone.push_back(rel_min >= -cfg.monotone_slack);
    // node-wise relative change; implies |du| < sup_tol (1 + sup|u|)
    const double change = (step.array().abs() / (1.0 + next.array().abs())).maxCoeff();
    trace.sup_change.push_back(change);
    uf = std::move(next);
    trace.iterations = k + 1;
    if (change < cfg.sup_tol) {
      trace.converged = true;
      break;
    }
  }
  for (int a = 0; a < nf; ++a) u[F[a]] = uf[a];
  trace.final_residual = scaled_residual(params, op, u, shift, free_mask);
  return {u, trace};
}

std::pair<GridFunction, IterationTrace> solve_semilinear(const ProblemParams& params, const OperatorMatrix& op,
                                                         const GridFunction& sub, const GridFunction& super,
                                                         const IterationConfig& cfg) {
  params.validate();
  cfg.validate();
  if (!sub.grid->same_as(*op.grid) || !super.grid->same_as(*op.grid)) {
    throw GridMismatch("solve_semilinear: grid mismatch");
  }
  for (int i = 0; i < sub.size(); ++i) {
    if (sub.values[i] > super.values[i]) throw DomainError("solve_semilinear: sub exceeds super");
  }
  const Eigen::VectorXd shift = nodewise_shift(sub.values, super.values, params.p, cfg.lipschitz_shift);
  const std::vector<bool> all(op.size(), true);
  auto [u, trace] = monotone_iteration(params, op, all, sub.values, shift, cfg);
  if (!trace.all_monotone()) {
    std::ostringstream os;
    os << "solve_semilinear: non-monotone iterate (relative drop " << -trace.min_increment << ")";
    throw ConvergenceError(os.str());
  }
  if (!trace.converged) throw ConvergenceError("solve_semilinear: max_iters exhausted");
  return {GridFunction(op.grid, std::move(u), op.exterior), trace};
}

BlowupResult solve_blowup(const ProblemParams& params, const OperatorMatrix& op, const BarrierPair& pair,
                          const IterationConfig& cfg) {
  params.validate();
  cfg.validate();
  const auto& g = *op.grid;
  const int n = g.size();
  BlowupResult res;
  res.barriers = pair;
  res.sub = GridFunction::sample(op.grid, [&](double, double d) { return pair.sub.value_d(d); }, op.exterior);
  res.super = GridFunction::sample(op.grid, [&](double, double d) { return pair.super.value_d(d); }, op.exterior);
  const Eigen::VectorXd& U = res.super.values;
  // max(W, 0) is again a sub-solution when f >= 0 and g >= 0; it keeps the shift small
  const bool nonneg = params.source.sign_nonneg() && exterior_nonneg(params.exterior);
  const Eigen::VectorXd W = nonneg ? Eigen::VectorXd(res.sub.values.cwiseMax(0.0)) : res.sub.values;
  const Eigen::VectorXd shift = nodewise_shift(W, U, params.p, cfg.lipschitz_shift);

  // hold the outermost nodes where W (resp. U) fails to be a discrete sub (super) solution
  const Eigen::VectorXd rw = discrete_residual(params, op, W), ru = discrete_residual(params, op, U);
  int k = 0;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    const double diag = op.interaction(i, i) + op.tail[i];
    if (rw[i] > 1e-12 * diag * (1.0 + std::abs(W[i])) || ru[i] < -1e-12 * diag * (1.0 + std::abs(U[i]))) k = i + 1;
  }
  if (k > n / 4) {
    std::ostringstream os;
    os << "solve_blowup: barriers are not discrete sub/super-solutions up to node " << k << " (d=" << g.d(k - 1)
       << ")";
    throw VerificationError(os.str());
  }
  res.fixed_per_side = k;

  std::vector<std::pair<int, double>> schedule;
  for (int lv : cfg.exhaustion_levels) schedule.emplace_back(lv, 1.0 / lv);
  if (cfg.terminal_level || schedule.empty()) schedule.emplace_back(0, 0.0);

  Eigen::VectorXd prev = W;
  std::vector<bool> prev_mask(n, false);
  const double slack = cfg.monotone_slack;
  for (const auto& [lv, cut] : schedule) {
    std::vector<bool> mask(n);
    int nf = 0;
    for (int i = 0; i < n; ++i) {
      mask[i] = g.d(i) > cut && i >= k && i < n - k;
      nf += mask[i];
    }
    if (nf == 0) continue;
    BlowupLevel level;
    level.n = lv;
    level.d_cut = cut;
    level.free_count = nf;
    Eigen::VectorXd start = W;
    for (int i = 0; i < n; ++i) {
      if (mask[i]) start[i] = std::max(W[i], prev[i]);
    }
    auto [u, trace] = monotone_iteration(params, op, mask, start, shift, cfg);
    if (!trace.all_monotone()) {
      level.warm_start = false;
      std::tie(u, trace) = monotone_iteration(params, op, mask, W, shift, cfg);
    }
    if (!trace.all_monotone()) {
      std::ostringstream os;
      os << "solve_blowup: non-monotone iterate at level " << lv << " (relative drop " << -trace.min_increment << ")";
      throw ConvergenceError(os.str());
    }
    if (!trace.converged) {
      std::ostringstream os;
      os << "solve_blowup: level " << lv << " did not converge in " << cfg.max_iters << " iterations";
      throw ConvergenceError(os.str());
    }
    for (int i = 0; i < n; ++i) {
      if (mask[i] && prev_mask[i] && u[i] < prev[i] - slack * (1.0 + std::abs(prev[i]))) res.levels_monotone = false;
    }
    level.solution = GridFunction(op.grid, u, op.exterior);
    level.trace = std::move(trace);
    res.levels.push_back(std::move(level));
    prev = u;
    prev_mask = mask;
  }
  if (res.levels.empty()) throw DomainError("solve_blowup: no free nodes at any level");

  res.solution = res.levels.back().solution;
  for (int i = 0; i < n; ++i) {
    const double u = prev[i], tol = slack * (1.0 + std::abs(u));
    if (u < res.sub.values[i] - tol || u > U[i] + tol) res.sandwich = false;
    if (!(u > 0.0)) res.positive = false;
  }
  return res;
}

BlowupResult solve_blowup(const ProblemParams& params, GridPtr grid, const KernelConstants& kc,
                          const IterationConfig& cfg, const BlowupOptions& opts) {
  params.validate();
  BarrierPair pair;
  if (opts.barriers) {
    pair = *opts.barriers;
  } else {
    const auto regime = classify_regime(params, std::nullopt, std::nullopt, kc);
    pair = make_existence_pair(params, kc, regime, opts.search);
  }
  const auto op = assemble(std::move(grid), params.alpha, params.exterior, opts.assembly);
  return solve_blowup(params, op, pair, cfg);
}

ComparisonReport check_comparison(const OperatorMatrix& op, const GridFunction& u, const GridFunction& v,
                                  const ProblemParams& params, double slack) {
  params.validate();
  if (!u.grid->same_as(*op.grid) || !v.grid->same_as(*op.grid)) throw GridMismatch("check_comparison: grid mismatch");
  ComparisonReport r;
  for (int i = 0; i < u.size(); ++i) {
    const double gap = v.values[i] - u.values[i];
    if (gap > slack * (1.0 + std::abs(u.values[i]))) {
      r.ordered = false;
      r.violations.push_back(i);
      r.max_violation = std::max(r.max_violation, gap);
    }
  }
  return r;
}

}  // namespace fraclap
