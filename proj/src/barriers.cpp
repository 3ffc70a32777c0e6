#include "fraclap/barriers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fraclap/errors.hpp"
#include "fraclap/kernel_integrals.hpp"

namespace fraclap {

std::string to_string(Role r) { return r == Role::Super ? "super" : "sub"; }

std::vector<double> collar_points(double d_lo, double d_hi, int count) {
  if (!(d_lo > 0.0 && d_hi > d_lo && d_hi <= 0.5) || count < 2) throw DomainError("collar_points: bad range");
  std::vector<double> d(count);
  const double r = std::log(d_hi / d_lo);
  for (int k = 0; k < count; ++k) d[k] = d_lo * std::exp(r * k / (count - 1));
  d.back() = d_hi;
  return d;
}

std::vector<double> verification_points(double delta, double d_lo, int collar, int interior) {
  auto d = collar_points(d_lo, delta, collar);
  for (int k = 1; k <= interior; ++k) d.push_back(delta + (0.5 - delta) * k / interior);
  return d;
}

BarrierSampler::BarrierSampler(ProblemParams params, std::vector<double> d, QuadratureConfig cfg)
    : params_(std::move(params)), d_(std::move(d)), cfg_(cfg) {
  params_.validate();
  load_.resize(d_.size());
  for (std::size_t i = 0; i < d_.size(); ++i) {
    if (!(d_[i] >= kDistanceFloor && d_[i] <= 0.5)) throw DomainError("BarrierSampler: point outside (d_min, 1/2]");
    double F = params_.source(d_[i]);
    if (!params_.exterior.is_zero()) F += exterior_potential(params_.exterior, params_.alpha, d_[i], cfg_);
    load_[i] = F;
  }
}

const BarrierSampler::Samples& BarrierSampler::power(double tau, double delta) {
  const auto key = std::make_pair(tau, delta);
  auto it = power_.find(key);
  if (it != power_.end()) return it->second;
  Samples s;
  const PowerProfile prof(tau, delta);
  const double c = eval_C(tau, params_.alpha, cfg_);
  for (double d : d_) {
    s.value.push_back(prof.value_d(d));
    s.op.push_back(power_operator(tau, delta, params_.alpha, d, cfg_, c));
  }
  return power_.emplace(key, std::move(s)).first->second;
}

const BarrierSampler::Samples& BarrierSampler::indicator() {
  if (!indicator_) {
    Samples s;
    for (double d : d_) {
      s.value.push_back(1.0);
      s.op.push_back(indicator_operator(params_.alpha, d));
    }
    indicator_ = std::move(s);
  }
  return *indicator_;
}

BarrierSampler::Samples BarrierSampler::term(const BarrierTerm& t, const BarrierSpec& owner) {
  switch (t.kind) {
    case BarrierTerm::Kind::PowerDistance: return power(t.tau, t.delta);
    case BarrierTerm::Kind::Indicator: return indicator();
    case BarrierTerm::Kind::Torsion: {
      Samples s;
      BarrierSpec unit;
      unit.add_torsion(1.0, owner.torsion);
      for (double d : d_) {
        s.value.push_back(unit.value_d(d));
        s.op.push_back(-1.0);
      }
      return s;
    }
    case BarrierTerm::Kind::Bump: {
      Samples s;
      for (double d : d_) {
        s.value.push_back(bump_value(d, t.c));
        s.op.push_back(bump_operator(t.c, params_.alpha, d, cfg_));
      }
      return s;
    }
  }
  return {};
}

VerifyReport BarrierSampler::judge(const std::vector<const Samples*>& s, const std::vector<double>& c, Role role,
                                   double scale_tau, double tol_rel, double d_max) const {
  VerifyReport rep;
  rep.role = role;
  rep.scale_tau = scale_tau;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  const double p = params_.p;
  const double sgn = role == Role::Super ? 1.0 : -1.0;
  for (std::size_t i = 0; i < d_.size(); ++i) {
    if (d_[i] > d_max) continue;
    VerifyPoint pt;
    pt.d = d_[i];
    double op = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      pt.value += c[k] * s[k]->value[i];
      op += c[k] * s[k]->op[i];
    }
    pt.residual = op + std::pow(std::abs(pt.value), p - 1.0) * pt.value - load_[i];
    pt.scale = std::pow(pt.d, scale_tau * p);
    pt.margin = sgn * pt.residual / pt.scale;
    if (!std::isfinite(pt.margin)) pt.margin = -std::numeric_limits<double>::infinity();
    if (pt.margin < rep.worst_margin) {
      rep.worst_margin = pt.margin;
      rep.worst_d = pt.d;
    }
    if (pt.margin < -tol_rel && !rep.first_violation_d) rep.first_violation_d = pt.d;
    rep.points.push_back(pt);
  }
  rep.passed = !rep.points.empty() && !rep.first_violation_d;
  return rep;
}

VerifyReport BarrierSampler::verify(const BarrierSpec& b, Role role, double tol_rel) {
  b.validate();
  std::vector<Samples> owned;
  owned.reserve(b.terms.size());
  std::vector<double> c;
  for (const auto& t : b.terms) {
    owned.push_back(term(t, b));
    c.push_back(t.coefficient);
  }
  std::vector<const Samples*> ptrs;
  for (const auto& s : owned) ptrs.push_back(&s);
  return judge(ptrs, c, role, b.leading_tau(), tol_rel);
}

VerifyReport verify_barrier(const BarrierSpec& b, const ProblemParams& params, Role role,
                            const std::vector<double>& collar_nodes, const VerifyOptions& opts) {
  BarrierSampler s(params, collar_nodes, opts.quad);
  return s.verify(b, role, opts.tol_rel);
}

namespace {

std::string describe_failure(const VerifyReport& r) {
  std::ostringstream os;
  os << to_string(r.role) << " worst margin " << r.worst_margin << " at d=" << r.worst_d;
  if (r.first_violation_d) os << ", first violation at d=" << *r.first_violation_d;
  return os.str();
}

struct PairSearch {
  BarrierSampler& s;
  const BarrierSampler::Samples& v;
  const BarrierSampler::Samples& chi;
  double tau;
  double tol;

  // The collar sign must come from mu V_tau alone on the deepest samples.
  bool gate(double mu, Role role, double deep_hi) const {
    return s.judge({&v, &chi}, {mu, 0.0}, role, tau, tol, deep_hi).passed;
  }

  // Smallest lambda in {0} U 2^k making mu V +- lambda chi verify.
  std::optional<double> lambda_for(double mu, Role role, int kmin, int kmax, VerifyReport* out) const {
    const double sgn = role == Role::Super ? 1.0 : -1.0;
    for (int k = kmin - 1; k <= kmax; ++k) {
      const double lam = k < kmin ? 0.0 : std::ldexp(1.0, k);
      auto rep = s.judge({&v, &chi}, {mu, sgn * lam}, role, tau, tol);
      if (rep.passed) {
        if (out) *out = std::move(rep);
        return lam;
      }
      if (out) *out = std::move(rep);
    }
    return std::nullopt;
  }
};

}  // namespace

BarrierPair make_existence_pair(const ProblemParams& params, const KernelConstants& kc, const RegimeReport& regime,
                                const SearchOptions& opts) {
  if (regime.zone != Zone::ExistenceInteraction && regime.zone != Zone::WeakSource &&
      regime.zone != Zone::StrongSource) {
    throw DomainError("make_existence_pair: regime " + to_string(regime.zone) + " is not an existence zone");
  }
  if (std::abs(kc.alpha - params.alpha) > 1e-14) throw DomainError("make_existence_pair: constants for another alpha");
  const double tau = *regime.predicted_exponent;
  BarrierSampler s(params, opts.points.empty() ? verification_points(opts.delta) : opts.points, opts.verify.quad);
  const auto& v = s.power(tau, opts.delta);
  const auto& chi = s.indicator();
  PairSearch ps{s, v, chi, tau, opts.verify.tol_rel};
  const double deep_hi = opts.deep_ratio * *std::min_element(s.points().begin(), s.points().end());

  BarrierPair pair;
  pair.tau = tau;
  VerifyReport last;
  // super: smallest mu that works, sub: largest
  std::optional<int> ks, kw;
  double lam_s = 0.0, lam_w = 0.0;
  for (int k = opts.mu_k_min; k <= opts.mu_k_max && !ks; ++k) {
    if (!ps.gate(std::ldexp(1.0, k), Role::Super, deep_hi)) continue;
    if (auto lam = ps.lambda_for(std::ldexp(1.0, k), Role::Super, opts.lambda_k_min, opts.lambda_k_max, &last)) {
      ks = k;
      lam_s = *lam;
    }
  }
  if (!ks) throw VerificationError("make_existence_pair: no super-solution found; " + describe_failure(last));
  for (int k = opts.mu_k_max; k >= opts.mu_k_min && !kw; --k) {
    if (!ps.gate(std::ldexp(1.0, k), Role::Sub, deep_hi)) continue;
    if (auto lam = ps.lambda_for(std::ldexp(1.0, k), Role::Sub, opts.lambda_k_min, opts.lambda_k_max, &last)) {
      kw = k;
      lam_w = *lam;
    }
  }
  if (!kw) throw VerificationError("make_existence_pair: no sub-solution found; " + describe_failure(last));

  double mu_s = std::ldexp(1.0, *ks), mu_w = std::ldexp(1.0, *kw);
  if (opts.safety) {
    if (lam_s > 0.0 && s.judge({&v, &chi}, {mu_s, 2.0 * lam_s}, Role::Super, tau, ps.tol).passed) lam_s *= 2.0;
    if (lam_w > 0.0 && s.judge({&v, &chi}, {mu_w, -2.0 * lam_w}, Role::Sub, tau, ps.tol).passed) lam_w *= 2.0;
  }
  pair.mu_super = mu_s;
  pair.lambda_super = lam_s;
  pair.mu_sub = mu_w;
  pair.lambda_sub = lam_w;
  pair.super.add_power(mu_s, tau, opts.delta);
  if (lam_s > 0.0) pair.super.add_indicator(lam_s);
  pair.sub.add_power(mu_w, tau, opts.delta);
  if (lam_w > 0.0) pair.sub.add_indicator(-lam_w);
  pair.super_report = s.judge({&v, &chi}, {mu_s, lam_s}, Role::Super, tau, ps.tol);
  pair.sub_report = s.judge({&v, &chi}, {mu_w, -lam_w}, Role::Sub, tau, ps.tol);
  pair.ordered = true;
  for (std::size_t i = 0; i < s.points().size(); ++i) {
    if (pair.super_report.points[i].value < pair.sub_report.points[i].value) pair.ordered = false;
  }
  return pair;
}

BarrierPair make_special_pair(const ProblemParams& params, const KernelConstants& kc, double t,
                              const SpecialOptions& opts) {
  if (!(t > 0.0)) throw DomainError("make_special_pair: t must be positive");
  const auto win = special_window(params, kc);
  if (!win || !(params.p > win->first && params.p < win->second)) {
    throw DomainError("make_special_pair: p outside the special window");
  }
  const double tau0 = kc.tau0;
  const double tau1 = std::min(tau0 * params.p + 2.0 * params.alpha, 0.0);
  BarrierSampler s(params, collar_points(opts.collar_lo, opts.collar_hi, opts.collar_count), opts.verify.quad);
  const auto& v0 = s.power(tau0, opts.delta);
  const auto& v1 = tau1 < 0.0 ? s.power(tau1, opts.delta) : s.indicator();
  const double tol = opts.verify.tol_rel;

  BarrierPair pair;
  pair.tau = tau0;
  pair.tau_aux = tau1;
  VerifyReport last;
  std::optional<int> k1, k2;
  for (int k = opts.mu_k_max; k >= opts.mu_k_min && !k1; --k) {
    last = s.judge({&v0, &v1}, {t, -std::ldexp(1.0, k)}, Role::Super, tau0, tol);
    if (last.passed) k1 = k;
  }
  if (!k1) throw VerificationError("make_special_pair: no super-solution found; " + describe_failure(last));
  for (int k = *k1 + 1; k <= opts.mu_k_max && !k2; ++k) {
    last = s.judge({&v0, &v1}, {t, -std::ldexp(1.0, k)}, Role::Sub, tau0, tol);
    if (last.passed) k2 = k;
  }
  if (!k2) throw VerificationError("make_special_pair: no sub-solution found; " + describe_failure(last));
  pair.mu_super = std::ldexp(1.0, *k1);
  pair.mu_sub = std::ldexp(1.0, *k2);
  auto build = [&](double mu) {
    BarrierSpec b;
    b.add_power(t, tau0, opts.delta);
    if (tau1 < 0.0)
      b.add_power(-mu, tau1, opts.delta);
    else
      b.add_indicator(-mu);
    return b;
  };
  pair.super = build(pair.mu_super);
  pair.sub = build(pair.mu_sub);
  pair.super_report = s.judge({&v0, &v1}, {t, -pair.mu_super}, Role::Super, tau0, tol);
  pair.sub_report = s.judge({&v0, &v1}, {t, -pair.mu_sub}, Role::Sub, tau0, tol);
  pair.ordered = pair.mu_super < pair.mu_sub;
  return pair;
}

std::optional<FamilyMember> search_family(BarrierSampler& s, double tau, Role role, const std::vector<double>& ts,
                                          const FamilyOptions& opts) {
  const auto& v = s.power(tau, opts.delta);
  const auto& chi = s.indicator();
  const double sgn = role == Role::Super ? 1.0 : -1.0;
  const double tol = opts.verify.tol_rel;
  const double deep_hi = opts.deep_lo * opts.deep_ratio;
  for (double t : ts) {
    // the collar sign must come from t V_tau alone
    if (!s.judge({&v, &chi}, {t, 0.0}, role, tau, tol, deep_hi).passed) continue;
    for (int k = opts.mu_k_min; k <= opts.mu_k_max; ++k) {
      const double mu = sgn * std::ldexp(1.0, k);
      auto rep = s.judge({&v, &chi}, {t, mu}, role, tau, tol);
      if (!rep.passed) continue;
      FamilyMember m;
      m.role = role;
      m.t = t;
      m.mu = mu;
      m.verified = true;
      m.barrier.add_power(t, tau, opts.delta).add_indicator(mu);
      m.report = std::move(rep);
      return m;
    }
  }
  return std::nullopt;
}

namespace {

std::vector<double> t_scan(const FamilyOptions& opts) {
  // 1, 2, 1/2, 4, 1/4, ...
  std::vector<double> ts = {1.0};
  for (int k = 1; k <= std::max(opts.t_k_max, -opts.t_k_min); ++k) {
    if (k <= opts.t_k_max) ts.push_back(std::ldexp(1.0, k));
    if (-k >= opts.t_k_min) ts.push_back(std::ldexp(1.0, -k));
  }
  return ts;
}

FamilyMember family_member(BarrierSampler& s, const KernelConstants& kc, double tau, const std::vector<double>& ts,
                           const FamilyOptions& opts) {
  const int zone = family_zone(s.params().p, tau, kc);
  if (zone == 0) throw DomainError("nonexistence family: (p, tau) lies in none of the five zones");
  const Role role = family_zone_sign(zone) > 0 ? Role::Super : Role::Sub;
  const Role other = role == Role::Super ? Role::Sub : Role::Super;
  FamilyMember m;
  if (auto found = search_family(s, tau, role, ts, opts)) {
    m = std::move(*found);
  } else {
    m.role = role;
    m.t = ts.front();
    m.barrier.add_power(m.t, tau, opts.delta);
    m.report = s.verify(m.barrier, role, opts.verify.tol_rel);
    m.verified = false;
  }
  m.zone = zone;
  m.opposite_verified = search_family(s, tau, other, ts, opts).has_value();
  return m;
}

}  // namespace

FamilyMember make_nonexistence_family(const ProblemParams& params, const KernelConstants& kc, double t, double tau,
                                      const FamilyOptions& opts) {
  if (!(t > 0.0)) throw DomainError("make_nonexistence_family: t must be positive");
  BarrierSampler s(params, verification_points(opts.delta, opts.deep_lo), opts.verify.quad);
  return family_member(s, kc, tau, {t}, opts);
}

FamilyMember scan_nonexistence_family(BarrierSampler& s, const KernelConstants& kc, double tau,
                                      const FamilyOptions& opts) {
  return family_member(s, kc, tau, t_scan(opts), opts);
}

GridFunction torsion(const OperatorMatrix& op) {
  const int n = op.size();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(op.system_matrix());
  Eigen::VectorXd v = lu.solve(Eigen::VectorXd::Constant(n, -1.0));
  if (!v.allFinite()) throw ConvergenceError("torsion: linear solve failed");
  return GridFunction(op.grid, std::move(v));
}

GridFunction torsion(GridPtr grid, double alpha) { return torsion(assemble(std::move(grid), alpha)); }

BumpNormalization bump_normalization(double alpha, const QuadratureConfig& cfg) {
  auto f = [&](double d) { return bump_operator(1.0, alpha, d, cfg); };
  const int m = 200;
  double best = 0.5, fbest = f(0.5);
  for (int k = 1; k < m; ++k) {
    const double d = 0.5 * k / m;
    const double v = f(d);
    if (v > fbest) {
      fbest = v;
      best = d;
    }
  }
  // golden-section polish around the best sample
  double a = std::max(kDistanceFloor, best - 0.5 / m), b = std::min(0.5, best + 0.5 / m);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - gr * (b - a), e = a + gr * (b - a);
  double fc = f(c), fe = f(e);
  for (int it = 0; it < 60 && b - a > 1e-12; ++it) {
    if (fc > fe) {
      b = e;
      e = c;
      fe = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = e;
      fc = fe;
      e = a + gr * (b - a);
      fe = f(e);
    }
  }
  const double xm = 0.5 * (a + b), fm = f(xm);
  if (fm > fbest) {
    fbest = fm;
    best = xm;
  }
  if (!(fbest > 0.0)) throw ConvergenceError("bump_normalization: nonpositive operator maximum");
  BumpNormalization r;
  r.sup_unit = fbest;
  r.argmax = best;
  r.c = 1.0 / fbest;
  return r;
}

}  // namespace fraclap
