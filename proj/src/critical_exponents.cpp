#include "fraclap/critical_exponents.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fraclap/errors.hpp"
#include "fraclap/kernel_integrals.hpp"

namespace fraclap {

double KernelConstants::c_tilde(double beta) {
  const double v = eval_C_tilde(beta, alpha, quad);
  c_tilde_cache.emplace_back(beta, v);
  return v;
}

KernelConstants find_tau0(double alpha, double tol, const QuadratureConfig& cfg, RootMethod method) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("find_tau0: alpha must lie in (0,1)");
  if (!(tol > 0.0)) throw DomainError("find_tau0: tol must be positive");
  cfg.validate();

  KernelConstants kc;
  kc.alpha = alpha;
  kc.quad = cfg;
  auto C = [&](double t) {
    const double v = eval_C(t, alpha, cfg);
    kc.c_of_tau_cache.emplace_back(t, v);
    return v;
  };

  // C(0) = -1/(2 alpha) < 0 and C -> +inf at -1
  double hi = 0.0;
  const double c_hi = C(hi);
  if (!(c_hi < 0.0)) throw ConvergenceError("find_tau0: C(0) is not negative, quadrature misconfigured");
  double lo = -0.5;
  double c_lo = C(lo);
  for (int k = 0; !(c_lo > 0.0); ++k) {
    if (c_lo < 0.0) hi = lo;
    lo = -1.0 + 0.25 * (lo + 1.0);
    if (k > 25) throw ConvergenceError("find_tau0: no sign change found near tau=-1");
    c_lo = C(lo);
  }

  const double target = 0.1 * tol;
  double tau = 0.5 * (lo + hi);
  double c = 0.0;
  int it = 0;
  if (method == RootMethod::Bisection) {
    for (;; ++it) {
      tau = 0.5 * (lo + hi);
      c = C(tau);
      if (std::abs(c) < target || !(tau > lo && tau < hi)) break;
      if (it > 200) throw ConvergenceError("find_tau0: bisection did not converge");
      (c > 0.0 ? lo : hi) = tau;
    }
  } else {
    while (hi - lo > 0.05) {
      tau = 0.5 * (lo + hi);
      c = C(tau);
      (c > 0.0 ? lo : hi) = tau;
      ++it;
    }
    tau = 0.5 * (lo + hi);
    for (;; ++it) {
      const Jet j = eval_C_jet(tau, alpha, cfg);
      c = j.v;
      kc.c_of_tau_cache.emplace_back(tau, c);
      if (std::abs(c) < target) break;
      if (it > 200) throw ConvergenceError("find_tau0: Newton iteration did not converge");
      (c > 0.0 ? lo : hi) = tau;
      double next = j.d1 != 0.0 ? tau - c / j.d1 : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (next == tau) break;
      tau = next;
    }
  }
  kc.tau0 = tau;
  kc.residual = std::abs(c);
  kc.iterations = it;
  if (!(kc.residual < tol)) {
    std::ostringstream os;
    os << "find_tau0: residual " << kc.residual << " above tol " << tol;
    throw ConvergenceError(os.str());
  }
  kc.p_star = 1.0 - 2.0 * alpha / kc.tau0;
  return kc;
}

std::string to_string(Zone z) {
  switch (z) {
    case Zone::ExistenceInteraction: return "existence_interaction";
    case Zone::SpecialTau0: return "special_tau0";
    case Zone::NonexistenceI: return "nonexistence_i";
    case Zone::NonexistenceII: return "nonexistence_ii";
    case Zone::NonexistenceIII: return "nonexistence_iii";
    case Zone::WeakSource: return "weak_source";
    case Zone::StrongSource: return "strong_source";
    case Zone::Unclassified: return "unclassified";
  }
  return "?";
}

namespace {

// Three-valued truth for inequalities evaluated at a tie tolerance.
enum class Tri { No = 0, Maybe = 1, Yes = 2 };

Tri operator&&(Tri a, Tri b) { return std::min(a, b); }

struct Cmp {
  double tol;
  int operator()(double a, double b) const {
    if (std::abs(a - b) <= tol * (1.0 + std::abs(b))) return 0;
    return a < b ? -1 : 1;
  }
  Tri lt(double a, double b) const {
    const int c = (*this)(a, b);
    return c < 0 ? Tri::Yes : (c == 0 ? Tri::Maybe : Tri::No);
  }
  Tri le(double a, double b) const { return (*this)(a, b) <= 0 ? Tri::Yes : Tri::No; }
  Tri eq(double a, double b) const { return (*this)(a, b) == 0 ? Tri::Yes : Tri::No; }
  Tri ne(double a, double b) const { return (*this)(a, b) == 0 ? Tri::No : Tri::Yes; }
};

Tri truth(bool b) { return b ? Tri::Yes : Tri::No; }

template <class Label>
std::pair<std::vector<Label>, std::vector<Label>> split(const std::vector<std::pair<Label, Tri>>& cands) {
  std::vector<Label> yes, maybe;
  for (const auto& [z, t] : cands) {
    if (t == Tri::Yes) yes.push_back(z);
    if (t == Tri::Maybe) maybe.push_back(z);
  }
  return {yes, maybe};
}

bool source_free(const ProblemParams& params) {
  const bool f_zero = params.source.kind == SourceField::Kind::Zero ||
                      (params.source.kind == SourceField::Kind::PowerCollar && params.source.kappa_f == 0.0);
  return f_zero && params.exterior.is_zero();
}

}  // namespace

std::optional<std::pair<double, double>> special_window(const ProblemParams& params, const KernelConstants& kc) {
  const double t0 = kc.tau0;
  const double right = 1.0 - 2.0 * params.alpha / t0;
  const double left = std::max(right + (t0 + 1.0) / t0, 1.0);
  if (!(left < right)) return std::nullopt;
  return std::make_pair(left, right);
}

RegimeReport classify_regime(const ProblemParams& params, std::optional<double> gamma, std::optional<double> tau,
                             const KernelConstants& kc, double tie_tol) {
  params.validate();
  if (std::abs(kc.alpha - params.alpha) > 1e-14) throw DomainError("classify_regime: constants for another alpha");
  const Cmp cmp{tie_tol};
  const double a = params.alpha, p = params.p;
  const double pc = 1.0 + 2.0 * a, ps = kc.p_star, t0 = kc.tau0;
  const double s = -2.0 * a / (p - 1.0);
  if (!gamma) gamma = params.effective_gamma();
  const bool kappa_pos = !(params.source.kind == SourceField::Kind::PowerCollar && params.source.kappa_f < 0.0);

  const Tri h2 = gamma ? cmp.le(-2.0 * a * p / (p - 1.0), *gamma) : Tri::Yes;
  const Tri h2s = gamma ? cmp.le(-2.0 * a, *gamma) : Tri::Yes;
  const Tri h3 = gamma ? (truth(kappa_pos) && cmp.lt(-1.0 - 2.0 * a, *gamma) && cmp.lt(*gamma, 0.0)) : Tri::No;
  const Tri pp1 = cmp.lt(pc, p) && cmp.lt(p, ps);
  const Tri tau_in = tau ? (cmp.lt(-1.0, *tau) && cmp.lt(*tau, 0.0)) : Tri::Yes;

  const auto win = special_window(params, kc);
  const Tri in_window = win ? (cmp.lt(win->first, p) && cmp.lt(p, win->second)) : Tri::No;

  std::vector<std::pair<Zone, Tri>> cands;
  cands.emplace_back(Zone::ExistenceInteraction, h2 && pp1 && (tau ? cmp.eq(*tau, s) : Tri::Yes));
  cands.emplace_back(Zone::SpecialTau0,
                     tau ? (truth(source_free(params)) && cmp.eq(*tau, t0) && in_window) : Tri::No);
  cands.emplace_back(Zone::NonexistenceI,
                     tau ? (h2s && pp1 && tau_in && cmp.ne(*tau, s) && cmp.ne(*tau, t0)) : Tri::No);
  cands.emplace_back(Zone::NonexistenceII, h2s && cmp.le(ps, p) && tau_in);
  cands.emplace_back(Zone::NonexistenceIII,
                     h2s && cmp.lt(1.0, p) && cmp.le(p, pc) && tau_in && (tau ? cmp.ne(*tau, t0) : Tri::Yes));
  if (gamma) {
    const double g = *gamma;
    const double gk = -2.0 * a - 2.0 * a / (p - 1.0);
    cands.emplace_back(Zone::WeakSource, h3 && cmp.le(gk, g) && cmp.lt(g, -2.0 * a) && cmp.le(ps, p) &&
                                             (tau ? cmp.eq(*tau, g + 2.0 * a) : Tri::Yes));
    cands.emplace_back(Zone::StrongSource,
                       h3 && cmp.lt(g, gk) && cmp.lt(pc, p) && (tau ? cmp.eq(*tau, g / p) : Tri::Yes));
  }

  const auto [yes, maybe] = split(cands);
  std::ostringstream notes;
  if (yes.size() > 1 || (yes.empty() && !maybe.empty())) {
    std::ostringstream os;
    os << "classify_regime: ambiguous at alpha=" << a << " p=" << p;
    if (gamma) os << " gamma=" << *gamma;
    if (tau) os << " tau=" << *tau;
    os << "; candidates:";
    for (auto z : yes) os << ' ' << to_string(z);
    for (auto z : maybe) os << ' ' << to_string(z) << "(tie)";
    throw AmbiguousRegime(os.str());
  }

  RegimeReport r;
  if (yes.empty()) {
    r.zone = Zone::Unclassified;
    notes << "no zone applies";
    if (gamma && h3 == Tri::Yes && tau) notes << "; source-driven rate differs from tau";
    r.notes = notes.str();
    return r;
  }
  r.zone = yes.front();
  switch (r.zone) {
    case Zone::ExistenceInteraction: r.predicted_exponent = s; break;
    case Zone::SpecialTau0: r.predicted_exponent = t0; break;
    case Zone::WeakSource: r.predicted_exponent = *gamma + 2.0 * a; break;
    case Zone::StrongSource: r.predicted_exponent = *gamma / p; break;
    default: break;
  }
  notes << "p*=" << ps << ", 1+2a=" << pc;
  for (auto z : maybe) notes << "; tie with " << to_string(z) << " resolved by closed inequality";
  r.notes = notes.str();
  return r;
}

int family_zone(double p, double tau, const KernelConstants& kc, double tie_tol) {
  const Cmp cmp{tie_tol};
  const double a = kc.alpha, pc = 1.0 + 2.0 * a, ps = kc.p_star, t0 = kc.tau0;
  const double s = -2.0 * a / (p - 1.0);
  std::vector<std::pair<int, Tri>> cands = {
      {1, cmp.lt(1.0, p) && cmp.lt(t0, tau) && cmp.lt(tau, 0.0)},
      {2, cmp.lt(pc, p) && cmp.lt(-1.0, tau) && cmp.lt(tau, s)},
      {3, cmp.lt(pc, p) && cmp.le(p, ps) && cmp.lt(s, tau) && cmp.lt(tau, t0)},
      {4, cmp.eq(p, ps) && cmp.eq(tau, t0)},
      {5, cmp.lt(1.0, p) && cmp.le(p, pc) && cmp.lt(-1.0, tau) && cmp.lt(tau, t0)},
  };
  const auto [yes, maybe] = split(cands);
  if (!yes.empty()) return yes.front();
  if (!maybe.empty()) {
    std::ostringstream os;
    os << "family_zone: (p=" << p << ", tau=" << tau << ") sits on a zone boundary";
    throw AmbiguousRegime(os.str());
  }
  return 0;
}

int family_zone_sign(int zone) {
  switch (zone) {
    case 1:
    case 2:
    case 4: return 1;
    case 3:
    case 5: return -1;
    default: return 0;
  }
}

}  // namespace fraclap
