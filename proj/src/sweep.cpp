#include "fraclap/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "fraclap/boundary_analysis.hpp"
#include "fraclap/errors.hpp"
#include "fraclap/fractional_operator.hpp"

namespace fraclap {

std::vector<double> parse_range(const std::string& spec) {
  std::vector<double> v;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw ConfigError("range: trailing characters in '" + item + "'");
    } catch (const std::logic_error&) {
      throw ConfigError("range: cannot read '" + spec + "' as lo:hi:step");
    }
  }
  if (v.size() == 1) return v;
  if (v.size() != 3) throw ConfigError("range: expected lo:hi:step, got '" + spec + "'");
  const double lo = v[0], hi = v[1], step = v[2];
  if (!(step > 0.0) || !(hi >= lo)) throw ConfigError("range: need step > 0 and hi >= lo in '" + spec + "'");
  const long count = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
  if (count > 100000) throw ConfigError("range: too many points in '" + spec + "'");
  std::vector<double> out;
  for (long k = 0; k < count; ++k) out.push_back(std::round((lo + k * step) * 1e12) / 1e12);
  return out;
}

namespace {

struct Column {
  double tau;
  double measured_rate = 0.0;
  int op_sign = 0;
  std::vector<SweepRow> rows;
};

void run_column(Column& col, const SweepOptions& opts, const KernelConstants& kc) {
  const double a = opts.alpha;
  ProblemParams pp;
  pp.alpha = a;
  pp.p = opts.p_grid.front();
  BarrierSampler s(pp, verification_points(opts.family.delta, opts.family.deep_lo), opts.family.verify.quad);
  const auto& v = s.power(col.tau, opts.family.delta);
  {
    std::vector<double> d, mag;
    int pos = 0, neg = 0;
    for (std::size_t i = 0; i < s.points().size(); ++i) {
      const double di = s.points()[i];
      if (di < 1e-4 || di > 1e-2) continue;
      d.push_back(di);
      mag.push_back(std::abs(v.op[i]));
      (v.op[i] > 0.0 ? pos : neg)++;
    }
    col.op_sign = neg == 0 ? 1 : pos == 0 ? -1 : 0;
    col.measured_rate = fit_power(d, mag, {1e-4, 1e-2}).exponent;
  }
  // 1, 2, 1/2, 4, ...
  std::vector<double> ts = {1.0};
  for (int k = 1; k <= std::max(opts.family.t_k_max, -opts.family.t_k_min); ++k) {
    if (k <= opts.family.t_k_max) ts.push_back(std::ldexp(1.0, k));
    if (-k >= opts.family.t_k_min) ts.push_back(std::ldexp(1.0, -k));
  }
  for (double p : opts.p_grid) {
    s.set_power(p);
    SweepRow r;
    r.p = p;
    r.tau = col.tau;
    r.predicted_rate = col.tau - 2.0 * a;
    r.measured_rate = col.measured_rate;
    r.op_sign = col.op_sign;
    if (col.op_sign > 0 || (col.op_sign < 0 && col.tau * p < col.measured_rate)) {
      r.asymptotic_sign = 1;
    } else if (col.op_sign < 0 && col.tau * p > col.measured_rate) {
      r.asymptotic_sign = -1;
    }
    try {
      r.zone = family_zone(p, col.tau, kc);
    } catch (const AmbiguousRegime&) {
      r.zone = -1;
    }
    ProblemParams q = pp;
    q.p = p;
    try {
      const auto reg = classify_regime(q, std::nullopt, std::nullopt, kc);
      r.regime = to_string(reg.zone);
      if (reg.zone == Zone::ExistenceInteraction) r.blowup_exponent = reg.predicted_exponent;
    } catch (const AmbiguousRegime&) {
      r.regime = "ambiguous";
    }
    if (auto m = search_family(s, col.tau, Role::Super, ts, opts.family)) {
      r.super_ok = true;
      r.super_t = m->t;
      r.super_mu = m->mu;
    }
    if (auto m = search_family(s, col.tau, Role::Sub, ts, opts.family)) {
      r.sub_ok = true;
      r.sub_t = m->t;
      r.sub_mu = m->mu;
    }
    if (r.zone > 0) r.consistent = family_zone_sign(r.zone) > 0 ? r.super_ok : r.sub_ok;
    col.rows.push_back(std::move(r));
  }
}

}  // namespace

SweepResult zone_sweep(const SweepOptions& opts) {
  if (opts.p_grid.empty() || opts.tau_grid.empty()) throw ConfigError("sweep: empty parameter grid");
  for (double p : opts.p_grid)
    if (!(p > 1.0)) throw ConfigError("sweep: p must exceed 1");
  for (double t : opts.tau_grid)
    if (!(t > -1.0 && t < 0.0)) throw ConfigError("sweep: tau must lie in (-1, 0)");
  SweepResult res;
  res.kc = find_tau0(opts.alpha, 1e-10, opts.family.verify.quad);

  std::vector<double> taus = opts.tau_grid;
  std::sort(taus.begin(), taus.end());
  std::vector<Column> cols;
  for (double t : taus) cols.push_back(Column{t, 0.0, 0, {}});
  const int nt = std::max(1, std::min<int>(opts.threads > 0 ? opts.threads : default_thread_count(),
                                           static_cast<int>(cols.size())));
  std::atomic<std::size_t> next{0};
  std::vector<std::string> errors(cols.size());
  auto work = [&] {
    for (std::size_t k = next++; k < cols.size(); k = next++) {
      try {
        run_column(cols[k], opts, res.kc);
      } catch (const std::exception& e) {
        errors[k] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int i = 1; i < nt; ++i) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (!e.empty()) throw DomainError("sweep: " + e);

  for (auto& c : cols)
    for (auto& r : c.rows) res.rows.push_back(std::move(r));
  std::sort(res.rows.begin(), res.rows.end(),
            [](const SweepRow& x, const SweepRow& y) { return x.p != y.p ? x.p < y.p : x.tau < y.tau; });

  std::map<int, bool> zone_ok;
  for (const auto& r : res.rows) {
    if (!r.consistent) res.all_consistent = false;
    if (r.zone > 0) {
      if (r.asymptotic_sign != family_zone_sign(r.zone)) res.asymptotic_consistent = false;
      auto [it, fresh] = zone_ok.emplace(r.zone, true);
      it->second = it->second && r.consistent;
    }
  }
  for (auto [z, ok] : zone_ok)
    if (ok) res.zones_verified.push_back(z);

  // transitions from the asymptotic verdicts below tau0, ignoring zone labels
  std::map<double, std::pair<bool, bool>> by_p;  // p -> (some super, some sub)
  std::map<double, std::pair<bool, bool>> zones;  // p -> (zone 2 or 3, zone 3)
  for (const auto& r : res.rows) {
    auto& z = zones[r.p];
    z.first = z.first || r.zone == 2 || r.zone == 3;
    z.second = z.second || r.zone == 3;
    auto& e = by_p[r.p];
    if (!(r.tau < res.kc.tau0 - kTieTolerance)) continue;
    e.first = e.first || r.asymptotic_sign > 0;
    e.second = e.second || r.asymptotic_sign < 0;
  }
  auto locate = [](const std::map<double, std::pair<bool, bool>>& m, std::optional<double>& lo,
                   std::optional<double>& hi) {
    for (auto [p, e] : m) {
      if (!lo) {
        if (e.first) lo = p;
      } else if (!e.second) {
        hi = p;
        break;
      }
    }
  };
  locate(by_p, res.p_interaction_measured, res.p_star_measured);
  locate(zones, res.p_interaction_zones, res.p_star_zones);
  return res;
}

}  // namespace fraclap
