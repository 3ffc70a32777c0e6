#include "fraclap/io.hpp"

#include <cmath>
#include <fstream>

#include "fraclap/errors.hpp"

namespace fraclap {

const char* version() { return FRACLAP_VERSION; }

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

namespace {

template <class T>
Json optional(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

Json table(const DistanceTable& t) { return {{"d", t.d}, {"value", t.value}}; }

}  // namespace

Json to_json(const ProblemParams& p) {
  Json src = {{"kind", to_string(p.source.kind)}};
  if (p.source.kind == SourceField::Kind::PowerCollar) {
    src["kappa_f"] = p.source.kappa_f;
    src["gamma"] = p.source.gamma;
  } else if (p.source.kind == SourceField::Kind::Tabulated) {
    src["table"] = table(p.source.table);
  }
  Json ext = {{"kind", to_string(p.exterior.kind)}};
  if (p.exterior.kind == ExteriorData::Kind::PowerCollar) {
    ext["kappa_g"] = p.exterior.kappa_g;
    ext["beta"] = p.exterior.beta;
    ext["eta"] = p.exterior.eta;
  } else if (p.exterior.kind == ExteriorData::Kind::Tabulated) {
    ext["table"] = table(p.exterior.table);
  }
  return {{"alpha", p.alpha}, {"p", p.p}, {"source", src}, {"exterior", ext}};
}

Json to_json(const KernelConstants& kc) {
  return {{"alpha", kc.alpha},           {"tau0", kc.tau0},
          {"p_star", number(kc.p_star)}, {"residual", kc.residual},
          {"iterations", kc.iterations}, {"c_evaluations", kc.c_of_tau_cache.size()}};
}

Json to_json(const RegimeReport& r) {
  return {{"zone", to_string(r.zone)}, {"predicted_exponent", optional(r.predicted_exponent)}, {"notes", r.notes}};
}

Json to_json(const BarrierSpec& b) {
  Json terms = Json::array();
  for (const auto& t : b.terms) {
    Json j = {{"kind", to_string(t.kind)}, {"coefficient", t.coefficient}};
    if (t.kind == BarrierTerm::Kind::PowerDistance) {
      j["tau"] = t.tau;
      j["delta"] = t.delta;
    }
    if (t.kind == BarrierTerm::Kind::Bump) j["c"] = t.c;
    terms.push_back(j);
  }
  return {{"terms", terms}, {"interior_blend", b.interior_blend}};
}

Json to_json(const VerifyReport& r, bool with_points) {
  Json j = {{"role", to_string(r.role)},
            {"passed", r.passed},
            {"worst_margin", number(r.worst_margin)},
            {"worst_d", r.worst_d},
            {"scale_tau", r.scale_tau},
            {"first_violation_d", optional(r.first_violation_d)},
            {"points", r.points.size()}};
  if (with_points) {
    Json pts = Json::array();
    for (const auto& p : r.points)
      pts.push_back({{"d", p.d}, {"value", p.value}, {"residual", number(p.residual)}, {"margin", number(p.margin)}});
    j["margins"] = pts;
  }
  return j;
}

Json to_json(const BarrierPair& p) {
  return {{"tau", p.tau},
          {"tau_aux", p.tau_aux},
          {"mu_super", p.mu_super},
          {"lambda_super", p.lambda_super},
          {"mu_sub", p.mu_sub},
          {"lambda_sub", p.lambda_sub},
          {"ordered", p.ordered},
          {"super", to_json(p.super)},
          {"sub", to_json(p.sub)},
          {"super_report", to_json(p.super_report)},
          {"sub_report", to_json(p.sub_report)}};
}

Json to_json(const FamilyMember& m) {
  return {{"zone", m.zone},
          {"role", to_string(m.role)},
          {"t", m.t},
          {"mu", m.mu},
          {"verified", m.verified},
          {"opposite_verified", m.opposite_verified},
          {"barrier", to_json(m.barrier)},
          {"report", to_json(m.report, true)}};
}

Json to_json(const RateFit& f) {
  return {{"exponent", f.exponent},
          {"exponent_left", f.exponent_left},
          {"exponent_right", f.exponent_right},
          {"intercept", f.intercept},
          {"r_squared", f.r_squared},
          {"window", {f.window.first, f.window.second}},
          {"band", {number(f.band_min), number(f.band_max)}},
          {"samples", f.samples},
          {"verified", f.verified}};
}

Json to_json(const BandCheck& b) { return {{"min", number(b.min)}, {"max", number(b.max)}, {"verified", b.verified}}; }

Json to_json(const Prop32Report& r) {
  Json j = {{"alpha", r.alpha},       {"tau", r.tau},
            {"tau0", r.tau0},         {"case", r.case_id},
            {"expected_exponent", r.expected_exponent}, {"sign_ok", r.sign_ok},
            {"passed", r.passed}};
  if (r.case_id == 3) {
    j["band_inner"] = number(r.band_inner);
    j["band_outer"] = number(r.band_outer);
  } else if (r.sign_ok) {
    j["fit"] = to_json(r.fit);
  }
  return j;
}

Json to_json(const IterationTrace& t) {
  Json changes = Json::array();
  for (double c : t.sup_change) changes.push_back(number(c));
  return {{"iterations", t.iterations},
          {"converged", t.converged},
          {"monotone", t.all_monotone()},
          {"min_increment", t.min_increment},
          {"final_residual", number(t.final_residual)},
          {"sup_change", changes}};
}

Json to_json(const IterationConfig& c) {
  return {{"lipschitz_shift", c.lipschitz_shift}, {"max_iters", c.max_iters},
          {"sup_tol", c.sup_tol},                 {"monotone_slack", c.monotone_slack},
          {"exhaustion_levels", c.exhaustion_levels}, {"terminal_level", c.terminal_level}};
}

Json to_json(const BlowupResult& r) {
  Json levels = Json::array();
  for (const auto& l : r.levels) {
    levels.push_back({{"n", l.n},
                      {"d_cut", l.d_cut},
                      {"free_nodes", l.free_count},
                      {"warm_start", l.warm_start},
                      {"trace", to_json(l.trace)}});
  }
  return {{"levels", levels},
          {"fixed_per_side", r.fixed_per_side},
          {"levels_monotone", r.levels_monotone},
          {"sandwich", r.sandwich},
          {"positive", r.positive},
          {"barriers", to_json(r.barriers)}};
}

Json to_json(const SweepRow& r) {
  return {{"p", r.p},
          {"tau", r.tau},
          {"zone", r.zone},
          {"regime", r.regime},
          {"blowup_exponent", optional(r.blowup_exponent)},
          {"predicted_rate", r.predicted_rate},
          {"measured_rate", r.measured_rate},
          {"op_sign", r.op_sign},
          {"asymptotic_sign", r.asymptotic_sign},
          {"super_ok", r.super_ok},
          {"sub_ok", r.sub_ok},
          {"consistent", r.consistent}};
}

void write_json(const std::string& path, const Json& j) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path);
  os << j.dump(2) << '\n';
  if (!os) throw ConfigError("write failed: " + path);
}

}  // namespace fraclap
