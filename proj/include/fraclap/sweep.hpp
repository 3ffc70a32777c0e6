#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fraclap/barriers.hpp"
#include "fraclap/critical_exponents.hpp"

namespace fraclap {

// lo:hi:step, both ends included (to 1e-9 of a step). Values are rounded to
// twelve decimals so that 1.1 + 19 * 0.1 lands on 3.
std::vector<double> parse_range(const std::string& spec);

struct SweepOptions {
  double alpha = 0.5;
  std::vector<double> p_grid, tau_grid;
  FamilyOptions family;
  int threads = 0;  // 0: default_thread_count()
};

struct SweepRow {
  double p = 0.0, tau = 0.0;
  int zone = 0;             // 0 outside the five zones, -1 on a zone boundary
  std::string regime;       // classify_regime for f = 0 at this p
  std::optional<double> blowup_exponent;  // -2 alpha/(p-1) in the interaction zone
  double predicted_rate = 0.0;            // tau - 2 alpha: rate of (-Delta)^alpha V_tau
  double measured_rate = 0.0;             // collar fit of |(-Delta)^alpha V_tau|
  int op_sign = 0;                        // sign of (-Delta)^alpha V_tau on the fit collar, 0 if mixed
  // sign of the residual of V_tau as d -> 0: the operator against the reaction
  // d^(tau p), using the measured rate and sign; 0 when undecided
  int asymptotic_sign = 0;
  bool super_ok = false, sub_ok = false;  // gated family search, either sign of mu
  double super_t = 0.0, super_mu = 0.0, sub_t = 0.0, sub_mu = 0.0;
  // zone rows: the prescribed role verifies; other rows: true
  bool consistent = true;
};

struct SweepResult {
  KernelConstants kc;
  std::vector<SweepRow> rows;  // sorted by (p, tau)
  std::vector<int> zones_verified;  // zones with at least one row, all consistent
  bool all_consistent = true;
  // every zone row: asymptotic_sign equals the zone's prescribed sign
  bool asymptotic_consistent = true;
  // smallest p with an asymptotic super-solution below tau0
  std::optional<double> p_interaction_measured;
  // after that, smallest p with no asymptotic sub-solution below tau0
  std::optional<double> p_star_measured;
  // where the zone labels change: first p carrying zone 2 or 3, first p after
  // it without zone 3
  std::optional<double> p_interaction_zones, p_star_zones;
};

SweepResult zone_sweep(const SweepOptions& opts);

}  // namespace fraclap
