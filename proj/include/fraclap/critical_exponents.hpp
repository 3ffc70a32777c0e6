#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fraclap/problem.hpp"
#include "fraclap/quadrature.hpp"

namespace fraclap {

struct KernelConstants {
  double alpha = 0.0;
  double tau0 = 0.0;
  double p_star = 0.0;
  double residual = 0.0;  // |C(tau0)|
  int iterations = 0;
  std::vector<std::pair<double, double>> c_of_tau_cache;
  std::vector<std::pair<double, double>> c_tilde_cache;
  QuadratureConfig quad;

  // Evaluates Ctilde and records it in the cache.
  double c_tilde(double beta);
};

enum class RootMethod { Hybrid, Bisection };

KernelConstants find_tau0(double alpha, double tol = 1e-10, const QuadratureConfig& cfg = {},
                          RootMethod method = RootMethod::Hybrid);

enum class Zone {
  ExistenceInteraction,
  SpecialTau0,
  NonexistenceI,
  NonexistenceII,
  NonexistenceIII,
  WeakSource,
  StrongSource,
  Unclassified
};

std::string to_string(Zone z);

struct RegimeReport {
  Zone zone = Zone::Unclassified;
  std::optional<double> predicted_exponent;
  std::string notes;
};

inline constexpr double kTieTolerance = 1e-9;

// gamma defaults to the singular exponent of f + G when absent.
RegimeReport classify_regime(const ProblemParams& params, std::optional<double> gamma,
                             std::optional<double> tau, const KernelConstants& kc,
                             double tie_tol = kTieTolerance);

std::optional<std::pair<double, double>> special_window(const ProblemParams& params,
                                                        const KernelConstants& kc);

// Zones 1-5 of the nonexistence family U = t V_tau + mu V_0 in the (p, tau) plane.
// Returns 0 when (p, tau) lies on none of them. The lowest zone number wins on overlaps.
int family_zone(double p, double tau, const KernelConstants& kc, double tie_tol = kTieTolerance);

// +1 when the family member of that zone is a super-solution (mu > 0), -1 for a sub-solution.
int family_zone_sign(int zone);

}  // namespace fraclap
