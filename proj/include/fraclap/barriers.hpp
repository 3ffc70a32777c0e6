#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fraclap/barrier_spec.hpp"
#include "fraclap/critical_exponents.hpp"
#include "fraclap/fractional_operator.hpp"
#include "fraclap/problem.hpp"

namespace fraclap {

enum class Role { Super, Sub };
std::string to_string(Role r);

struct VerifyPoint {
  double d = 0.0;
  double value = 0.0;     // barrier value
  double residual = 0.0;  // (-Delta)^alpha b + |b|^(p-1) b - f - G
  double scale = 1.0;     // d^(tau p)
  double margin = 0.0;    // +-residual/scale, >= 0 is good
};

struct VerifyReport {
  Role role = Role::Super;
  bool passed = false;
  double worst_margin = 0.0;
  double worst_d = 0.0;
  double scale_tau = 0.0;
  std::optional<double> first_violation_d;
  std::vector<VerifyPoint> points;
};

// Geometric collar samples in [d_lo, d_hi].
std::vector<double> collar_points(double d_lo, double d_hi, int count);
// Collar samples plus uniform interior samples on (delta, 1/2].
std::vector<double> verification_points(double delta = 0.1, double d_lo = 1e-5, int collar = 64,
                                        int interior = 32);

// Caches term values and operator values at a fixed set of distances so that
// coefficient searches only redo arithmetic.
class BarrierSampler {
 public:
  struct Samples {
    std::vector<double> value, op;
  };

  BarrierSampler(ProblemParams params, std::vector<double> d, QuadratureConfig cfg = {});

  const ProblemParams& params() const { return params_; }
  void set_power(double p) { params_.p = p; }
  const std::vector<double>& points() const { return d_; }
  // f + G at the points
  const std::vector<double>& load() const { return load_; }

  const Samples& power(double tau, double delta);
  const Samples& indicator();
  Samples term(const BarrierTerm& t, const BarrierSpec& owner);

  // Judges sum_k c_k * s_k. Points with d > d_max are skipped.
  VerifyReport judge(const std::vector<const Samples*>& s, const std::vector<double>& c, Role role,
                     double scale_tau, double tol_rel, double d_max = 1.0) const;
  VerifyReport verify(const BarrierSpec& b, Role role, double tol_rel);

 private:
  ProblemParams params_;
  std::vector<double> d_;
  std::vector<double> load_;
  QuadratureConfig cfg_;
  std::map<std::pair<double, double>, Samples> power_;
  std::optional<Samples> indicator_;
};

struct VerifyOptions {
  double tol_rel = 1e-10;
  QuadratureConfig quad;
};

VerifyReport verify_barrier(const BarrierSpec& b, const ProblemParams& params, Role role,
                            const std::vector<double>& collar_nodes, const VerifyOptions& opts = {});

struct SearchOptions {
  int mu_k_min = -20, mu_k_max = 20;
  int lambda_k_min = -20, lambda_k_max = 40;
  double delta = 0.1;
  std::vector<double> points;  // empty: verification_points(delta)
  double deep_ratio = 100.0;  // mu V_tau alone must verify on [d_lo, deep_ratio d_lo]
  // doubled lambda, kept when it still verifies
  bool safety = true;
  VerifyOptions verify;
};

struct BarrierPair {
  BarrierSpec super, sub;
  VerifyReport super_report, sub_report;
  double tau = 0.0;
  double tau_aux = 0.0;  // special pair: tau_1
  double mu_super = 0.0, mu_sub = 0.0;
  double lambda_super = 0.0, lambda_sub = 0.0;
  bool ordered = false;  // U >= W at every checked point
};

// U = mu_bar V_tau + lambda chi, W = mu V_tau - lambda' chi, tau from the regime.
BarrierPair make_existence_pair(const ProblemParams& params, const KernelConstants& kc, const RegimeReport& regime,
                                const SearchOptions& opts = {});

struct SpecialOptions {
  int mu_k_min = -20, mu_k_max = 20;
  double delta = 0.1;
  double collar_lo = 1e-5, collar_hi = 1e-2;
  int collar_count = 64;
  VerifyOptions verify;
};

// t V_tau0 - mu V_tau1 with tau1 = min(tau0 p + 2 alpha, 0); V_0 is the indicator.
BarrierPair make_special_pair(const ProblemParams& params, const KernelConstants& kc, double t,
                              const SpecialOptions& opts = {});

struct FamilyOptions {
  int t_k_min = -6, t_k_max = 6;
  int mu_k_min = -20, mu_k_max = 20;
  double delta = 0.1;
  double deep_lo = 1e-5;
  double deep_ratio = 100.0;  // sign gate at mu = 0 on [deep_lo, deep_ratio * deep_lo]
  VerifyOptions verify;
};

struct FamilyMember {
  int zone = 0;
  Role role = Role::Super;
  BarrierSpec barrier;
  double t = 1.0, mu = 0.0;
  bool verified = false;
  bool opposite_verified = false;  // diagnostic: the other role also passes at finite resolution
  VerifyReport report;
};

// Searches U = t V_tau + mu chi with the sign of mu given by role, t fixed.
std::optional<FamilyMember> search_family(BarrierSampler& s, double tau, Role role, const std::vector<double>& ts,
                                          const FamilyOptions& opts);

// Zone and role follow from (p, tau); t is fixed by the caller.
FamilyMember make_nonexistence_family(const ProblemParams& params, const KernelConstants& kc, double t, double tau,
                                      const FamilyOptions& opts = {});
// Same with t scanned over 2^k.
FamilyMember scan_nonexistence_family(BarrierSampler& s, const KernelConstants& kc, double tau,
                                      const FamilyOptions& opts = {});

// Torsion function: discrete solution of (-Delta)^alpha v = -1 with zero exterior.
GridFunction torsion(const OperatorMatrix& op);
GridFunction torsion(GridPtr grid, double alpha);

struct BumpNormalization {
  double c = 1.0;        // (-Delta)^alpha (c-bump) <= 1 with equality at argmax
  double sup_unit = 0.0; // sup of (-Delta)^alpha of the c=1 bump
  double argmax = 0.5;
};
BumpNormalization bump_normalization(double alpha, const QuadratureConfig& cfg = {});

}  // namespace fraclap
