#pragma once

#include <optional>
#include <string>
#include <vector>

namespace fraclap {

// Piecewise-linear table in the distance variable d; constant beyond the last entry.
struct DistanceTable {
  std::vector<double> d;
  std::vector<double> value;

  double operator()(double dist) const;
  void validate(const std::string& what) const;
};

struct SourceField {
  enum class Kind { Zero, PowerCollar, Tabulated };
  Kind kind = Kind::Zero;
  double gamma = 0.0;    // f = kappa_f d^gamma for PowerCollar
  double kappa_f = 0.0;
  DistanceTable table;   // f(x) = table(d(x)) for Tabulated

  static SourceField zero() { return {}; }
  static SourceField power(double kappa, double gamma);
  static SourceField tabulated(DistanceTable t);

  double operator()(double dist) const;
  bool sign_nonneg() const;
  void validate(double alpha) const;
};

struct ExteriorData {
  enum class Kind { Zero, PowerCollar, Tabulated };
  Kind kind = Kind::Zero;
  double beta = 0.0;     // g = kappa_g dist^beta for dist <= eta, frozen beyond
  double kappa_g = 0.0;
  double eta = 0.0;
  DistanceTable table;   // g as a function of the distance to Omega

  static ExteriorData zero() { return {}; }
  static ExteriorData power(double kappa, double beta, double eta);
  static ExteriorData tabulated(DistanceTable t);

  // Value at distance s > 0 from Omega.
  double operator()(double s) const;
  bool is_zero() const { return kind == Kind::Zero; }
  void validate() const;
  bool operator==(const ExteriorData& o) const;
};

struct ProblemParams {
  double alpha = 0.5;
  double p = 2.0;
  SourceField source;
  ExteriorData exterior;

  void validate() const;
  // Singular exponent of F = f + G near the boundary, if F is power-like.
  std::optional<double> effective_gamma() const;
};

std::string to_string(SourceField::Kind k);
std::string to_string(ExteriorData::Kind k);

}  // namespace fraclap
