#include "fraclap/problem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fraclap/errors.hpp"

namespace fraclap {

double DistanceTable::operator()(double dist) const {
  if (d.empty()) return 0.0;
  if (dist <= d.front()) return value.front();
  if (dist >= d.back()) return value.back();
  const auto it = std::upper_bound(d.begin(), d.end(), dist);
  const std::size_t k = static_cast<std::size_t>(it - d.begin());
  const double w = (dist - d[k - 1]) / (d[k] - d[k - 1]);
  return (1.0 - w) * value[k - 1] + w * value[k];
}

void DistanceTable::validate(const std::string& what) const {
  if (d.empty() || d.size() != value.size()) throw DomainError(what + ": table needs matching, nonempty columns");
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (!std::isfinite(d[k]) || !std::isfinite(value[k])) throw DomainError(what + ": non-finite table entry");
    if (d[k] < 0.0) throw DomainError(what + ": negative distance in table");
    if (k > 0 && !(d[k] > d[k - 1])) throw DomainError(what + ": distances must increase strictly");
  }
}

SourceField SourceField::power(double kappa, double gamma) {
  SourceField f;
  f.kind = Kind::PowerCollar;
  f.kappa_f = kappa;
  f.gamma = gamma;
  return f;
}

SourceField SourceField::tabulated(DistanceTable t) {
  SourceField f;
  f.kind = Kind::Tabulated;
  f.table = std::move(t);
  return f;
}

double SourceField::operator()(double dist) const {
  switch (kind) {
    case Kind::Zero: return 0.0;
    case Kind::PowerCollar: return kappa_f * std::pow(dist, gamma);
    case Kind::Tabulated: return table(dist);
  }
  return 0.0;
}

bool SourceField::sign_nonneg() const {
  switch (kind) {
    case Kind::Zero: return true;
    case Kind::PowerCollar: return kappa_f >= 0.0;
    case Kind::Tabulated: return std::all_of(table.value.begin(), table.value.end(), [](double v) { return v >= 0.0; });
  }
  return false;
}

void SourceField::validate(double alpha) const {
  if (kind == Kind::PowerCollar) {
    // gamma = 0 is admitted as the constant source
    if (!(gamma > -1.0 - 2.0 * alpha && gamma <= 0.0)) {
      std::ostringstream os;
      os << "source gamma=" << gamma << " outside (-1-2 alpha, 0]";
      throw DomainError(os.str());
    }
    if (!std::isfinite(kappa_f)) throw DomainError("source kappa_f must be finite");
  } else if (kind == Kind::Tabulated) {
    table.validate("source");
  }
}

ExteriorData ExteriorData::power(double kappa, double beta, double eta) {
  ExteriorData g;
  g.kind = Kind::PowerCollar;
  g.kappa_g = kappa;
  g.beta = beta;
  g.eta = eta;
  return g;
}

ExteriorData ExteriorData::tabulated(DistanceTable t) {
  ExteriorData g;
  g.kind = Kind::Tabulated;
  g.table = std::move(t);
  return g;
}

double ExteriorData::operator()(double s) const {
  switch (kind) {
    case Kind::Zero: return 0.0;
    case Kind::PowerCollar: return kappa_g * std::pow(std::min(s, eta), beta);
    case Kind::Tabulated: return table(s);
  }
  return 0.0;
}

void ExteriorData::validate() const {
  if (kind == Kind::PowerCollar) {
    if (!(beta > -1.0 && beta <= 0.0)) throw DomainError("exterior beta outside (-1, 0]");
    if (!(kappa_g > 0.0) || !std::isfinite(kappa_g)) throw DomainError("exterior kappa_g must be positive");
    if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("exterior eta must be positive");
  } else if (kind == Kind::Tabulated) {
    table.validate("exterior");
  }
}

bool ExteriorData::operator==(const ExteriorData& o) const {
  return kind == o.kind && beta == o.beta && kappa_g == o.kappa_g && eta == o.eta && table.d == o.table.d &&
         table.value == o.table.value;
}

void ProblemParams::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("p must exceed 1");
  source.validate(alpha);
  exterior.validate();
}

std::optional<double> ProblemParams::effective_gamma() const {
  std::optional<double> g;
  if (source.kind == SourceField::Kind::PowerCollar && source.kappa_f != 0.0) g = source.gamma;
  if (exterior.kind == ExteriorData::Kind::PowerCollar) {
    const double ge = exterior.beta - 2.0 * alpha;
    g = g ? std::min(*g, ge) : ge;
  }
  return g;
}

std::string to_string(SourceField::Kind k) {
  switch (k) {
    case SourceField::Kind::Zero: return "zero";
    case SourceField::Kind::PowerCollar: return "power";
    case SourceField::Kind::Tabulated: return "tabulated";
  }
  return "?";
}

std::string to_string(ExteriorData::Kind k) {
  switch (k) {
    case ExteriorData::Kind::Zero: return "zero";
    case ExteriorData::Kind::PowerCollar: return "power";
    case ExteriorData::Kind::Tabulated: return "tabulated";
  }
  return "?";
}

}  // namespace fraclap
