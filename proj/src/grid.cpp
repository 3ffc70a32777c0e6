#include "fraclap/grid.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "fraclap/errors.hpp"

namespace fraclap {

std::shared_ptr<const Grid1D> Grid1D::graded(int n_interior, double grading_exponent) {
  if (n_interior < 2) throw DomainError("graded grid needs at least 2 nodes");
  if (!(grading_exponent >= 1.0)) throw DomainError("grading exponent must be >= 1");
  const int m = n_interior / 2;
  const bool odd = n_interior % 2 == 1;
  // the denominator keeps the spacing across the centre equal to its neighbours
  const double denom = odd ? m + 1.0 : m + 0.5;
  std::vector<double> left(m);
  for (int k = 1; k <= m; ++k) left[k - 1] = 0.5 * std::pow(k / denom, grading_exponent);
  return from_left_half(left, odd, grading_exponent);
}

std::shared_ptr<const Grid1D> Grid1D::layered(int n_interior, double grading_exponent, double d_min,
                                              double ratio) {
  if (!(grading_exponent >= 1.0)) throw DomainError("grading exponent must be >= 1");
  if (!(ratio > 1.0)) throw DomainError("layer ratio must be > 1");
  if (!(d_min > 0.0 && d_min < 1e-3)) throw DomainError("layer depth d_min must lie in (0, 1e-3)");
  const int m = n_interior / 2;
  const bool odd = n_interior % 2 == 1;
  const int k0 = std::max(1, static_cast<int>(std::ceil(grading_exponent / std::log(ratio))));
  // the graded part loses as many nodes as the layer gains; iterate to a fixed point
  int mg = 0;
  for (int it = 0; it < 100; ++it) {
    const int ma = m - mg;
    if (ma < k0 + 2) throw DomainError("layered grid: too few nodes for the requested layer");
    const double denom = odd ? ma + 1.0 : ma + 0.5;
    const double xj = 0.5 * std::pow(k0 / denom, grading_exponent);
    if (!(xj > d_min)) return graded(n_interior, grading_exponent);
    const int ng = static_cast<int>(std::ceil(std::log(xj / d_min) / std::log(ratio)));
    const int next = ng - (k0 - 1);
    if (next == mg) {
      std::vector<double> left;
      for (int j = ng; j >= 1; --j) left.push_back(xj * std::pow(ratio, -j));
      for (int k = k0; k <= ma; ++k) left.push_back(0.5 * std::pow(k / denom, grading_exponent));
      return from_left_half(left, odd, grading_exponent);
    }
    mg = next;
  }
  throw DomainError("layered grid: node count did not settle");
}

std::shared_ptr<const Grid1D> Grid1D::from_left_half(const std::vector<double>& left, bool with_center,
                                                     double grading_exponent) {
  std::shared_ptr<Grid1D> g(new Grid1D());
  g->grading_ = grading_exponent;
  const int m = static_cast<int>(left.size());
  for (int k = 0; k < m; ++k) {
    if (!(left[k] > 0.0 && left[k] < 0.5) || (k > 0 && !(left[k] > left[k - 1]))) {
      throw DomainError("grid: left-half distances must increase strictly inside (0, 1/2)");
    }
  }
  for (int k = 0; k < m; ++k) {
    g->d_.push_back(left[k]);
    g->right_.push_back(false);
  }
  if (with_center) {
    g->d_.push_back(0.5);
    g->right_.push_back(false);
  }
  for (int k = m - 1; k >= 0; --k) {
    g->d_.push_back(left[k]);
    g->right_.push_back(true);
  }
  g->finish();
  return g;
}

void Grid1D::finish() {
  x_.resize(d_.size());
  for (std::size_t i = 0; i < d_.size(); ++i) x_[i] = right_[i] ? 1.0 - d_[i] : d_[i];
  // near x=1 distances below machine epsilon collapse in x; d keeps them apart
  for (std::size_t i = 1; i < x_.size(); ++i) {
    if (!(x_[i] >= x_[i - 1])) throw DomainError("grid: nodes must increase");
  }
}

double Grid1D::offset(int i, int j) const {
  const int n = size();
  if (j == -1) return right_[i] ? -(1.0 - d_[i]) : -d_[i];
  if (j == n) return right_[i] ? d_[i] : 1.0 - d_[i];
  if (right_[i] == right_[j]) return right_[i] ? d_[i] - d_[j] : d_[j] - d_[i];
  const double gap = 1.0 - d_[i] - d_[j];
  return right_[j] ? gap : -gap;
}

double Grid1D::cell(int j) const {
  const int n = size();
  if (j == -1) return d_[0];
  if (j == n - 1) return d_[n - 1];
  return offset(j, j + 1);
}

double Grid1D::min_spacing() const {
  double h = cell(-1);
  for (int j = 0; j < size(); ++j) h = std::min(h, cell(j));
  return h;
}

GridFunction::GridFunction(GridPtr g, Eigen::VectorXd v, ExteriorData ext)
    : grid(std::move(g)), values(std::move(v)), exterior(std::move(ext)) {
  if (!grid || values.size() != grid->size()) throw GridMismatch("grid function size does not match its grid");
}

GridFunction GridFunction::constant(GridPtr g, double c, ExteriorData ext) {
  const int n = g->size();
  return GridFunction(std::move(g), Eigen::VectorXd::Constant(n, c), std::move(ext));
}

void GridFunction::check_finite() const {
  for (int i = 0; i < size(); ++i) {
    if (!std::isfinite(values[i])) {
      std::ostringstream os;
      os << "grid function has a non-finite value at node " << i;
      throw DomainError(os.str());
    }
  }
}

void write_csv(std::ostream& os, const GridFunction& u) {
  os << "x,d,value\n";
  os << std::setprecision(17);
  for (int i = 0; i < u.size(); ++i) os << u.grid->x(i) << ',' << u.grid->d(i) << ',' << u.values[i] << '\n';
}

}  // namespace fraclap
