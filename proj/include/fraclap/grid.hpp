#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <memory>
#include <vector>

#include "fraclap/problem.hpp"

namespace fraclap {

// Symmetric mesh on (0,1) clustered at both endpoints. Positions are kept as
// (distance to the nearer endpoint, side) so that spacings near x=1 keep full
// relative precision.
class Grid1D {
 public:
  // x_k = 0.5 (k/(m+1/2))^g on the left half (even n) and its mirror image.
  static std::shared_ptr<const Grid1D> graded(int n_interior, double grading_exponent = 3.0);
  // Graded grid whose first cells are replaced by a geometric layer (ratio r)
  // reaching down to d_min. The junction sits where the graded spacing ratio
  // falls to about r. Total node count stays n_interior.
  static std::shared_ptr<const Grid1D> layered(int n_interior, double grading_exponent = 3.0, double d_min = 1e-60,
                                               double ratio = 1.2);
  // Arbitrary symmetric node set, given by the left-half distances (and 0.5 when n is odd).
  static std::shared_ptr<const Grid1D> from_left_half(const std::vector<double>& left, bool with_center,
                                                      double grading_exponent = 1.0);

  int size() const { return static_cast<int>(x_.size()); }
  double grading_exponent() const { return grading_; }
  const std::vector<double>& nodes() const { return x_; }
  const std::vector<double>& distances() const { return d_; }
  double x(int i) const { return x_[i]; }
  double d(int i) const { return d_[i]; }
  bool on_right(int i) const { return right_[i]; }
  int mirror(int i) const { return size() - 1 - i; }
  double min_spacing() const;

  // x_j - x_i without cancellation; j = -1 and j = size() stand for the endpoints 0 and 1.
  double offset(int i, int j) const;
  // Length of the cell [x_j, x_{j+1}] with the same endpoint convention.
  double cell(int j) const;

  bool same_as(const Grid1D& o) const { return this == &o || (x_ == o.x_ && d_ == o.d_); }

 private:
  Grid1D() = default;
  void finish();

  std::vector<double> x_, d_;
  std::vector<bool> right_;
  double grading_ = 1.0;
};

using GridPtr = std::shared_ptr<const Grid1D>;

struct GridFunction {
  GridPtr grid;
  Eigen::VectorXd values;
  ExteriorData exterior;

  GridFunction() = default;
  GridFunction(GridPtr g, Eigen::VectorXd v, ExteriorData ext = {});
  static GridFunction constant(GridPtr g, double c, ExteriorData ext = {});
  template <class F>
  static GridFunction sample(GridPtr g, F&& f, ExteriorData ext = {}) {
    Eigen::VectorXd v(g->size());
    for (int i = 0; i < g->size(); ++i) v[i] = f(g->x(i), g->d(i));
    return GridFunction(g, std::move(v), std::move(ext));
  }

  int size() const { return static_cast<int>(values.size()); }
  void check_finite() const;
};

// CSV with header x,d,value.
void write_csv(std::ostream& os, const GridFunction& u);

}  // namespace fraclap
