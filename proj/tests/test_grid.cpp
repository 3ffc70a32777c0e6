#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "fraclap/errors.hpp"
#include "fraclap/grid.hpp"

using namespace fraclap;

namespace {

void check_structure(const Grid1D& g) {
  for (int i = 0; i < g.size(); ++i) {
    CAPTURE(i);
    CHECK(g.d(i) > 0.0);
    CHECK(g.d(i) <= 0.5);
    CHECK(g.x(i) > 0.0);
    CHECK((g.x(i) < 1.0 || g.d(i) < 1e-16));
    // x near 1 is rounded, d is not
    CHECK(std::abs(g.d(i) - std::min(g.x(i), 1.0 - g.x(i))) <= 1.2e-16);
    CHECK(g.d(i) == g.d(g.mirror(i)));
    if (i + 1 < g.size()) CHECK(g.offset(i, i + 1) > 0.0);
  }
  CHECK(g.min_spacing() > 0.0);
}

}  // namespace

TEST_CASE("graded grid is symmetric and strictly increasing") {
  for (int n : {7, 8, 101, 500}) {
    for (double ge : {1.0, 2.0, 3.0}) {
      CAPTURE(n);
      CAPTURE(ge);
      const auto g = Grid1D::graded(n, ge);
      REQUIRE(g->size() == n);
      CHECK(g->grading_exponent() == ge);
      check_structure(*g);
      if (n % 2 == 1) CHECK(g->x(n / 2) == 0.5);
    }
  }
}

TEST_CASE("graded nodes follow the power law near the endpoints") {
  const int n = 400;
  const auto g = Grid1D::graded(n, 3.0);
  const double m = n / 2;
  for (int k = 1; k <= 5; ++k) CHECK(g->d(k - 1) == doctest::Approx(0.5 * std::pow(k / (m + 0.5), 3.0)).epsilon(1e-14));
  // spacing grows like d^(2/3) near the boundary
  const double r1 = g->cell(0) / g->d(0), r2 = g->cell(20) / g->d(20);
  CHECK(r1 > r2);
}

TEST_CASE("offsets keep relative precision near x = 1") {
  const auto g = Grid1D::layered(1500, 3.0, 1e-40, 1.2);
  const int n = g->size();
  const double gap = g->offset(n - 2, n - 1);
  CHECK(gap > 0.0);
  CHECK(gap == doctest::Approx(g->d(n - 2) - g->d(n - 1)).epsilon(1e-12));
  CHECK(g->offset(n - 1, n) == doctest::Approx(g->d(n - 1)).epsilon(1e-14));
  CHECK(g->offset(-1, 0) == doctest::Approx(g->x(0)).epsilon(1e-14));
  CHECK(g->offset(3, 1) == doctest::Approx(-g->offset(1, 3)).epsilon(1e-14));
}

TEST_CASE("layered grid reaches d_min with a geometric layer") {
  for (int n : {2000, 2001, 3000}) {
    CAPTURE(n);
    const auto g = Grid1D::layered(n, 3.0, 1e-60, 1.2);
    REQUIRE(g->size() == n);
    check_structure(*g);
    CHECK(g->d(0) <= 1e-60 * 1.2);
    CHECK(g->d(0) >= 1e-60 / 1.2);
    // first cells: constant ratio
    for (int i = 0; i < 20; ++i) CHECK(g->d(i + 1) / g->d(i) == doctest::Approx(1.2).epsilon(1e-10));
    // ratios never jump above the layer ratio by much across the junction
    double worst = 0.0;
    for (int i = 0; i + 1 < n / 2; ++i) worst = std::max(worst, g->d(i + 1) / g->d(i));
    CHECK(worst < 2.5);
  }
}

TEST_CASE("layered grid falls back to graded when the layer is not needed") {
  const auto a = Grid1D::layered(20000, 3.0, 1e-8, 1.2);
  const auto b = Grid1D::graded(20000, 3.0);
  CHECK(a->same_as(*b));
}

TEST_CASE("grid construction errors") {
  CHECK_THROWS_AS(Grid1D::graded(0), DomainError);
  CHECK_THROWS_AS(Grid1D::graded(10, 0.5), DomainError);
  CHECK_THROWS_AS(Grid1D::layered(10, 3.0, 1e-60, 1.2), DomainError);
  CHECK_THROWS_AS(Grid1D::layered(2000, 3.0, 1e-60, 1.0), DomainError);
  CHECK_THROWS_AS(Grid1D::layered(2000, 3.0, -1.0, 1.2), DomainError);
}

TEST_CASE("grid functions stay finite and write CSV") {
  const auto g = Grid1D::graded(5, 2.0);
  auto u = GridFunction::sample(g, [](double x, double d) { return x + d; });
  CHECK_NOTHROW(u.check_finite());
  std::ostringstream os;
  write_csv(os, u);
  const std::string s = os.str();
  CHECK(s.rfind("x,d,value\n", 0) == 0);
  int lines = 0;
  for (char c : s) lines += c == '\n';
  CHECK(lines == 6);
  u.values[2] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(u.check_finite(), DomainError);
  CHECK_THROWS(GridFunction(g, Eigen::VectorXd::Zero(4)));
}
