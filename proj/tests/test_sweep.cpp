#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fraclap/critical_exponents.hpp"
#include "fraclap/errors.hpp"
#include "fraclap/sweep.hpp"

using namespace fraclap;

TEST_CASE("parse_range") {
  const auto r = parse_range("1.1:3:0.1");
  REQUIRE(r.size() == 20);
  CHECK(r.front() == 1.1);
  CHECK(r.back() == 3.0);
  CHECK(r[9] == 2.0);
  CHECK(parse_range("-0.9:-0.1:0.2").size() == 5);
  CHECK(parse_range("0.5") == std::vector<double>{0.5});
  CHECK(parse_range("1:1:0.5") == std::vector<double>{1.0});
  CHECK_THROWS_AS(parse_range("1:2"), ConfigError);
  CHECK_THROWS_AS(parse_range("1:2:0"), ConfigError);
  CHECK_THROWS_AS(parse_range("2:1:0.1"), ConfigError);
  CHECK_THROWS_AS(parse_range("a:b:c"), ConfigError);
  CHECK_THROWS_AS(parse_range("1x"), ConfigError);
  CHECK_THROWS_AS(parse_range("0:1:1e-9"), ConfigError);
}

TEST_CASE("small zone sweep at alpha = 1/2") {
  SweepOptions o;
  o.alpha = 0.5;
  o.p_grid = {1.5, 2.5, 2.8, 4.0};
  o.tau_grid = {-0.8, -0.6, -0.3};
  const auto s = zone_sweep(o);
  REQUIRE(s.rows.size() == 12);
  for (std::size_t i = 1; i < s.rows.size(); ++i) {
    const auto &a = s.rows[i - 1], &b = s.rows[i];
    CHECK((a.p < b.p || (a.p == b.p && a.tau < b.tau)));
  }
  for (const auto& r : s.rows) {
    CAPTURE(r.p);
    CAPTURE(r.tau);
    CHECK(r.zone == family_zone(r.p, r.tau, s.kc));
    CHECK(r.predicted_rate == doctest::Approx(r.tau - 1.0));
    CHECK(std::abs(r.measured_rate - r.predicted_rate) < 0.05);
    CHECK(r.op_sign == (r.tau > s.kc.tau0 ? 1 : -1));
    CHECK(r.consistent);
    if (r.zone == 1 || r.zone == 2 || r.zone == 4) CHECK(r.asymptotic_sign == 1);
    if (r.zone == 3 || r.zone == 5) CHECK(r.asymptotic_sign == -1);
    if (r.blowup_exponent) CHECK(*r.blowup_exponent == doctest::Approx(-1.0 / (r.p - 1.0)));
  }
  CHECK(s.all_consistent);
  CHECK(s.asymptotic_consistent);
  // (1.5,*) lands in zone 5, (2.8,-0.6) in 2, (4,-0.3) in 1
  for (int z : {1, 2, 5}) CHECK(std::find(s.zones_verified.begin(), s.zones_verified.end(), z) != s.zones_verified.end());
}

TEST_CASE("sweep rejects bad input") {
  SweepOptions o;
  o.alpha = 0.5;
  o.p_grid = {};
  o.tau_grid = {-0.5};
  CHECK_THROWS_AS(zone_sweep(o), ConfigError);
  o.p_grid = {2.0};
  o.alpha = 1.2;
  CHECK_THROWS(zone_sweep(o));
}
