#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fraclap_cli_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  return p;
}

int run(const std::string& args) {
  const std::string cmd = std::string(FRACLAP_CLI) + " " + args + " >/dev/null 2>&1";
  const int s = std::system(cmd.c_str());
  return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
}

Json manifest(const fs::path& dir) {
  std::ifstream is(dir / "manifest.json");
  REQUIRE(is.good());
  return Json::parse(is);
}

std::string first_line(const fs::path& f) {
  std::ifstream is(f);
  std::string s;
  std::getline(is, s);
  return s;
}

}  // namespace

TEST_CASE("tau0 run writes a manifest") {
  const auto dir = scratch("tau0");
  REQUIRE(run("tau0 --alpha 0.5 --out " + dir.string()) == 0);
  const auto m = manifest(dir);
  CHECK(m["command"] == "tau0");
  CHECK(m["passed"] == true);
  CHECK(m["results"]["constants"]["tau0"].get<double>() == doctest::Approx(-0.5).epsilon(1e-10));
  CHECK(m["results"]["constants"]["p_star"].get<double>() == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(m["config"]["alpha"] == "0.5");
  CHECK(m.contains("timestamp"));
  CHECK(m.contains("version"));
}

TEST_CASE("exit codes") {
  CHECK(run("tau0 --alpha 1.5 --out " + scratch("e1").string()) == 2);
  CHECK(run("tau0 --no-such-flag --out " + scratch("e2").string()) == 2);
  CHECK(run("") == 2);
  // sources and exterior data too singular for a finite linear super-solution
  CHECK(run("solve --alpha 0.5 --p 2 --gamma -1.6 --out " + scratch("e2b").string()) == 2);
  CHECK(run("solve --alpha 0.5 --p 2 --beta -0.6 --out " + scratch("e2c").string()) == 2);
  CHECK(run("solve --alpha 0.5 --p 2 --gamma -0.5 --max-iters 1 --out " + scratch("e3").string()) == 3);
  const auto d4 = scratch("e4");
  CHECK(run("sweep --alpha 0.5 --p-grid 3.5:4:0.5 --tau-grid=-0.8:-0.2:0.3 --out " + d4.string()) == 4);
  const auto m = manifest(d4);
  CHECK(m["passed"] == false);
  CHECK(m["checks"]["lower_transition"] == false);
  // a failed run still records the error in its manifest
  const auto d3 = scratch("e3b");
  CHECK(run("solve --alpha 0.5 --p 2 --gamma -0.5 --max-iters 1 --out " + d3.string()) == 3);
  CHECK(manifest(d3)["error"]["exit_code"] == 3);
}

TEST_CASE("config file") {
  const auto dir = scratch("cfg");
  fs::create_directories(dir);
  const auto file = dir / "run.cfg";
  {
    std::ofstream os(file);
    os << "# tau0 at a quarter\ncommand = tau0\nalpha = 0.25\n\nmethod = bisection  # slower\n";
  }
  REQUIRE(run("--config " + file.string() + " --out " + (dir / "a").string()) == 0);
  auto m = manifest(dir / "a");
  CHECK(m["config"]["alpha"] == "0.25");
  CHECK(m["config"]["method"] == "bisection");
  // flags after the file win
  REQUIRE(run("--config " + file.string() + " --alpha 0.75 --out " + (dir / "b").string()) == 0);
  m = manifest(dir / "b");
  CHECK(m["config"]["alpha"] == "0.75");
  CHECK(run("--config " + (dir / "missing.cfg").string()) == 2);
  {
    std::ofstream os(dir / "bad.cfg");
    os << "alpha = 0.5\n";
  }
  CHECK(run("--config " + (dir / "bad.cfg").string()) == 2);
  {
    std::ofstream os(dir / "bad2.cfg");
    os << "command = tau0\nalpha\n";
  }
  CHECK(run("--config " + (dir / "bad2.cfg").string()) == 2);
}

TEST_CASE("repeated runs agree apart from the timestamp") {
  const auto a = scratch("rep_a"), b = scratch("rep_b");
  const std::string args = "solve --alpha 0.5 --p 2 --gamma -0.5 --n 200 --threads 1 --out ";
  REQUIRE(run(args + a.string()) == 0);
  REQUIRE(run(args + b.string()) == 0);
  auto ma = manifest(a), mb = manifest(b);
  for (auto* m : {&ma, &mb}) {
    m->erase("timestamp");
    (*m)["config"].erase("out");
  }
  CHECK(ma.dump() == mb.dump());
  for (const char* f : {"solution.csv", "sub.csv", "super.csv"}) {
    std::ifstream fa(a / f), fb(b / f);
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    CHECK(sa.str() == sb.str());
  }
}

TEST_CASE("profile CSV layout") {
  const auto dir = scratch("csv");
  REQUIRE(run("solve --alpha 0.5 --p 2 --gamma -0.5 --n 200 --out " + dir.string()) == 0);
  for (const char* f : {"solution.csv", "sub.csv", "super.csv"}) {
    CAPTURE(f);
    CHECK(first_line(dir / f) == "x,d,value");
    std::ifstream is(dir / f);
    std::string line;
    int rows = -1;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 200);
  }
  const auto m = manifest(dir);
  CHECK(m["checks"]["converged"] == true);
  CHECK(m["checks"]["sandwich"] == true);
  CHECK(m["artifacts"].size() == 3);
}

TEST_CASE("zone map CSV layout") {
  const auto dir = scratch("zones");
  run("sweep --alpha 0.5 --p-grid 2.5 --tau-grid=-0.8:-0.2:0.3 --out " + dir.string());
  CHECK(first_line(dir / "zone_map.csv").rfind("p,tau,zone,", 0) == 0);
}
