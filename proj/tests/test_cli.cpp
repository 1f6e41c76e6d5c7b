#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"
#include "doctest.h"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "manev");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = manev::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "manev_test_cli";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  fs::remove(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("classify reports the topology with the schema envelope") {
  const auto r = run({"classify", "--C", "40"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["class"] == "SpherePlusTwoLines");
  CHECK(j["schema_version"] == 1);
  CHECK(j["command"] == "classify");
  CHECK(j["params"]["M"] == 10.0);
  CHECK(j["thresholds"][0].get<double>() == doctest::Approx(31.6227766017));
}

TEST_CASE("equilibria lists six interior points and the boundary marker") {
  const auto r = run({"equilibria", "--C", "0", "--h", "-1"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  const auto& list = j["equilibria"];
  REQUIRE(list.size() == 7);
  CHECK(list.back()["kind"] == "BoundaryLine");
  CHECK(!j.contains("special_point"));
  int p_points = 0;
  for (const auto& e : list) {
    if (e["kind"] == "P_plus") {
      ++p_points;
      CHECK(e["manifold_dims"]["unstable"] == 1);
      CHECK(e["location"]["v"].get<double>() == doctest::Approx(58.3095189485));
    }
  }
  CHECK(p_points == 1);

  const auto at_threshold = json::parse(run({"equilibria", "--C", "58.309518948453004"}).out);
  CHECK(at_threshold["topology"] == "PointPlusTwoLines");
  CHECK(at_threshold.contains("special_point"));
}

TEST_CASE("exit codes separate usage and domain errors") {
  const auto none = run({});
  CHECK(none.code == 2);
  CHECK(!none.err.empty());
  CHECK(run({"classify", "--C", "abc"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"section"}).code == 2);

  const auto bad = run({"classify", "--gamma", "0.01"});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("16*gamma > gamma0 required") != std::string::npos);
  CHECK(bad.out.empty());
  CHECK(run({"homographic", "--C", "300"}).code == 1);
  CHECK(run({"--rel-tol", "-1", "classify"}).code == 1);
}

TEST_CASE("--out writes the same text that would go to stdout") {
  const fs::path f = scratch("classify.json");
  const auto r = run({"classify", "--C", "10", "--out", f.string()});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  CHECK(slurp(f) == run({"classify", "--C", "10"}).out);
}

TEST_CASE("config file and environment with flag precedence") {
  const fs::path cfg = scratch("cfg.json");
  std::ofstream(cfg) << R"({"params": {"M": 20, "gamma": 5}})";
  auto j = json::parse(run({"--config", cfg.string(), "classify"}).out);
  CHECK(j["params"]["M"] == 20.0);
  CHECK(j["params"]["gamma"] == 5.0);

  j = json::parse(run({"--config", cfg.string(), "--M", "30", "classify"}).out);
  CHECK(j["params"]["M"] == 30.0);
  CHECK(j["params"]["gamma"] == 5.0);

  ::setenv("MANEV_CONFIG", cfg.string().c_str(), 1);
  j = json::parse(run({"classify"}).out);
  ::unsetenv("MANEV_CONFIG");
  CHECK(j["params"]["M"] == 20.0);

  const fs::path broken = scratch("broken.json");
  std::ofstream(broken) << "{";
  CHECK(run({"--config", broken.string(), "classify"}).code == 1);
}

TEST_CASE("integrate prints CSV rows and a JSON footer") {
  const auto r = run({"integrate", "--field", "manifold", "--start", "0,0,0.3,1", "--C", "40", "--solve-w",
                      "--sigma-max", "1"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line, last;
  std::getline(in, line);
  CHECK(line == "sigma,t_phys,r,v,theta,w,residual");
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) == 0) {
      last = line;
    } else {
      ++rows;
    }
  }
  CHECK(rows > 2);
  const auto footer = json::parse(last.substr(2));
  CHECK(footer["schema_version"] == 1);
  CHECK(footer["field"] == "manifold");
  CHECK(footer["max_residual"].get<double>() < 1e-8);
  CHECK(footer["accepted_steps"].get<long>() > 0);

  CHECK(run({"integrate", "--field", "warp", "--start", "1,0,0,0"}).code == 2);
  CHECK(run({"integrate", "--start", "1,0,0"}).code == 2);
}

TEST_CASE("section and potentials emit CSV") {
  auto r = run({"section", "--v0", "0", "-n", "10"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("theta,w\n", 0) == 0);
  // Every angle is admissible at v0 = 0 with C = 0, each giving a +w and a -w point.
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 21);

  r = run({"potentials", "--theta-grid", "5"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("theta,V,W,U,dV,dW,dU\n", 0) == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 6);

  const auto crit = json::parse(run({"potentials", "--critical"}).out);
  CHECK(crit["u_max"].get<double>() > crit["u_min"].get<double>());
}

TEST_CASE("transform round trip through the CLI") {
  const auto j = json::parse(run({"transform", "--cyl", "1,0.5,0.2,-0.3", "--C", "2"}).out);
  const auto& m = j["mcgehee"];
  CHECK(std::abs(j["energy_residual"].get<double>()) < 1e-9);
  const std::string back = std::to_string(m["r"].get<double>()) + "," + std::to_string(m["v"].get<double>()) + "," +
                           std::to_string(m["theta"].get<double>()) + "," + std::to_string(m["w"].get<double>());
  const auto k = json::parse(run({"transform", "--mcgehee", back, "--C", "2"}).out);
  CHECK(k["cylindrical"]["R"].get<double>() == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(run({"transform"}).code == 2);
}

TEST_CASE("homographic writes a report and an orbit file") {
  const fs::path orbit = scratch("orbit.csv");
  const auto r = run({"homographic", "--C", "100", "--orbit", orbit.string()});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["classification"] == "Periodic");
  CHECK(j["integration_consistent"] == true);
  CHECK(slurp(orbit).rfind("sigma,t_phys,r,v,theta,w,residual\n", 0) == 0);
}

TEST_CASE("sweep subcommand runs a plan") {
  const fs::path plan = scratch("plan.json");
  const fs::path out = scratch("sweep.csv");
  std::ofstream(plan) << R"({"axes": [{"name": "C", "min": 0, "max": 70, "count": 8}]})";
  const auto r = run({"sweep", "--config", plan.string(), "--out", out.string(), "--workers", "2"});
  CHECK(r.code == 0);
  CHECK(r.err.find("8 points") != std::string::npos);
  CHECK(slurp(out).rfind("# manev-sweep csv v1\n", 0) == 0);
  CHECK(run({"sweep", "--config", plan.string()}).code == 2);
}
