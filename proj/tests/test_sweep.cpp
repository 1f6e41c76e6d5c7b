#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "manev/error.hpp"
#include "manev/manifold.hpp"
#include "manev/report.hpp"
#include "manev/sweep.hpp"

using namespace manev;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

ErrorKind plan_error(const json& j) {
  try {
    parse_plan(j);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::IoFailure;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "manev_test_sweep";
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

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::string> data_lines(const std::string& text) {
  auto lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  return {lines.begin() + 3, lines.end()};
}

std::size_t column(const std::string& name) {
  const auto& cols = sweep_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (cols[i] == name) return i;
  }
  throw std::runtime_error("no column " + name);
}

json c_grid(int count, double hi) {
  return {{"axes", {{{"name", "C"}, {"min", 0.0}, {"max", hi}, {"count", count}}}},
          {"analyses", {"classify", "equilibria"}}};
}

}  // namespace

TEST_CASE("plan parsing rejects malformed plans") {
  CHECK(plan_error(json::array()) == ErrorKind::InvalidPlan);
  CHECK(plan_error({{"axes", json::array()}}) == ErrorKind::InvalidPlan);
  CHECK(plan_error({{"axes", {{{"name", "q"}, {"values", {1}}}}}}) == ErrorKind::InvalidPlan);
  CHECK(plan_error({{"axes", {{{"name", "C"}, {"min", 0}, {"max", 1}}}}}) == ErrorKind::InvalidPlan);
  CHECK(plan_error({{"axes", {{{"name", "C"}, {"min", 0}, {"max", 1}, {"count", 0}}}}}) == ErrorKind::InvalidPlan);
  CHECK(plan_error({{"axes", {{{"name", "C"}, {"values", {1}}}, {{"name", "C"}, {"values", {2}}}}}}) ==
        ErrorKind::InvalidPlan);
  CHECK(plan_error({{"axes", {{{"name", "C"}, {"values", {1}}}}}, {"bogus", 1}}) == ErrorKind::InvalidPlan);
  CHECK(plan_error({{"axes", {{{"name", "C"}, {"values", {1}}}}}, {"analyses", {"spin"}}}) == ErrorKind::InvalidPlan);
  CHECK(plan_error({{"axes", {{{"name", "C"}, {"values", {1}}}}}, {"params", {{"mass", 1}}}}) ==
        ErrorKind::InvalidPlan);
  CHECK(plan_error({{"axes", {{{"name", "C"}, {"values", {1}}}}}, {"settings", {{"rel_tol", -1}}}}) ==
        ErrorKind::InvalidPlan);
  CHECK_NOTHROW(parse_plan(c_grid(3, 1.0)));
}

TEST_CASE("grid points enumerate the last axis fastest") {
  json j;
  j["axes"] = {{{"name", "gamma"}, {"values", {1.0, 2.0}}}, {{"name", "C"}, {"min", 0.0}, {"max", 10.0}, {"count", 3}}};
  j["h"] = -2.0;
  const auto plan = parse_plan(j);
  REQUIRE(grid_size(plan) == 6);
  CHECK(grid_point(plan, 0).params.gamma == 1.0);
  CHECK(grid_point(plan, 0).C == 0.0);
  CHECK(grid_point(plan, 1).C == 5.0);
  CHECK(grid_point(plan, 2).C == 10.0);
  CHECK(grid_point(plan, 3).params.gamma == 2.0);
  CHECK(grid_point(plan, 3).C == 0.0);
  CHECK(grid_point(plan, 5).h == -2.0);
  CHECK(grid_point(plan, 5).params.M == plan.base.M);
}

TEST_CASE("C sweep brackets both topology transitions in order") {
  const auto plan = parse_plan(c_grid(141, 70.0));
  const fs::path out = scratch("c_grid.csv");
  const auto summary = run_sweep(plan, out, 4);
  CHECK(summary.total == 141);
  CHECK(summary.computed == 141);
  CHECK(summary.resumed == 0);

  const auto rows = data_lines(slurp(out));
  REQUIRE(rows.size() == 141);
  std::vector<std::pair<double, std::string>> seq;
  std::vector<std::pair<double, std::string>> e_flag;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto f = split(rows[i], ',');
    REQUIRE(f.size() == sweep_columns().size());
    CHECK(f[column("index")] == std::to_string(i));
    CHECK(f[column("status")] == "ok");
    seq.emplace_back(std::stod(f[column("C")]), f[column("topology")]);
    e_flag.emplace_back(std::stod(f[column("C")]), f[column("has_e_points")]);
  }
  // Class changes happen only at the two thresholds, and only forward.
  std::vector<std::pair<double, double>> changes;
  std::vector<std::string> order{seq.front().second};
  for (std::size_t i = 1; i < seq.size(); ++i) {
    if (seq[i].second != seq[i - 1].second) {
      changes.emplace_back(seq[i - 1].first, seq[i].first);
      order.push_back(seq[i].second);
    }
  }
  REQUIRE(changes.size() == 2);
  CHECK(changes[0].first < std::sqrt(1000.0));
  CHECK(std::sqrt(1000.0) < changes[0].second);
  CHECK(changes[1].first < std::sqrt(3400.0));
  CHECK(std::sqrt(3400.0) < changes[1].second);
  CHECK(order == std::vector<std::string>{"SphereMinusFourPoints", "SpherePlusTwoLines", "TwoLinesOnly"});

  // E points exist below the low threshold and nowhere above it.
  for (const auto& [C, flag] : e_flag) CHECK(flag == (C < std::sqrt(1000.0) ? "1" : "0"));
}

TEST_CASE("rerun and worker count leave the file byte-identical") {
  auto j = c_grid(25, 70.0);
  j["analyses"] = {"classify", "equilibria", "spectra", "homographic"};
  j["axes"].push_back({{"name", "h"}, {"values", {-1.0, 1.0}}});
  const auto plan = parse_plan(j);
  const fs::path a = scratch("w1.csv");
  const fs::path b = scratch("w8.csv");
  run_sweep(plan, a, 1);
  run_sweep(plan, b, 8);
  const std::string first = slurp(a);
  CHECK(first == slurp(b));

  const auto again = run_sweep(plan, a, 3);
  CHECK(again.computed == 0);
  CHECK(again.resumed == 50);
  CHECK(slurp(a) == first);
}

TEST_CASE("interrupted files resume to the same bytes") {
  const auto plan = parse_plan(c_grid(41, 70.0));
  const fs::path out = scratch("resume.csv");
  run_sweep(plan, out, 2);
  const std::string full = slurp(out);

  SUBCASE("torn last line") {
    std::ofstream(out, std::ios::binary | std::ios::trunc) << full.substr(0, full.size() * 2 / 3);
    const auto s = run_sweep(plan, out, 2);
    CHECK(s.resumed > 0);
    CHECK(s.computed > 0);
    CHECK(s.resumed + s.computed == 41);
  }
  SUBCASE("records missing from the middle") {
    auto lines = split(full, '\n');
    std::string kept;
    for (std::size_t i = 0; i + 1 < lines.size(); ++i) {
      if (i >= 3 && i % 4 == 0) continue;
      kept += lines[i] + '\n';
    }
    std::ofstream(out, std::ios::binary | std::ios::trunc) << kept;
    const auto s = run_sweep(plan, out, 3);
    CHECK(s.computed == 10);
  }
  CHECK(slurp(out) == full);
}

TEST_CASE("a file from another plan is refused") {
  const fs::path out = scratch("other.csv");
  run_sweep(parse_plan(c_grid(5, 10.0)), out, 1);
  try {
    run_sweep(parse_plan(c_grid(6, 10.0)), out, 1);
    FAIL("expected InvalidPlan");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidPlan);
  }
}

TEST_CASE("invalid parameter points are skipped without stopping the sweep") {
  const auto plan = parse_plan({{"axes", {{{"name", "gamma"}, {"values", {0.05, 2.0}}}}}, {"C", 10.0}});
  const auto bad = split(evaluate_point(plan, grid_point(plan, 0)), ',');
  CHECK(bad[column("status")] == "skipped");
  CHECK(bad[column("error")].find("RegimeViolation") != std::string::npos);
  CHECK(split(evaluate_point(plan, grid_point(plan, 1)), ',')[column("status")] == "ok");
}

TEST_CASE("single point record agrees with the direct analyses") {
  const auto plan = parse_plan({{"axes", {{{"name", "C"}, {"values", {0.0}}}}},
                                {"analyses", {"classify", "equilibria", "spectra", "homographic"}}});
  const auto f = split(evaluate_point(plan, grid_point(plan, 0)), ',');
  const auto p = canonical_params();
  CHECK(f[column("topology")] == "SphereMinusFourPoints");
  CHECK(f[column("n_interior_equilibria")] == "6");
  CHECK(f[column("e_theta0")] == report::format_number(e_point_theta(p, 0.0)));
  CHECK(f[column("e_v0")] == report::format_number(e_point_speed(p, 0.0)));
  CHECK(f[column("p_plus_dims")] == "1/0/2");
  CHECK(f[column("p_lambda1_matching_form")] == "jacobian");
  CHECK(f[column("e2_plus_dims")] == "2/1/0");
  CHECK(f[column("homographic_class")] == "EjectionCollision");
  CHECK(f[column("threshold_low")] == report::format_number(std::sqrt(1000.0)));
}
