#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "manev/params.hpp"

namespace manev {

enum class SweepAxisName { C, h, G, M, m, gamma0, gamma };

struct SweepAxis {
  SweepAxisName name = SweepAxisName::C;
  std::vector<double> values;
};

struct SweepAnalyses {
  bool classify = true;
  bool equilibria = false;
  bool spectra = false;
  bool homographic = false;
};

/// Cartesian grid over the axes; the last axis varies fastest. Axes not listed
/// take their value from `base`, `C` and `h`.
struct SweepPlan {
  RawParams base;
  double C = 0.0;
  double h = -1.0;
  std::vector<SweepAxis> axes;
  SweepAnalyses analyses;
  std::string output;  // may be empty when the caller supplies the path
  IntegrationSettings settings;
};

/// Parses and validates a plan. Accepted keys:
///   params {G, M, m, gamma0, gamma}, C, h,
///   axes [{name, min, max, count} | {name, values}],
///   analyses ["classify" | "equilibria" | "spectra" | "homographic"], output.
/// Throws InvalidPlan.
SweepPlan parse_plan(const nlohmann::json& j);
SweepPlan load_plan(const std::filesystem::path& path);

/// Canonical JSON form used to tag result files for resume.
nlohmann::json plan_to_json(const SweepPlan& plan);

std::size_t grid_size(const SweepPlan& plan);

struct SweepPoint {
  std::size_t index = 0;
  RawParams params;
  double C = 0.0;
  double h = 0.0;
};

SweepPoint grid_point(const SweepPlan& plan, std::size_t index);

inline constexpr int kSweepCsvVersion = 1;
const std::vector<std::string>& sweep_columns();

/// One CSV record (without trailing newline) for a grid point. Per-point
/// failures are reported in the status and error columns.
std::string evaluate_point(const SweepPlan& plan, const SweepPoint& pt);

struct SweepSummary {
  std::size_t total = 0;
  std::size_t computed = 0;
  std::size_t resumed = 0;
};

/// Runs the sweep into `out`. Existing complete records for the same plan are
/// kept and skipped; the finished file is sorted by grid index. workers = 0
/// selects the hardware concurrency. Throws IoFailure or InvalidPlan.
SweepSummary run_sweep(const SweepPlan& plan, const std::filesystem::path& out, unsigned workers = 0);

}  // namespace manev
