#include "manev/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <fstream>
#include <map>
#include <mutex>
#include <queue>
#include <sstream>
#include <thread>

#include "manev/error.hpp"
#include "manev/homographic.hpp"
#include "manev/manifold.hpp"
#include "manev/report.hpp"

namespace manev {

namespace {

using nlohmann::json;
using report::format_number;

constexpr const char* kAxisNames[] = {"C", "h", "G", "M", "m", "gamma0", "gamma"};

std::string_view axis_name(SweepAxisName n) { return kAxisNames[static_cast<int>(n)]; }

SweepAxisName parse_axis_name(const std::string& s) {
  for (int i = 0; i < 7; ++i) {
    if (s == kAxisNames[i]) return static_cast<SweepAxisName>(i);
  }
  throw Error(ErrorKind::InvalidPlan, "unknown axis '" + s + "' (expected C, h, G, M, m, gamma0 or gamma)");
}

double finite_number(const json& j, const std::string& what) {
  if (!j.is_number()) throw Error(ErrorKind::InvalidPlan, what + " must be a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw Error(ErrorKind::InvalidPlan, what + " must be finite");
  return x;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else if (c == '\n') out += ' ';
    else out += c;
  }
  return out + "\"";
}

std::string spectrum_field(const Spectrum& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ';';
    out += format_number(s[i].real());
    out += s[i].imag() < 0 ? "-" : "+";
    out += format_number(std::abs(s[i].imag()));
    out += 'i';
  }
  return out;
}

std::string dims_field(const ManifoldDims& d) {
  return std::to_string(d.unstable) + "/" + std::to_string(d.stable) + "/" + std::to_string(d.center);
}

// Number of fields in a CSV line, honoring quotes.
std::size_t field_count(const std::string& line) {
  std::size_t n = 1;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') quoted = !quoted;
    else if (c == ',' && !quoted) ++n;
  }
  return quoted ? 0 : n;
}

std::string header_comment() { return "# manev-sweep csv v" + std::to_string(kSweepCsvVersion); }
std::string plan_comment(const SweepPlan& plan) { return "# plan " + plan_to_json(plan).dump(); }

std::string column_line() {
  std::string out;
  for (const auto& c : sweep_columns()) {
    if (!out.empty()) out += ',';
    out += c;
  }
  return out;
}

// Complete records of an earlier run of the same plan, keyed by grid index.
std::map<std::size_t, std::string> read_existing(const SweepPlan& plan, const std::filesystem::path& out) {
  std::map<std::size_t, std::string> records;
  std::ifstream in(out, std::ios::binary);
  if (!in) return records;
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (text.empty()) return records;

  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) break;  // an unterminated last line is an interrupted write
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  if (lines.size() < 3 || lines[0] != header_comment() || lines[2] != column_line()) {
    throw Error(ErrorKind::InvalidPlan, "output file " + out.string() + " is not a manev sweep table of this version");
  }
  if (lines[1] != plan_comment(plan)) {
    throw Error(ErrorKind::InvalidPlan, "output file " + out.string() + " belongs to a different plan");
  }
  const std::size_t ncol = sweep_columns().size();
  const std::size_t total = grid_size(plan);
  for (std::size_t i = 3; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (field_count(line) != ncol) continue;
    std::size_t idx = 0;
    try {
      std::size_t used = 0;
      idx = std::stoul(line, &used);
      if (line[used] != ',') continue;
    } catch (const std::exception&) {
      continue;
    }
    if (idx < total) records.emplace(idx, line);
  }
  return records;
}

void write_sorted(const SweepPlan& plan, const std::filesystem::path& out,
                  const std::map<std::size_t, std::string>& records) {
  const std::filesystem::path tmp = out.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(ErrorKind::IoFailure, "cannot write " + tmp.string());
    os << header_comment() << '\n' << plan_comment(plan) << '\n' << column_line() << '\n';
    for (const auto& [idx, line] : records) os << line << '\n';
    os.flush();
    if (!os) throw Error(ErrorKind::IoFailure, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, out, ec);
  if (ec) throw Error(ErrorKind::IoFailure, "cannot replace " + out.string() + ": " + ec.message());
}

}  // namespace

SweepPlan parse_plan(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::InvalidPlan, "plan must be a JSON object");
  static const std::vector<std::string> known = {"params", "C", "h", "axes", "analyses", "output", "settings"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw Error(ErrorKind::InvalidPlan, "unknown plan key '" + key + "'");
    }
  }
  SweepPlan plan;
  if (j.contains("params")) {
    const json& pj = j.at("params");
    if (!pj.is_object()) throw Error(ErrorKind::InvalidPlan, "params must be an object");
    for (const auto& [key, value] : pj.items()) {
      const double x = finite_number(value, "params." + key);
      if (key == "G") plan.base.G = x;
      else if (key == "M") plan.base.M = x;
      else if (key == "m") plan.base.m = x;
      else if (key == "gamma0") plan.base.gamma0 = x;
      else if (key == "gamma") plan.base.gamma = x;
      else throw Error(ErrorKind::InvalidPlan, "unknown parameter '" + key + "'");
    }
  }
  if (j.contains("C")) plan.C = finite_number(j.at("C"), "C");
  if (j.contains("h")) plan.h = finite_number(j.at("h"), "h");
  if (j.contains("output")) {
    if (!j.at("output").is_string()) throw Error(ErrorKind::InvalidPlan, "output must be a string");
    plan.output = j.at("output").get<std::string>();
  }
  if (j.contains("settings")) {
    const json& sj = j.at("settings");
    if (!sj.is_object()) throw Error(ErrorKind::InvalidPlan, "settings must be an object");
    for (const auto& [key, value] : sj.items()) {
      const double x = finite_number(value, "settings." + key);
      if (key == "rel_tol") plan.settings.rel_tol = x;
      else if (key == "abs_tol") plan.settings.abs_tol = x;
      else if (key == "max_step") plan.settings.max_step = x;
      else if (key == "theta_guard") plan.settings.theta_guard = x;
      else if (key == "r_floor") plan.settings.r_floor = x;
      else if (key == "escape_radius") plan.settings.escape_radius = x;
      else throw Error(ErrorKind::InvalidPlan, "unknown setting '" + key + "'");
    }
    try {
      validate(plan.settings);
    } catch (const Error& e) {
      throw Error(ErrorKind::InvalidPlan, e.what());
    }
  }

  if (!j.contains("axes") || !j.at("axes").is_array() || j.at("axes").empty()) {
    throw Error(ErrorKind::InvalidPlan, "axes must be a non-empty array");
  }
  for (const auto& aj : j.at("axes")) {
    if (!aj.is_object() || !aj.contains("name") || !aj.at("name").is_string()) {
      throw Error(ErrorKind::InvalidPlan, "each axis needs a string name");
    }
    SweepAxis axis;
    axis.name = parse_axis_name(aj.at("name").get<std::string>());
    for (const auto& other : plan.axes) {
      if (other.name == axis.name) throw Error(ErrorKind::InvalidPlan, "duplicate axis " + std::string(axis_name(axis.name)));
    }
    const std::string label = "axis " + std::string(axis_name(axis.name));
    if (aj.contains("values")) {
      if (!aj.at("values").is_array() || aj.at("values").empty()) {
        throw Error(ErrorKind::InvalidPlan, label + ": values must be a non-empty array");
      }
      for (const auto& v : aj.at("values")) axis.values.push_back(finite_number(v, label + " value"));
    } else {
      if (!aj.contains("min") || !aj.contains("max") || !aj.contains("count")) {
        throw Error(ErrorKind::InvalidPlan, label + ": needs either values or min, max and count");
      }
      const double lo = finite_number(aj.at("min"), label + " min");
      const double hi = finite_number(aj.at("max"), label + " max");
      if (!aj.at("count").is_number_integer() || aj.at("count").get<long long>() < 1) {
        throw Error(ErrorKind::InvalidPlan, label + ": count must be an integer >= 1");
      }
      const auto count = aj.at("count").get<long long>();
      if (count == 1) {
        axis.values.push_back(lo);
      } else {
        for (long long i = 0; i < count; ++i) {
          axis.values.push_back(i == count - 1 ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
        }
      }
    }
    plan.axes.push_back(std::move(axis));
  }

  if (j.contains("analyses")) {
    const json& an = j.at("analyses");
    if (!an.is_array() || an.empty()) throw Error(ErrorKind::InvalidPlan, "analyses must be a non-empty array");
    plan.analyses = {false, false, false, false};
    for (const auto& a : an) {
      const std::string s = a.is_string() ? a.get<std::string>() : "";
      if (s == "classify") plan.analyses.classify = true;
      else if (s == "equilibria") plan.analyses.equilibria = true;
      else if (s == "spectra") plan.analyses.spectra = true;
      else if (s == "homographic") plan.analyses.homographic = true;
      else throw Error(ErrorKind::InvalidPlan, "unknown analysis '" + s + "'");
    }
  }
  return plan;
}

SweepPlan load_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot read plan " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidPlan, std::string("plan is not valid JSON: ") + e.what());
  }
  return parse_plan(j);
}

json plan_to_json(const SweepPlan& plan) {
  json axes = json::array();
  for (const auto& a : plan.axes) axes.push_back({{"name", axis_name(a.name)}, {"values", a.values}});
  json analyses = json::array();
  if (plan.analyses.classify) analyses.push_back("classify");
  if (plan.analyses.equilibria) analyses.push_back("equilibria");
  if (plan.analyses.spectra) analyses.push_back("spectra");
  if (plan.analyses.homographic) analyses.push_back("homographic");
  const auto& s = plan.settings;
  return {{"params",
           {{"G", plan.base.G}, {"M", plan.base.M}, {"m", plan.base.m}, {"gamma0", plan.base.gamma0},
            {"gamma", plan.base.gamma}}},
          {"C", plan.C},
          {"h", plan.h},
          {"axes", axes},
          {"analyses", analyses},
          {"settings",
           {{"rel_tol", s.rel_tol}, {"abs_tol", s.abs_tol}, {"max_step", s.max_step},
            {"theta_guard", s.theta_guard}, {"r_floor", s.r_floor}, {"escape_radius", s.escape_radius}}}};
}

std::size_t grid_size(const SweepPlan& plan) {
  std::size_t n = 1;
  for (const auto& a : plan.axes) n *= a.values.size();
  return n;
}

SweepPoint grid_point(const SweepPlan& plan, std::size_t index) {
  SweepPoint pt;
  pt.index = index;
  pt.params = plan.base;
  pt.C = plan.C;
  pt.h = plan.h;
  std::size_t rest = index;
  for (auto it = plan.axes.rbegin(); it != plan.axes.rend(); ++it) {
    const double x = it->values[rest % it->values.size()];
    rest /= it->values.size();
    switch (it->name) {
      case SweepAxisName::C: pt.C = x; break;
      case SweepAxisName::h: pt.h = x; break;
      case SweepAxisName::G: pt.params.G = x; break;
      case SweepAxisName::M: pt.params.M = x; break;
      case SweepAxisName::m: pt.params.m = x; break;
      case SweepAxisName::gamma0: pt.params.gamma0 = x; break;
      case SweepAxisName::gamma: pt.params.gamma = x; break;
    }
  }
  return pt;
}

const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> cols = {
      "index",          "G",                "M",
      "m",              "gamma0",           "gamma",
      "C",              "h",                "status",
      "topology",       "threshold_low",    "threshold_high",
      "n_interior_equilibria", "has_p_points", "has_e_points",
      "e_theta0",       "e_v0",             "p_plus_spectrum",
      "p_plus_dims",    "p_lambda1_matching_form", "e2_plus_spectrum",
      "e2_plus_dims",   "homographic_class", "homographic_period_sigma",
      "homographic_period_t", "error"};
  return cols;
}

std::string evaluate_point(const SweepPlan& plan, const SweepPoint& pt) {
  std::map<std::string, std::string> f;
  f["index"] = std::to_string(pt.index);
  f["G"] = format_number(pt.params.G);
  f["M"] = format_number(pt.params.M);
  f["m"] = format_number(pt.params.m);
  f["gamma0"] = format_number(pt.params.gamma0);
  f["gamma"] = format_number(pt.params.gamma);
  f["C"] = format_number(pt.C);
  f["h"] = format_number(pt.h);
  f["status"] = "ok";
  try {
    const PhysicalParams p = validate(pt.params);
    if (plan.analyses.classify) {
      const auto rep = classify(p, pt.C);
      f["topology"] = std::string(to_string(rep.topology));
      f["threshold_low"] = format_number(rep.threshold_low);
      f["threshold_high"] = format_number(rep.threshold_high);
    }
    if (plan.analyses.equilibria || plan.analyses.spectra) {
      const auto eqs = equilibria(p, pt.C);
      bool has_p = false, has_e = false;
      for (const auto& e : eqs) {
        if (e.kind == EquilibriumKind::P_plus) has_p = true;
        if (e.kind == EquilibriumKind::E2_plus) has_e = true;
      }
      if (plan.analyses.equilibria) {
        f["n_interior_equilibria"] = std::to_string(eqs.size() - 1);
        f["has_p_points"] = has_p ? "1" : "0";
        f["has_e_points"] = has_e ? "1" : "0";
        if (has_e) {
          f["e_theta0"] = format_number(e_point_theta(p, pt.C));
          f["e_v0"] = format_number(e_point_speed(p, pt.C));
        }
      }
      if (plan.analyses.spectra) {
        for (const auto& e : eqs) {
          if (e.kind == EquilibriumKind::P_plus) {
            const auto s = restricted_spectrum(p, e, pt.h, pt.C);
            f["p_plus_spectrum"] = spectrum_field(s.spectrum_numeric);
            f["p_plus_dims"] = dims_field(s.dims);
            f["p_lambda1_matching_form"] = s.lambda1_matching_form;
          } else if (e.kind == EquilibriumKind::E2_plus) {
            const auto s = restricted_spectrum(p, e, pt.h, pt.C);
            f["e2_plus_spectrum"] = spectrum_field(s.spectrum_numeric);
            f["e2_plus_dims"] = dims_field(s.dims);
          }
        }
      }
    }
    if (plan.analyses.homographic) {
      const auto rep = analyze(p, pt.h, pt.C, std::nullopt, plan.settings);
      f["homographic_class"] = std::string(to_string(rep.classification));
      if (rep.period) {
        f["homographic_period_sigma"] = format_number(rep.period->sigma);
        f["homographic_period_t"] = format_number(rep.period->t_phys);
      }
    }
  } catch (const Error& e) {
    const bool invalid = e.kind() == ErrorKind::NonPositiveParameter || e.kind() == ErrorKind::RegimeViolation ||
                         e.kind() == ErrorKind::DegenerateCoefficients || e.kind() == ErrorKind::NonFiniteInput;
    f["status"] = invalid ? "skipped" : "error";
    f["error"] = std::string(to_string(e.kind())) + ": " + e.what();
  }
  std::string line;
  for (const auto& c : sweep_columns()) {
    if (c != "index") line += ',';
    line += csv_escape(f[c]);
  }
  return line;
}

SweepSummary run_sweep(const SweepPlan& plan, const std::filesystem::path& out, unsigned workers) {
  SweepSummary summary;
  summary.total = grid_size(plan);
  std::map<std::size_t, std::string> records = read_existing(plan, out);
  summary.resumed = records.size();

  // Rewrite what survived so appends follow a clean header and no torn line.
  write_sorted(plan, out, records);

  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < summary.total; ++i) {
    if (!records.count(i)) todo.push_back(i);
  }
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(1, todo.size())));

  std::ofstream os(out, std::ios::binary | std::ios::app);
  if (!os) throw Error(ErrorKind::IoFailure, "cannot append to " + out.string());

  std::mutex mu;
  std::condition_variable cv;
  std::queue<std::pair<std::size_t, std::string>> ready;
  std::atomic<std::size_t> next{0};
  std::size_t finished_workers = 0;

  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t k = next.fetch_add(1);
        if (k >= todo.size()) break;
        std::string line = evaluate_point(plan, grid_point(plan, todo[k]));
        {
          std::lock_guard lock(mu);
          ready.emplace(todo[k], std::move(line));
        }
        cv.notify_one();
      }
      {
        std::lock_guard lock(mu);
        ++finished_workers;
      }
      cv.notify_one();
    });
  }

  // Single writer: records reach the file as they complete, one flush each.
  bool io_ok = true;
  for (;;) {
    std::unique_lock lock(mu);
    cv.wait(lock, [&] { return !ready.empty() || finished_workers == workers; });
    if (ready.empty() && finished_workers == workers) break;
    auto item = std::move(ready.front());
    ready.pop();
    lock.unlock();
    if (io_ok) {
      os << item.second << '\n';
      os.flush();
      io_ok = static_cast<bool>(os);
    }
    records.emplace(item.first, std::move(item.second));
    ++summary.computed;
  }
  for (auto& t : pool) t.join();
  os.close();
  if (!io_ok) throw Error(ErrorKind::IoFailure, "write failed for " + out.string());

  write_sorted(plan, out, records);
  return summary;
}

}  // namespace manev
