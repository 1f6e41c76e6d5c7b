#include "manev/report.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace manev::report {

using nlohmann::json;

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) x = 0.0;  // drop the sign of negative zero
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return std::stod(format_number(x));
}

json complex_number(std::complex<double> z) { return {{"re", number(z.real())}, {"im", number(z.imag())}}; }

json spectrum(const std::vector<std::complex<double>>& s) {
  json out = json::array();
  for (const auto& z : s) out.push_back(complex_number(z));
  return out;
}

json params_json(const PhysicalParams& p) {
  return {{"G", number(p.G())},         {"M", number(p.M())},         {"m", number(p.m())},
          {"gamma0", number(p.gamma0())}, {"gamma", number(p.gamma())}, {"mu", number(p.mu())}};
}

json envelope(std::string_view command, const PhysicalParams& p) {
  return {{"schema_version", kSchemaVersion}, {"command", command}, {"params", params_json(p)}};
}

json to_json(const TopologyReport& r) {
  return {{"C", number(r.C)},
          {"class", to_string(r.topology)},
          {"thresholds", {number(r.threshold_low), number(r.threshold_high)}}};
}

json to_json(const McGeheeState& s) {
  return {{"r", number(s.r)},         {"v", number(s.v)},     {"theta", number(s.theta)},
          {"w", number(s.w)},         {"t_phys", number(s.t_phys)}, {"tau", number(s.tau)},
          {"sigma", number(s.sigma)}};
}

json to_json(const CylState& s) {
  return {{"R", number(s.R)}, {"Z", number(s.Z)}, {"P_R", number(s.P_R)}, {"P_Z", number(s.P_Z)}, {"C", number(s.C)}};
}

json to_json(const Equilibrium& e) {
  json out = {{"kind", to_string(e.kind)},
              {"location",
               {{"r", number(e.location.r)},
                {"v", number(e.location.v)},
                {"theta", number(e.location.theta)},
                {"w", number(e.location.w)}}}};
  if (!e.has_spectrum) return out;
  out["spectrum_closed"] = spectrum(e.spectrum_closed);
  out["spectrum_numeric"] = spectrum(e.spectrum_numeric);
  out["manifold_dims"] = {{"unstable", e.dims.unstable}, {"stable", e.dims.stable}, {"center", e.dims.center}};
  out["closed_matches_numeric"] = e.closed_matches_numeric;
  if (e.lambda1_jacobian_form) out["lambda1_jacobian_form"] = complex_number(*e.lambda1_jacobian_form);
  if (e.lambda1_simplified_form) out["lambda1_simplified_form"] = complex_number(*e.lambda1_simplified_form);
  if (!e.lambda1_matching_form.empty()) out["lambda1_matching_form"] = e.lambda1_matching_form;
  if (e.a_closed_form) out["a_closed_form"] = number(*e.a_closed_form);
  if (e.a_field) out["a_field"] = number(*e.a_field);
  if (e.v0_alt_formula) out["v0_alt_formula"] = number(*e.v0_alt_formula);
  return out;
}

json to_json(const SpecialPointSpectrum& s) {
  return {{"C", number(s.C)}, {"spectrum_closed", spectrum(s.closed)}, {"spectrum_numeric", spectrum(s.numeric)}};
}

json to_json(const HomographicReport& r) {
  auto opt = [](const std::optional<double>& x) { return x ? number(*x) : json(nullptr); };
  json out = {{"h", number(r.h)},
              {"C", number(r.C)},
              {"S_r", opt(r.S_r)},
              {"window_exists", opt(r.window_exists)},
              {"window_periodic", {number(r.window_periodic_low), opt(r.window_exists)}},
              {"classification", to_string(r.classification)},
              {"r_min", opt(r.r_min)},
              {"r_max", opt(r.r_max)},
              {"r_start", number(r.r_start)},
              {"v_start", number(r.v_start)},
              {"termination", to_string(r.orbit.termination)},
              {"integration_consistent", r.integration_consistent},
              {"max_energy_residual", number(r.max_energy_residual)}};
  if (r.period) {
    out["period_sigma"] = number(r.period->sigma);
    out["period_t"] = number(r.period->t_phys);
    out["period_degenerate"] = r.period->degenerate;
    out["closure_error"] = number(r.period->closure_error);
  } else {
    out["period_sigma"] = nullptr;
    out["period_t"] = nullptr;
  }
  if (r.s_eigenvalues) {
    out["s_eigenvalues"] = spectrum({(*r.s_eigenvalues)[0], (*r.s_eigenvalues)[1]});
  }
  return out;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "sigma,t_phys,r,v,theta,w,residual\n";
  for (const auto& s : traj.samples) {
    os << format_number(s.sigma) << ',' << format_number(s.state.t_phys) << ',' << format_number(s.state.r) << ','
       << format_number(s.state.v) << ',' << format_number(s.state.theta) << ',' << format_number(s.state.w) << ','
       << format_number(s.residual) << '\n';
  }
}

void write_section_csv(std::ostream& os, const std::vector<SectionPoint>& pts) {
  os << "theta,w\n";
  for (const auto& pt : pts) os << format_number(pt.theta) << ',' << format_number(pt.w) << '\n';
}

void write_potentials_csv(std::ostream& os, const std::vector<PotentialEval>& evals) {
  os << "theta,V,W,U,dV,dW,dU\n";
  for (const auto& e : evals) {
    os << format_number(e.theta) << ',' << format_number(e.V) << ',' << format_number(e.W) << ','
       << format_number(e.U) << ',' << format_number(e.dV) << ',' << format_number(e.dW) << ','
       << format_number(e.dU) << '\n';
  }
}

}  // namespace manev::report
