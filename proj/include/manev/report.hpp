#pragma once

#include <complex>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "manev/dynamics.hpp"
#include "manev/homographic.hpp"
#include "manev/manifold.hpp"
#include "manev/params.hpp"
#include "manev/potentials.hpp"

namespace manev::report {

inline constexpr int kSchemaVersion = 1;

/// 12 significant digits; "nan", "inf", "-inf" for non-finite values.
std::string format_number(double x);

/// x rounded to 12 significant digits, or null when not finite.
nlohmann::json number(double x);
nlohmann::json complex_number(std::complex<double> z);
nlohmann::json spectrum(const std::vector<std::complex<double>>& s);

nlohmann::json params_json(const PhysicalParams& p);
nlohmann::json to_json(const TopologyReport& r);
nlohmann::json to_json(const Equilibrium& e);
nlohmann::json to_json(const SpecialPointSpectrum& s);
nlohmann::json to_json(const HomographicReport& r);
nlohmann::json to_json(const McGeheeState& s);
nlohmann::json to_json(const CylState& s);

/// Top-level report object: {"schema_version", "command", "params", ...}.
nlohmann::json envelope(std::string_view command, const PhysicalParams& p);

/// Columns: sigma, t_phys, r, v, theta, w, residual.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
/// Columns: theta, w.
void write_section_csv(std::ostream& os, const std::vector<SectionPoint>& pts);
/// Columns: theta, V, W, U, dV, dW, dU.
void write_potentials_csv(std::ostream& os, const std::vector<PotentialEval>& evals);

}  // namespace manev::report
