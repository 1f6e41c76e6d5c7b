#include "cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "manev/coords.hpp"
#include "manev/dynamics.hpp"
#include "manev/error.hpp"
#include "manev/homographic.hpp"
#include "manev/manifold.hpp"
#include "manev/params.hpp"
#include "manev/potentials.hpp"
#include "manev/report.hpp"
#include "manev/sweep.hpp"

namespace manev::cli {

namespace {

using nlohmann::json;

struct Config {
  RawParams params;
  IntegrationSettings settings;
};

void apply_config_file(Config& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot read config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidSettings, "config " + path + " is not valid JSON: " + e.what());
  }
  auto num = [&](const json& v, const std::string& key) {
    if (!v.is_number()) throw Error(ErrorKind::InvalidSettings, "config key " + key + " must be a number");
    return v.get<double>();
  };
  if (j.contains("params")) {
    for (const auto& [k, v] : j.at("params").items()) {
      if (k == "G") cfg.params.G = num(v, k);
      else if (k == "M") cfg.params.M = num(v, k);
      else if (k == "m") cfg.params.m = num(v, k);
      else if (k == "gamma0") cfg.params.gamma0 = num(v, k);
      else if (k == "gamma") cfg.params.gamma = num(v, k);
      else throw Error(ErrorKind::InvalidSettings, "unknown config parameter " + k);
    }
  }
  if (j.contains("settings")) {
    for (const auto& [k, v] : j.at("settings").items()) {
      if (k == "rel_tol") cfg.settings.rel_tol = num(v, k);
      else if (k == "abs_tol") cfg.settings.abs_tol = num(v, k);
      else if (k == "max_step") cfg.settings.max_step = num(v, k);
      else if (k == "theta_guard") cfg.settings.theta_guard = num(v, k);
      else if (k == "r_floor") cfg.settings.r_floor = num(v, k);
      else if (k == "escape_radius") cfg.settings.escape_radius = num(v, k);
      else if (k == "max_steps") cfg.settings.max_steps = static_cast<long>(num(v, k));
      else throw Error(ErrorKind::InvalidSettings, "unknown config setting " + k);
    }
  }
}

// Writes `text` to the --out file or to `out`.
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorKind::IoFailure, "cannot write " + path);
  os << text;
  if (!os.flush()) throw Error(ErrorKind::IoFailure, "write failed for " + path);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

int domain_exit(const Error& e, std::ostream& err) {
  err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
  return 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Manev isosceles three-body problem: collision manifold, equilibria, homographic motion"};
  app.name("manev");
  app.fallthrough();
  app.require_subcommand(1);
  // -h would clash with the energy option --h.
  app.set_help_flag("--help", "print help and exit");

  RawParams flag_params;
  std::string config_path;
  std::string out_path;
  auto* oG = app.add_option("--G", flag_params.G, "gravitational constant");
  auto* oM = app.add_option("--M", flag_params.M, "outer-body mass");
  auto* om = app.add_option("--m", flag_params.m, "middle-body mass");
  auto* og0 = app.add_option("--gamma0", flag_params.gamma0, "Manev coefficient of the outer pair");
  auto* og = app.add_option("--gamma", flag_params.gamma, "Manev coefficient of each outer-middle pair");
  app.add_option("--config", config_path, "JSON config with params/settings (default: $MANEV_CONFIG)");
  app.add_option("--out", out_path, "output file (default: stdout)");

  IntegrationSettings flag_set;
  auto* o_rel = app.add_option("--rel-tol", flag_set.rel_tol, "integrator relative tolerance");
  auto* o_abs = app.add_option("--abs-tol", flag_set.abs_tol, "integrator absolute tolerance");
  auto* o_step = app.add_option("--max-step", flag_set.max_step, "maximum integration step");
  auto* o_guard = app.add_option("--theta-guard", flag_set.theta_guard, "distance from +-pi/2 of the double-collision event");
  auto* o_floor = app.add_option("--r-floor", flag_set.r_floor, "radius of the triple-collision event");
  auto* o_esc = app.add_option("--escape-radius", flag_set.escape_radius, "radius of the escape event");

  // potentials
  auto* potentials = app.add_subcommand("potentials", "V, W, U and derivatives on a theta grid (CSV)");
  int theta_grid = 201;
  std::optional<double> theta_single;
  bool critical = false;
  potentials->add_option("--theta-grid", theta_grid, "grid size n (theta_i = -pi/2 + (i+1/2) pi/n)")->check(CLI::PositiveNumber);
  potentials->add_option("--theta", theta_single, "single angle; prints JSON");
  potentials->add_flag("--critical", critical, "print critical angles and extreme values of U as JSON");

  // transform
  auto* transform = app.add_subcommand("transform", "convert between cylindrical and McGehee variables (JSON)");
  std::vector<double> cyl_in, mcg_in;
  double transform_C = 0.0;
  auto* o_cyl = transform->add_option("--cyl", cyl_in, "R,Z,P_R,P_Z")->delimiter(',')->expected(4);
  auto* o_mcg = transform->add_option("--mcgehee", mcg_in, "r,v,theta,w")->delimiter(',')->expected(4);
  o_cyl->excludes(o_mcg);
  transform->add_option("--C", transform_C, "angular momentum");

  // integrate
  auto* integ = app.add_subcommand("integrate", "integrate a field (CSV with a JSON footer)");
  std::string field_name = "regularized";
  std::vector<double> start_in;
  double integ_h = -1.0, integ_C = 0.0, sigma_max = 5.0;
  bool solve_w = false, solve_v = false;
  integ->add_option("--field", field_name, "regularized | unregularized | cylindrical | manifold | homographic");
  integ->add_option("--start", start_in, "r,v,theta,w (cylindrical: R,Z,P_R,P_Z)")->delimiter(',')->expected(4)->required();
  integ->add_option("--h", integ_h, "energy level (ignored by the cylindrical field)");
  integ->add_option("--C", integ_C, "angular momentum");
  integ->add_option("--sigma-max", sigma_max, "integration span (tau for unregularized, t for cylindrical)");
  integ->add_flag("--solve-w", solve_w, "replace w by the value on the energy level, keeping its sign");
  integ->add_flag("--solve-v", solve_v, "homographic field: replace v by the value on the energy level, keeping its sign");

  // classify
  auto* cls = app.add_subcommand("classify", "topology of the collision manifold (JSON)");
  double cls_C = 0.0;
  cls->add_option("--C", cls_C, "angular momentum");

  // equilibria
  auto* eqs = app.add_subcommand("equilibria", "equilibria on the collision manifold with spectra (JSON)");
  double eq_C = 0.0, eq_h = -1.0;
  eqs->add_option("--C", eq_C, "angular momentum");
  eqs->add_option("--h", eq_h, "energy level");

  // section
  auto* sec = app.add_subcommand("section", "section v = v0 of the collision manifold (CSV)");
  double sec_v0 = 0.0, sec_C = 0.0;
  int sec_n = 400;
  sec->add_option("--v0", sec_v0, "value of v")->required();
  sec->add_option("--C", sec_C, "angular momentum");
  sec->add_option("-n", sec_n, "number of theta samples");

  // homographic
  auto* homo = app.add_subcommand("homographic", "homographic motion report (JSON) and optional orbit CSV");
  double homo_h = -1.0, homo_C = 0.0;
  std::optional<double> r_start;
  std::optional<double> homo_span;
  std::string orbit_path;
  homo->add_option("--h", homo_h, "energy level");
  homo->add_option("--C", homo_C, "angular momentum");
  homo->add_option("--r-start", r_start, "starting radius of the integrated orbit");
  homo->add_option("--sigma-max", homo_span, "integration span of the orbit");
  homo->add_option("--orbit", orbit_path, "write the integrated orbit as CSV");

  // sweep
  auto* swp = app.add_subcommand("sweep", "batch parameter sweep (CSV, resumable)");
  std::string plan_path;
  unsigned workers = 0;
  swp->add_option("--config", plan_path, "sweep plan (JSON)")->required();
  swp->add_option("--workers", workers, "worker threads (default: hardware concurrency)");

  if (argc <= 1) {
    err << app.help();
    return 2;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    err << "run 'manev --help' for usage\n";
    return 2;
  }

  try {
    // Sweep plans carry their own parameters.
    if (swp->parsed()) {
      const SweepPlan plan = load_plan(plan_path);
      const std::string target = !out_path.empty() ? out_path : plan.output;
      if (target.empty()) {
        err << "usage error: sweep needs --out or an output entry in the plan\n";
        return 2;
      }
      const auto summary = run_sweep(plan, target, workers);
      err << "sweep: " << summary.total << " points, " << summary.computed << " computed, " << summary.resumed
          << " resumed\n";
      return 0;
    }

    Config cfg;
    if (config_path.empty()) {
      if (const char* env = std::getenv("MANEV_CONFIG"); env && *env) config_path = env;
    }
    if (!config_path.empty()) apply_config_file(cfg, config_path);
    if (oG->count()) cfg.params.G = flag_params.G;
    if (oM->count()) cfg.params.M = flag_params.M;
    if (om->count()) cfg.params.m = flag_params.m;
    if (og0->count()) cfg.params.gamma0 = flag_params.gamma0;
    if (og->count()) cfg.params.gamma = flag_params.gamma;
    if (o_rel->count()) cfg.settings.rel_tol = flag_set.rel_tol;
    if (o_abs->count()) cfg.settings.abs_tol = flag_set.abs_tol;
    if (o_step->count()) cfg.settings.max_step = flag_set.max_step;
    if (o_guard->count()) cfg.settings.theta_guard = flag_set.theta_guard;
    if (o_floor->count()) cfg.settings.r_floor = flag_set.r_floor;
    if (o_esc->count()) cfg.settings.escape_radius = flag_set.escape_radius;

    const PhysicalParams p = validate(cfg.params);
    validate(cfg.settings);

    if (potentials->parsed()) {
      if (critical) {
        const auto cp = critical_points(p);
        json j = report::envelope("potentials", p);
        j["theta_v"] = report::number(cp.theta_v);
        j["theta_w"] = report::number(cp.theta_w);
        j["u_min"] = report::number(cp.u_min);
        j["u_max"] = report::number(cp.u_max);
        emit(out_path, dump(j), out);
      } else if (theta_single) {
        const auto e = eval_potentials(p, *theta_single);
        json j = report::envelope("potentials", p);
        j["theta"] = report::number(e.theta);
        j["V"] = report::number(e.V);
        j["W"] = report::number(e.W);
        j["U"] = report::number(e.U);
        j["dV"] = report::number(e.dV);
        j["dW"] = report::number(e.dW);
        j["dU"] = report::number(e.dU);
        j["endpoint"] = e.endpoint;
        emit(out_path, dump(j), out);
      } else {
        std::vector<PotentialEval> evals;
        for (int i = 0; i < theta_grid; ++i) {
          evals.push_back(eval_potentials(p, -kHalfPi + (i + 0.5) * std::numbers::pi / theta_grid));
        }
        std::ostringstream os;
        report::write_potentials_csv(os, evals);
        emit(out_path, os.str(), out);
      }
      return 0;
    }

    if (transform->parsed()) {
      json j = report::envelope("transform", p);
      if (!cyl_in.empty()) {
        const CylState cs{cyl_in[0], cyl_in[1], cyl_in[2], cyl_in[3], transform_C};
        const McGeheeState ms = to_mcgehee(p, cs);
        const auto iv = intermediate_vectors(p, cs);
        const double h = reduced_energy(p, cs);
        j["cylindrical"] = report::to_json(cs);
        j["mcgehee"] = report::to_json(ms);
        j["intermediate"] = {{"s", {report::number(iv.s[0]), report::number(iv.s[1])}},
                             {"u", {report::number(iv.u[0]), report::number(iv.u[1])}},
                             {"u_scalar", report::number(iv.u_scalar)}};
        j["h"] = report::number(h);
        j["energy_residual"] = report::number(energy_residual(p, ms, h, transform_C));
      } else if (!mcg_in.empty()) {
        McGeheeState ms;
        ms.r = mcg_in[0];
        ms.v = mcg_in[1];
        ms.theta = mcg_in[2];
        ms.w = mcg_in[3];
        const CylState cs = from_mcgehee(p, ms, transform_C);
        j["mcgehee"] = report::to_json(ms);
        j["cylindrical"] = report::to_json(cs);
        j["h"] = report::number(reduced_energy(p, cs));
      } else {
        err << "usage error: transform needs --cyl or --mcgehee\n";
        return 2;
      }
      emit(out_path, dump(j), out);
      return 0;
    }

    if (integ->parsed()) {
      const auto field = parse_field_kind(field_name);
      if (!field) {
        err << "usage error: unknown field '" << field_name << "'\n";
        return 2;
      }
      Trajectory traj;
      if (*field == FieldKind::Cylindrical) {
        const CylState cs{start_in[0], start_in[1], start_in[2], start_in[3], integ_C};
        traj = integrate_cylindrical(p, cs, cfg.settings, sigma_max);
      } else {
        McGeheeState st;
        st.r = *field == FieldKind::CollisionManifold ? 0.0 : start_in[0];
        st.v = start_in[1];
        st.theta = start_in[2];
        st.w = start_in[3];
        if (solve_w) {
          const double w2 = w_squared_on_level(p, st.r, st.v, st.theta, integ_h, integ_C);
          if (w2 < 0.0) throw Error(ErrorKind::InconsistentStart, "no real w on the energy level at this point");
          st.w = std::copysign(std::sqrt(w2), st.w == 0.0 ? 1.0 : st.w);
        }
        if (solve_v) {
          if (*field != FieldKind::Homographic) {
            err << "usage error: --solve-v applies to the homographic field\n";
            return 2;
          }
          const double v2 = homographic_v_squared(p, integ_h, integ_C, st.r);
          if (v2 < 0.0) throw Error(ErrorKind::InconsistentStart, "no real v on the energy level at this radius");
          st.v = std::copysign(std::sqrt(v2), st.v == 0.0 ? 1.0 : st.v);
        }
        traj = integrate(p, *field, st, integ_h, integ_C, cfg.settings, sigma_max);
      }
      std::ostringstream os;
      report::write_trajectory_csv(os, traj);
      json footer = {{"schema_version", report::kSchemaVersion},
                     {"field", to_string(traj.field)},
                     {"h", report::number(traj.h)},
                     {"C", report::number(traj.C)},
                     {"termination", to_string(traj.termination)},
                     {"max_residual", report::number(traj.max_residual)},
                     {"accepted_steps", traj.accepted_steps},
                     {"rejected_steps", traj.rejected_steps}};
      os << "# " << footer.dump() << "\n";
      emit(out_path, os.str(), out);
      return 0;
    }

    if (cls->parsed()) {
      json j = report::envelope("classify", p);
      j.update(report::to_json(classify(p, cls_C)));
      emit(out_path, dump(j), out);
      return 0;
    }

    if (eqs->parsed()) {
      json j = report::envelope("equilibria", p);
      j["C"] = report::number(eq_C);
      j["h"] = report::number(eq_h);
      j["topology"] = to_string(classify(p, eq_C).topology);
      json list = json::array();
      for (const auto& e : equilibria(p, eq_C)) {
        list.push_back(report::to_json(e.kind == EquilibriumKind::BoundaryLine ? e : restricted_spectrum(p, e, eq_h, eq_C)));
      }
      j["equilibria"] = list;
      if (classify(p, eq_C).topology == TopologyClass::PointPlusTwoLines) {
        j["special_point"] = report::to_json(special_point_spectrum(p, eq_h));
      }
      emit(out_path, dump(j), out);
      return 0;
    }

    if (sec->parsed()) {
      std::ostringstream os;
      report::write_section_csv(os, section_curve(p, sec_v0, sec_C, sec_n));
      emit(out_path, os.str(), out);
      return 0;
    }

    if (homo->parsed()) {
      const auto rep = analyze(p, homo_h, homo_C, r_start, cfg.settings, homo_span);
      json j = report::envelope("homographic", p);
      j.update(report::to_json(rep));
      if (!orbit_path.empty()) {
        std::ostringstream os;
        report::write_trajectory_csv(os, rep.orbit);
        emit(orbit_path, os.str(), out);
      }
      emit(out_path, dump(j), out);
      return 0;
    }
  } catch (const Error& e) {
    return domain_exit(e, err);
  }
  err << app.help();
  return 2;
}

}  // namespace manev::cli
