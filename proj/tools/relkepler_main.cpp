// relkepler: config-driven CLI around the relkep library.
//
// Subcommands: simulate | bridge | precession | sweep.
// Exit codes: 0 ok, 2 config error, 3 integration error, 4 domain/region error.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "relkep/analytic.hpp"
#include "relkep/integrate.hpp"
#include "relkep/reparam.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace relkep;

namespace {

constexpr int kSchemaVersion = 1;
constexpr double two_pi = 2.0 * std::numbers::pi;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- formatting

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ------------------------------------------------------------ config access

const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key))
    throw ConfigError("missing config field: " + path + "." + key);
  return j.at(key);
}

double require_num(const json& j, const std::string& key, const std::string& path) {
  const json& v = require(j, key, path);
  if (!v.is_number()) throw ConfigError("field " + path + "." + key + " must be a number");
  return v.get<double>();
}

double opt_num(const json& j, const std::string& key, double fallback) {
  if (j.is_object() && j.contains(key)) return j.at(key).get<double>();
  return fallback;
}

std::string opt_str(const json& j, const std::string& key, const std::string& fallback) {
  if (j.is_object() && j.contains(key)) return j.at(key).get<std::string>();
  return fallback;
}

Vec require_vec(const json& j, const std::string& key, const std::string& path) {
  const json& v = require(j, key, path);
  if (!v.is_array() || v.size() != 2)
    throw ConfigError("field " + path + "." + key + " must be an array of 2 numbers");
  return Vec(v[0].get<double>(), v[1].get<double>());
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!cfg.contains("schema_version") || cfg["schema_version"].get<int>() != kSchemaVersion)
    throw ConfigError("config field schema_version must be " + std::to_string(kSchemaVersion));
  return cfg;
}

PhysicalParams parse_params(const json& cfg) {
  PhysicalParams p;
  const json empty = json::object();
  const json& jp = cfg.contains("params") ? cfg.at("params") : empty;
  p.G = opt_num(jp, "G", 1.0);
  p.M = opt_num(jp, "M", 1.0);
  p.m = opt_num(jp, "m", 1.0);
  p.c = opt_num(jp, "c", 1.0);
  for (auto [name, val] : {std::pair{"G", p.G}, {"M", p.M}, {"m", p.m}, {"c", p.c}})
    if (!(val > 0.0) || !std::isfinite(val))
      throw ConfigError(std::string("field params.") + name + " must be positive");
  return p;
}

IntegratorConfig parse_integrator(const json& cfg, double rtol_cli, double atol_cli) {
  IntegratorConfig ic;
  const json empty = json::object();
  const json& ji = cfg.contains("integrator") ? cfg.at("integrator") : empty;
  const std::string method = opt_str(ji, "method", "dp45");
  if (method == "dp45") ic.method = StepMethod::DP45Adaptive;
  else if (method == "rk4") ic.method = StepMethod::RK4Fixed;
  else throw ConfigError("field integrator.method must be dp45 or rk4");
  ic.dt = opt_num(ji, "dt", ic.dt);
  ic.rtol = opt_num(ji, "rtol", ic.rtol);
  ic.atol = opt_num(ji, "atol", ic.atol);
  ic.max_steps = static_cast<long>(opt_num(ji, "max_steps", static_cast<double>(ic.max_steps)));
  ic.r_min = opt_num(ji, "r_min", ic.r_min);
  if (rtol_cli > 0.0) ic.rtol = rtol_cli;
  if (atol_cli > 0.0) ic.atol = atol_cli;
  try {
    ic.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("field integrator: ") + e.what());
  }
  return ic;
}

CoeffFamily parse_family(const std::string& name) {
  if (name == "sr" || name == "special_relativity") return CoeffFamily::SpecialRelativity;
  if (name == "levi_civita" || name == "lc") return CoeffFamily::LeviCivita;
  if (name == "schwarzschild") return CoeffFamily::Schwarzschild;
  throw ConfigError("field family must be sr | levi_civita | schwarzschild");
}

// ----------------------------------------------------------------- model set

struct ModelSetup {
  ForceModel::Kind kind = ForceModel::Kind::ClassicalKepler;
  double h = 0.0;
  CentralForceCoeffs coeffs{4, 1.0, 0.0};
  FlowField field;
  std::shared_ptr<const Potential> diag_potential;  // V or Z per kind
  bool momentum_rep = false;
};

ModelSetup build_model(const json& cfg, const PhysicalParams& params,
                       const IntegratorConfig& ic) {
  const json& jm = require(cfg, "model", "config");
  const std::string kind = opt_str(jm, "kind", "relativistic");
  ModelSetup ms;
  auto kepler = std::make_shared<KeplerPotential>(params.alpha(), ic.r_min);
  if (kind == "relativistic") {
    ms.kind = ForceModel::Kind::RelativisticKepler;
    ms.momentum_rep = true;
    ms.field = relativistic_field(params, kepler, 2, ic.r_min);
    ms.diag_potential = kepler;
  } else if (kind == "classical") {
    ms.kind = ForceModel::Kind::ClassicalKepler;
    ms.field = classical_kepler_field(params, 2, ic.r_min);
    ms.diag_potential = kepler;
  } else if (kind == "transformed") {
    ms.kind = ForceModel::Kind::TransformedZh;
    ms.h = require_num(jm, "h", "model");
    ms.field = transformed_field(params, ms.h, kepler, 2, ic.r_min);
    ms.diag_potential = std::make_shared<TransformedPotential>(kepler, ms.h, params);
  } else if (kind == "central") {
    ms.kind = ForceModel::Kind::CentralForce;
    if (jm.contains("family")) {
      const double h = opt_num(jm, "h", 0.0);
      const double L = opt_num(jm, "L", 0.0);
      try {
        ms.coeffs = coefficients_for(parse_family(jm.at("family").get<std::string>()), h, L, params);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("field model: ") + e.what());
      }
    } else {
      ms.coeffs.ell = static_cast<int>(opt_num(jm, "ell", 4));
      ms.coeffs.alpha_hat = require_num(jm, "alpha_hat", "model");
      ms.coeffs.beta_hat = opt_num(jm, "beta_hat", 0.0);
    }
    try {
      ms.field = central_force_field(ms.coeffs, params, 2, ic.r_min);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("field model.ell: ") + e.what());
    }
    ms.diag_potential = std::make_shared<CentralForcePotential>(ms.coeffs, ic.r_min);
  } else {
    throw ConfigError("field model.kind must be relativistic | classical | transformed | central");
  }
  return ms;
}

std::vector<double> build_initial(const json& cfg, const ModelSetup& ms,
                                  const PhysicalParams& params) {
  const json& ji = require(cfg, "initial", "config");
  const Vec x0 = require_vec(ji, "x", "initial");
  Vec w0;
  if (ms.momentum_rep && ji.contains("p")) {
    w0 = require_vec(ji, "p", "initial");
  } else {
    const Vec v0 = require_vec(ji, "v", "initial");
    w0 = ms.momentum_rep ? momentum_from_velocity(v0, params) : v0;
  }
  return {x0[0], x0[1], w0[0], w0[1]};
}

// Time horizon: either an explicit t1 or a revolution count realized through
// a polar-angle stop callback (capped at t_max).
double configure_time(const json& cfg, IntegratorConfig& ic) {
  const json& jt = require(cfg, "time", "config");
  if (jt.contains("t1")) return require_num(jt, "t1", "time");
  const double orbits = require_num(jt, "orbits", "time");
  if (!(orbits > 0.0)) throw ConfigError("field time.orbits must be positive");
  const double t_max = opt_num(jt, "t_max", 1e6);
  auto angle_acc = std::make_shared<double>(0.0);
  auto prev = std::make_shared<double>(std::numeric_limits<double>::quiet_NaN());
  ic.stop = [angle_acc, prev, orbits](double, std::span<const double> y) {
    const double th = std::atan2(y[1], y[0]);
    if (std::isfinite(*prev)) *angle_acc += std::remainder(th - *prev, two_pi);
    *prev = th;
    return std::abs(*angle_acc) >= orbits * two_pi;
  };
  return t_max;
}

// ------------------------------------------------------------- serialization

void write_csv(const fs::path& path, const Trajectory& traj,
               const PhysicalParams& params, const ModelSetup& ms) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "t,s_clock,x0,x1,v0,v1,r,energy,angular_momentum,gamma,region\n";
  const bool has_region = ms.kind == ForceModel::Kind::RelativisticKepler ||
                          ms.kind == ForceModel::Kind::TransformedZh;
  for (size_t i = 0; i < traj.samples.size(); ++i) {
    const Sample& s = traj.samples[i];
    const Vec x(s.y[0], s.y[1]);
    Vec v(s.y[2], s.y[3]);
    if (traj.momentum_rep) v = velocity_from_momentum(v, params);
    out << fmt17(s.t) << ",";  // s_clock column reserved for clocked runs
    out << ",";
    out << fmt17(x[0]) << "," << fmt17(x[1]) << ",";
    out << fmt17(v[0]) << "," << fmt17(v[1]) << ",";
    out << fmt17(x.norm()) << ",";
    if (i < traj.diag.size()) {
      const SampleDiag& d = traj.diag[i];
      out << fmt17(d.energy) << "," << fmt17(d.angular_momentum) << ",";
      if (std::isfinite(d.gamma)) out << fmt17(d.gamma);
      out << ",";
      if (has_region) out << region_name(d.region);
    } else {
      out << ",,,";
    }
    out << "\n";
  }
}

json report_to_json(const RunReport& rep) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["status"] = run_status_name(rep.status);
  j["steps_taken"] = rep.steps_taken;
  j["steps_rejected"] = rep.steps_rejected;
  j["energy_drift_rel"] = rep.energy_drift_rel;
  j["angular_momentum_drift_rel"] = rep.angular_momentum_drift_rel;
  j["n_events"] = rep.n_events;
  if (rep.precession_rad_per_orbit) j["precession_rad_per_orbit"] = *rep.precession_rad_per_orbit;
  else j["precession_rad_per_orbit"] = nullptr;
  j["detail"] = rep.detail;
  return j;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

int exit_code_for(RunStatus s) {
  switch (s) {
    case RunStatus::Ok:
    case RunStatus::Stopped:
      return 0;
    case RunStatus::MaxStepsExceeded:
    case RunStatus::StepUnderflow:
      return 3;
    case RunStatus::DomainExit:
      return 4;
  }
  return 3;
}

// ----------------------------------------------------------------- simulate

int run_simulate(const json& cfg, const fs::path& out_dir, double rtol_cli,
                 double atol_cli, json* summary) {
  const PhysicalParams params = parse_params(cfg);
  IntegratorConfig ic = parse_integrator(cfg, rtol_cli, atol_cli);
  const ModelSetup ms = build_model(cfg, params, ic);
  const std::vector<double> y0 = build_initial(cfg, ms, params);
  const double t1 = configure_time(cfg, ic);

  auto res = integrate(ms.field, y0, 0.0, t1, ic);
  DiagContext ctx{params, ms.diag_potential, ms.kind, ms.h};
  attach_diagnostics(res.trajectory, ctx, res.report);
  res.trajectory.events = detect_perihelion(res.trajectory);
  res.report.n_events = res.trajectory.events.size();
  try {
    res.report.precession_rad_per_orbit = precession_estimate(res.trajectory.events).mean;
  } catch (const InsufficientEventsError&) {
  }

  const json empty = json::object();
  const json& jo = cfg.contains("output") ? cfg.at("output") : empty;
  fs::create_directories(out_dir);
  write_csv(out_dir / opt_str(jo, "trajectory", "trajectory.csv"), res.trajectory, params, ms);
  const json jrep = report_to_json(res.report);
  write_json(out_dir / opt_str(jo, "report", "report.json"), jrep);
  if (summary) {
    (*summary)["status"] = run_status_name(res.report.status);
    (*summary)["energy_drift_rel"] = res.report.energy_drift_rel;
    (*summary)["angular_momentum_drift_rel"] = res.report.angular_momentum_drift_rel;
    (*summary)["n_events"] = res.report.n_events;
  }
  return exit_code_for(res.report.status);
}

// -------------------------------------------------------------------- bridge

int run_bridge(const json& cfg, const fs::path& out_dir, double rtol_cli,
               double atol_cli, const std::string& direction, bool sigma_branch) {
  const PhysicalParams params = parse_params(cfg);
  IntegratorConfig ic = parse_integrator(cfg, rtol_cli, atol_cli);
  const double h = require_num(cfg, "h", "config");
  auto V = std::make_shared<KeplerPotential>(params.alpha(), ic.r_min);
  const json& ji = require(cfg, "initial", "config");
  const json& jt = require(cfg, "time", "config");
  const json empty = json::object();
  const json& jo = cfg.contains("output") ? cfg.at("output") : empty;
  fs::create_directories(out_dir);
  const fs::path report_path = out_dir / opt_str(jo, "report", "bridge.json");

  json j;
  j["schema_version"] = kSchemaVersion;
  j["h"] = h;
  if (sigma_branch) {
    const Vec z0 = require_vec(ji, "z", "initial");
    const Vec z0p = require_vec(ji, "zp", "initial");
    const double s1 = require_num(jt, "s1", "time");
    auto rep = sigma_branch_check(params, V, h, z0, z0p, s1, ic,
                                  opt_num(cfg, "tolerance", 1e-6));
    j["mode"] = "sigma_branch";
    j["expected_energy"] = rep.expected_energy;
    j["max_energy_gap"] = rep.max_energy_gap;
    j["s_span"] = rep.s_span;
    j["pass"] = rep.pass;
  } else if (direction == "backward") {
    const Vec z0 = require_vec(ji, "z", "initial");
    const Vec z0p = require_vec(ji, "zp", "initial");
    const double s1 = require_num(jt, "s1", "time");
    auto zrun = integrate_with_inverse_clock(params, V, h, z0, z0p, s1, ic);
    auto tb = transport_backward(zrun);
    double max_energy = 0.0, max_identity = 0.0;
    for (size_t k = 0; k < tb.param.size(); ++k) {
      PhaseState st{tb.param[k], tb.pos[k], tb.vel[k], false};
      max_energy = std::max(max_energy,
                            std::abs(relativistic_energy(st, params, *V) - h));
      const double denom = (V->value(tb.pos[k]) + h + params.mc2()) / params.mc2();
      const double lhs = 1.0 - tb.vel[k].norm2() / (params.c * params.c);
      max_identity = std::max(max_identity, std::abs(lhs - 1.0 / (denom * denom)));
    }
    const double tol = opt_num(cfg, "tolerance", 1e-8);
    j["mode"] = "backward";
    j["max_energy_gap"] = max_energy;
    j["max_identity_gap"] = max_identity;
    j["pass"] = max_energy < tol && max_identity < tol;
  } else if (direction == "forward") {
    const Vec x0 = require_vec(ji, "x", "initial");
    const Vec p0 = ji.contains("p")
                       ? require_vec(ji, "p", "initial")
                       : momentum_from_velocity(require_vec(ji, "v", "initial"), params);
    const double t1 = require_num(jt, "t1", "time");
    EquivalenceTolerances tol;
    if (cfg.contains("tolerances")) {
      const json& jtol = cfg.at("tolerances");
      tol.position = opt_num(jtol, "position", tol.position);
      tol.energy = opt_num(jtol, "energy", tol.energy);
      tol.clock = opt_num(jtol, "clock", tol.clock);
    }
    auto rep = verify_equivalence(params, V, h, x0, p0, t1, ic, tol);
    j["mode"] = "forward";
    j["sup_position_gap"] = rep.sup_position_gap;
    j["energy_gap"] = rep.energy_gap;
    j["residual_norm"] = rep.residual_norm;
    j["clock_roundtrip_gap"] = rep.clock_roundtrip_gap;
    j["t_span"] = rep.t_span;
    j["s_span"] = rep.s_span;
    j["pass"] = rep.pass;
  } else {
    throw ConfigError("--direction must be forward or backward");
  }
  write_json(report_path, j);
  return 0;
}

// ---------------------------------------------------------------- precession

int run_precession(const json& cfg, const fs::path& out_dir, double rtol_cli,
                   double atol_cli) {
  const json& rows = require(cfg, "rows", "config");
  if (!rows.is_array() || rows.empty())
    throw ConfigError("field rows must be a non-empty array");
  const json empty = json::object();
  const json& jo = cfg.contains("output") ? cfg.at("output") : empty;
  fs::create_directories(out_dir);
  std::ofstream out(out_dir / opt_str(jo, "table", "precession.csv"), std::ios::binary);
  out << "family,h,L,c,measured,analytic,ratio,status\n";

  for (const json& row : rows) {
    const std::string family_name = opt_str(row, "family", "sr");
    PhysicalParams params = parse_params(row);
    const double h = opt_num(row, "h", 0.0);
    const double L = require_num(row, "L", "rows[]");
    const double ecc = opt_num(row, "ecc", 0.3);
    const double orbits = opt_num(row, "orbits", 10.0);
    out << family_name << "," << fmt17(h) << "," << fmt17(L) << ","
        << fmt17(params.c) << ",";
    try {
      const CoeffFamily family = parse_family(family_name);
      const CentralForceCoeffs coeffs = coefficients_for(family, h, L, params);
      double analytic;
      double scale;  // semi-latus-like radius scale of the orbit
      if (coeffs.ell == 4) {
        const ConicOrbit conic = binet_parameters(coeffs.alpha_hat, coeffs.beta_hat, L, params.m);
        analytic = apsidal_precession(conic.k);
        scale = conic.p;
      } else {
        analytic = precession_schwarzschild_leading(params, L);
        scale = L * L / (params.m * coeffs.alpha_hat);
      }
      const double r0 = scale / (1.0 + ecc);
      const double a = scale / (1.0 - ecc * ecc);
      const double period =
          two_pi * std::sqrt(a * a * a * params.m / coeffs.alpha_hat);

      IntegratorConfig ic = parse_integrator(row, rtol_cli, atol_cli);
      ic.rtol = std::min(ic.rtol, 1e-11);
      ic.atol = std::min(ic.atol, 1e-13);
      auto field = central_force_field(coeffs, params, 2, ic.r_min);
      auto res = integrate(field, {r0, 0.0, 0.0, L / (params.m * r0)}, 0.0,
                           (orbits + 0.7) * period, ic);
      if (res.report.status != RunStatus::Ok &&
          res.report.status != RunStatus::Stopped)
        throw std::runtime_error(run_status_name(res.report.status));
      auto events = detect_perihelion(res.trajectory);
      auto est = precession_estimate(events);
      out << fmt17(est.mean) << "," << fmt17(analytic) << ",";
      if (analytic != 0.0) out << fmt17(est.mean / analytic);
      out << ",ok\n";
    } catch (const SpiralRegimeError&) {
      out << ",,,spiral_regime\n";
    } catch (const InsufficientEventsError&) {
      out << ",,,insufficient_events\n";
    }
  }
  return 0;
}

// --------------------------------------------------------------------- sweep

void apply_override(json& cfg, const std::string& dotted, const json& value) {
  json* node = &cfg;
  size_t pos = 0;
  while (true) {
    const size_t dot = dotted.find('.', pos);
    const std::string key = dotted.substr(pos, dot - pos);
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    pos = dot + 1;
  }
}

size_t sweep_threads() {
  size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("RELKEPLER_THREADS")) {
    const long v = std::atol(env);
    if (v > 0) n = std::min<size_t>(n, static_cast<size_t>(v));
  }
  return n;
}

int run_sweep(const json& cfg, const fs::path& out_dir, double rtol_cli,
              double atol_cli, bool strict) {
  const json& base = require(cfg, "base", "config");
  const json& grid = require(cfg, "grid", "config");
  if (!grid.is_object() || grid.empty())
    throw ConfigError("field grid must be a non-empty object");

  // Cartesian product in the (sorted) key order nlohmann::json provides.
  std::vector<std::string> keys;
  std::vector<const json*> values;
  for (auto it = grid.begin(); it != grid.end(); ++it) {
    if (!it.value().is_array() || it.value().empty())
      throw ConfigError("field grid." + it.key() + " must be a non-empty array");
    keys.push_back(it.key());
    values.push_back(&it.value());
  }
  std::vector<json> configs;
  std::vector<json> overrides;
  std::vector<size_t> idx(keys.size(), 0);
  while (true) {
    json c = base;
    c["schema_version"] = kSchemaVersion;
    json ov = json::object();
    for (size_t k = 0; k < keys.size(); ++k) {
      apply_override(c, keys[k], (*values[k])[idx[k]]);
      ov[keys[k]] = (*values[k])[idx[k]];
    }
    configs.push_back(std::move(c));
    overrides.push_back(std::move(ov));
    size_t k = keys.size();
    while (k > 0 && ++idx[k - 1] == values[k - 1]->size()) idx[--k] = 0;
    if (k == 0) break;
  }

  fs::create_directories(out_dir);
  std::vector<json> run_summaries(configs.size());
  std::vector<int> codes(configs.size(), 0);
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i; (i = next.fetch_add(1)) < configs.size();) {
      char name[16];
      std::snprintf(name, sizeof name, "run_%03zu", i);
      json& s = run_summaries[i];
      s["index"] = i;
      s["dir"] = name;
      s["overrides"] = overrides[i];
      try {
        codes[i] = run_simulate(configs[i], out_dir / name, rtol_cli, atol_cli, &s);
      } catch (const ConfigError& e) {
        codes[i] = 2;
        s["error"] = e.what();
      } catch (const DomainError& e) {
        codes[i] = 4;
        s["error"] = e.what();
      } catch (const RegionError& e) {
        codes[i] = 4;
        s["error"] = e.what();
      } catch (const std::exception& e) {
        codes[i] = 3;
        s["error"] = e.what();
      }
      s["exit_code"] = codes[i];
    }
  };
  const size_t n_threads = std::min(sweep_threads(), configs.size());
  std::vector<std::thread> pool;
  for (size_t t = 0; t + 1 < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  json summary;
  summary["schema_version"] = kSchemaVersion;
  summary["n_runs"] = configs.size();
  summary["runs"] = run_summaries;
  const long ok = std::count(codes.begin(), codes.end(), 0);
  summary["n_ok"] = ok;
  write_json(out_dir / "summary.json", summary);

  if (strict) {
    for (int c : codes)
      if (c != 0) return c;
    return 0;
  }
  return ok > 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"relkepler: relativistic Kepler dynamics and the Levi-Civita-type bridge"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  double rtol_cli = 0.0, atol_cli = 0.0;
  long seed = 0;  // reserved
  bool strict = false;
  app.add_option("--config", config_path, "JSON config path")->required();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--rtol", rtol_cli, "override integrator rtol");
  app.add_option("--atol", atol_cli, "override integrator atol");
  app.add_option("--seed", seed, "reserved for future stochastic features");
  app.add_flag("--strict", strict, "sweep: any failed run fails the command");

  auto* sim = app.add_subcommand("simulate", "integrate one configured model run");
  auto* bridge = app.add_subcommand("bridge", "equivalence check across the time reparametrization");
  std::string direction = "forward";
  bool sigma_branch = false;
  bridge->add_option("--direction", direction, "forward | backward");
  bridge->add_flag("--sigma-branch", sigma_branch, "check the Sigma_h branch");
  auto* prec = app.add_subcommand("precession", "per-family precession table");
  auto* sweep = app.add_subcommand("sweep", "parameter-grid batch of simulate runs");
  // Let global flags appear after the subcommand name as well.
  for (auto* sub : {sim, bridge, prec, sweep}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    const json cfg = load_config(config_path);
    const fs::path out(out_dir);
    if (sim->parsed()) return run_simulate(cfg, out, rtol_cli, atol_cli, nullptr);
    if (bridge->parsed()) return run_bridge(cfg, out, rtol_cli, atol_cli, direction, sigma_branch);
    if (prec->parsed()) return run_precession(cfg, out, rtol_cli, atol_cli);
    if (sweep->parsed()) return run_sweep(cfg, out, rtol_cli, atol_cli, strict);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const json::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "domain error: %s\n", e.what());
    return 4;
  } catch (const RegionError& e) {
    std::fprintf(stderr, "region error: %s\n", e.what());
    return 4;
  } catch (const EnergyMismatchError& e) {
    std::fprintf(stderr, "domain error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "integration error: %s\n", e.what());
    return 3;
  }
  return 0;
}
