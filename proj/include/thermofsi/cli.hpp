#pragma once

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "thermofsi/assembly.hpp"
#include "thermofsi/battery.hpp"
#include "thermofsi/c2.hpp"
#include "thermofsi/config.hpp"
#include "thermofsi/diagnostics.hpp"
#include "thermofsi/integrator.hpp"
#include "thermofsi/io.hpp"
#include "thermofsi/limits.hpp"
#include "thermofsi/pressures.hpp"

namespace thermofsi {

enum ExitCode : int { kOk = 0, kConfigError = 2, kSolverError = 3, kBoundViolation = 4 };

namespace cli {

struct Context {
  RunConfig cfg;
  std::string hash;
  std::filesystem::path dir;

  std::string file(const std::string& name) const { return (dir / name).string(); }
};

inline Context prepare(const std::string& config_path, const std::vector<std::string>& sets,
                       const std::string& output_dir) {
  Context ctx;
  ctx.cfg = load_config(config_path, sets);
  if (!output_dir.empty()) ctx.cfg.output_dir = output_dir;
  ctx.hash = config_hash(ctx.cfg);
  ctx.dir = ctx.cfg.output_dir;
  std::error_code ec;
  std::filesystem::create_directories(ctx.dir, ec);
  if (ec) throw ConfigError("run.output_dir: cannot create '" + ctx.dir.string() + "'");
  std::ofstream echo(ctx.file("config.toml"));
  if (!echo) throw ConfigError("run.output_dir: cannot write '" + ctx.file("config.toml") + "'");
  echo << header_line(ctx.hash) << render_entries(to_entries(ctx.cfg));
  return ctx;
}

struct SolveOutput {
  MediumGeometry geom;
  AssembledSystem sys;
  Trajectory traj;
  EnergyReport energy;
};

inline SolveOutput solve(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  SolveOutput o;
  o.geom = build_geometry(c.dim, c.n, c.layout);
  const Basis basis(o.geom);
  o.sys = assemble(basis, c.params);
  const LoadBuilder lb(basis, c.params, c.forcing);
  const State init = project_initial(c.initial, o.sys, basis);
  o.traj = integrate(init, o.sys, lb.function(), c.dt, c.params.T, c.solver);
  o.energy = energy_audit(o.traj, o.sys);

  write_energy_csv(ctx.file("energy.csv"), ctx.hash, o.energy);
  const PressureFields raw = reconstruct(o.traj, o.sys, o.geom, c.params);
  write_pressure_csv(ctx.file("pressures.csv"), ctx.hash, o.traj, raw, normalize(raw, o.geom), o.geom);
  write_norms_csv(ctx.file("norms.csv"), ctx.hash, o.traj, o.sys);
  if (c.dump_state) write_state_dump(ctx.file("trajectory.bin"), ctx.hash, o.traj);
  if (c.dump_matrices) {
    const std::pair<const char*, const SpMat*> mats[] = {{"A", &o.sys.A},   {"A1", &o.sys.A1}, {"A2", &o.sys.A2},
                                                         {"A3", &o.sys.A3}, {"B", &o.sys.B},   {"B1", &o.sys.B1},
                                                         {"B2", &o.sys.B2}};
    for (auto [name, m] : mats) dump_triplets(*m, ctx.file(std::string("matrix_") + name + ".txt"));
  }
  return o;
}

inline int cmd_solve(const Context& ctx) {
  const SolveOutput o = solve(ctx);
  std::cout << "solve: " << o.traj.steps() << " steps, max identity residual " << num(o.energy.max_residual())
            << ", outputs in " << ctx.dir.string() << "\n";
  return kOk;
}

inline int cmd_audit(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  const SolveOutput o = solve(ctx);
  const Basis basis(o.geom);
  const LoadBuilder lb(basis, c.params, c.forcing);
  const ForcingDensity g = forcing_density(lb, c.params);
  const std::vector<double> C_en = energy_constant(o.energy, g);

  std::vector<BoundCheck> checks;
  checks.push_back(make_check("energy_identity", o.energy.max_residual(), 1e-8));
  checks.push_back(check_energy_estimate(o.energy, g).worst);
  checks.push_back(check_strain_bound(o.energy, C_en, c.params).worst);
  if (c.initial.homogeneous())
    checks.push_back(check_time_derivative_estimate(c.initial, o.sys, lb, c.params, c.dt, c.params.T).worst);

  write_bound_table(ctx.file("bounds.txt"), ctx.hash, checks);
  nlohmann::json j;
  j["version"] = kVersion;
  j["config_hash"] = ctx.hash;
  j["checks"] = checks_json(checks);
  bool ok = true;
  for (const auto& ch : checks) ok = ok && ch.satisfied;
  j["all_satisfied"] = ok;
  write_json(ctx.file("summary.json"), j);
  for (const auto& ch : checks)
    std::cout << (ch.satisfied ? "ok       " : "VIOLATED ") << ch.name << " lhs=" << num(ch.lhs)
              << " rhs=" << num(ch.rhs) << "\n";
  return ok ? kOk : kBoundViolation;
}

inline SweepPlan plan_from(const RunConfig& c) {
  SweepPlan p;
  p.mode = c.sweep_mode;
  p.alphas = c.alphas;
  p.params = c.params;
  p.dim = c.dim;
  p.n = c.n;
  p.layout = c.layout;
  p.forcing = c.forcing;
  p.initial = c.initial;
  p.dt = c.dt;
  p.T = c.params.T;
  p.alpha_p0 = c.alpha_p0;
  p.alpha_eta0 = c.alpha_eta0;
  p.gauge = c.gauge;
  p.threads = c.threads;
  return p;
}

inline int cmd_sweep(const Context& ctx) {
  LimitReport rep = run_sweep(plan_from(ctx.cfg));
  drop_fields(rep);
  write_sweep_csv(ctx.file("sweep.csv"), ctx.hash, rep);
  std::vector<BoundCheck> checks;
  for (const auto& p : rep.points) {
    checks.push_back(p.fluid_rate);
    checks.push_back(p.solid_rate);
  }
  if (rep.mode == SweepMode::IncompFluid || rep.mode == SweepMode::IncompBoth)
    checks.push_back(check_q_equals_p_limit(rep));
  nlohmann::json j;
  j["version"] = kVersion;
  j["config_hash"] = ctx.hash;
  j["mode"] = mode_name(rep.mode);
  j["slope_fluid_div"] = rep.slope_fluid_div;
  j["slope_solid_div"] = rep.slope_solid_div;
  j["slope_solid_strain"] = rep.slope_solid_strain;
  j["c2_residual"] = rep.c2_residual;
  j["checks"] = checks_json(checks);
  write_json(ctx.file("summary.json"), j);
  write_bound_table(ctx.file("bounds.txt"), ctx.hash, checks);
  std::cout << "sweep " << mode_name(rep.mode) << ": " << rep.points.size() << " points, slopes fluid_div "
            << num(rep.slope_fluid_div) << " solid_div " << num(rep.slope_solid_div) << " solid_strain "
            << num(rep.slope_solid_strain) << "\n";
  return kOk;
}

inline int cmd_c2(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  const MediumGeometry g = build_geometry(c.dim, c.n, c.layout, true);
  const Basis basis(g);
  const AssembledSystem sys = assemble(basis, c.params);
  C2Options opt;
  opt.alpha_eta0 = c.alpha_eta0;
  opt.alpha_p0 = c.alpha_p0;
  opt.gauge = c.gauge;
  const C2Solution s = solve_c2(basis, sys, c.params, c.forcing, c.dt, c.params.T, opt);
  std::ofstream out(ctx.file("c2.csv"));
  if (!out) throw ConfigError("run.output_dir: cannot write c2.csv");
  out << header_line(ctx.hash) << "t,L2_theta,L2_u_solid,H1_u_solid,mean_p,gauge\n";
  for (std::size_t k = 0; k < s.u.size(); ++k) {
    const double t = static_cast<double>(k) * c.dt;
    const double l2u = std::sqrt(std::max(0.0, s.u[k].dot(sys.mass_w_solid * s.u[k])));
    const double h1u = std::sqrt(std::max(0.0, s.u[k].dot((sys.mass_w_solid + sys.grad_w_solid) * s.u[k])));
    const double l2t = std::sqrt(std::max(0.0, s.theta[k].dot(sys.mass_theta * s.theta[k])));
    out << num(t) << "," << num(l2t) << "," << num(l2u) << "," << num(h1u) << ","
        << num(cell_integral(s.p[k], g) / g.fluid_measure()) << "," << num(s.gauge[k]) << "\n";
  }
  nlohmann::json j;
  j["version"] = kVersion;
  j["config_hash"] = ctx.hash;
  j["weak_form_residual"] = s.max_residual;
  write_json(ctx.file("summary.json"), j);
  std::cout << "c2: " << s.u.size() << " frames, weak-form residual " << num(s.max_residual) << "\n";
  return kOk;
}

inline int cmd_selftest(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  const auto results = run_battery(c.seed, c.selftest_configs);
  std::ofstream out(ctx.file("selftest.csv"));
  if (!out) throw ConfigError("run.output_dir: cannot write selftest.csv");
  out << header_line(ctx.hash)
      << "case,dim,n,identity_residual,estimate_margin,estimate_violations,componentwise_exceedances,coupling_defect,pressure_mean_ratio\n";
  bool ok = true;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    ok = ok && r.identity_residual <= 1e-8 && r.estimate.satisfied() && r.coupling_defect <= 1e-12 &&
         r.pressure_mean_ratio <= 1e-12;
    out << i << "," << r.input.dim << "," << r.input.n << "," << num(r.identity_residual) << ","
        << num(r.estimate.worst.margin) << "," << r.estimate.violations << "," << r.componentwise_exceedances << "," << num(r.coupling_defect) << ","
        << num(r.pressure_mean_ratio) << "\n";
  }
  std::cout << "selftest: " << results.size() << " cases, " << (ok ? "all invariants hold" : "VIOLATIONS found")
            << "\n";
  return ok ? kOk : kBoundViolation;
}

}  // namespace cli

/// Entry point of the command-line tool. Returns the process exit code.
inline int run_cli(int argc, char** argv) {
  CLI::App app{"Coupled thermoelastic solid / viscous thermofluid Galerkin solver"};
  app.require_subcommand(1);
  std::string config;
  std::vector<std::string> sets;
  std::string output_dir;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config,-c", config, "configuration file")->required();
    sub->add_option("--set", sets, "override, section.key=value (repeatable)");
    sub->add_option("--output-dir,-o", output_dir, "output directory (overrides run.output_dir)");
  };
  CLI::App* run = app.add_subcommand("run", "dispatch on run.mode");
  CLI::App* solve = app.add_subcommand("solve", "integrate and write CSV artifacts");
  CLI::App* audit = app.add_subcommand("audit", "solve and evaluate the energy bounds");
  CLI::App* sweep = app.add_subcommand("sweep", "run a coefficient ladder");
  CLI::App* c2 = app.add_subcommand("c2", "solve the solidified limit problem directly");
  CLI::App* selftest = app.add_subcommand("selftest", "run the randomized invariant battery");
  for (CLI::App* s : {run, solve, audit, sweep, c2, selftest}) add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    const cli::Context ctx = cli::prepare(config, sets, output_dir);
    std::string mode;
    if (run->parsed()) mode = ctx.cfg.mode;
    else if (solve->parsed()) mode = "solve";
    else if (audit->parsed()) mode = "audit";
    else if (sweep->parsed()) mode = "sweep";
    else if (c2->parsed()) mode = "c2";
    else mode = "selftest";
    if (mode == "solve") return cli::cmd_solve(ctx);
    if (mode == "audit") return cli::cmd_audit(ctx);
    if (mode == "sweep") return cli::cmd_sweep(ctx);
    if (mode == "c2") return cli::cmd_c2(ctx);
    return cli::cmd_selftest(ctx);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kSolverError;
  }
}

}  // namespace thermofsi
