#pragma once

#include <algorithm>
#include <cstdlib>
#include <future>
#include <string>
#include <thread>
#include <vector>

#include "thermofsi/assembly.hpp"
#include "thermofsi/c2.hpp"
#include "thermofsi/diagnostics.hpp"
#include "thermofsi/integrator.hpp"
#include "thermofsi/loads.hpp"
#include "thermofsi/pressures.hpp"

namespace thermofsi {

enum class SweepMode { IncompSolid, IncompFluid, IncompBoth, Solidify, JointSolidify };

inline std::string mode_name(SweepMode m) {
  switch (m) {
    case SweepMode::IncompSolid: return "incomp-solid";
    case SweepMode::IncompFluid: return "incomp-fluid";
    case SweepMode::IncompBoth: return "incomp-both";
    case SweepMode::Solidify: return "solidify";
    case SweepMode::JointSolidify: return "joint-solidify";
  }
  return "?";
}

inline SweepMode parse_mode(const std::string& s) {
  for (SweepMode m : {SweepMode::IncompSolid, SweepMode::IncompFluid, SweepMode::IncompBoth,
                      SweepMode::Solidify, SweepMode::JointSolidify})
    if (mode_name(m) == s) return m;
  throw ConfigError("sweep.mode: unknown mode '" + s + "'");
}

struct SweepPlan {
  SweepMode mode = SweepMode::IncompBoth;
  /// Values of the growing coefficient(s); ε = 1/α.
  std::vector<double> alphas{1e2, 1e3, 1e4, 1e5};
  DimensionlessParams params;
  int dim = 1;
  int n = 8;
  Layout layout = SolidSlab{4};
  ForcingSpec forcing;
  InitialData initial;
  double dt = 0.01;
  double T = 1.0;
  /// Fixed ratios α_p/α_λ and α_η/α_λ for JointSolidify.
  double alpha_p0 = 1.0;
  double alpha_eta0 = 1.0;
  PressureGauge gauge = PressureGauge::VolumeCompatible;
  /// 0 = use THERMOFSI_THREADS or the hardware concurrency.
  unsigned threads = 0;
};

/// Parameters of Model A at one ladder point.
inline DimensionlessParams ladder_params(const SweepPlan& plan, double alpha) {
  DimensionlessParams d = plan.params;
  switch (plan.mode) {
    case SweepMode::IncompSolid: d.alpha_eta = alpha; break;
    case SweepMode::IncompFluid: d.alpha_p = alpha; break;
    case SweepMode::IncompBoth: d.alpha_p = d.alpha_eta = alpha; break;
    case SweepMode::Solidify: d.alpha_lambda = alpha; break;
    case SweepMode::JointSolidify:
      d.alpha_lambda = alpha;
      d.alpha_p = plan.alpha_p0 * alpha;
      d.alpha_eta = plan.alpha_eta0 * alpha;
      break;
  }
  return d;
}

struct SweepPoint {
  double alpha = 0;
  double epsilon = 0;
  DimensionlessParams params;
  double C_en_T = 0;
  // maxima over frames of squared constraint norms
  double fluid_div_sq = 0, solid_div_sq = 0, solid_strain_sq = 0, solid_w_sq = 0;
  // L²(Q) norms
  double L2Q_p = 0, L2Q_q = 0, L2Q_pi = 0, L2Q_q_minus_p = 0;
  double L2Q_q_tilde = 0, L2Q_pi_tilde = 0;
  double identity_residual = 0;
  BoundCheck fluid_rate, solid_rate;
  // comparison with the direct solidified solution (JointSolidify only)
  double c2_u_error = 0, c2_theta_error = 0, c2_p_error = 0;
  // stored for Cauchy gaps
  std::vector<Vec> a, b;
  std::vector<Vec> p_cells;
};

struct LimitReport {
  SweepMode mode = SweepMode::IncompBoth;
  std::vector<SweepPoint> points;
  /// Successive-point gaps in L²(Q): entry i compares points i and i+1.
  std::vector<double> gap_w, gap_theta, gap_p, gap_scaled_w;
  double slope_fluid_div = 0, slope_solid_div = 0, slope_solid_strain = 0;
  double c2_residual = 0;
};

inline unsigned sweep_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("THERMOFSI_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? hc : 1;
}

inline void check_plan(const SweepPlan& plan, const MediumGeometry& g) {
  if (plan.alphas.size() < 2) throw ConfigError("sweep: ladder needs at least 2 points");
  for (double a : plan.alphas)
    if (!(a > 0)) throw ConfigError("sweep: ladder values must be positive");
  const bool solidify = plan.mode == SweepMode::Solidify || plan.mode == SweepMode::JointSolidify;
  // a nonzero initial displacement makes the energy bound grow with the ladder
  if (solidify && !plan.initial.homogeneous())
    throw ConfigError("sweep: solidification modes need homogeneous initial data");
  if (plan.initial.kind == InitialData::Kind::Custom ||
      (plan.initial.kind == InitialData::Kind::Bump && plan.initial.w_amp != 0.0))
    throw ConfigError("sweep: initial displacement must vanish (initial.w_amp = 0)");
  if (solidify && !g.solid_supports_rigidity())
    throw ConfigError(
        "sweep: solidification modes need a connected solid touching the outer boundary "
        "(rigidity assumption)");
  if (plan.mode == SweepMode::JointSolidify && !plan.forcing.body.is_potential())
    throw ConfigError("sweep: joint-solidify requires a potential body force");
}

namespace detail {

inline SweepPoint run_point(const SweepPlan& plan, const PhaseOperators& ops, const Basis& basis,
                            double alpha, const C2Solution* c2) {
  const MediumGeometry& g = basis.geometry();
  SweepPoint pt;
  pt.alpha = alpha;
  pt.epsilon = 1.0 / alpha;
  pt.params = ladder_params(plan, alpha);
  const DimensionlessParams& d = pt.params;
  const AssembledSystem sys = assemble_from(ops, d);
  const LoadBuilder lb(basis, d, plan.forcing);
  const State init = project_initial(plan.initial, sys, basis);
  const Trajectory tr = integrate(init, sys, lb.function(), plan.dt, plan.T);
  const EnergyReport rep = energy_audit(tr, sys);
  pt.identity_residual = rep.max_residual();
  pt.C_en_T = energy_constant(rep, forcing_density(lb, d)).back();

  for (const State& s : tr.frames) {
    pt.fluid_div_sq = std::max(pt.fluid_div_sq, s.a.dot(sys.div_fluid * s.a));
    pt.solid_div_sq = std::max(pt.solid_div_sq, s.a.dot(sys.div_solid * s.a));
    pt.solid_strain_sq = std::max(pt.solid_strain_sq, s.a.dot(sys.strain_solid * s.a));
    pt.solid_w_sq = std::max(pt.solid_w_sq, s.a.dot(sys.mass_w_solid * s.a));
    pt.a.push_back(s.a);
    pt.b.push_back(s.b);
  }
  pt.fluid_rate = make_check("fluid_div_rate", pt.fluid_div_sq, 2 * pt.C_en_T / d.alpha_p);
  pt.solid_rate = make_check("solid_div_rate", pt.solid_div_sq, 2 * pt.C_en_T / d.alpha_eta);

  const PressureFields pf = reconstruct(tr, sys, g, d);
  const PressureFields pn = normalize(pf, g);
  pt.L2Q_p = cell_l2_q(pf.p, g, plan.dt);
  pt.L2Q_q = cell_l2_q(pf.q, g, plan.dt);
  pt.L2Q_pi = cell_l2_q(pf.pi, g, plan.dt);
  std::vector<Vec> qmp;
  for (std::size_t k = 0; k < pf.frames(); ++k) qmp.push_back(pf.q[k] - pf.p[k]);
  pt.L2Q_q_minus_p = cell_l2_q(qmp, g, plan.dt);
  pt.L2Q_q_tilde = cell_l2_q(pn.q, g, plan.dt);
  pt.L2Q_pi_tilde = cell_l2_q(pn.pi, g, plan.dt);
  pt.p_cells = pf.p;

  if (c2 != nullptr) {
    // midpoint states against the solidified solution at the same instants
    double su = 0, st = 0, sp = 0;
    for (std::size_t k = 0; k + 1 < tr.frames.size(); ++k) {
      const Vec ah = 0.5 * (tr.frames[k].a + tr.frames[k + 1].a);
      const Vec eu = d.alpha_lambda * ah - c2->u[k];
      su += eu.dot(sys.mass_w_solid * eu);
      const Vec et = 0.5 * (tr.frames[k].b + tr.frames[k + 1].b) -
                     0.5 * (c2->theta[k] + c2->theta[k + 1]);
      st += et.dot(sys.mass_theta * et);
      const Vec ep = 0.5 * (pf.p[k] + pf.p[k + 1]) - c2->p[k];
      sp += ep.squaredNorm() * g.cell_volume();
    }
    const double dt = std::abs(plan.dt);
    pt.c2_u_error = std::sqrt(su * dt);
    pt.c2_theta_error = std::sqrt(st * dt);
    pt.c2_p_error = std::sqrt(sp * dt);
  }
  return pt;
}

}  // namespace detail

inline LimitReport run_sweep(const SweepPlan& plan) {
  const MediumGeometry g = build_geometry(plan.dim, plan.n, plan.layout);
  check_plan(plan, g);
  const Basis basis(g);
  const PhaseOperators ops = phase_operators(basis);

  C2Solution c2;
  const bool joint = plan.mode == SweepMode::JointSolidify;
  if (joint) {
    const AssembledSystem sys0 = assemble_from(ops, plan.params);
    C2Options opt;
    opt.alpha_eta0 = plan.alpha_eta0;
    opt.alpha_p0 = plan.alpha_p0;
    opt.gauge = plan.gauge;
    opt.midpoints = true;
    c2 = solve_c2(basis, sys0, plan.params, plan.forcing, plan.dt, plan.T, opt);
  }

  LimitReport rep;
  rep.mode = plan.mode;
  rep.c2_residual = c2.max_residual;
  rep.points.resize(plan.alphas.size());
  const unsigned threads = sweep_threads(plan.threads);
  for (std::size_t start = 0; start < plan.alphas.size(); start += threads) {
    std::vector<std::future<SweepPoint>> jobs;
    const std::size_t stop = std::min(plan.alphas.size(), start + threads);
    for (std::size_t i = start; i < stop; ++i)
      jobs.push_back(std::async(std::launch::async, detail::run_point, std::cref(plan),
                                std::cref(ops), std::cref(basis), plan.alphas[i],
                                joint ? &c2 : nullptr));
    for (std::size_t i = start; i < stop; ++i) rep.points[i] = jobs[i - start].get();
  }

  const AssembledSystem norms = assemble_from(ops, plan.params);
  for (std::size_t i = 0; i + 1 < rep.points.size(); ++i) {
    const SweepPoint& x = rep.points[i];
    const SweepPoint& y = rep.points[i + 1];
    std::vector<Vec> dw, db, dsw;
    for (std::size_t k = 0; k < x.a.size(); ++k) {
      dw.push_back(x.a[k] - y.a[k]);
      db.push_back(x.b[k] - y.b[k]);
      dsw.push_back(x.params.alpha_lambda * x.a[k] - y.params.alpha_lambda * y.a[k]);
    }
    std::vector<Vec> dp;
    for (std::size_t k = 0; k < x.p_cells.size(); ++k) dp.push_back(x.p_cells[k] - y.p_cells[k]);
    rep.gap_w.push_back(l2q_norm(dw, norms.mass_w, plan.dt));
    rep.gap_theta.push_back(l2q_norm(db, norms.mass_theta, plan.dt));
    rep.gap_scaled_w.push_back(l2q_norm(dsw, norms.mass_w_solid, plan.dt));
    rep.gap_p.push_back(cell_l2_q(dp, g, plan.dt));
  }

  std::vector<double> ap, ae, al, fd, sd, ss;
  for (const SweepPoint& p : rep.points) {
    ap.push_back(p.params.alpha_p);
    ae.push_back(p.params.alpha_eta);
    al.push_back(p.params.alpha_lambda);
    fd.push_back(p.fluid_div_sq);
    sd.push_back(p.solid_div_sq);
    ss.push_back(p.solid_strain_sq);
  }
  rep.slope_fluid_div = loglog_slope(ap, fd);
  rep.slope_solid_div = loglog_slope(ae, sd);
  rep.slope_solid_strain = loglog_slope(al, ss);
  return rep;
}

/// Release the stored per-frame vectors once gaps are computed.
inline void drop_fields(LimitReport& rep) {
  for (SweepPoint& p : rep.points) {
    p.a.clear();
    p.b.clear();
    p.p_cells.clear();
  }
}

inline bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    if (!(v[i + 1] < v[i])) return false;
  return true;
}

/// ‖q − p‖_{L²(Q)} must decrease strictly along the ladder (or vanish).
inline BoundCheck check_q_equals_p_limit(const LimitReport& rep) {
  if (rep.mode != SweepMode::IncompFluid && rep.mode != SweepMode::IncompBoth)
    throw ConfigError("q=p check needs an incomp-fluid or incomp-both sweep");
  if (rep.points.size() < 2) throw ConfigError("q=p check needs at least 2 ladder points");
  std::vector<double> v;
  for (const auto& p : rep.points) v.push_back(p.L2Q_q_minus_p);
  BoundCheck b;
  b.name = "q_equals_p";
  const bool all_zero = std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
  double worst = 0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    if (v[i] > 0) worst = std::max(worst, v[i + 1] / v[i]);
  b.lhs = all_zero ? 0.0 : worst;
  b.rhs = 1.0;
  b.margin = b.rhs - b.lhs;
  b.satisfied = all_zero || strictly_decreasing(v);
  return b;
}

/// Normalized pressures stay bounded: max/min of ‖q̃‖² + ‖π̃‖² over the ladder.
inline BoundCheck check_pressure_boundedness(const LimitReport& rep, double factor = 10.0) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0;
  for (const auto& p : rep.points) {
    const double v = p.L2Q_q_tilde * p.L2Q_q_tilde + p.L2Q_pi_tilde * p.L2Q_pi_tilde;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi == 0) return make_check("pressure_bounded", 0, factor);
  return make_check("pressure_bounded", lo > 0 ? hi / lo : std::numeric_limits<double>::infinity(),
                    factor);
}

}  // namespace thermofsi
