// Acceptance run: one PASS/FAIL line per headline criterion.
#include <unsupported/Eigen/MatrixFunctions>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "thermofsi/battery.hpp"
#include "thermofsi/limits.hpp"

using namespace thermofsi;

namespace {

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

constexpr std::uint64_t kBatterySeed = 20240521;
constexpr int kBatterySize = 60;

void battery_criteria() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto results = run_battery(kBatterySeed, kBatterySize);
  const double secs = seconds_since(t0);

  double worst_res = 0, worst_ratio = 0, worst_defect = 0, worst_est = 0;
  std::size_t violations = 0;
  int componentwise = 0;
  for (const auto& r : results) {
    worst_res = std::max(worst_res, r.identity_residual);
    worst_ratio = std::max(worst_ratio, r.pressure_mean_ratio);
    worst_defect = std::max(worst_defect, r.coupling_defect);
    violations += r.estimate.violations;
    if (r.componentwise_exceedances > 0) ++componentwise;
    if (r.estimate.worst.rhs > 0) worst_est = std::max(worst_est, r.estimate.worst.lhs / r.estimate.worst.rhs);
  }
  const std::string n = std::to_string(results.size());
  report(worst_res <= 1e-8 && secs <= 300.0, "energy-identity",
         n + " random configurations, max relative residual " + fmt("%.3e", worst_res) + ", " +
             fmt("%.1f", secs) + " s (limits 1e-8, 300 s)");
  report(violations == 0, "energy-estimate",
         n + " configurations, " + std::to_string(violations) + " violating frames, max lhs/C_en " +
             fmt("%.4f", worst_est) + " (separate-maxima form exceeds C_en in " +
             std::to_string(componentwise) + " cases)");
  report(worst_ratio <= 1e-12, "normalized-pressure-means",
         "max |mean|/norm over all frames " + fmt("%.3e", worst_ratio) + " (limit 1e-12)");
  report(worst_defect <= 1e-12, "coupling-cancellation",
         "max |B2 - A3^T| " + fmt("%.3e", worst_defect) + " over " + n + " draws (limit 1e-12)");
}

void triviality() {
  double worst = 0;
  const DimensionlessParams d;
  const std::vector<std::pair<int, Layout>> cases = {
      {1, SolidSlab{4}}, {2, SolidSlab{3}}, {2, FluidInclusion{CellBox{{2, 2, 0}, {6, 6, 0}}}}, {3, SolidSlab{4}}};
  for (const auto& [dim, layout] : cases) {
    const int n = dim == 3 ? 4 : 8;
    const Layout lay = dim == 3 ? Layout{SolidSlab{2}} : layout;
    const MediumGeometry g = build_geometry(dim, n, lay);
    const Basis basis(g);
    const AssembledSystem sys = assemble(basis, d);
    const LoadBuilder lb(basis, d, ForcingSpec{});
    const Trajectory tr = integrate(project_initial(InitialData{}, sys, basis), sys, lb.function(), 0.05, 1.0);
    for (const State& s : tr.frames) worst = std::max(worst, s.max_abs());
  }
  report(worst <= 1e-12, "zero-data-triviality",
         "max |state| over 4 geometries and all frames " + fmt("%.3e", worst) + " (limit 1e-12)");
}

SweepPlan incompressibility_plan(SweepMode mode) {
  SweepPlan p;
  p.mode = mode;
  p.dim = 1;
  p.n = 8;
  p.layout = SolidSlab{4};
  p.params.alpha_nu = 0.01;
  p.params.alpha_mu = 0.01;
  p.forcing.body.kind = BodyForce::Kind::Gravity;
  p.forcing.body.envelope = {Envelope::Kind::Ramp, 0.5};
  p.initial.kind = InitialData::Kind::Bump;
  p.initial.v_amp = 1.0;
  p.dt = 0.02;
  p.T = 1.0;
  return p;
}

void incompressibility() {
  const auto t0 = std::chrono::steady_clock::now();
  const LimitReport fluid = run_sweep(incompressibility_plan(SweepMode::IncompFluid));
  const LimitReport solid = run_sweep(incompressibility_plan(SweepMode::IncompSolid));
  const double secs = seconds_since(t0);
  const double sf = fluid.slope_fluid_div, ss = solid.slope_solid_div;
  const bool ok = sf >= -1.1 && sf <= -0.9 && ss >= -1.1 && ss <= -0.9 && secs <= 600.0;
  report(ok, "incompressibility-rates",
         "slope fluid div vs alpha_p " + fmt("%.4f", sf) + ", solid div vs alpha_eta " + fmt("%.4f", ss) +
             ", " + fmt("%.1f", secs) + " s (band [-1.1, -0.9])");
}

void solidification() {
  SweepPlan p;
  p.mode = SweepMode::Solidify;
  p.forcing.body.kind = BodyForce::Kind::Gravity;
  p.forcing.body.envelope = {Envelope::Kind::Ramp, 0.5};
  p.forcing.heat.kind = HeatSource::Kind::Bump;
  p.forcing.heat.center = {0.3, 0.5, 0.5};
  p.dt = 0.02;
  const LimitReport rep = run_sweep(p);
  report(rep.slope_solid_strain <= -0.9, "solidification-bound",
         "slope of max solid strain vs alpha_lambda " + fmt("%.4f", rep.slope_solid_strain) + " (limit -0.9)");
}

void c2_oracle() {
  SweepPlan p;
  p.mode = SweepMode::JointSolidify;
  p.forcing.body.kind = BodyForce::Kind::Gravity;
  p.forcing.body.envelope = {Envelope::Kind::Ramp, 0.5};
  p.forcing.heat.kind = HeatSource::Kind::Bump;
  p.forcing.heat.center = {0.3, 0.5, 0.5};
  p.forcing.heat.width = 0.2;
  p.dt = 0.02;
  const LimitReport rep = run_sweep(p);
  std::vector<double> eu, et;
  std::string detail = "u errors";
  for (const auto& pt : rep.points) eu.push_back(pt.c2_u_error);
  for (double e : eu) detail += " " + fmt("%.3e", e);
  detail += "; theta errors";
  for (const auto& pt : rep.points) et.push_back(pt.c2_theta_error);
  for (double e : et) detail += " " + fmt("%.3e", e);
  report(rep.points.size() >= 4 && strictly_decreasing(eu) && strictly_decreasing(et), "limit-oracle-agreement",
         detail);
}

double state_error(const AssembledSystem& s, const State& x, const State& y) {
  const Vec da = x.a - y.a, dc = x.c - y.c, db = x.b - y.b;
  return std::sqrt(da.dot(s.mass_w * da) + dc.dot(s.mass_w * dc) + db.dot(s.mass_theta * db));
}

void self_convergence() {
  struct Case {
    int dim;
    Layout layout;
    BodyForce::Kind body;
    bool heat, initial;
  };
  const std::vector<Case> cases = {
      {1, SolidSlab{4}, BodyForce::Kind::Gravity, true, true},
      {2, SolidSlab{4}, BodyForce::Kind::Swirl, false, true},
      {2, FluidInclusion{CellBox{{2, 2, 0}, {6, 6, 0}}}, BodyForce::Kind::Gravity, true, false}};
  const double D = 0.005, T = 0.5;
  bool ok = true;
  std::string detail = "ratios";
  for (const Case& c : cases) {
    const DimensionlessParams d;
    const MediumGeometry g = build_geometry(c.dim, 8, c.layout);
    const Basis basis(g);
    const AssembledSystem sys = assemble(basis, d);
    ForcingSpec f;
    f.body.kind = c.body;
    f.body.envelope = {Envelope::Kind::Sine, 1.0};
    if (c.heat) {
      f.heat.kind = HeatSource::Kind::Bump;
      f.heat.width = 0.25;
    }
    InitialData init;
    if (c.initial) {
      init.kind = InitialData::Kind::Bump;
      init.w_amp = 0.05;
      init.v_amp = 0.3;
      init.theta_amp = 0.2;
    }
    const LoadBuilder lb(basis, d, f);
    const State s0 = project_initial(init, sys, basis);
    const State coarse = integrate(s0, sys, lb.function(), D, T).back();
    const State fine = integrate(s0, sys, lb.function(), D / 2, T).back();
    const State ref = integrate(s0, sys, lb.function(), D / 8, T).back();
    const double ratio = state_error(sys, coarse, ref) / state_error(sys, fine, ref);
    ok = ok && ratio >= 3.5 && ratio <= 4.5;
    detail += " " + fmt("%.4f", ratio);
  }
  report(ok, "self-convergence", detail + " (band [3.5, 4.5])");
}

void matrix_exponential() {
  DimensionlessParams d;
  d.alpha_lambda = 2.0;
  d.kappa_s = 0.5;
  d.rho_s = 1.5;
  const MediumGeometry g = build_geometry(1, 2, SolidSlab{1});
  const Basis basis(g);
  const AssembledSystem sys = assemble(basis, d);
  ForcingSpec f;
  f.body.kind = BodyForce::Kind::Gravity;
  f.heat.kind = HeatSource::Kind::Bump;
  InitialData init;
  init.kind = InitialData::Kind::Bump;
  init.w_amp = 0.1;
  init.v_amp = 0.5;
  init.theta_amp = 0.3;
  const LoadBuilder lb(basis, d, f);
  const State s0 = project_initial(init, sys, basis);
  const double T = 0.1;
  const State cn = integrate(s0, sys, lb.function(), 1e-4, T).back();

  // z = (a, c, b, 1): z' = G z with constant loads folded into the last column
  const Eigen::MatrixXd A = sys.A, A1 = sys.A1, A2 = sys.A2, A3 = sys.A3, B = sys.B, B1 = sys.B1, B2 = sys.B2;
  const auto [F, P] = lb.loads(0.0);
  const Eigen::Index nw = A.rows(), nt = B.rows(), N = 2 * nw + nt + 1;
  const Eigen::MatrixXd Ai = A.inverse(), Bi = B.inverse();
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(N, N);
  G.block(0, nw, nw, nw).setIdentity();
  G.block(nw, 0, nw, nw) = -Ai * A2;
  G.block(nw, nw, nw, nw) = -Ai * A1;
  G.block(nw, 2 * nw, nw, nt) = Ai * A3.transpose();
  G.block(nw, N - 1, nw, 1) = Ai * F;
  G.block(2 * nw, nw, nt, nw) = -Bi * B2.transpose();
  G.block(2 * nw, 2 * nw, nt, nt) = -Bi * B1;
  G.block(2 * nw, N - 1, nt, 1) = Bi * P;
  Eigen::VectorXd z0(N);
  z0 << s0.a, s0.c, s0.b, 1.0;
  const Eigen::VectorXd zT = (G * T).exp() * z0;
  Eigen::VectorXd y(N - 1);
  y << cn.a, cn.c, cn.b;
  const double diff = (y - zT.head(N - 1)).cwiseAbs().maxCoeff();
  report(diff <= 1e-6, "matrix-exponential-oracle",
         "n=2, dim=1, T=0.1: max |CN - exp| " + fmt("%.3e", diff) + " (limit 1e-6)");
}

}  // namespace

int main() {
  battery_criteria();
  triviality();
  incompressibility();
  solidification();
  c2_oracle();
  self_convergence();
  matrix_exponential();
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
