#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "thermofsi/assembly.hpp"
#include "thermofsi/diagnostics.hpp"
#include "thermofsi/integrator.hpp"
#include "thermofsi/loads.hpp"
#include "thermofsi/pressures.hpp"

namespace thermofsi {

/// One randomly drawn problem of the invariant battery.
struct BatteryCase {
  DimensionlessParams params;
  int dim = 1;
  int n = 4;
  Layout layout = SolidSlab{2};
  ForcingSpec forcing;
  InitialData initial;
  double dt = 0.02;
  double T = 0.4;
};

struct BatteryResult {
  BatteryCase input;
  double identity_residual = 0;
  EstimateCheck estimate;
  /// frames where the sum of separate maxima exceeds C_en (diagnostic only)
  int componentwise_exceedances = 0;
  double coupling_defect = 0;
  /// max over frames and fields of |∫ f̃| / max(‖f̃‖, tiny)
  double pressure_mean_ratio = 0;
};

/// Draws a valid case: log-uniform coefficients in [0.1, 10], dim ∈ {1,2},
/// n ∈ {4,8}, slab or inclusion layouts, mixed forcing and initial data.
inline BatteryCase draw_case(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  auto logu = [&](double lo, double hi) { return lo * std::pow(hi / lo, u01(rng)); };
  auto pick = [&](int k) { return static_cast<int>(rng() % static_cast<std::uint64_t>(k)); };
  BatteryCase c;
  DimensionlessParams& d = c.params;
  for (double* f : {&d.alpha_tau, &d.alpha_F, &d.alpha_nu, &d.alpha_eta, &d.alpha_lambda, &d.alpha_p,
                    &d.alpha_mu, &d.alpha_theta_s, &d.alpha_theta_f, &d.c_pf, &d.c_ps, &d.rho_s, &d.rho_f,
                    &d.kappa_s, &d.kappa_f})
    *f = logu(0.1, 10.0);
  c.dim = 1 + pick(2);
  c.n = pick(2) == 0 ? 4 : 8;
  if (c.dim == 2 && pick(3) == 0) {
    const int lo = 1, hi = c.n - 1 - (c.n == 8 ? pick(3) : 0);
    c.layout = FluidInclusion{CellBox{{lo, lo, 0}, {hi, hi, 0}}};
  } else {
    c.layout = SolidSlab{1 + pick(c.n - 1)};
  }
  switch (pick(3)) {
    case 0: c.forcing.body.kind = BodyForce::Kind::Zero; break;
    case 1: c.forcing.body.kind = BodyForce::Kind::Gravity; break;
    default: c.forcing.body.kind = BodyForce::Kind::Swirl; break;
  }
  c.forcing.body.g = (pick(2) ? 1.0 : -1.0) * logu(0.3, 3.0);
  const Envelope envs[3] = {{Envelope::Kind::Constant, 1.0}, {Envelope::Kind::Ramp, 0.2},
                            {Envelope::Kind::Sine, 1.5}};
  c.forcing.body.envelope = envs[pick(3)];
  if (pick(2)) {
    c.forcing.heat.kind = HeatSource::Kind::Bump;
    c.forcing.heat.center = {0.3 + 0.4 * u01(rng), 0.3 + 0.4 * u01(rng), 0.5};
    c.forcing.heat.width = 0.15 + 0.2 * u01(rng);
    c.forcing.heat.amplitude = logu(0.3, 3.0);
    c.forcing.heat.envelope = envs[pick(3)];
  }
  if (pick(2)) {
    c.initial.kind = InitialData::Kind::Bump;
    c.initial.w_amp = 0.2 * (u01(rng) - 0.5);
    c.initial.v_amp = u01(rng) - 0.5;
    c.initial.theta_amp = u01(rng) - 0.5;
  }
  const double dts[3] = {0.01, 0.02, 0.05};
  c.dt = dts[pick(3)];
  c.T = c.dt * static_cast<double>(10 + pick(31));
  return c;
}

inline BatteryResult run_case(const BatteryCase& c) {
  BatteryResult r;
  r.input = c;
  const MediumGeometry g = build_geometry(c.dim, c.n, c.layout);
  const Basis basis(g);
  const AssembledSystem sys = assemble(basis, c.params);
  r.coupling_defect = max_abs(SpMat(sys.B2 - SpMat(sys.A3.transpose())));
  const LoadBuilder lb(basis, c.params, c.forcing);
  const State init = project_initial(c.initial, sys, basis);
  const Trajectory tr = integrate(init, sys, lb.function(), c.dt, c.T);
  const EnergyReport rep = energy_audit(tr, sys);
  r.identity_residual = rep.max_residual();
  const ForcingDensity gd = forcing_density(lb, c.params);
  r.estimate = check_energy_estimate(rep, gd);
  r.componentwise_exceedances = compare_series("componentwise", componentwise_lhs(rep), energy_constant(rep, gd)).violations;
  const PressureFields pn = normalize(reconstruct(tr, sys, g, c.params), g);
  for (std::size_t k = 0; k < pn.frames(); ++k)
    for (const Vec* f : {&pn.p[k], &pn.q[k], &pn.pi[k]}) {
      const double norm = cell_l2(*f, g);
      const double mean = std::abs(cell_integral(*f, g));
      if (norm > 0) r.pressure_mean_ratio = std::max(r.pressure_mean_ratio, mean / norm);
      else if (mean > 0) r.pressure_mean_ratio = std::max(r.pressure_mean_ratio, mean / 1e-300);
    }
  return r;
}

inline std::vector<BatteryResult> run_battery(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::vector<BatteryResult> out;
  for (int i = 0; i < count; ++i) out.push_back(run_case(draw_case(rng)));
  return out;
}

}  // namespace thermofsi
