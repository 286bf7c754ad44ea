#pragma once

#include <cmath>
#include <vector>

#include "thermofsi/assembly.hpp"
#include "thermofsi/integrator.hpp"

namespace thermofsi {

/// Per-cell pressure fields, one vector per trajectory frame.
struct PressureFields {
  std::vector<Vec> p, dp_dt, q, pi;
  /// α_ν/α_p, needed to rebuild q from p and ∂p/∂t.
  double q_ratio = 0;
  bool normalized = false;

  std::size_t frames() const { return p.size(); }
};

/// p = −χ̄α_p div w, ∂p/∂t = −χ̄α_p div ∂w/∂t, q = p + (α_ν/α_p)∂p/∂t,
/// π = −(1−χ̄)α_η div w, with div averaged per cell.
inline PressureFields reconstruct(const Trajectory& traj, const AssembledSystem& sys,
                                  const MediumGeometry& g, const DimensionlessParams& d) {
  PressureFields f;
  f.q_ratio = d.alpha_nu / d.alpha_p;
  const auto m = static_cast<Eigen::Index>(g.num_cells());
  Vec fluid(m), solid(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    fluid[k] = g.is_fluid(k) ? 1.0 : 0.0;
    solid[k] = 1.0 - fluid[k];
  }
  for (const State& s : traj.frames) {
    const Vec divw = sys.cell_div * s.a;
    const Vec divc = sys.cell_div * s.c;
    Vec p = -d.alpha_p * fluid.cwiseProduct(divw);
    Vec dp = -d.alpha_p * fluid.cwiseProduct(divc);
    f.q.push_back(p + f.q_ratio * dp);
    f.pi.push_back(-d.alpha_eta * solid.cwiseProduct(divw));
    f.p.push_back(std::move(p));
    f.dp_dt.push_back(std::move(dp));
  }
  return f;
}

/// Subtracts the phase mean of `v` over the cells where `in_phase` holds.
inline Vec remove_phase_mean(const Vec& v, const MediumGeometry& g, bool fluid_phase) {
  double sum = 0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < g.num_cells(); ++k)
    if (g.is_fluid(k) == fluid_phase) {
      sum += v[static_cast<Eigen::Index>(k)];
      ++count;
    }
  if (count == 0) throw ConfigError("pressures: phase with zero measure");
  const double mean = sum / static_cast<double>(count);
  Vec out = v;
  for (std::size_t k = 0; k < g.num_cells(); ++k)
    if (g.is_fluid(k) == fluid_phase) out[static_cast<Eigen::Index>(k)] -= mean;
  return out;
}

/// Normalized pressures p̃, π̃ (phase means removed) and q̃ = p̃ + (α_ν/α_p)∂p̃/∂t.
inline PressureFields normalize(const PressureFields& in, const MediumGeometry& g) {
  PressureFields out;
  out.q_ratio = in.q_ratio;
  out.normalized = true;
  for (std::size_t i = 0; i < in.frames(); ++i) {
    Vec p = remove_phase_mean(in.p[i], g, true);
    Vec dp = remove_phase_mean(in.dp_dt[i], g, true);
    out.q.push_back(p + in.q_ratio * dp);
    out.pi.push_back(remove_phase_mean(in.pi[i], g, false));
    out.p.push_back(std::move(p));
    out.dp_dt.push_back(std::move(dp));
  }
  return out;
}

/// ∫_Ω f for a per-cell field.
inline double cell_integral(const Vec& f, const MediumGeometry& g) {
  return f.sum() * g.cell_volume();
}

/// ‖f‖_{L²(Ω)} for a per-cell field.
inline double cell_l2(const Vec& f, const MediumGeometry& g) {
  return std::sqrt(f.squaredNorm() * g.cell_volume());
}

/// ‖f‖_{L²(Q)} from frames, midpoint rule in time.
inline double cell_l2_q(const std::vector<Vec>& f, const MediumGeometry& g, double dt) {
  double s = 0;
  for (std::size_t k = 0; k + 1 < f.size(); ++k)
    s += 0.25 * (f[k] + f[k + 1]).squaredNorm() * g.cell_volume();
  return std::sqrt(s * std::abs(dt));
}

}  // namespace thermofsi
