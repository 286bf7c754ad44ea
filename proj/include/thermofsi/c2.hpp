#pragma once

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <cmath>
#include <vector>

#include "thermofsi/assembly.hpp"
#include "thermofsi/diagnostics.hpp"
#include "thermofsi/forcing.hpp"
#include "thermofsi/integrator.hpp"
#include "thermofsi/loads.hpp"

namespace thermofsi {

/// How the additive constant of the hydrostatic fluid pressure is fixed.
enum class PressureGauge {
  /// p = −α_θf θ + α_F ρ_f Φ with no constant.
  Literal,
  /// Constant chosen so that ∫_Ω_f p = α_p⁰ ∫_Ω_s div u, the balance every
  /// member of the solidifying family satisfies.
  VolumeCompatible,
};

struct C2Options {
  double alpha_eta0 = 1.0;
  double alpha_p0 = 1.0;
  PressureGauge gauge = PressureGauge::VolumeCompatible;
  /// Evaluate u at step midpoints (θ averaged over the step, Φ at t + dt/2)
  /// instead of at the frames.
  bool midpoints = false;
  int qpoints = 3;
};

struct C2Solution {
  double dt = 0;
  /// Temperature coefficients at the frames.
  std::vector<Vec> theta;
  /// Displacement coefficients (zero on dofs away from the solid), one per
  /// frame or per step midpoint.
  std::vector<Vec> u;
  /// Cell means of the fluid pressure (zero on solid cells), aligned with u.
  std::vector<Vec> p;
  /// Additive pressure constants, aligned with u.
  std::vector<double> gauge;
  /// Largest weak-form residual over all displacement basis functions,
  /// relative to the load scale.
  double max_residual = 0;
};

namespace detail {

/// Right-hand side pieces of the stationary solid problem at one instant.
struct C2Load {
  Vec r0;           // ∫ (χ̄ p_hyd + ᾱ_θ θ) div φ + α_F ρ̄ ∇Φ·φ
  Vec r1;           // ∫ χ̄ div φ (response to a unit pressure constant)
  double p_hyd_int = 0;  // ∫_Ω_f p_hyd
  Vec p_hyd_cells;  // cell means of p_hyd on fluid cells
};

inline C2Load c2_load(const Basis& basis, const DimensionlessParams& d, const ForcingSpec& f,
                      const Vec& b, double t, int qpoints) {
  const MediumGeometry& g = basis.geometry();
  const int dim = g.dim();
  const CellQuadrature q = cell_quadrature(dim, g.h(), qpoints);
  const ShapeQ1 shape{dim, g.h()};
  const int nc = shape.corners();
  C2Load L;
  L.r0 = Vec::Zero(static_cast<Eigen::Index>(basis.n_w()));
  L.r1 = Vec::Zero(static_cast<Eigen::Index>(basis.n_w()));
  L.p_hyd_cells = Vec::Zero(static_cast<Eigen::Index>(g.num_cells()));
  std::vector<long> idx(nc);
  for (std::size_t cell = 0; cell < g.num_cells(); ++cell) {
    const bool fluid = g.is_fluid(cell);
    const double rho = fluid ? d.rho_f : d.rho_s;
    const double at = fluid ? d.alpha_theta_f : d.alpha_theta_s;
    const Point o = g.cell_origin(cell);
    const auto nodes = g.cell_nodes(cell);
    for (int k = 0; k < nc; ++k) idx[k] = basis.interior_index(nodes[k]);
    double p_int = 0;
    for (std::size_t qi = 0; qi < q.weights.size(); ++qi) {
      const Point& lx = q.offsets[qi];
      const Point x{o[0] + lx[0], o[1] + lx[1], o[2] + lx[2]};
      const double w = q.weights[qi];
      double theta = 0;
      for (int k = 0; k < nc; ++k)
        if (idx[k] >= 0) theta += shape.value(k, lx) * b[idx[k]];
      const Point F = f.body.value(x, t, dim);
      double s = at * theta;
      if (fluid) {
        const double p = -d.alpha_theta_f * theta + d.alpha_F * d.rho_f * f.body.potential(x, t, dim);
        s += p;
        p_int += w * p;
      }
      for (int k = 0; k < nc; ++k) {
        if (idx[k] < 0) continue;
        const double N = shape.value(k, lx);
        const auto G = shape.gradient(k, lx);
        for (int a = 0; a < dim; ++a) {
          const Eigen::Index j = idx[k] * dim + a;
          L.r0[j] += w * (s * G[a] + d.alpha_F * rho * F[a] * N);
          if (fluid) L.r1[j] += w * G[a];
        }
      }
    }
    if (fluid) {
      L.p_hyd_int += p_int;
      L.p_hyd_cells[static_cast<Eigen::Index>(cell)] = p_int / g.cell_volume();
    }
  }
  return L;
}

}  // namespace detail

/// Direct solver for the solidified limit: heat equation, hydrostatic fluid
/// pressure, then a stationary elasticity problem on the solid per instant.
inline C2Solution solve_c2(const Basis& basis, const AssembledSystem& sys,
                           const DimensionlessParams& d, const ForcingSpec& f, double dt, double T,
                           const C2Options& opt = {}) {
  const MediumGeometry& g = basis.geometry();
  if (!g.solid_supports_rigidity())
    throw ConfigError(
        "c2: solid phase must be connected and touch the outer boundary (rigidity assumption)");
  if (!f.body.is_potential()) throw ConfigError("c2: body force must be a gradient of a potential");
  if (!(opt.alpha_eta0 > 0) || !(opt.alpha_p0 > 0))
    throw ConfigError("c2: alpha_eta0 and alpha_p0 must be positive");

  C2Solution sol;
  sol.dt = dt;
  const std::size_t K = step_count(T, dt);

  // heat equation: (B/dt + B1/2) b⁺ = (B/dt − B1/2) b + Ψ̃(t½)
  ForcingSpec heat_only;
  heat_only.heat = f.heat;
  const LoadBuilder lb(basis, d, heat_only);
  const SpMat L = (1.0 / dt) * sys.B + 0.5 * sys.B1;
  const SpMat R = (1.0 / dt) * sys.B - 0.5 * sys.B1;
  Eigen::SparseLU<SpMat> heat;
  heat.compute(L);
  if (heat.info() != Eigen::Success) throw SolverError("c2: heat system factorization failed");
  sol.theta.push_back(Vec::Zero(static_cast<Eigen::Index>(basis.n_theta())));
  for (std::size_t k = 0; k < K; ++k) {
    const double th = (static_cast<double>(k) + 0.5) * dt;
    const Vec rhs = R * sol.theta.back() + lb.loads(th).second;
    sol.theta.push_back(heat.solve(rhs));
  }

  // stationary solid problem on dofs touching the solid
  const SpMat Kfull = opt.alpha_eta0 * sys.div_solid + sys.strain_solid;
  const auto dofs = solid_dofs(basis);
  SpMat P(static_cast<Eigen::Index>(basis.n_w()), static_cast<Eigen::Index>(dofs.size()));
  {
    std::vector<Eigen::Triplet<double>> t;
    for (std::size_t i = 0; i < dofs.size(); ++i) t.emplace_back(dofs[i], static_cast<Eigen::Index>(i), 1.0);
    P.setFromTriplets(t.begin(), t.end());
  }
  const SpMat Ks = SpMat(P.transpose()) * Kfull * P;
  Eigen::SimplicialLDLT<SpMat> elastic(Ks);
  if (elastic.info() != Eigen::Success) throw SolverError("c2: solid stiffness is singular");
  Eigen::VectorXd sol_div(static_cast<Eigen::Index>(basis.n_w()));
  // ∫_Ω_s div φ_j, assembled from the per-cell mean divergence
  {
    Vec solid_vol = Vec::Zero(static_cast<Eigen::Index>(g.num_cells()));
    for (std::size_t c = 0; c < g.num_cells(); ++c)
      if (!g.is_fluid(c)) solid_vol[static_cast<Eigen::Index>(c)] = g.cell_volume();
    sol_div = sys.cell_div.transpose() * solid_vol;
  }

  const std::size_t count = opt.midpoints ? K : K + 1;
  for (std::size_t k = 0; k < count; ++k) {
    const double t = opt.midpoints ? (static_cast<double>(k) + 0.5) * dt : static_cast<double>(k) * dt;
    const Vec b = opt.midpoints ? Vec(0.5 * (sol.theta[k] + sol.theta[k + 1])) : sol.theta[k];
    const detail::C2Load ld = detail::c2_load(basis, d, f, b, t, opt.qpoints);
    const Vec u0 = P * elastic.solve(SpMat(P.transpose()) * ld.r0);
    double c = 0;
    Vec u = u0;
    if (opt.gauge == PressureGauge::VolumeCompatible) {
      const Vec u1 = P * elastic.solve(SpMat(P.transpose()) * ld.r1);
      const double den = g.fluid_measure() - opt.alpha_p0 * sol_div.dot(u1);
      c = (opt.alpha_p0 * sol_div.dot(u0) - ld.p_hyd_int) / den;
      u = u0 + c * u1;
    }
    const Vec r = ld.r0 + c * ld.r1;
    const double scale = std::max({r.cwiseAbs().maxCoeff(), (Kfull * u).cwiseAbs().maxCoeff(), 1e-300});
    const double res = (r - Kfull * u).cwiseAbs().maxCoeff();
    if (r.cwiseAbs().maxCoeff() > 0) sol.max_residual = std::max(sol.max_residual, res / scale);

    Vec p = ld.p_hyd_cells;
    for (std::size_t cell = 0; cell < g.num_cells(); ++cell)
      if (g.is_fluid(cell)) p[static_cast<Eigen::Index>(cell)] += c;
    sol.u.push_back(std::move(u));
    sol.p.push_back(std::move(p));
    sol.gauge.push_back(c);
  }
  return sol;
}

}  // namespace thermofsi
