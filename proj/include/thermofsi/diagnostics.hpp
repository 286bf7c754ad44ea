#pragma once

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "thermofsi/assembly.hpp"
#include "thermofsi/basis.hpp"
#include "thermofsi/forcing.hpp"
#include "thermofsi/integrator.hpp"
#include "thermofsi/loads.hpp"

namespace thermofsi {

/// Every term of the energy balance, one entry per trajectory frame.
/// Dissipations and work are cumulative midpoint sums.
struct EnergyReport {
  std::vector<double> t;
  std::vector<double> kinetic, solid_shear, solid_compress, fluid_compress, thermal;
  std::vector<double> diss_nu, diss_mu, diss_kappa, work, residual;

  std::size_t frames() const { return t.size(); }
  double energy(std::size_t k) const {
    return kinetic[k] + solid_shear[k] + solid_compress[k] + fluid_compress[k] + thermal[k];
  }
  double dissipation(std::size_t k) const { return diss_nu[k] + diss_mu[k] + diss_kappa[k]; }
  double max_residual() const {
    return residual.empty() ? 0.0 : *std::max_element(residual.begin(), residual.end());
  }
};

inline double quad_form(const SpMat& M, const Vec& x) { return x.dot(M * x); }

inline EnergyReport energy_audit(const Trajectory& traj, const AssembledSystem& sys) {
  EnergyReport r;
  const std::size_t n = traj.frames.size();
  for (auto* v : {&r.t, &r.kinetic, &r.solid_shear, &r.solid_compress, &r.fluid_compress,
                  &r.thermal, &r.diss_nu, &r.diss_mu, &r.diss_kappa, &r.work, &r.residual})
    v->assign(n, 0.0);
  double abs_work = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const State& s = traj.frames[k];
    r.t[k] = s.t;
    r.kinetic[k] = 0.5 * quad_form(sys.A, s.c);
    r.solid_shear[k] = 0.5 * quad_form(sys.A2_lambda, s.a);
    r.solid_compress[k] = 0.5 * quad_form(sys.A2_eta, s.a);
    r.fluid_compress[k] = 0.5 * quad_form(sys.A2_p, s.a);
    r.thermal[k] = 0.5 * quad_form(sys.B, s.b);
    if (k > 0) {
      const State& p = traj.frames[k - 1];
      const Vec ch = 0.5 * (s.c + p.c);
      const Vec bh = 0.5 * (s.b + p.b);
      const double dt = traj.dt;
      r.diss_nu[k] = r.diss_nu[k - 1] + dt * quad_form(sys.A1_nu, ch);
      r.diss_mu[k] = r.diss_mu[k - 1] + dt * quad_form(sys.A1_mu, ch);
      r.diss_kappa[k] = r.diss_kappa[k - 1] + dt * quad_form(sys.B1, bh);
      const double dw = dt * (ch.dot(traj.F_mid[k - 1]) + bh.dot(traj.Psi_mid[k - 1]));
      r.work[k] = r.work[k - 1] + dw;
      abs_work += std::abs(dw);
    }
    const double lhs = r.energy(k) + r.dissipation(k);
    const double rhs = r.energy(0) + r.work[k];
    const double scale = r.energy(k) + r.dissipation(k) + r.energy(0) + abs_work;
    r.residual[k] = scale > 0 ? std::abs(lhs - rhs) / scale : 0.0;
  }
  return r;
}

/// Outcome of comparing a computed left side against a data-driven bound.
struct BoundCheck {
  std::string name;
  double lhs = 0;
  double rhs = 0;
  double margin = 0;
  bool satisfied = true;
};

inline BoundCheck make_check(std::string name, double lhs, double rhs) {
  BoundCheck b;
  b.name = std::move(name);
  b.lhs = lhs;
  b.rhs = rhs;
  b.margin = rhs - lhs;
  const double tol = 1e-8 * std::max({std::abs(lhs), std::abs(rhs), 1.0});
  b.satisfied = b.margin >= -tol;
  return b;
}

struct EstimateCheck {
  std::vector<BoundCheck> per_frame;
  /// Frame with the largest lhs/rhs ratio (latest frame on ties).
  BoundCheck worst;
  std::size_t violations = 0;
  bool satisfied() const { return violations == 0; }
};

/// Pointwise-in-time forcing density g(s) entering the estimate constants.
using ForcingDensity = std::function<double(double)>;

/// g(s) = α_F²/(2α_τ)‖√ρ̄F(s)‖² + ‖Ψ(s)‖²/(2 min c_p); derivative = true
/// uses ∂F/∂t and ∂Ψ/∂t.
inline ForcingDensity forcing_density(const LoadBuilder& lb, const DimensionlessParams& d,
                                      bool derivative = false) {
  const double cf = d.alpha_F * d.alpha_F / (2 * d.alpha_tau);
  const double ch = 1.0 / (2 * d.min_c_p());
  auto self = std::make_shared<const LoadBuilder>(lb);
  return [self, cf, ch, derivative](double s) {
    return cf * self->force_norm_sq(s, derivative) + ch * self->heat_norm_sq(s, derivative);
  };
}

/// C(τ_k) = ∫_0^τ g(s)e^{τ−s}ds + (e^τ+1)·K0 + e^τ·E0 at every frame time,
/// with the time integral by 3-point Gauss per step.
inline std::vector<double> estimate_constant(const std::vector<double>& times,
                                             const ForcingDensity& g, double K0, double E0) {
  const GaussRule1D r = gauss_rule(3);
  std::vector<double> C(times.size(), 0.0);
  double I = 0;  // ∫_0^τ g(s) e^{−s} ds
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (k > 0) {
      const double t0 = times[k - 1], h = times[k] - times[k - 1];
      for (std::size_t q = 0; q < r.x.size(); ++q) {
        const double s = t0 + r.x[q] * h;
        I += r.w[q] * h * g(s) * std::exp(-s);
      }
    }
    const double e = std::exp(times[k]);
    C[k] = e * I + (e + 1.0) * K0 + e * E0;
  }
  return C;
}

/// C_en(τ) with the initial energies taken from the first frame of the audit.
inline std::vector<double> energy_constant(const EnergyReport& rep, const ForcingDensity& g) {
  if (rep.frames() == 0) return {};
  const double K0 = rep.kinetic[0] + rep.thermal[0];
  const double E0 = rep.solid_shear[0] + rep.solid_compress[0] + rep.fluid_compress[0];
  return estimate_constant(rep.t, g, K0, E0);
}

/// Running maximum of total energy plus cumulative dissipation; this is the
/// quantity the Gronwall argument bounds by C_en(τ).
inline std::vector<double> estimate_lhs(const EnergyReport& rep) {
  std::vector<double> out(rep.frames());
  double m = 0;
  for (std::size_t k = 0; k < rep.frames(); ++k) {
    m = std::max(m, rep.energy(k) + rep.dissipation(k));
    out[k] = m;
  }
  return out;
}

/// Sum of the separate running maxima of the five energies plus dissipations.
/// Reported only: it can exceed C_en(τ) when energy moves between components.
inline std::vector<double> componentwise_lhs(const EnergyReport& rep) {
  std::vector<double> out(rep.frames());
  double mk = 0, mt = 0, msc = 0, mfc = 0, mss = 0;
  for (std::size_t k = 0; k < rep.frames(); ++k) {
    mk = std::max(mk, rep.kinetic[k]);
    mt = std::max(mt, rep.thermal[k]);
    msc = std::max(msc, rep.solid_compress[k]);
    mfc = std::max(mfc, rep.fluid_compress[k]);
    mss = std::max(mss, rep.solid_shear[k]);
    out[k] = mk + mt + msc + mfc + mss + rep.dissipation(k);
  }
  return out;
}

inline EstimateCheck compare_series(const std::string& name, const std::vector<double>& lhs,
                                    const std::vector<double>& rhs) {
  EstimateCheck out;
  auto ratio = [](const BoundCheck& b) {
    if (b.rhs > 0) return b.lhs / b.rhs;
    return b.lhs > 0 ? std::numeric_limits<double>::infinity() : 0.0;
  };
  for (std::size_t k = 0; k < lhs.size(); ++k) {
    BoundCheck b = make_check(name + "@" + std::to_string(k), lhs[k], rhs[k]);
    if (!b.satisfied) ++out.violations;
    const bool worse = !b.satisfied ? (out.worst.satisfied || b.margin <= out.worst.margin)
                                    : (out.worst.satisfied && ratio(b) >= ratio(out.worst));
    if (k == 0 || worse) out.worst = b;
    out.per_frame.push_back(std::move(b));
  }
  out.worst.name = name;
  return out;
}

inline EstimateCheck check_energy_estimate(const EnergyReport& rep, const ForcingDensity& g) {
  return compare_series("energy_estimate", estimate_lhs(rep), energy_constant(rep, g));
}

/// Initial state of the time-derivative system for homogeneous data:
/// a = 0, A c = F̃(0), B b = Ψ̃(0).
inline State derivative_initial_state(const AssembledSystem& sys, const LoadBuilder& lb) {
  State s = State::zero(sys.n_w(), sys.n_theta());
  auto [F0, P0] = lb.loads(0.0);
  Eigen::SimplicialLDLT<SpMat> A(sys.A), B(sys.B);
  if (A.info() != Eigen::Success || B.info() != Eigen::Success)
    throw SolverError("derivative system: mass matrix factorization failed");
  s.c = A.solve(F0);
  s.b = B.solve(P0);
  return s;
}

inline Trajectory derivative_trajectory(const AssembledSystem& sys, const LoadBuilder& lb,
                                        double dt, double T) {
  return integrate(derivative_initial_state(sys, lb), sys, lb.derivative_function(), dt, T);
}

/// Bound on the time-derivative energies; requires homogeneous initial data.
inline EstimateCheck check_time_derivative_estimate(const InitialData& init,
                                                    const AssembledSystem& sys,
                                                    const LoadBuilder& lb,
                                                    const DimensionlessParams& d, double dt,
                                                    double T) {
  if (!init.homogeneous())
    throw ConfigError("time-derivative estimate requires homogeneous initial data");
  const Trajectory dtraj = derivative_trajectory(sys, lb, dt, T);
  const EnergyReport rep = energy_audit(dtraj, sys);
  const double K0 = forcing_density(lb, d, false)(0.0);
  const auto rhs = estimate_constant(rep.t, forcing_density(lb, d, true), K0, 0.0);
  return compare_series("time_derivative_estimate", estimate_lhs(rep), rhs);
}

/// max_t ‖(1−χ̄)D(w)‖² ≤ 2·C_en(τ)/α_λ at every frame.
inline EstimateCheck check_strain_bound(const EnergyReport& rep, const std::vector<double>& C_en,
                                        const DimensionlessParams& d) {
  std::vector<double> lhs(rep.frames()), rhs(rep.frames());
  double m = 0;
  for (std::size_t k = 0; k < rep.frames(); ++k) {
    m = std::max(m, 2 * rep.solid_shear[k] / d.alpha_lambda);
    lhs[k] = m;
    rhs[k] = 2 * C_en[k] / d.alpha_lambda;
  }
  return compare_series("strain_bound", lhs, rhs);
}

/// Left side of the α_λ-uniform solid bound, evaluated at the final frame.
inline double solid_bound_lhs(const EnergyReport& rep, const DimensionlessParams& d) {
  double mk = 0, msc = 0, mfc = 0, mss = 0;
  for (std::size_t k = 0; k < rep.frames(); ++k) {
    mk = std::max(mk, rep.kinetic[k]);
    msc = std::max(msc, rep.solid_compress[k]);
    mfc = std::max(mfc, rep.fluid_compress[k]);
    mss = std::max(mss, rep.solid_shear[k]);
  }
  const std::size_t e = rep.frames() - 1;
  return d.alpha_lambda * (mk + rep.diss_nu[e] + rep.diss_mu[e] + 0.5 * (msc + mfc + mss));
}

/// ‖Φ‖²_{W¹₂(Q)} + ‖∂_t∇Φ‖²_Q + ‖Ψ‖²_Q + ‖∂_tΨ‖²_Q by tensor Gauss quadrature.
inline double potential_data_norm(const MediumGeometry& g, const ForcingSpec& f, double T,
                                  std::size_t time_cells = 64) {
  if (!f.body.is_potential()) throw ConfigError("forcing: body force is not of potential type");
  const int dim = g.dim();
  const CellQuadrature q = cell_quadrature(dim, g.h(), 3);
  const GaussRule1D r = gauss_rule(3);
  const double ht = T / static_cast<double>(time_cells);
  double s = 0;
  for (std::size_t j = 0; j < time_cells; ++j)
    for (std::size_t tq = 0; tq < r.x.size(); ++tq) {
      const double t = (static_cast<double>(j) + r.x[tq]) * ht;
      const double wt = r.w[tq] * ht;
      for (std::size_t cell = 0; cell < g.num_cells(); ++cell) {
        const Point o = g.cell_origin(cell);
        for (std::size_t qi = 0; qi < q.weights.size(); ++qi) {
          const Point x{o[0] + q.offsets[qi][0], o[1] + q.offsets[qi][1], o[2] + q.offsets[qi][2]};
          const double phi = f.body.potential(x, t, dim);
          const double phi_t = f.body.potential_dt(x, t, dim);
          const Point F = f.body.value(x, t, dim);
          const Point Ft = f.body.time_derivative(x, t, dim);
          double v = phi * phi + phi_t * phi_t;
          for (int a = 0; a < dim; ++a) v += F[a] * F[a] + Ft[a] * Ft[a];
          const double psi = f.heat.value(x, t, dim);
          const double psi_t = f.heat.time_derivative(x, t, dim);
          v += psi * psi + psi_t * psi_t;
          s += wt * q.weights[qi] * v;
        }
      }
    }
  return s;
}

/// One sweep point of the α_λ-uniform solid bound.
struct SolidBoundSample {
  DimensionlessParams params;
  double lhs = 0;
  double data_norm = 0;
  double factor() const {
    return (1 + params.alpha_lambda / params.alpha_eta + params.alpha_lambda / params.alpha_p) *
           data_norm;
  }
};

/// The constant in front of the data norms is not quantified, so it is
/// calibrated from the first sample and every later sample must stay
/// within `stability` times that ratio.
inline std::vector<BoundCheck> check_solid_bound(const MediumGeometry& g,
                                                 const InitialData& init,
                                                 const ForcingSpec& f,
                                                 const std::vector<SolidBoundSample>& samples,
                                                 double stability = 10.0) {
  if (!g.solid_supports_rigidity())
    throw ConfigError(
        "solid bound requires a connected solid touching the outer boundary (rigidity "
        "assumption)");
  if (!f.body.is_potential()) throw ConfigError("solid bound requires a potential body force");
  if (!init.homogeneous()) throw ConfigError("solid bound requires homogeneous initial data");
  std::vector<BoundCheck> out;
  if (samples.empty()) return out;
  const double f0 = samples.front().factor();
  const double c_sol = f0 > 0 ? samples.front().lhs / f0 : 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double rhs = (i == 0 ? 1.0 : stability) * c_sol * samples[i].factor();
    out.push_back(make_check("solid_bound@" + std::to_string(i), samples[i].lhs, rhs));
  }
  return out;
}

/// Named L² and H¹ norms of a frame.
inline double frame_norm(const AssembledSystem& sys, const State& s, const std::string& which) {
  auto q = [](const SpMat& M, const Vec& x) { return std::sqrt(std::max(0.0, x.dot(M * x))); };
  if (which == "fluid_div") return q(sys.div_fluid, s.a);
  if (which == "solid_div") return q(sys.div_solid, s.a);
  if (which == "solid_strain") return q(sys.strain_solid, s.a);
  if (which == "solid_w") return q(sys.mass_w_solid, s.a);
  if (which == "theta") return q(sys.mass_theta, s.b);
  if (which == "grad_theta") return q(sys.grad_theta, s.b);
  if (which == "w") return q(sys.mass_w, s.a);
  if (which == "w_h1")
    return std::sqrt(std::max(0.0, s.a.dot(sys.mass_w * s.a) + s.a.dot(sys.grad_w * s.a)));
  throw ConfigError("unknown norm '" + which + "'");
}

inline const std::vector<std::string>& norm_names() {
  static const std::vector<std::string> names = {"fluid_div", "solid_div", "solid_strain", "solid_w",
                                                 "theta",     "grad_theta", "w",          "w_h1"};
  return names;
}

inline std::vector<double> norm_series(const Trajectory& traj, const AssembledSystem& sys,
                                       const std::string& which) {
  std::vector<double> out;
  out.reserve(traj.frames.size());
  for (const State& s : traj.frames) out.push_back(frame_norm(sys, s, which));
  return out;
}

/// Displacement dofs whose node is a corner of at least one solid cell.
inline std::vector<Eigen::Index> solid_dofs(const Basis& basis) {
  const MediumGeometry& g = basis.geometry();
  std::vector<char> mark(basis.n_theta(), 0);
  for (std::size_t cell = 0; cell < g.num_cells(); ++cell) {
    if (g.is_fluid(cell)) continue;
    for (std::size_t v : g.cell_nodes(cell)) {
      const long l = basis.interior_index(v);
      if (l >= 0) mark[l] = 1;
    }
  }
  std::vector<Eigen::Index> dofs;
  for (std::size_t l = 0; l < mark.size(); ++l)
    if (mark[l])
      for (int a = 0; a < basis.dim(); ++a) dofs.push_back(static_cast<Eigen::Index>(l) * basis.dim() + a);
  return dofs;
}

inline Eigen::MatrixXd dense_restrict(const SpMat& M, const std::vector<Eigen::Index>& dofs) {
  const Eigen::MatrixXd D(M);
  Eigen::MatrixXd out(dofs.size(), dofs.size());
  for (std::size_t i = 0; i < dofs.size(); ++i)
    for (std::size_t j = 0; j < dofs.size(); ++j) out(i, j) = D(dofs[i], dofs[j]);
  return out;
}

struct KornResult {
  double lambda_min = 0;
  /// ‖w‖_{W¹₂(Ω_s)} ≤ C_k ‖D(w)‖_{L²(Ω_s)}
  double constant = std::numeric_limits<double>::infinity();
};

/// Smallest generalized eigenvalue of the solid strain form against the
/// solid H¹ form, on dofs touching the solid.
inline KornResult korn_constant(const Basis& basis, const AssembledSystem& sys) {
  const auto dofs = solid_dofs(basis);
  if (dofs.empty()) throw ConfigError("korn: no solid dofs");
  const Eigen::MatrixXd K = dense_restrict(sys.strain_solid, dofs);
  const Eigen::MatrixXd H = dense_restrict(SpMat(sys.mass_w_solid + sys.grad_w_solid), dofs);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(K, H);
  if (es.info() != Eigen::Success) throw SolverError("korn: eigen solve failed");
  KornResult r;
  r.lambda_min = es.eigenvalues().minCoeff();
  if (r.lambda_min > 0) r.constant = 1.0 / std::sqrt(r.lambda_min);
  return r;
}

/// Least-squares slope of log y against log x (NaN when any value is not positive).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) return std::numeric_limits<double>::quiet_NaN();
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / den;
}

/// ‖x‖_{L²(Q)} for a vector series under the form M, midpoint rule in time.
inline double l2q_norm(const std::vector<Vec>& xs, const SpMat& M, double dt) {
  double s = 0;
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    const Vec h = 0.5 * (xs[k] + xs[k + 1]);
    s += h.dot(M * h);
  }
  return std::sqrt(std::max(0.0, s * std::abs(dt)));
}

}  // namespace thermofsi
