#pragma once

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <cmath>
#include <string>
#include <vector>

#include "thermofsi/assembly.hpp"
#include "thermofsi/forcing.hpp"
#include "thermofsi/loads.hpp"

namespace thermofsi {

/// Coefficients of displacement (a), velocity (c) and temperature (b).
struct State {
  Vec a;
  Vec c;
  Vec b;
  double t = 0;

  static State zero(std::size_t n_w, std::size_t n_theta) {
    return {Vec::Zero(static_cast<Eigen::Index>(n_w)), Vec::Zero(static_cast<Eigen::Index>(n_w)),
            Vec::Zero(static_cast<Eigen::Index>(n_theta)), 0.0};
  }
  double max_abs() const {
    double m = 0;
    for (const Vec* v : {&a, &c, &b})
      if (v->size() > 0) m = std::max(m, v->cwiseAbs().maxCoeff());
    return m;
  }
};

/// Uniformly spaced frames plus the midpoint loads used by each step.
struct Trajectory {
  double dt = 0;
  std::vector<State> frames;
  /// Load vectors at t_k + dt/2 for step k (size frames.size() - 1).
  std::vector<Vec> F_mid;
  std::vector<Vec> Psi_mid;

  std::size_t steps() const { return frames.empty() ? 0 : frames.size() - 1; }
  const State& back() const { return frames.back(); }
};

namespace detail {

/// L² projection of analytic fields: solves M x = (∫ f·φ_j).
inline State project_fields(const Basis& basis, const AssembledSystem& sys,
                            const InitialData& init, int qpoints = 3) {
  State s = State::zero(basis.n_w(), basis.n_theta());
  if (init.homogeneous()) return s;
  const MediumGeometry& g = basis.geometry();
  const int dim = g.dim();
  const CellQuadrature q = cell_quadrature(dim, g.h(), qpoints);
  const ShapeQ1 shape{dim, g.h()};
  Vec rw = Vec::Zero(s.a.size()), rv = Vec::Zero(s.a.size()), rt = Vec::Zero(s.b.size());
  for (std::size_t cell = 0; cell < g.num_cells(); ++cell) {
    const Point o = g.cell_origin(cell);
    const auto nodes = g.cell_nodes(cell);
    for (std::size_t qi = 0; qi < q.weights.size(); ++qi) {
      const Point& lx = q.offsets[qi];
      const Point x{o[0] + lx[0], o[1] + lx[1], o[2] + lx[2]};
      const Point w0 = init.displacement(x, dim);
      const Point v0 = init.velocity(x, dim);
      const double t0 = init.temperature(x, dim);
      for (int k = 0; k < shape.corners(); ++k) {
        const long l = basis.interior_index(nodes[k]);
        if (l < 0) continue;
        const double wN = q.weights[qi] * shape.value(k, lx);
        for (int a = 0; a < dim; ++a) {
          rw[l * dim + a] += wN * w0[a];
          rv[l * dim + a] += wN * v0[a];
        }
        rt[l] += wN * t0;
      }
    }
  }
  Eigen::SimplicialLDLT<SpMat> mw(sys.mass_w), mt(sys.mass_theta);
  if (mw.info() != Eigen::Success || mt.info() != Eigen::Success)
    throw SolverError("projection: singular Gram matrix");
  s.a = mw.solve(rw);
  s.c = mw.solve(rv);
  s.b = mt.solve(rt);
  return s;
}

}  // namespace detail

/// L² projection of the initial data onto the Galerkin spans. The
/// homogeneous preset returns exact zeros.
inline State project_initial(const InitialData& init, const AssembledSystem& sys,
                             const Basis& basis) {
  return detail::project_fields(basis, sys, init);
}

enum class SolverBackend { Direct, Iterative };

/// Crank–Nicolson stepper for
///   A c' = −A1 c − A2 a + A3ᵀ b + F̃,  B b' = −B1 b − B2ᵀ c + Ψ̃,  a' = c,
/// solved for (c⁺, b⁺) with a⁺ = a + dt (c + c⁺)/2 eliminated.
class Integrator {
public:
  Integrator(const AssembledSystem& sys, double dt, SolverBackend backend = SolverBackend::Direct,
             double tol = 1e-10, int max_iterations = 5000)
      : sys_(&sys), dt_(dt), backend_(backend), tol_(tol), max_it_(max_iterations) {
    if (!(dt != 0.0) || !std::isfinite(dt)) throw ConfigError("run.dt must be finite and nonzero");
    nw_ = static_cast<Eigen::Index>(sys.n_w());
    nt_ = static_cast<Eigen::Index>(sys.n_theta());
    const SpMat K11 = (1.0 / dt) * sys.A + 0.5 * sys.A1 + (0.25 * dt) * sys.A2;
    const SpMat K12 = -0.5 * SpMat(sys.A3.transpose());
    const SpMat K21 = 0.5 * SpMat(sys.B2.transpose());
    const SpMat K22 = (1.0 / dt) * sys.B + 0.5 * sys.B1;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(K11.nonZeros() + K12.nonZeros() + K21.nonZeros() + K22.nonZeros());
    auto put = [&](const SpMat& M, Eigen::Index r0, Eigen::Index c0) {
      for (int k = 0; k < M.outerSize(); ++k)
        for (SpMat::InnerIterator it(M, k); it; ++it)
          trip.emplace_back(r0 + it.row(), c0 + it.col(), it.value());
    };
    put(K11, 0, 0);
    put(K12, 0, nw_);
    put(K21, nw_, 0);
    put(K22, nw_, nw_);
    K_.resize(nw_ + nt_, nw_ + nt_);
    K_.setFromTriplets(trip.begin(), trip.end());
    K_.makeCompressed();

    if (backend_ == SolverBackend::Direct) {
      lu_.analyzePattern(K_);
      lu_.factorize(K_);
      if (lu_.info() != Eigen::Success)
        throw SolverError("step: sparse LU factorization failed: " + lu_.lastErrorMessage());
    } else {
      it_.setTolerance(tol_ * 1e-2);
      it_.setMaxIterations(max_it_);
      it_.compute(K_);
      if (it_.info() != Eigen::Success)
        throw SolverError("step: preconditioner setup failed for the iterative backend");
    }
  }

  double dt() const { return dt_; }
  const SpMat& system_matrix() const { return K_; }

  /// Advances one step given the load vectors at the midpoint time.
  State step(const State& s, const Vec& F_half, const Vec& Psi_half) const {
    const AssembledSystem& S = *sys_;
    Vec rhs(nw_ + nt_);
    rhs.head(nw_) = (1.0 / dt_) * (S.A * s.c) - 0.5 * (S.A1 * s.c) -
                    S.A2 * (s.a + (0.25 * dt_) * s.c) + 0.5 * (S.A3.transpose() * s.b) + F_half;
    rhs.tail(nt_) = (1.0 / dt_) * (S.B * s.b) - 0.5 * (S.B1 * s.b) -
                    0.5 * (S.B2.transpose() * s.c) + Psi_half;

    Vec x;
    if (backend_ == SolverBackend::Direct) {
      x = lu_.solve(rhs);
    } else {
      x = it_.solve(rhs);
      if (it_.info() != Eigen::Success)
        throw SolverError("step: BiCGSTAB did not converge after " +
                          std::to_string(it_.iterations()) + " iterations (residual " +
                          std::to_string(it_.error()) + ")");
    }
    const double rnorm = rhs.norm();
    double res = (K_ * x - rhs).norm();
    if (backend_ == SolverBackend::Direct && res > tol_ * rnorm) {
      // one round of iterative refinement
      x += lu_.solve(rhs - K_ * x);
      res = (K_ * x - rhs).norm();
    }
    if (!(res <= tol_ * std::max(rnorm, 1e-300)) && rnorm > 0) {
      const long its = backend_ == SolverBackend::Direct ? 1 : static_cast<long>(it_.iterations());
      throw SolverError("step: linear solve reached relative residual " +
                        std::to_string(res / rnorm) + " after " + std::to_string(its) +
                        " iteration(s), above " + std::to_string(tol_));
    }

    State out;
    out.c = x.head(nw_);
    out.b = x.tail(nt_);
    out.a = s.a + (0.5 * dt_) * (s.c + out.c);
    out.t = s.t + dt_;
    return out;
  }

private:
  const AssembledSystem* sys_;
  double dt_;
  SolverBackend backend_;
  double tol_;
  int max_it_;
  Eigen::Index nw_ = 0, nt_ = 0;
  SpMat K_;
  Eigen::SparseLU<SpMat> lu_;
  Eigen::BiCGSTAB<SpMat, Eigen::IncompleteLUT<double>> it_;
};

/// Number of steps for [t0, t0+T] at spacing |dt|; T must be a multiple of dt.
inline std::size_t step_count(double T, double dt) {
  const double k = T / std::abs(dt);
  const double kr = std::round(k);
  if (!(T >= 0) || std::abs(k - kr) > 1e-9 * std::max(1.0, k))
    throw ConfigError("run.T must be an integer multiple of run.dt");
  return static_cast<std::size_t>(kr);
}

/// Integrates from `init` over duration T (backwards when dt < 0).
inline Trajectory integrate(const State& init, const AssembledSystem& sys,
                            const LoadFunction& loads, double dt, double T,
                            SolverBackend backend = SolverBackend::Direct) {
  const std::size_t K = step_count(T, dt);
  const Integrator integ(sys, dt, backend);
  Trajectory tr;
  tr.dt = dt;
  tr.frames.reserve(K + 1);
  tr.frames.push_back(init);
  for (std::size_t k = 0; k < K; ++k) {
    const State& s = tr.frames.back();
    const double th = init.t + (static_cast<double>(k) + 0.5) * dt;
    auto [F, P] = loads(th);
    State next = integ.step(s, F, P);
    next.t = init.t + static_cast<double>(k + 1) * dt;
    tr.frames.push_back(std::move(next));
    tr.F_mid.push_back(std::move(F));
    tr.Psi_mid.push_back(std::move(P));
  }
  return tr;
}

/// Loads that are identically zero.
inline LoadFunction zero_loads(std::size_t n_w, std::size_t n_theta) {
  return [n_w, n_theta](double) {
    return std::pair<Vec, Vec>{Vec::Zero(static_cast<Eigen::Index>(n_w)),
                               Vec::Zero(static_cast<Eigen::Index>(n_theta))};
  };
}

}  // namespace thermofsi
