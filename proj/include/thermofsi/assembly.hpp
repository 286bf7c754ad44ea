#pragma once

#include <Eigen/Sparse>
#include <array>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "thermofsi/basis.hpp"
#include "thermofsi/geometry.hpp"
#include "thermofsi/params.hpp"

namespace thermofsi {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

/// Element integrals on the reference cell [0,h]^dim. Every cell of the
/// uniform grid shares them.
struct LocalIntegrals {
  int corners = 0;
  int dim = 0;
  /// ∫ N_k N_m
  std::vector<double> mass;
  /// ∫ ∂_a N_k ∂_b N_m, indexed [(a*dim+b)*corners*corners + k*corners + m]
  std::vector<double> grad_grad;
  /// ∫ N_k ∂_b N_m, indexed [b*corners*corners + k*corners + m]
  std::vector<double> val_grad;
  /// ∫ ∂_b N_m, indexed [b*corners + m]
  std::vector<double> grad_mean;

  double gg(int a, int b, int k, int m) const {
    return grad_grad[(a * dim + b) * corners * corners + k * corners + m];
  }
  double vg(int b, int k, int m) const { return val_grad[b * corners * corners + k * corners + m]; }
  double dot_grad(int k, int m) const {
    double s = 0;
    for (int a = 0; a < dim; ++a) s += gg(a, a, k, m);
    return s;
  }
};

inline LocalIntegrals local_integrals(int dim, double h, int qpoints) {
  const CellQuadrature q = cell_quadrature(dim, h, qpoints);
  const ShapeQ1 shape{dim, h};
  LocalIntegrals L;
  L.dim = dim;
  L.corners = shape.corners();
  const int nc = L.corners;
  L.mass.assign(nc * nc, 0.0);
  L.grad_grad.assign(dim * dim * nc * nc, 0.0);
  L.val_grad.assign(dim * nc * nc, 0.0);
  L.grad_mean.assign(dim * nc, 0.0);
  for (std::size_t qi = 0; qi < q.weights.size(); ++qi) {
    const Point& x = q.offsets[qi];
    const double w = q.weights[qi];
    std::vector<double> val(nc);
    std::vector<std::array<double, 3>> grad(nc);
    for (int k = 0; k < nc; ++k) {
      val[k] = shape.value(k, x);
      grad[k] = shape.gradient(k, x);
    }
    for (int k = 0; k < nc; ++k) {
      for (int m = 0; m < nc; ++m) {
        L.mass[k * nc + m] += w * val[k] * val[m];
        for (int a = 0; a < dim; ++a) {
          L.val_grad[a * nc * nc + k * nc + m] += w * val[k] * grad[m][a];
          for (int b = 0; b < dim; ++b)
            L.grad_grad[(a * dim + b) * nc * nc + k * nc + m] += w * grad[k][a] * grad[m][b];
        }
      }
    }
    for (int m = 0; m < nc; ++m)
      for (int a = 0; a < dim; ++a) L.grad_mean[a * nc + m] += w * grad[m][a];
  }
  return L;
}

/// Geometry-only operators, each restricted to one phase with unit
/// coefficient. Parameter-dependent matrices are linear combinations.
struct PhaseOperators {
  SpMat mass_w[2];      // ∫ φ_l·φ_j
  SpMat grad_w[2];      // ∫ ∇φ_l:∇φ_j
  SpMat divdiv[2];      // ∫ div φ_l div φ_j
  SpMat strain[2];      // ∫ D(φ_l):D(φ_j)
  SpMat mass_t[2];      // ∫ ψ_l ψ_j
  SpMat grad_t[2];      // ∫ ∇ψ_l·∇ψ_j
  SpMat coupling[2];    // (n_θ×n_w) ∫ ψ_l div φ_j
  SpMat coupling_t[2];  // (n_w×n_θ) ∫ div φ_l ψ_j
  /// (n_cells×n_w): mean of div φ_j over each cell.
  SpMat cell_div;
};

/// Index 0 = solid, 1 = fluid.
inline PhaseOperators phase_operators(const Basis& basis, int qpoints = 2) {
  const MediumGeometry& g = basis.geometry();
  const int dim = g.dim();
  const LocalIntegrals L = local_integrals(dim, g.h(), qpoints);
  const int nc = L.corners;
  using Trip = Eigen::Triplet<double>;
  std::vector<Trip> mw[2], gw[2], dd[2], st[2], mt[2], gt[2], cp[2], cpt[2], cdiv;

  for (std::size_t cell = 0; cell < g.num_cells(); ++cell) {
    const int ph = g.is_fluid(cell) ? 1 : 0;
    const auto nodes = g.cell_nodes(cell);
    std::vector<long> idx(nc);
    for (int k = 0; k < nc; ++k) idx[k] = basis.interior_index(nodes[k]);

    for (int k = 0; k < nc; ++k) {
      if (idx[k] < 0) continue;
      for (int m = 0; m < nc; ++m) {
        if (idx[m] < 0) continue;
        const double mass = L.mass[k * nc + m];
        const double lap = L.dot_grad(k, m);
        mt[ph].emplace_back(idx[k], idx[m], mass);
        gt[ph].emplace_back(idx[k], idx[m], lap);
        for (int a = 0; a < dim; ++a) {
          const long r = idx[k] * dim + a;
          mw[ph].emplace_back(r, idx[m] * dim + a, mass);
          gw[ph].emplace_back(r, idx[m] * dim + a, lap);
          for (int b = 0; b < dim; ++b) {
            const long c = idx[m] * dim + b;
            dd[ph].emplace_back(r, c, L.gg(a, b, k, m));
            // D(N_k e_a):D(N_m e_b) = ½[δ_ab ∇N_k·∇N_m + ∂_b N_k ∂_a N_m]
            st[ph].emplace_back(r, c, 0.5 * ((a == b ? lap : 0.0) + L.gg(b, a, k, m)));
          }
        }
        for (int b = 0; b < dim; ++b)
          cp[ph].emplace_back(idx[k], idx[m] * dim + b, L.vg(b, k, m));
      }
    }
    // Transposed coupling from its own integrand: ∫ ∂_a N_k (e_a) ψ_m.
    for (int k = 0; k < nc; ++k) {
      if (idx[k] < 0) continue;
      for (int a = 0; a < dim; ++a)
        for (int m = 0; m < nc; ++m)
          if (idx[m] >= 0) cpt[ph].emplace_back(idx[k] * dim + a, idx[m], L.vg(a, m, k));
    }
    for (int m = 0; m < nc; ++m) {
      if (idx[m] < 0) continue;
      for (int b = 0; b < dim; ++b)
        cdiv.emplace_back(cell, idx[m] * dim + b, L.grad_mean[b * nc + m] / g.cell_volume());
    }
  }

  const auto nw = static_cast<Eigen::Index>(basis.n_w());
  const auto nt = static_cast<Eigen::Index>(basis.n_theta());
  auto make = [](Eigen::Index r, Eigen::Index c, const std::vector<Trip>& t) {
    SpMat M(r, c);
    M.setFromTriplets(t.begin(), t.end());
    M.makeCompressed();
    return M;
  };
  PhaseOperators P;
  for (int ph = 0; ph < 2; ++ph) {
    P.mass_w[ph] = make(nw, nw, mw[ph]);
    P.grad_w[ph] = make(nw, nw, gw[ph]);
    P.divdiv[ph] = make(nw, nw, dd[ph]);
    P.strain[ph] = make(nw, nw, st[ph]);
    P.mass_t[ph] = make(nt, nt, mt[ph]);
    P.grad_t[ph] = make(nt, nt, gt[ph]);
    P.coupling[ph] = make(nt, nw, cp[ph]);
    P.coupling_t[ph] = make(nw, nt, cpt[ph]);
  }
  P.cell_div = make(static_cast<Eigen::Index>(g.num_cells()), nw, cdiv);
  return P;
}

/// The Galerkin matrices together with the sub-matrices that split the
/// quadratic forms into their named energy terms.
struct AssembledSystem {
  SpMat A, A1, A2, A3, B, B1, B2;
  // A1 = A1_nu + A1_mu, A2 = A2_p + A2_eta + A2_lambda
  SpMat A1_nu, A1_mu, A2_p, A2_eta, A2_lambda;
  // unweighted norm forms
  SpMat mass_w, mass_w_solid, grad_w, grad_w_solid;
  SpMat div_fluid, div_solid, strain_solid, strain_fluid;
  SpMat mass_theta, grad_theta;
  SpMat cell_div;

  std::size_t n_w() const { return static_cast<std::size_t>(A.rows()); }
  std::size_t n_theta() const { return static_cast<std::size_t>(B.rows()); }
};

inline AssembledSystem assemble_from(const PhaseOperators& P, const DimensionlessParams& d) {
  constexpr int S = 0, F = 1;
  AssembledSystem s;
  s.A = d.alpha_tau * (d.rho_s * P.mass_w[S] + d.rho_f * P.mass_w[F]);
  s.A1_nu = d.alpha_nu * P.divdiv[F];
  s.A1_mu = d.alpha_mu * P.strain[F];
  s.A1 = s.A1_nu + s.A1_mu;
  s.A2_p = d.alpha_p * P.divdiv[F];
  s.A2_eta = d.alpha_eta * P.divdiv[S];
  s.A2_lambda = d.alpha_lambda * P.strain[S];
  s.A2 = s.A2_p + s.A2_eta + s.A2_lambda;
  s.A3 = d.alpha_theta_s * P.coupling[S] + d.alpha_theta_f * P.coupling[F];
  s.B = d.c_ps * P.mass_t[S] + d.c_pf * P.mass_t[F];
  s.B1 = d.kappa_s * P.grad_t[S] + d.kappa_f * P.grad_t[F];
  s.B2 = d.alpha_theta_s * P.coupling_t[S] + d.alpha_theta_f * P.coupling_t[F];

  s.mass_w = P.mass_w[S] + P.mass_w[F];
  s.mass_w_solid = P.mass_w[S];
  s.grad_w = P.grad_w[S] + P.grad_w[F];
  s.grad_w_solid = P.grad_w[S];
  s.div_fluid = P.divdiv[F];
  s.div_solid = P.divdiv[S];
  s.strain_solid = P.strain[S];
  s.strain_fluid = P.strain[F];
  s.mass_theta = P.mass_t[S] + P.mass_t[F];
  s.grad_theta = P.grad_t[S] + P.grad_t[F];
  s.cell_div = P.cell_div;
  for (SpMat* m : {&s.A, &s.A1, &s.A2, &s.A3, &s.B, &s.B1, &s.B2}) m->makeCompressed();
  return s;
}

/// Assembles all matrices with `qpoints` Gauss points per axis (2 is exact).
inline AssembledSystem assemble(const Basis& basis, const DimensionlessParams& d,
                                int qpoints = 2) {
  return assemble_from(phase_operators(basis, qpoints), d);
}

inline double max_abs(const SpMat& M) {
  double m = 0;
  for (int k = 0; k < M.outerSize(); ++k)
    for (SpMat::InnerIterator it(M, k); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

/// Writes `row col value` lines (0-based, 17 significant digits).
inline void dump_triplets(const SpMat& M, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write matrix dump '" + path + "'");
  char buf[96];
  for (int k = 0; k < M.outerSize(); ++k)
    for (SpMat::InnerIterator it(M, k); it; ++it) {
      std::snprintf(buf, sizeof buf, "%lld %lld %.17g\n", static_cast<long long>(it.row()),
                    static_cast<long long>(it.col()), it.value());
      out << buf;
    }
}

}  // namespace thermofsi
