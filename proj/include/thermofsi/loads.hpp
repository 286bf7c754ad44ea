#pragma once

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "thermofsi/assembly.hpp"
#include "thermofsi/forcing.hpp"

namespace thermofsi {

/// Right-hand sides (F̃(t), Ψ̃(t)) of the Galerkin system.
using LoadFunction = std::function<std::pair<Vec, Vec>(double)>;

/// Evaluates load vectors and forcing norms by cellwise Gauss quadrature.
class LoadBuilder {
public:
  LoadBuilder(const Basis& basis, const DimensionlessParams& d, ForcingSpec forcing,
              int qpoints = 3)
      : basis_(basis), d_(d), forcing_(std::move(forcing)) {
    const MediumGeometry& g = basis_.geometry();
    const CellQuadrature q = cell_quadrature(g.dim(), g.h(), qpoints);
    const ShapeQ1 shape{g.dim(), g.h()};
    weights_ = q.weights;
    corners_ = shape.corners();
    for (const Point& x : q.offsets)
      for (int k = 0; k < corners_; ++k) shape_values_.push_back(shape.value(k, x));
    for (std::size_t cell = 0; cell < g.num_cells(); ++cell) {
      const Point o = g.cell_origin(cell);
      for (const Point& x : q.offsets) points_.push_back({o[0] + x[0], o[1] + x[1], o[2] + x[2]});
      for (std::size_t v : g.cell_nodes(cell)) dofs_.push_back(basis_.interior_index(v));
    }
  }

  const ForcingSpec& forcing() const { return forcing_; }

  /// F̃_j(t) = ∫ α_F ρ̄ F·φ_j, Ψ̃_j(t) = ∫ Ψ ψ_j.
  std::pair<Vec, Vec> loads(double t) const { return build(t, false); }

  /// Same integrals with ∂F/∂t and ∂Ψ/∂t.
  std::pair<Vec, Vec> derivative_loads(double t) const { return build(t, true); }

  /// ‖√ρ̄ F(t)‖² (derivative = true gives ‖√ρ̄ ∂F/∂t‖²).
  double force_norm_sq(double t, bool derivative = false) const {
    const MediumGeometry& g = basis_.geometry();
    if (forcing_.body.kind == BodyForce::Kind::Zero) return 0.0;
    const std::size_t nq = weights_.size();
    double s = 0;
    for (std::size_t cell = 0; cell < g.num_cells(); ++cell) {
      const double rho = g.is_fluid(cell) ? d_.rho_f : d_.rho_s;
      for (std::size_t q = 0; q < nq; ++q) {
        const Point& x = points_[cell * nq + q];
        const Point f = derivative ? forcing_.body.time_derivative(x, t, g.dim())
                                   : forcing_.body.value(x, t, g.dim());
        double f2 = 0;
        for (int a = 0; a < g.dim(); ++a) f2 += f[a] * f[a];
        s += weights_[q] * rho * f2;
      }
    }
    return s;
  }

  /// ‖Ψ(t)‖² (or ‖∂Ψ/∂t‖²).
  double heat_norm_sq(double t, bool derivative = false) const {
    const MediumGeometry& g = basis_.geometry();
    if (forcing_.heat.kind == HeatSource::Kind::Zero) return 0.0;
    const std::size_t nq = weights_.size();
    double s = 0;
    for (std::size_t cell = 0; cell < g.num_cells(); ++cell)
      for (std::size_t q = 0; q < nq; ++q) {
        const Point& x = points_[cell * nq + q];
        const double v = derivative ? forcing_.heat.time_derivative(x, t, g.dim())
                                    : forcing_.heat.value(x, t, g.dim());
        s += weights_[q] * v * v;
      }
    return s;
  }

  /// The returned callables own a copy of the builder.
  LoadFunction function() const {
    auto self = std::make_shared<const LoadBuilder>(*this);
    return [self](double t) { return self->loads(t); };
  }
  LoadFunction derivative_function() const {
    auto self = std::make_shared<const LoadBuilder>(*this);
    return [self](double t) { return self->derivative_loads(t); };
  }

private:
  std::pair<Vec, Vec> build(double t, bool derivative) const {
    const MediumGeometry& g = basis_.geometry();
    const int dim = g.dim();
    Vec F = Vec::Zero(static_cast<Eigen::Index>(basis_.n_w()));
    Vec P = Vec::Zero(static_cast<Eigen::Index>(basis_.n_theta()));
    const bool has_f = forcing_.body.kind != BodyForce::Kind::Zero;
    const bool has_h = forcing_.heat.kind != HeatSource::Kind::Zero;
    if (!has_f && !has_h) return {F, P};
    const std::size_t nq = weights_.size();
    for (std::size_t cell = 0; cell < g.num_cells(); ++cell) {
      const double coef = d_.alpha_F * (g.is_fluid(cell) ? d_.rho_f : d_.rho_s);
      const long* dof = &dofs_[cell * corners_];
      for (std::size_t q = 0; q < nq; ++q) {
        const Point& x = points_[cell * nq + q];
        const double* N = &shape_values_[q * corners_];
        Point f{0, 0, 0};
        double psi = 0;
        if (has_f)
          f = derivative ? forcing_.body.time_derivative(x, t, dim) : forcing_.body.value(x, t, dim);
        if (has_h)
          psi = derivative ? forcing_.heat.time_derivative(x, t, dim) : forcing_.heat.value(x, t, dim);
        for (int k = 0; k < corners_; ++k) {
          if (dof[k] < 0) continue;
          const double wN = weights_[q] * N[k];
          for (int a = 0; a < dim; ++a) F[dof[k] * dim + a] += coef * wN * f[a];
          P[dof[k]] += wN * psi;
        }
      }
    }
    return {F, P};
  }

  Basis basis_;
  DimensionlessParams d_;
  ForcingSpec forcing_;
  int corners_ = 0;
  std::vector<double> weights_;
  std::vector<double> shape_values_;
  std::vector<Point> points_;
  std::vector<long> dofs_;
};

}  // namespace thermofsi
