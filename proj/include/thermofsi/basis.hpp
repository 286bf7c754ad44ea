#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "thermofsi/geometry.hpp"

namespace thermofsi {

/// Gauss-Legendre rule on [0,1] with `points` nodes (exact to degree 2p-1).
struct GaussRule1D {
  std::vector<double> x;
  std::vector<double> w;
};

inline GaussRule1D gauss_rule(int points) {
  GaussRule1D r;
  auto set = [&](std::initializer_list<double> xs, std::initializer_list<double> ws) {
    for (double v : xs) r.x.push_back(0.5 * (v + 1.0));
    for (double v : ws) r.w.push_back(0.5 * v);
  };
  switch (points) {
    case 1: set({0.0}, {2.0}); break;
    case 2: {
      const double a = 1.0 / std::sqrt(3.0);
      set({-a, a}, {1.0, 1.0});
      break;
    }
    case 3: {
      const double a = std::sqrt(3.0 / 5.0);
      set({-a, 0.0, a}, {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0});
      break;
    }
    case 4: {
      const double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
      const double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
      const double wa = (18.0 + std::sqrt(30.0)) / 36.0;
      const double wb = (18.0 - std::sqrt(30.0)) / 36.0;
      set({-b, -a, a, b}, {wb, wa, wa, wb});
      break;
    }
    case 5: {
      const double a = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
      const double b = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
      const double wa = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
      const double wb = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
      set({-b, -a, 0.0, a, b}, {wb, wa, 128.0 / 225.0, wa, wb});
      break;
    }
    default: throw ConfigError("quadrature: supported orders are 1..5 points per axis");
  }
  return r;
}

/// Tensor Gauss points on the cell [0,h]^dim (offsets from the cell origin)
/// with weights that include the cell volume.
struct CellQuadrature {
  std::vector<Point> offsets;
  std::vector<double> weights;
};

inline CellQuadrature cell_quadrature(int dim, double h, int points) {
  const GaussRule1D r = gauss_rule(points);
  CellQuadrature q;
  int total = 1;
  for (int a = 0; a < dim; ++a) total *= points;
  for (int k = 0; k < total; ++k) {
    Point x{0, 0, 0};
    double w = 1;
    int rem = k;
    for (int a = 0; a < dim; ++a) {
      const int i = rem % points;
      rem /= points;
      x[a] = r.x[i] * h;
      w *= r.w[i] * h;
    }
    q.offsets.push_back(x);
    q.weights.push_back(w);
  }
  return q;
}

/// d-linear shape functions on [0,h]^dim; corner k sits at offset bit a of k.
struct ShapeQ1 {
  int dim;
  double h;

  int corners() const { return 1 << dim; }

  double value(int k, const Point& local) const {
    double v = 1;
    for (int a = 0; a < dim; ++a) {
      const double s = local[a] / h;
      v *= ((k >> a) & 1) ? s : 1.0 - s;
    }
    return v;
  }

  std::array<double, 3> gradient(int k, const Point& local) const {
    std::array<double, 3> g{0, 0, 0};
    for (int a = 0; a < dim; ++a) {
      double d = ((k >> a) & 1) ? 1.0 / h : -1.0 / h;
      for (int b = 0; b < dim; ++b) {
        if (b == a) continue;
        const double s = local[b] / h;
        d *= ((k >> b) & 1) ? s : 1.0 - s;
      }
      g[a] = d;
    }
    return g;
  }
};

/// Nodal hat-function bases for displacement (vector) and temperature
/// (scalar), both vanishing on ∂Ω. Displacement dof = node * dim + component.
class Basis {
public:
  explicit Basis(const MediumGeometry& g) : geom_(g) {
    global_to_interior_.assign(g.num_nodes(), -1);
    for (std::size_t v = 0; v < g.num_nodes(); ++v) {
      if (g.node_on_boundary(v)) continue;
      global_to_interior_[v] = static_cast<long>(interior_.size());
      interior_.push_back(v);
    }
  }

  const MediumGeometry& geometry() const { return geom_; }
  int dim() const { return geom_.dim(); }
  std::size_t n_theta() const { return interior_.size(); }
  std::size_t n_w() const { return interior_.size() * geom_.dim(); }

  /// Interior index of a grid node, or -1 on the boundary.
  long interior_index(std::size_t node) const { return global_to_interior_[node]; }
  std::size_t node_of(std::size_t interior) const { return interior_[interior]; }
  Point node_point(std::size_t interior) const { return geom_.node_point(interior_[interior]); }

  /// Scalar basis function l at x.
  double psi(std::size_t l, const Point& x) const {
    const Point xn = node_point(l);
    const double h = geom_.h();
    double v = 1;
    for (int a = 0; a < dim(); ++a) {
      const double r = 1.0 - std::abs(x[a] - xn[a]) / h;
      if (r <= 0) return 0;
      v *= r;
    }
    return v;
  }

  /// Vector basis function for displacement dof l at x.
  Point phi(std::size_t l, const Point& x) const {
    Point out{0, 0, 0};
    out[l % dim()] = psi(l / dim(), x);
    return out;
  }

private:
  MediumGeometry geom_;
  std::vector<std::size_t> interior_;
  std::vector<long> global_to_interior_;
};

inline Basis build_basis(const MediumGeometry& g) { return Basis(g); }

}  // namespace thermofsi
