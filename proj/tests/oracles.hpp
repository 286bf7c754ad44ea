// Independent reference computations shared by the unit tests.
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <random>

#include "thermofsi/assembly.hpp"
#include "thermofsi/basis.hpp"

namespace oracle {

using thermofsi::Basis;
using thermofsi::Point;
using thermofsi::Vec;

/// Value of the discrete displacement at x, from the nodal basis only.
inline Point displacement(const Basis& b, const Vec& a, const Point& x) {
  Point w{0, 0, 0};
  for (std::size_t l = 0; l < b.n_w(); ++l) {
    const Point p = b.phi(l, x);
    for (int k = 0; k < 3; ++k) w[k] += a[static_cast<Eigen::Index>(l)] * p[k];
  }
  return w;
}

/// Jacobian ∂w_i/∂x_j by central differences; exact for fields that are
/// affine in each variable separately.
inline Eigen::Matrix3d jacobian(const Basis& b, const Vec& a, const Point& x, double step) {
  Eigen::Matrix3d J = Eigen::Matrix3d::Zero();
  for (int j = 0; j < b.dim(); ++j) {
    Point xp = x, xm = x;
    xp[j] += step;
    xm[j] -= step;
    const Point wp = displacement(b, a, xp), wm = displacement(b, a, xm);
    for (int i = 0; i < b.dim(); ++i) J(i, j) = (wp[i] - wm[i]) / (2 * step);
  }
  return J;
}

/// ∫ over cells selected by `pick` of f(x), 3-point Gauss per axis.
inline double integrate(const Basis& b, const std::function<bool(std::size_t)>& pick,
                        const std::function<double(const Point&)>& f) {
  const auto& g = b.geometry();
  const double xs[3] = {0.5 - 0.5 * std::sqrt(0.6), 0.5, 0.5 + 0.5 * std::sqrt(0.6)};
  const double ws[3] = {5.0 / 18, 8.0 / 18, 5.0 / 18};
  const int dim = g.dim();
  const int nq = dim == 1 ? 3 : dim == 2 ? 9 : 27;
  double s = 0;
  for (std::size_t c = 0; c < g.num_cells(); ++c) {
    if (!pick(c)) continue;
    const Point o = g.cell_origin(c);
    for (int q = 0; q < nq; ++q) {
      Point x = o;
      double w = 1;
      int r = q;
      for (int a = 0; a < dim; ++a) {
        x[a] += g.h() * xs[r % 3];
        w *= g.h() * ws[r % 3];
        r /= 3;
      }
      s += w * f(x);
    }
  }
  return s;
}

inline Vec random_vector(Eigen::Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

}  // namespace oracle
