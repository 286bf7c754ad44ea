#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <random>

#include "oracles.hpp"
#include "thermofsi/assembly.hpp"

using namespace thermofsi;

namespace {

DimensionlessParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  DimensionlessParams d;
  for (double* f : {&d.alpha_tau, &d.alpha_nu, &d.alpha_eta, &d.alpha_lambda, &d.alpha_p, &d.alpha_mu,
                    &d.alpha_theta_s, &d.alpha_theta_f, &d.c_pf, &d.c_ps, &d.rho_s, &d.rho_f, &d.kappa_s,
                    &d.kappa_f})
    *f = std::pow(10.0, u(rng));
  return d;
}

double min_eig(const SpMat& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(M)};
  return es.eigenvalues().minCoeff();
}

double asym(const SpMat& M) { return max_abs(SpMat(M - SpMat(M.transpose()))); }

}  // namespace

TEST(Assembly, DecoupledWhenExpansionVanishes) {
  DimensionlessParams d;
  d.alpha_theta_f = d.alpha_theta_s = 0;
  const Basis b(build_geometry(2, 4, SolidSlab{2}));
  const AssembledSystem s = assemble(b, d);
  EXPECT_EQ(max_abs(s.A3), 0.0);
  EXPECT_EQ(max_abs(s.B2), 0.0);
}

TEST(Assembly, CouplingBlocksAreTransposes) {
  std::mt19937_64 rng(7);
  const std::vector<std::pair<int, Layout>> cases = {
      {1, SolidSlab{3}}, {2, SolidSlab{2}}, {2, FluidInclusion{CellBox{{1, 2, 0}, {4, 4, 0}}}}, {3, SolidSlab{2}}};
  for (const auto& [dim, layout] : cases) {
    const Basis b(build_geometry(dim, dim == 3 ? 3 : 5, dim == 3 ? Layout{SolidSlab{1}} : layout));
    for (int k = 0; k < 5; ++k) {
      const AssembledSystem s = assemble(b, random_params(rng));
      EXPECT_LE(max_abs(SpMat(s.B2 - SpMat(s.A3.transpose()))), 1e-12);
      EXPECT_GT(max_abs(s.A3), 0.0);
    }
  }
}

TEST(Assembly, OneInteriorNodeStiffnessByHand) {
  // one hat on [0,1] with h = 1/2; each half carries ∫(ψ')² = (1/h)² h = 2
  DimensionlessParams d;
  d.kappa_s = 3;
  d.kappa_f = 2;
  const Basis b(build_geometry(1, 2, SolidSlab{1}));
  const AssembledSystem s = assemble(b, d);
  ASSERT_EQ(s.B1.rows(), 1);
  EXPECT_NEAR(s.B1.coeff(0, 0), 3 * 2.0 + 2 * 2.0, 1e-14);
  // ∫ψ² = 2·h/3
  EXPECT_NEAR(s.mass_theta.coeff(0, 0), 2.0 * 0.5 / 3.0, 1e-15);
}

TEST(Assembly, SecondDifferenceStencil) {
  DimensionlessParams d;
  d.kappa_s = d.kappa_f = 1.5;
  const int n = 6;
  const double h = 1.0 / n;
  const Basis b(build_geometry(1, n, SolidSlab{3}));
  const AssembledSystem s = assemble(b, d);
  const Eigen::MatrixXd K(s.B1), M(s.mass_theta);
  for (int i = 0; i < n - 1; ++i)
    for (int j = 0; j < n - 1; ++j) {
      const double k = i == j ? 2 : std::abs(i - j) == 1 ? -1 : 0;
      const double m = i == j ? 4 : std::abs(i - j) == 1 ? 1 : 0;
      EXPECT_NEAR(K(i, j), 1.5 * k / h, 1e-12);
      EXPECT_NEAR(M(i, j), m * h / 6, 1e-15);
    }
}

TEST(Assembly, SymmetryAndDefiniteness) {
  std::mt19937_64 rng(11);
  for (int dim = 1; dim <= 3; ++dim) {
    const Basis b(build_geometry(dim, dim == 3 ? 3 : 4, SolidSlab{dim == 3 ? 1 : 2}));
    const AssembledSystem s = assemble(b, random_params(rng));
    for (const SpMat* M : {&s.A, &s.A1, &s.A2, &s.B, &s.B1}) EXPECT_LE(asym(*M), 1e-12 * max_abs(*M));
    EXPECT_GT(min_eig(s.A), 0.0);
    EXPECT_GT(min_eig(s.B), 0.0);
    for (const SpMat* M : {&s.A1, &s.A2, &s.B1}) EXPECT_GE(min_eig(*M), -1e-10 * max_abs(*M));
  }
}

TEST(Assembly, TwoPointRuleIsExact) {
  std::mt19937_64 rng(3);
  const DimensionlessParams d = random_params(rng);
  const Basis b(build_geometry(2, 4, FluidInclusion{CellBox{{1, 1, 0}, {3, 3, 0}}}));
  const AssembledSystem s2 = assemble(b, d, 2), s4 = assemble(b, d, 4);
  for (auto m : {&AssembledSystem::A, &AssembledSystem::A1, &AssembledSystem::A2, &AssembledSystem::A3,
                 &AssembledSystem::B, &AssembledSystem::B1, &AssembledSystem::B2})
    EXPECT_LE(max_abs(SpMat(s2.*m - s4.*m)), 1e-13 * std::max(1.0, max_abs(s2.*m)));
}

TEST(Assembly, FormsAgreeWithPointwiseQuadrature) {
  std::mt19937_64 rng(5);
  for (int dim = 2; dim <= 3; ++dim) {
    const Basis b(build_geometry(dim, 3, SolidSlab{1}));
    const AssembledSystem s = assemble(b, DimensionlessParams{});
    const MediumGeometry& g = b.geometry();
    const Vec a = oracle::random_vector(static_cast<Eigen::Index>(b.n_w()), rng);
    const double step = 1e-6 * g.h();
    auto solid = [&](std::size_t c) { return !g.is_fluid(c); };
    auto fluid = [&](std::size_t c) { return g.is_fluid(c); };
    const double mass = oracle::integrate(b, [](std::size_t) { return true; }, [&](const Point& x) {
      const Point w = oracle::displacement(b, a, x);
      return w[0] * w[0] + w[1] * w[1] + w[2] * w[2];
    });
    const double div_f = oracle::integrate(b, fluid, [&](const Point& x) {
      const double dv = oracle::jacobian(b, a, x, step).trace();
      return dv * dv;
    });
    const double strain_s = oracle::integrate(b, solid, [&](const Point& x) {
      const Eigen::Matrix3d J = oracle::jacobian(b, a, x, step);
      const Eigen::Matrix3d D = 0.5 * (J + J.transpose());
      return D.squaredNorm();
    });
    EXPECT_NEAR(a.dot(s.mass_w * a), mass, 1e-12 * mass);
    EXPECT_NEAR(a.dot(s.div_fluid * a), div_f, 1e-6 * div_f);
    EXPECT_NEAR(a.dot(s.strain_solid * a), strain_s, 1e-6 * strain_s);
  }
}

TEST(Assembly, CouplingAgreesWithPointwiseQuadrature) {
  std::mt19937_64 rng(9);
  DimensionlessParams d;
  d.alpha_theta_s = 0.7;
  d.alpha_theta_f = 2.5;
  const Basis b(build_geometry(2, 4, SolidSlab{3}));
  const MediumGeometry& g = b.geometry();
  const AssembledSystem s = assemble(b, d);
  const Vec a = oracle::random_vector(static_cast<Eigen::Index>(b.n_w()), rng);
  const Vec t = oracle::random_vector(static_cast<Eigen::Index>(b.n_theta()), rng);
  // ∫ ᾱ_θ θ div w, with θ evaluated from the scalar basis
  double ref = 0;
  for (bool fl : {false, true}) {
    ref += (fl ? d.alpha_theta_f : d.alpha_theta_s) *
           oracle::integrate(b, [&](std::size_t c) { return g.is_fluid(c) == fl; }, [&](const Point& x) {
             double th = 0;
             for (std::size_t l = 0; l < b.n_theta(); ++l) th += t[static_cast<Eigen::Index>(l)] * b.psi(l, x);
             return th * oracle::jacobian(b, a, x, 1e-6 * g.h()).trace();
           });
  }
  EXPECT_NEAR(t.dot(s.A3 * a), ref, 1e-6 * std::abs(ref));
}

TEST(Assembly, CellDivergenceOfLinearField) {
  // w = (x, 0) interpolated; on cells away from the boundary div w = 1
  const Basis b(build_geometry(2, 4, SolidSlab{2}));
  const AssembledSystem s = assemble(b, DimensionlessParams{});
  Vec a = Vec::Zero(static_cast<Eigen::Index>(b.n_w()));
  for (std::size_t l = 0; l < b.n_theta(); ++l) a[static_cast<Eigen::Index>(2 * l)] = b.node_point(l)[0];
  const Vec div = s.cell_div * a;
  const auto& g = b.geometry();
  for (std::size_t c = 0; c < g.num_cells(); ++c) {
    const MultiIndex m = g.cell_multi(c);
    if (m[0] >= 1 && m[0] <= 2 && m[1] >= 1 && m[1] <= 2) {
      EXPECT_NEAR(div[static_cast<Eigen::Index>(c)], 1.0, 1e-14);
    }
  }
}

TEST(Assembly, TripletDumpRoundTrips) {
  const Basis b(build_geometry(1, 4, SolidSlab{2}));
  const AssembledSystem s = assemble(b, DimensionlessParams{});
  const std::string path = ::testing::TempDir() + "/b1.txt";
  dump_triplets(s.B1, path);
  std::ifstream in(path);
  long long r, c;
  double v;
  std::size_t count = 0;
  while (in >> r >> c >> v) {
    EXPECT_EQ(v, s.B1.coeff(r, c));
    ++count;
  }
  EXPECT_EQ(count, static_cast<std::size_t>(s.B1.nonZeros()));
}
