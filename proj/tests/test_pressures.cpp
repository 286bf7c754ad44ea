#include <gtest/gtest.h>

#include "thermofsi/loads.hpp"
#include "thermofsi/pressures.hpp"

using namespace thermofsi;

namespace {

Trajectory forced_run(const Basis& b, const AssembledSystem& sys, const DimensionlessParams& d) {
  ForcingSpec f;
  f.body.kind = BodyForce::Kind::Swirl;
  f.body.envelope = {Envelope::Kind::Sine, 1.0};
  f.heat.kind = HeatSource::Kind::Bump;
  InitialData init;
  init.kind = InitialData::Kind::Bump;
  init.w_amp = 0.1;
  init.v_amp = 0.2;
  return integrate(project_initial(init, sys, b), sys, LoadBuilder(b, d, f).function(), 0.05, 0.5);
}

}  // namespace

TEST(Pressures, ZeroTrajectoryGivesZeroPressures) {
  const MediumGeometry g = build_geometry(2, 4, SolidSlab{2});
  const Basis b(g);
  const DimensionlessParams d;
  const AssembledSystem sys = assemble(b, d);
  const Trajectory tr = integrate(State::zero(b.n_w(), b.n_theta()), sys, zero_loads(b.n_w(), b.n_theta()), 0.1, 0.5);
  const PressureFields p = reconstruct(tr, sys, g, d);
  ASSERT_EQ(p.frames(), 6u);
  for (std::size_t k = 0; k < p.frames(); ++k)
    for (const auto* f : {&p.p, &p.dp_dt, &p.q, &p.pi}) EXPECT_EQ((*f)[k].cwiseAbs().maxCoeff(), 0.0);
}

TEST(Pressures, UnitDivergenceGivesMinusAlpha) {
  // w = (x, 0) on interior cells has div w = 1
  DimensionlessParams d;
  d.alpha_p = 3.5;
  d.alpha_eta = 0.25;
  const MediumGeometry g = build_geometry(2, 4, SolidSlab{2});
  const Basis b(g);
  const AssembledSystem sys = assemble(b, d);
  State s = State::zero(b.n_w(), b.n_theta());
  for (std::size_t l = 0; l < b.n_theta(); ++l) s.a[static_cast<Eigen::Index>(2 * l)] = b.node_point(l)[0];
  Trajectory tr;
  tr.frames = {s};
  const PressureFields p = reconstruct(tr, sys, g, d);
  for (std::size_t c = 0; c < g.num_cells(); ++c) {
    const MultiIndex m = g.cell_multi(c);
    if (m[0] < 1 || m[0] > 2 || m[1] < 1 || m[1] > 2) continue;
    const auto k = static_cast<Eigen::Index>(c);
    if (g.is_fluid(c)) {
      EXPECT_NEAR(p.p[0][k], -3.5, 1e-13);
      EXPECT_EQ(p.pi[0][k], 0.0);
    } else {
      EXPECT_NEAR(p.pi[0][k], -0.25, 1e-13);
      EXPECT_EQ(p.p[0][k], 0.0);
    }
  }
}

TEST(Pressures, ViscousPressureRelation) {
  DimensionlessParams d;
  d.alpha_nu = 0.4;
  d.alpha_p = 2.0;
  const MediumGeometry g = build_geometry(2, 4, FluidInclusion{CellBox{{1, 1, 0}, {3, 3, 0}}});
  const Basis b(g);
  const AssembledSystem sys = assemble(b, d);
  const Trajectory tr = forced_run(b, sys, d);
  for (const PressureFields& p : {reconstruct(tr, sys, g, d), normalize(reconstruct(tr, sys, g, d), g)}) {
    EXPECT_DOUBLE_EQ(p.q_ratio, 0.2);
    for (std::size_t k = 0; k < p.frames(); ++k)
      EXPECT_LE((p.q[k] - p.p[k] - 0.2 * p.dp_dt[k]).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Pressures, PhaseSupports) {
  const DimensionlessParams d;
  const MediumGeometry g = build_geometry(2, 4, SolidSlab{1});
  const Basis b(g);
  const AssembledSystem sys = assemble(b, d);
  const PressureFields p = reconstruct(forced_run(b, sys, d), sys, g, d);
  for (std::size_t k = 0; k < p.frames(); ++k)
    for (std::size_t c = 0; c < g.num_cells(); ++c) {
      const auto i = static_cast<Eigen::Index>(c);
      if (g.is_fluid(c)) {
        EXPECT_EQ(p.pi[k][i], 0.0);
      } else {
        EXPECT_EQ(p.p[k][i], 0.0);
        EXPECT_EQ(p.q[k][i], 0.0);
      }
    }
}

TEST(Pressures, NormalizationRemovesPhaseMeans) {
  const DimensionlessParams d;
  const MediumGeometry g = build_geometry(2, 6, SolidSlab{2});
  const Basis b(g);
  const AssembledSystem sys = assemble(b, d);
  const PressureFields raw = reconstruct(forced_run(b, sys, d), sys, g, d);
  const PressureFields n = normalize(raw, g);
  EXPECT_TRUE(n.normalized);
  auto phase_mean = [&](const Vec& v, bool fluid) {
    double s = 0;
    for (std::size_t c = 0; c < g.num_cells(); ++c)
      if (g.is_fluid(c) == fluid) s += v[static_cast<Eigen::Index>(c)];
    return s;
  };
  for (std::size_t k = 0; k < n.frames(); ++k) {
    EXPECT_LE(std::abs(phase_mean(n.p[k], true)), 1e-12 * std::max(1.0, raw.p[k].norm()));
    EXPECT_LE(std::abs(phase_mean(n.q[k], true)), 1e-12 * std::max(1.0, raw.q[k].norm()));
    EXPECT_LE(std::abs(phase_mean(n.pi[k], false)), 1e-12 * std::max(1.0, raw.pi[k].norm()));
  }
  const PressureFields twice = normalize(n, g);
  for (std::size_t k = 0; k < n.frames(); ++k) EXPECT_LE((twice.p[k] - n.p[k]).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Pressures, ConstantFieldNormalizesToZero) {
  const MediumGeometry g = build_geometry(1, 8, SolidSlab{3});
  const Vec v = Vec::Constant(8, 2.5);
  const Vec f = remove_phase_mean(v, g, true), s = remove_phase_mean(v, g, false);
  for (Eigen::Index c = 0; c < 8; ++c) {
    // only the selected phase is shifted
    EXPECT_NEAR(f[c], g.is_fluid(c) ? 0.0 : 2.5, 1e-15);
    EXPECT_NEAR(s[c], g.is_fluid(c) ? 2.5 : 0.0, 1e-15);
  }
}

TEST(Pressures, CellNorms) {
  const MediumGeometry g = build_geometry(2, 4, SolidSlab{2});
  const Vec one = Vec::Ones(16);
  EXPECT_NEAR(cell_integral(one, g), 1.0, 1e-15);
  EXPECT_NEAR(cell_l2(2 * one, g), 2.0, 1e-15);
  // constant in time over [0, 0.5]
  EXPECT_NEAR(cell_l2_q({one, one, one}, g, 0.25), std::sqrt(0.5), 1e-15);
}
