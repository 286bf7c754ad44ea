#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <string>

#include "thermofsi/params.hpp"

using namespace thermofsi;

namespace {

// air-like fluid against a steel-like solid, SI units
PhysicalParams reference_set() {
  PhysicalParams p;
  p.kappa_s = 45.0;
  p.kappa_f = 0.025;
  p.nu = 2.0e-5;
  p.mu = 1.8e-5;
  p.eta = 1.6e11;
  p.lambda = 8.0e10;
  p.gamma_s = 1.2e-5;
  p.rho_s = 7800.0;
  p.rho_f = 1.2;
  p.c_frho = 7.0e4;
  p.c_frhorho = 1.0e4;
  p.c_frhotheta = 287.0;
  p.c_svv = -0.06;
  p.c_fvv = -2.5;
  p.L0 = 0.1;
  p.tau0 = 1e-3;
  p.g = 9.81;
  p.p0 = 1.01325e5;
  p.rho0 = 1.2;
  p.theta0 = 10.0;
  p.theta_star = 293.0;
  p.t_final = 0.05;
  return p;
}

std::string violation_of(const PhysicalParams& p) {
  try {
    check_physical(p);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Nondimensionalize, MatchesIndependentEvaluation) {
  // values produced by a separate scripted evaluation of the scaling formulas
  const std::map<std::string, double> expected = {
      {"alpha_tau", 0.11843079200592156},   {"alpha_F", 1.1618060695780905e-05},
      {"alpha_nu", 7.895386133728103e-08},  {"alpha_eta", 1052718.151163747},
      {"alpha_lambda", 1579077.2267456206}, {"alpha_p", 2.1601776461880084},
      {"alpha_theta_s", 189.48926720947446}, {"alpha_theta_f", 0.04078756476683937},
      {"alpha_mu", 3.552923760177646e-07},  {"c_pf", 0.0029607698001480384},
      {"c_ps", 0.461880088823094},          {"kappa_s", 1.5157524574136713e-05},
      {"kappa_f", 8.420846985631508e-09},   {"rho_s", 6500.0},
      {"rho_f", 1.0},                       {"T", 50.0},
  };
  const DimensionlessParams d = nondimensionalize(reference_set());
  const std::map<std::string, double> got = {
      {"alpha_tau", d.alpha_tau},         {"alpha_F", d.alpha_F},       {"alpha_nu", d.alpha_nu},
      {"alpha_eta", d.alpha_eta},         {"alpha_lambda", d.alpha_lambda}, {"alpha_p", d.alpha_p},
      {"alpha_theta_s", d.alpha_theta_s}, {"alpha_theta_f", d.alpha_theta_f}, {"alpha_mu", d.alpha_mu},
      {"c_pf", d.c_pf},                   {"c_ps", d.c_ps},             {"kappa_s", d.kappa_s},
      {"kappa_f", d.kappa_f},             {"rho_s", d.rho_s},           {"rho_f", d.rho_f},
      {"T", d.T},
  };
  for (const auto& [name, v] : expected) EXPECT_NEAR(got.at(name), v, 1e-12 * std::abs(v)) << name;
  EXPECT_TRUE(validate(d).ok());
}

TEST(Nondimensionalize, GammaZeroIsSevenFifths) {
  PhysicalParams p = reference_set();
  const double c0_sq = 1.4 * p.p0 / p.rho0;
  const DimensionlessParams d = nondimensionalize(p);
  EXPECT_DOUBLE_EQ(kGamma0, 1.4);
  EXPECT_NEAR(d.alpha_tau, 1.4 * p.L0 * p.L0 / (c0_sq * p.tau0 * p.tau0), 1e-14);
}

TEST(Nondimensionalize, FinalTimeDefaultsToOne) {
  PhysicalParams p = reference_set();
  p.t_final = 0;
  EXPECT_EQ(nondimensionalize(p).T, 1.0);
}

TEST(CheckPhysical, BulkViscosityBoundaryRejected) {
  PhysicalParams p = reference_set();
  p.nu = 2.0 / 3.0 * p.mu;
  EXPECT_NE(violation_of(p).find("ν>2/3·μ"), std::string::npos);
  EXPECT_THROW(nondimensionalize(p), ConfigError);
}

TEST(CheckPhysical, NamesEachSignCondition) {
  struct Case {
    void (*mutate)(PhysicalParams&);
    const char* name;
  };
  const Case cases[] = {
      {[](PhysicalParams& p) { p.eta = 0.5 * p.lambda; }, "η>2/3·λ"},
      {[](PhysicalParams& p) { p.c_frhotheta = -1; }, "c_frhotheta>0"},
      {[](PhysicalParams& p) { p.c_frhorho = -2 * p.c_frho / p.rho_f; }, "2·c_frho+c_frhorho·rho_f>0"},
      {[](PhysicalParams& p) { p.c_svv = 0.1; }, "c_svv<0"},
      {[](PhysicalParams& p) { p.c_fvv = 0; }, "c_fvv<0"},
      {[](PhysicalParams& p) { p.theta_star = 0; }, "theta_star>0"},
      {[](PhysicalParams& p) { p.kappa_f = -1; }, "kappa_f>0"},
  };
  for (const Case& c : cases) {
    PhysicalParams p = reference_set();
    c.mutate(p);
    EXPECT_NE(violation_of(p).find(c.name), std::string::npos) << c.name;
  }
  EXPECT_EQ(violation_of(reference_set()), "");
}

TEST(Validate, AllOnesIsClean) { EXPECT_TRUE(validate(DimensionlessParams{}).ok()); }

TEST(Validate, NamesSingleField) {
  DimensionlessParams d;
  d.alpha_p = 0;
  const auto r = validate(d);
  ASSERT_EQ(r.nonpositive.size(), 1u);
  EXPECT_EQ(r.nonpositive[0], "alpha_p");
}

TEST(Validate, NamesEveryOffender) {
  DimensionlessParams d;
  d.alpha_lambda = -1;
  d.c_pf = 0;
  d.kappa_s = std::nan("");
  const auto r = validate(d);
  ASSERT_EQ(r.nonpositive.size(), 3u);
  EXPECT_EQ(r.nonpositive[0], "alpha_lambda");
  EXPECT_EQ(r.nonpositive[1], "c_pf");
  EXPECT_EQ(r.nonpositive[2], "kappa_s");
}
