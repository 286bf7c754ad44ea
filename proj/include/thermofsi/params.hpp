#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace thermofsi {

/// Thrown for inputs that violate a documented constraint. The message names
/// the constraint.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a linear solve fails or a system turns out singular.
class SolverError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Physical constants of the solid/fluid pair at the rest state, SI units.
///
/// The c_f* / c_s* entries are derivatives of the free energies at the rest
/// state; their signs are constrained by thermodynamic stability.
struct PhysicalParams {
  double kappa_s = 0;      // W/(m K)
  double kappa_f = 0;      // W/(m K)
  double nu = 0;           // Pa s, fluid bulk viscosity
  double mu = 0;           // Pa s, fluid shear viscosity
  double eta = 0;          // Pa, solid bulk modulus
  double lambda = 0;       // Pa, solid shear modulus
  double gamma_s = 0;      // 1/K, solid thermal extension
  double rho_s = 0;        // kg/m^3
  double rho_f = 0;        // kg/m^3
  double c_frho = 0;       // d F_f / d rho
  double c_frhorho = 0;    // d^2 F_f / d rho^2
  double c_frhotheta = 0;  // d^2 F_f / d rho d theta
  double c_svv = 0;        // d^2 F_s / d theta^2
  double c_fvv = 0;        // d^2 F_f / d theta^2
  double L0 = 0;           // m
  double tau0 = 0;         // s
  double g = 0;            // m/s^2
  double p0 = 0;           // Pa
  double rho0 = 0;         // kg/m^3
  double theta0 = 0;       // K, temperature scale
  double theta_star = 0;   // K, rest temperature
  double t_final = 0;      // s; 0 means "use dimensionless T = 1"
};

/// Dimensionless coefficients of the linear coupled model.
struct DimensionlessParams {
  double alpha_tau = 1;
  double alpha_F = 1;
  double alpha_nu = 1;
  double alpha_eta = 1;
  double alpha_lambda = 1;
  double alpha_p = 1;
  double alpha_mu = 1;
  double alpha_theta_s = 1;
  double alpha_theta_f = 1;
  double c_pf = 1;
  double c_ps = 1;
  double rho_s = 1;
  double rho_f = 1;
  double kappa_s = 1;
  double kappa_f = 1;
  double T = 1;

  double min_c_p() const { return c_pf < c_ps ? c_pf : c_ps; }
};

/// Ratio of specific heats of air at the reference state.
inline constexpr double kGamma0 = 7.0 / 5.0;

struct ValidationReport {
  std::vector<std::string> nonpositive;

  bool ok() const { return nonpositive.empty(); }
};

/// Lists every field of @p d that is not strictly positive (NaN included).
inline ValidationReport validate(const DimensionlessParams& d) {
  ValidationReport r;
  const std::pair<const char*, double> fields[] = {
      {"alpha_tau", d.alpha_tau},         {"alpha_F", d.alpha_F},
      {"alpha_nu", d.alpha_nu},           {"alpha_eta", d.alpha_eta},
      {"alpha_lambda", d.alpha_lambda},   {"alpha_p", d.alpha_p},
      {"alpha_mu", d.alpha_mu},           {"alpha_theta_s", d.alpha_theta_s},
      {"alpha_theta_f", d.alpha_theta_f}, {"c_pf", d.c_pf},
      {"c_ps", d.c_ps},                   {"rho_s", d.rho_s},
      {"rho_f", d.rho_f},                 {"kappa_s", d.kappa_s},
      {"kappa_f", d.kappa_f},             {"T", d.T},
  };
  for (const auto& [name, v] : fields) {
    if (!(v > 0)) r.nonpositive.emplace_back(name);
  }
  return r;
}

/// Checks the admissibility constraints on physical input and throws
/// ConfigError naming the first violated one.
inline void check_physical(const PhysicalParams& p) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("physical parameters violate " + what);
  };
  require(p.kappa_s > 0, "kappa_s>0");
  require(p.kappa_f > 0, "kappa_f>0");
  require(p.nu > 0, "nu>0");
  require(p.mu > 0, "mu>0");
  require(p.eta > 0, "eta>0");
  require(p.lambda > 0, "lambda>0");
  require(p.gamma_s > 0, "gamma_s>0");
  require(p.nu > 2.0 / 3.0 * p.mu, "ν>2/3·μ");
  require(p.eta > 2.0 / 3.0 * p.lambda, "η>2/3·λ");
  require(p.c_frhotheta > 0, "c_frhotheta>0");
  require(2 * p.c_frho + p.c_frhorho * p.rho_f > 0, "2·c_frho+c_frhorho·rho_f>0");
  require(p.c_svv < 0, "c_svv<0");
  require(p.c_fvv < 0, "c_fvv<0");
  require(p.rho_s > 0, "rho_s>0");
  require(p.rho_f > 0, "rho_f>0");
  require(p.L0 > 0, "L0>0");
  require(p.tau0 > 0, "tau0>0");
  require(p.g > 0, "g>0");
  require(p.p0 > 0, "p0>0");
  require(p.rho0 > 0, "rho0>0");
  require(p.theta0 > 0, "theta0>0");
  require(p.theta_star > 0, "theta_star>0");
  require(p.t_final >= 0, "t_final>=0");
}

/// Maps physical constants to the dimensionless coefficient set.
inline DimensionlessParams nondimensionalize(const PhysicalParams& p) {
  check_physical(p);
  const double c0_sq = kGamma0 * p.p0 / p.rho0;
  // squared speed of sound in the fluid at the rest state
  const double c_sq = 2 * p.c_frho * p.rho_f + p.c_frhorho * p.rho_f * p.rho_f;
  const double rho_f_dimless = p.rho_f / p.rho0;
  const double kappa_scale =
      p.L0 * p.L0 * p.p0 * p.theta_star / (p.tau0 * p.theta0 * p.theta0);

  DimensionlessParams d;
  d.alpha_tau = kGamma0 * p.L0 * p.L0 / (c0_sq * p.tau0 * p.tau0);
  d.alpha_F = kGamma0 * p.g * p.L0 / c0_sq;
  d.alpha_nu = (p.nu - 2.0 / 3.0 * p.mu) / (p.tau0 * p.p0);
  d.alpha_eta = (p.eta - 2.0 / 3.0 * p.lambda) / p.p0;
  d.alpha_lambda = 2 * p.lambda / p.p0;
  d.alpha_p = kGamma0 * c_sq / c0_sq * rho_f_dimless;
  d.alpha_theta_s = p.gamma_s * p.eta * p.theta0 / p.p0;
  d.alpha_theta_f = p.c_frhotheta * p.rho_f * p.rho_f * p.theta0 / p.p0;
  d.alpha_mu = 2 * p.mu / (p.tau0 * p.p0);
  d.c_pf = -p.c_fvv * p.rho_f * p.theta0 * p.theta0 / p.p0;
  d.c_ps = -p.c_svv * p.rho_s * p.theta0 * p.theta0 / p.p0;
  d.kappa_s = p.kappa_s / kappa_scale;
  d.kappa_f = p.kappa_f / kappa_scale;
  d.rho_s = p.rho_s / p.rho0;
  d.rho_f = rho_f_dimless;
  d.T = p.t_final > 0 ? p.t_final / p.tau0 : 1.0;
  return d;
}

}  // namespace thermofsi
