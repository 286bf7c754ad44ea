#pragma once

#include <fmt/format.h>

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <string>
#include <vector>

#include "thermofsi/config.hpp"
#include "thermofsi/diagnostics.hpp"
#include "thermofsi/integrator.hpp"
#include "thermofsi/limits.hpp"
#include "thermofsi/pressures.hpp"

namespace thermofsi {

inline std::string header_line(const std::string& hash) {
  return fmt::format("# thermofsi {} config={}\n", kVersion, hash);
}

inline std::string num(double v) { return fmt::format("{:.17g}", v); }

namespace detail {
inline std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw ConfigError("run.output_dir: cannot write '" + path + "'");
  return out;
}

inline void write_rows(std::ofstream& out, const std::vector<std::string>& cols,
                       const std::vector<std::vector<double>>& rows) {
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << num(r[i]);
    out << "\n";
  }
}
}  // namespace detail

inline void write_energy_csv(const std::string& path, const std::string& hash, const EnergyReport& r) {
  auto out = detail::open_out(path);
  out << header_line(hash);
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < r.frames(); ++k)
    rows.push_back({r.t[k], r.kinetic[k], r.solid_shear[k], r.solid_compress[k], r.fluid_compress[k],
                    r.thermal[k], r.diss_nu[k], r.diss_mu[k], r.diss_kappa[k], r.work[k], r.residual[k]});
  detail::write_rows(out,
                     {"t", "kinetic", "solid_shear", "solid_compress", "fluid_compress", "thermal",
                      "diss_nu", "diss_mu", "diss_kappa", "work", "residual"},
                     rows);
}

inline void write_pressure_csv(const std::string& path, const std::string& hash, const Trajectory& tr,
                               const PressureFields& raw, const PressureFields& normalized,
                               const MediumGeometry& g) {
  auto out = detail::open_out(path);
  out << header_line(hash);
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < raw.frames(); ++k)
    rows.push_back({tr.frames[k].t, cell_l2(raw.p[k], g), cell_l2(raw.q[k], g), cell_l2(raw.pi[k], g),
                    cell_integral(normalized.p[k], g), cell_integral(normalized.q[k], g),
                    cell_integral(normalized.pi[k], g)});
  detail::write_rows(out, {"t", "L2_p", "L2_q", "L2_pi", "mean_p_tilde", "mean_q_tilde", "mean_pi_tilde"},
                     rows);
}

inline void write_norms_csv(const std::string& path, const std::string& hash, const Trajectory& tr,
                            const AssembledSystem& sys) {
  auto out = detail::open_out(path);
  out << header_line(hash);
  std::vector<std::string> cols{"t"};
  for (const auto& n : norm_names()) cols.push_back(n);
  std::vector<std::vector<double>> rows;
  for (const State& s : tr.frames) {
    std::vector<double> r{s.t};
    for (const auto& n : norm_names()) r.push_back(frame_norm(sys, s, n));
    rows.push_back(std::move(r));
  }
  detail::write_rows(out, cols, rows);
}

inline void write_sweep_csv(const std::string& path, const std::string& hash, const LimitReport& rep) {
  auto out = detail::open_out(path);
  out << header_line(hash);
  out << "mode,epsilon,alpha_p,alpha_eta,alpha_lambda,max_fluid_div_sq,max_solid_div_sq,"
         "max_solid_strain_sq,max_solid_w_sq,L2Q_p,L2Q_q,L2Q_pi,L2Q_q_minus_p,C_en_T,"
         "c2_u_error,c2_theta_error,c2_p_error,gap_w,gap_theta,gap_p,gap_scaled_w\n";
  for (std::size_t i = 0; i < rep.points.size(); ++i) {
    const SweepPoint& p = rep.points[i];
    // gap columns compare a row with the next one; the last row has none
    auto gap = [&](const std::vector<double>& g) { return i < g.size() ? num(g[i]) : std::string("nan"); };
    out << mode_name(rep.mode) << "," << num(p.epsilon) << "," << num(p.params.alpha_p) << ","
        << num(p.params.alpha_eta) << "," << num(p.params.alpha_lambda) << "," << num(p.fluid_div_sq) << ","
        << num(p.solid_div_sq) << "," << num(p.solid_strain_sq) << "," << num(p.solid_w_sq) << ","
        << num(p.L2Q_p) << "," << num(p.L2Q_q) << "," << num(p.L2Q_pi) << "," << num(p.L2Q_q_minus_p)
        << "," << num(p.C_en_T) << "," << num(p.c2_u_error) << "," << num(p.c2_theta_error) << ","
        << num(p.c2_p_error) << "," << gap(rep.gap_w) << "," << gap(rep.gap_theta) << ","
        << gap(rep.gap_p) << "," << gap(rep.gap_scaled_w) << "\n";
  }
}

inline void write_bound_table(const std::string& path, const std::string& hash,
                              const std::vector<BoundCheck>& checks) {
  auto out = detail::open_out(path);
  out << header_line(hash);
  out << fmt::format("{:<28} {:>24} {:>24} {:>24} {}\n", "check", "lhs", "rhs", "margin", "status");
  for (const auto& c : checks)
    out << fmt::format("{:<28} {:>24.17g} {:>24.17g} {:>24.17g} {}\n", c.name, c.lhs, c.rhs, c.margin,
                       c.satisfied ? "ok" : "VIOLATED");
}

inline nlohmann::json checks_json(const std::vector<BoundCheck>& checks) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : checks)
    arr.push_back({{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"margin", c.margin},
                   {"satisfied", c.satisfied}});
  return arr;
}

inline void write_json(const std::string& path, const nlohmann::json& j) {
  auto out = detail::open_out(path);
  out << j.dump(2) << "\n";
}

inline constexpr char kDumpMagic[8] = {'T', 'F', 'S', 'I', 'T', 'R', 'J', '1'};

/// Binary trajectory: magic, u64 n_frames, n_w, n_theta, config hash,
/// f64 dt, then per frame a, c, b as little-endian doubles.
inline void write_state_dump(const std::string& path, const std::string& hash, const Trajectory& tr) {
  static_assert(std::endian::native == std::endian::little, "dump layout assumes a little-endian host");
  auto out = detail::open_out(path, true);
  const std::uint64_t head[4] = {
      tr.frames.size(), tr.frames.empty() ? 0u : static_cast<std::uint64_t>(tr.frames[0].a.size()),
      tr.frames.empty() ? 0u : static_cast<std::uint64_t>(tr.frames[0].b.size()),
      std::stoull(hash, nullptr, 16)};
  out.write(kDumpMagic, 8);
  out.write(reinterpret_cast<const char*>(head), sizeof head);
  out.write(reinterpret_cast<const char*>(&tr.dt), sizeof(double));
  for (const State& s : tr.frames)
    for (const Vec* v : {&s.a, &s.c, &s.b})
      out.write(reinterpret_cast<const char*>(v->data()), static_cast<std::streamsize>(v->size() * sizeof(double)));
}

struct StateDump {
  std::uint64_t config_hash = 0;
  Trajectory traj;
};

inline StateDump read_state_dump(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read dump '" + path + "'");
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kDumpMagic, 8) != 0) throw ConfigError("dump: bad magic in '" + path + "'");
  std::uint64_t head[4];
  in.read(reinterpret_cast<char*>(head), sizeof head);
  StateDump d;
  d.config_hash = head[3];
  in.read(reinterpret_cast<char*>(&d.traj.dt), sizeof(double));
  for (std::uint64_t k = 0; k < head[0]; ++k) {
    State s;
    s.a.resize(static_cast<Eigen::Index>(head[1]));
    s.c.resize(static_cast<Eigen::Index>(head[1]));
    s.b.resize(static_cast<Eigen::Index>(head[2]));
    for (Vec* v : {&s.a, &s.c, &s.b})
      in.read(reinterpret_cast<char*>(v->data()), static_cast<std::streamsize>(v->size() * sizeof(double)));
    s.t = static_cast<double>(k) * d.traj.dt;
    d.traj.frames.push_back(std::move(s));
  }
  if (!in) throw ConfigError("dump: truncated file '" + path + "'");
  return d;
}

}  // namespace thermofsi
