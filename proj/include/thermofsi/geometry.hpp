#pragma once

#include <array>
#include <cstdint>
#include <queue>
#include <string>
#include <variant>
#include <vector>

#include "thermofsi/params.hpp"

namespace thermofsi {

using Point = std::array<double, 3>;
using MultiIndex = std::array<int, 3>;

/// Cells with first-axis index < gamma are solid, the rest fluid.
struct SolidSlab {
  int gamma = 0;
};

/// Axis-aligned box of cells [lo, hi) per axis.
struct CellBox {
  MultiIndex lo{0, 0, 0};
  MultiIndex hi{0, 0, 0};
};

/// Fluid box strictly inside a solid frame.
struct FluidInclusion {
  CellBox box;
};

/// Solid box strictly inside the fluid. The solid never touches the outer
/// boundary, so this layout cannot support rigidity arguments.
struct SolidInclusion {
  CellBox box;
};

using Layout = std::variant<SolidSlab, FluidInclusion, SolidInclusion>;

/// Structured grid of (0,1)^dim with n cells per axis and a per-cell phase
/// indicator. The interface always lies on cell faces.
class MediumGeometry {
public:
  MediumGeometry() = default;

  int dim() const { return dim_; }
  int n() const { return n_; }
  double h() const { return 1.0 / n_; }
  double cell_volume() const { return cell_volume_; }
  std::size_t num_cells() const { return chi_.size(); }
  std::size_t num_nodes() const { return num_nodes_; }
  const Layout& layout() const { return layout_; }

  /// 1 = fluid, 0 = solid, per cell.
  const std::vector<std::uint8_t>& chi() const { return chi_; }
  bool is_fluid(std::size_t cell) const { return chi_[cell] != 0; }

  double fluid_measure() const { return n_fluid_ * cell_volume_; }
  double solid_measure() const { return (num_cells() - n_fluid_) * cell_volume_; }
  std::size_t num_fluid_cells() const { return n_fluid_; }
  std::size_t num_solid_cells() const { return num_cells() - n_fluid_; }

  /// Lexicographic cell index, axis 0 fastest.
  std::size_t cell_index(const MultiIndex& c) const {
    std::size_t idx = 0;
    for (int a = dim_ - 1; a >= 0; --a) idx = idx * n_ + c[a];
    return idx;
  }
  MultiIndex cell_multi(std::size_t idx) const {
    MultiIndex c{0, 0, 0};
    for (int a = 0; a < dim_; ++a) {
      c[a] = static_cast<int>(idx % n_);
      idx /= n_;
    }
    return c;
  }
  std::size_t node_index(const MultiIndex& v) const {
    std::size_t idx = 0;
    for (int a = dim_ - 1; a >= 0; --a) idx = idx * (n_ + 1) + v[a];
    return idx;
  }
  MultiIndex node_multi(std::size_t idx) const {
    MultiIndex v{0, 0, 0};
    for (int a = 0; a < dim_; ++a) {
      v[a] = static_cast<int>(idx % (n_ + 1));
      idx /= (n_ + 1);
    }
    return v;
  }
  Point node_point(std::size_t idx) const {
    const MultiIndex v = node_multi(idx);
    Point x{0, 0, 0};
    for (int a = 0; a < dim_; ++a) x[a] = v[a] * h();
    return x;
  }
  Point cell_origin(std::size_t cell) const {
    const MultiIndex c = cell_multi(cell);
    Point x{0, 0, 0};
    for (int a = 0; a < dim_; ++a) x[a] = c[a] * h();
    return x;
  }
  bool node_on_boundary(std::size_t idx) const {
    const MultiIndex v = node_multi(idx);
    for (int a = 0; a < dim_; ++a)
      if (v[a] == 0 || v[a] == n_) return true;
    return false;
  }

  /// The 2^dim corner nodes of a cell; local corner k has offset bit a of k
  /// along axis a.
  std::vector<std::size_t> cell_nodes(std::size_t cell) const {
    const MultiIndex c = cell_multi(cell);
    const int corners = 1 << dim_;
    std::vector<std::size_t> out(corners);
    for (int k = 0; k < corners; ++k) {
      MultiIndex v = c;
      for (int a = 0; a < dim_; ++a) v[a] += (k >> a) & 1;
      out[k] = node_index(v);
    }
    return out;
  }

  /// Phase of the cell containing x (points on faces resolve to the upper cell).
  bool fluid_at(const Point& x) const {
    MultiIndex c{0, 0, 0};
    for (int a = 0; a < dim_; ++a) {
      int i = static_cast<int>(x[a] * n_);
      c[a] = i < 0 ? 0 : (i >= n_ ? n_ - 1 : i);
    }
    return is_fluid(cell_index(c));
  }

  /// Ω_s is face-connected and shares a face of positive measure with ∂Ω.
  bool solid_supports_rigidity() const {
    return solid_connected() && solid_touches_boundary();
  }

  bool solid_touches_boundary() const {
    for (std::size_t k = 0; k < num_cells(); ++k) {
      if (is_fluid(k)) continue;
      const MultiIndex c = cell_multi(k);
      for (int a = 0; a < dim_; ++a)
        if (c[a] == 0 || c[a] == n_ - 1) return true;
    }
    return false;
  }

  bool solid_connected() const {
    std::vector<std::uint8_t> seen(num_cells(), 0);
    std::size_t start = num_cells();
    for (std::size_t k = 0; k < num_cells(); ++k)
      if (!is_fluid(k)) {
        start = k;
        break;
      }
    if (start == num_cells()) return false;
    std::queue<std::size_t> todo;
    todo.push(start);
    seen[start] = 1;
    std::size_t reached = 0;
    while (!todo.empty()) {
      const std::size_t k = todo.front();
      todo.pop();
      ++reached;
      const MultiIndex c = cell_multi(k);
      for (int a = 0; a < dim_; ++a) {
        for (int s : {-1, 1}) {
          MultiIndex nb = c;
          nb[a] += s;
          if (nb[a] < 0 || nb[a] >= n_) continue;
          const std::size_t j = cell_index(nb);
          if (!seen[j] && !is_fluid(j)) {
            seen[j] = 1;
            todo.push(j);
          }
        }
      }
    }
    return reached == num_solid_cells();
  }

  friend MediumGeometry build_geometry(int dim, int n, const Layout& layout,
                                       bool require_rigidity);

private:
  int dim_ = 0;
  int n_ = 0;
  double cell_volume_ = 0;
  std::size_t num_nodes_ = 0;
  std::size_t n_fluid_ = 0;
  Layout layout_;
  std::vector<std::uint8_t> chi_;
};

namespace detail {
inline bool in_box(const CellBox& b, const MultiIndex& c, int dim) {
  for (int a = 0; a < dim; ++a)
    if (c[a] < b.lo[a] || c[a] >= b.hi[a]) return false;
  return true;
}
inline void check_box_interior(const CellBox& b, int dim, int n, const char* what) {
  for (int a = 0; a < dim; ++a) {
    if (!(b.lo[a] >= 1 && b.hi[a] <= n - 1 && b.lo[a] < b.hi[a]))
      throw ConfigError(std::string(what) + " box must lie strictly inside the domain");
  }
}
}  // namespace detail

/// Builds the grid and phase indicator. With @p require_rigidity the solid
/// must be connected and touch ∂Ω on a face.
inline MediumGeometry build_geometry(int dim, int n, const Layout& layout,
                                     bool require_rigidity = false) {
  if (dim < 1 || dim > 3) throw ConfigError("geometry: dim must be 1, 2 or 3");
  if (n < 2) throw ConfigError("geometry: n must be >= 2");

  MediumGeometry g;
  g.dim_ = dim;
  g.n_ = n;
  g.layout_ = layout;
  std::size_t cells = 1, nodes = 1;
  for (int a = 0; a < dim; ++a) {
    cells *= n;
    nodes *= (n + 1);
  }
  g.num_nodes_ = nodes;
  g.cell_volume_ = 1.0 / static_cast<double>(cells);
  g.chi_.assign(cells, 0);

  if (const auto* slab = std::get_if<SolidSlab>(&layout)) {
    if (slab->gamma <= 0 || slab->gamma >= n)
      throw ConfigError("geometry: slab index must satisfy 0 < gamma < n");
    for (std::size_t k = 0; k < cells; ++k)
      g.chi_[k] = g.cell_multi(k)[0] >= slab->gamma ? 1 : 0;
  } else if (const auto* inc = std::get_if<FluidInclusion>(&layout)) {
    detail::check_box_interior(inc->box, dim, n, "fluid inclusion");
    for (std::size_t k = 0; k < cells; ++k)
      g.chi_[k] = detail::in_box(inc->box, g.cell_multi(k), dim) ? 1 : 0;
  } else if (const auto* sinc = std::get_if<SolidInclusion>(&layout)) {
    detail::check_box_interior(sinc->box, dim, n, "solid inclusion");
    for (std::size_t k = 0; k < cells; ++k)
      g.chi_[k] = detail::in_box(sinc->box, g.cell_multi(k), dim) ? 0 : 1;
  }

  g.n_fluid_ = 0;
  for (auto c : g.chi_) g.n_fluid_ += c;
  if (g.n_fluid_ == 0 || g.n_fluid_ == cells)
    throw ConfigError("geometry: both phases must be nonempty");
  if (require_rigidity && !g.solid_supports_rigidity())
    throw ConfigError(
        "geometry: solid phase must be connected and touch the outer boundary "
        "(rigidity assumption)");
  return g;
}

/// Per-cell coefficients obtained by mixing fluid and solid constants with χ̄.
struct CoefficientFields {
  std::vector<double> rho_bar;
  std::vector<double> c_p_bar;
  std::vector<double> kappa_bar;
  std::vector<double> alpha_theta_bar;
};

inline CoefficientFields coefficient_fields(const MediumGeometry& g,
                                            const DimensionlessParams& d) {
  CoefficientFields c;
  const std::size_t m = g.num_cells();
  c.rho_bar.resize(m);
  c.c_p_bar.resize(m);
  c.kappa_bar.resize(m);
  c.alpha_theta_bar.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const bool f = g.is_fluid(k);
    c.rho_bar[k] = f ? d.rho_f : d.rho_s;
    c.c_p_bar[k] = f ? d.c_pf : d.c_ps;
    c.kappa_bar[k] = f ? d.kappa_f : d.kappa_s;
    c.alpha_theta_bar[k] = f ? d.alpha_theta_f : d.alpha_theta_s;
  }
  return c;
}

/// Parses "slab:<k>", "inclusion:<lo>:<hi>[:<lo>:<hi>...]" or
/// "solid-inclusion:..." (a single lo:hi pair applies to every axis).
inline Layout parse_layout(const std::string& text, int dim) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(':', start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  auto to_int = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      int v = std::stoi(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("geometry.layout: bad integer '" + s + "' in '" + text + "'");
    }
  };
  if (parts[0] == "slab") {
    if (parts.size() != 2) throw ConfigError("geometry.layout: expected slab:<k>");
    return SolidSlab{to_int(parts[1])};
  }
  if (parts[0] == "inclusion" || parts[0] == "solid-inclusion") {
    CellBox box;
    const std::size_t pairs = (parts.size() - 1) / 2;
    if ((parts.size() - 1) % 2 != 0 || (pairs != 1 && pairs != static_cast<std::size_t>(dim)))
      throw ConfigError("geometry.layout: expected inclusion:<lo>:<hi> per axis");
    for (int a = 0; a < dim; ++a) {
      const std::size_t p = pairs == 1 ? 0 : a;
      box.lo[a] = to_int(parts[1 + 2 * p]);
      box.hi[a] = to_int(parts[2 + 2 * p]);
    }
    if (parts[0] == "inclusion") return FluidInclusion{box};
    return SolidInclusion{box};
  }
  throw ConfigError("geometry.layout: unknown layout '" + text + "'");
}

inline std::string format_layout(const Layout& layout, int dim) {
  if (const auto* s = std::get_if<SolidSlab>(&layout)) return "slab:" + std::to_string(s->gamma);
  const CellBox* box = nullptr;
  std::string out;
  if (const auto* f = std::get_if<FluidInclusion>(&layout)) {
    box = &f->box;
    out = "inclusion";
  } else {
    box = &std::get<SolidInclusion>(layout).box;
    out = "solid-inclusion";
  }
  for (int a = 0; a < dim; ++a)
    out += ":" + std::to_string(box->lo[a]) + ":" + std::to_string(box->hi[a]);
  return out;
}

}  // namespace thermofsi
