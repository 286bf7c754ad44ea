#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include "thermofsi/geometry.hpp"

namespace thermofsi {

/// Scalar time profile multiplying a spatial forcing pattern.
struct Envelope {
  enum class Kind { Constant, Ramp, Sine };
  Kind kind = Kind::Constant;
  /// Ramp duration for Ramp, frequency for Sine.
  double param = 1.0;

  double value(double t) const {
    switch (kind) {
      case Kind::Constant: return 1.0;
      case Kind::Ramp: {
        if (t >= param) return 1.0;
        const double s = std::sin(0.5 * std::numbers::pi * t / param);
        return s * s;
      }
      case Kind::Sine: return std::sin(2 * std::numbers::pi * param * t);
    }
    return 0;
  }

  double derivative(double t) const {
    switch (kind) {
      case Kind::Constant: return 0.0;
      case Kind::Ramp: {
        if (t >= param) return 0.0;
        const double arg = std::numbers::pi * t / param;
        return 0.5 * std::numbers::pi / param * std::sin(arg);
      }
      case Kind::Sine:
        return 2 * std::numbers::pi * param * std::cos(2 * std::numbers::pi * param * t);
    }
    return 0;
  }
};

using VectorField = std::function<Point(const Point&, double)>;
using ScalarField = std::function<double(const Point&, double)>;

/// Distributed mass force F(x,t).
struct BodyForce {
  enum class Kind { Zero, Gravity, Swirl, Custom };
  Kind kind = Kind::Zero;
  /// Gravity: Φ = g·x_d·envelope(t), F = ∇Φ. Swirl: amplitude of a
  /// solenoidal field.
  double g = -1.0;
  Envelope envelope;
  VectorField custom;
  VectorField custom_dt;

  bool is_potential() const { return kind == Kind::Zero || kind == Kind::Gravity; }

  Point value(const Point& x, double t, int dim) const {
    Point f{0, 0, 0};
    switch (kind) {
      case Kind::Zero: break;
      case Kind::Gravity: f[dim - 1] = g * envelope.value(t); break;
      case Kind::Swirl: f = swirl(x, dim, g * envelope.value(t)); break;
      case Kind::Custom: f = custom(x, t); break;
    }
    return f;
  }

  Point time_derivative(const Point& x, double t, int dim) const {
    Point f{0, 0, 0};
    switch (kind) {
      case Kind::Zero: break;
      case Kind::Gravity: f[dim - 1] = g * envelope.derivative(t); break;
      case Kind::Swirl: f = swirl(x, dim, g * envelope.derivative(t)); break;
      case Kind::Custom:
        if (!custom_dt) throw ConfigError("forcing: custom body force needs a time derivative");
        f = custom_dt(x, t);
        break;
    }
    return f;
  }

  /// Potential Φ with F = ∇Φ (zero and gravity presets only).
  double potential(const Point& x, double t, int dim) const {
    if (kind == Kind::Zero) return 0.0;
    if (kind == Kind::Gravity) return g * x[dim - 1] * envelope.value(t);
    throw ConfigError("forcing: body force is not of potential type");
  }
  double potential_dt(const Point& x, double t, int dim) const {
    if (kind == Kind::Zero) return 0.0;
    if (kind == Kind::Gravity) return g * x[dim - 1] * envelope.derivative(t);
    throw ConfigError("forcing: body force is not of potential type");
  }

private:
  static Point swirl(const Point& x, int dim, double amp) {
    Point f{0, 0, 0};
    if (dim == 1) {
      f[0] = amp * std::sin(std::numbers::pi * x[0]);
      return f;
    }
    // rotational field around the domain centre
    const double s0 = std::sin(std::numbers::pi * x[0]);
    const double s1 = std::sin(std::numbers::pi * x[1]);
    const double c0 = std::cos(std::numbers::pi * x[0]);
    const double c1 = std::cos(std::numbers::pi * x[1]);
    f[0] = amp * s0 * s0 * s1 * c1;
    f[1] = -amp * s1 * s1 * s0 * c0;
    return f;
  }
};

/// Volumetric heat supply Ψ(x,t).
struct HeatSource {
  enum class Kind { Zero, Bump, Custom };
  Kind kind = Kind::Zero;
  Point center{0.5, 0.5, 0.5};
  double width = 0.2;
  double amplitude = 1.0;
  Envelope envelope;
  ScalarField custom;
  ScalarField custom_dt;

  double spatial(const Point& x, int dim) const {
    double r2 = 0;
    for (int a = 0; a < dim; ++a) r2 += (x[a] - center[a]) * (x[a] - center[a]);
    return amplitude * std::exp(-r2 / (width * width));
  }
  double value(const Point& x, double t, int dim) const {
    if (kind == Kind::Zero) return 0.0;
    if (kind == Kind::Custom) return custom(x, t);
    return spatial(x, dim) * envelope.value(t);
  }
  double time_derivative(const Point& x, double t, int dim) const {
    if (kind == Kind::Zero) return 0.0;
    if (kind == Kind::Custom) {
      if (!custom_dt) throw ConfigError("forcing: custom heat source needs a time derivative");
      return custom_dt(x, t);
    }
    return spatial(x, dim) * envelope.derivative(t);
  }
};

struct ForcingSpec {
  BodyForce body;
  HeatSource heat;

  bool is_zero() const {
    return body.kind == BodyForce::Kind::Zero && heat.kind == HeatSource::Kind::Zero;
  }
};

/// Initial displacement, velocity and temperature.
struct InitialData {
  enum class Kind { Homogeneous, Bump, Custom };
  Kind kind = Kind::Homogeneous;
  /// Bump preset: amplitudes of sine-product profiles.
  double w_amp = 0.0;
  double v_amp = 0.0;
  double theta_amp = 0.0;
  std::function<Point(const Point&)> w0, v0;
  std::function<double(const Point&)> theta0;

  bool homogeneous() const { return kind == Kind::Homogeneous; }

  static double sine_product(const Point& x, int dim) {
    double s = 1;
    for (int a = 0; a < dim; ++a) s *= std::sin(std::numbers::pi * x[a]);
    return s;
  }

  Point displacement(const Point& x, int dim) const {
    if (kind == Kind::Custom) return w0 ? w0(x) : Point{0, 0, 0};
    Point w{0, 0, 0};
    if (kind == Kind::Bump)
      for (int a = 0; a < dim; ++a) w[a] = w_amp * sine_product(x, dim) * (a + 1);
    return w;
  }
  Point velocity(const Point& x, int dim) const {
    if (kind == Kind::Custom) return v0 ? v0(x) : Point{0, 0, 0};
    Point v{0, 0, 0};
    if (kind == Kind::Bump)
      for (int a = 0; a < dim; ++a)
        v[a] = v_amp * sine_product(x, dim) * std::cos(std::numbers::pi * x[a]);
    return v;
  }
  double temperature(const Point& x, int dim) const {
    if (kind == Kind::Custom) return theta0 ? theta0(x) : 0.0;
    if (kind == Kind::Bump) return theta_amp * sine_product(x, dim);
    return 0.0;
  }
};

inline Envelope parse_envelope(const std::string& text) {
  Envelope e;
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  if (head == "constant") {
    e.kind = Envelope::Kind::Constant;
  } else if (head == "ramp" || head == "sine") {
    e.kind = head == "ramp" ? Envelope::Kind::Ramp : Envelope::Kind::Sine;
    if (colon == std::string::npos) throw ConfigError("forcing: '" + head + "' needs :<value>");
    try {
      e.param = std::stod(text.substr(colon + 1));
    } catch (const std::exception&) {
      throw ConfigError("forcing: bad envelope parameter in '" + text + "'");
    }
    if (!(e.param > 0)) throw ConfigError("forcing: envelope parameter must be positive");
  } else {
    throw ConfigError("forcing: unknown envelope '" + text + "'");
  }
  return e;
}

inline std::string format_envelope(const Envelope& e) {
  switch (e.kind) {
    case Envelope::Kind::Constant: return "constant";
    case Envelope::Kind::Ramp: return "ramp:" + std::to_string(e.param);
    case Envelope::Kind::Sine: return "sine:" + std::to_string(e.param);
  }
  return "constant";
}

}  // namespace thermofsi
