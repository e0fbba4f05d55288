#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "vnc/simulation.hpp"
#include "vnc/system.hpp"
#include "vnc/types.hpp"

namespace vnc {

struct SimDefaults {
  double dt = 0.01;
  double t_final = 1.0;
  double gain = 1.0;
  State initial_state;
};

/// A ready-made system: the chart data plus closed-form control laws used
/// to cross-check the generic pipeline. reference_stabilizing is the
/// unit-gain law.
struct SystemCatalogEntry {
  std::string name;
  ChartSystem system;
  ConstraintSet constraints;
  InputSet inputs;
  SimDefaults defaults;
  std::function<Vector(const State&)> reference_invariance;
  std::function<Vector(const State&)> reference_stabilizing;
};

namespace detail {

inline MetricField constant_diagonal_metric(Vector diag) {
  const int n = static_cast<int>(diag.size());
  MetricField metric;
  metric.dim = n;
  metric.eval = [diag](const Vector&) { return Matrix(diag.asDiagonal()); };
  metric.analytic_partials = [n](const Vector&) {
    return std::vector<Matrix>(n, Matrix::Zero(n, n));
  };
  return metric;
}

inline void require_positive(double value, const char* name) {
  if (!(value > 0)) throw ConfigError(std::string(name) + " must be positive");
}

}  // namespace detail

/// Knife-edge planar body: sideways velocity is forbidden by the virtual
/// constraint sin(theta) dx - cos(theta) dy and actuated along the same
/// covector.
inline SystemCatalogEntry build_sleigh(double mass = 2.0, double inertia = 1.5) {
  detail::require_positive(mass, "mass");
  detail::require_positive(inertia, "inertia");

  SystemCatalogEntry entry;
  entry.name = "sleigh";
  entry.system.dim = 3;
  entry.system.coord_names = {"x", "y", "theta"};
  entry.system.metric = detail::constant_diagonal_metric(Vector{{mass, mass, inertia}});

  OneFormField mu;
  mu.dim = 3;
  mu.eval = [](const Vector& q) { return Vector{{std::sin(q(2)), -std::cos(q(2)), 0.0}}; };
  mu.analytic_jacobian = [](const Vector& q) {
    Matrix j = Matrix::Zero(3, 3);
    j(0, 2) = std::cos(q(2));
    j(1, 2) = std::sin(q(2));
    return j;
  };
  entry.constraints = ConstraintSet{{mu}};

  VectorFieldOnQ y;
  y.dim = 3;
  y.eval = [mass](const Vector& q) {
    return Vector{{std::sin(q(2)) / mass, -std::cos(q(2)) / mass, 0.0}};
  };
  entry.inputs = make_input_set({mu}, {y});

  entry.defaults.dt = 0.01;
  entry.defaults.t_final = 50.0;
  entry.defaults.gain = 1.0;
  entry.defaults.initial_state = State{Vector{{1.0, 1.0, M_PI}}, Vector{{0.5, 8.0, 0.1}}};

  entry.reference_invariance = [mass](const State& s) {
    const double th = s.q(2);
    return Vector{{-mass * s.v(2) * (std::cos(th) * s.v(0) + std::sin(th) * s.v(1))}};
  };
  entry.reference_stabilizing = [mass](const State& s) {
    const double th = s.q(2);
    return Vector{{-mass * s.v(2) * (std::cos(th) * s.v(0) + std::sin(th) * s.v(1)) -
                   mass * (s.v(0) * std::sin(th) - s.v(1) * std::cos(th))}};
  };
  return entry;
}

/// Same body and constraint as the sleigh, but the drive covector gains a
/// dtheta component, so the force is no longer orthogonal to the
/// distribution and the heading becomes actuated. The control laws printed
/// for the sleigh are unchanged because mu has no dtheta component.
inline SystemCatalogEntry build_sleigh_nonorthogonal(double mass = 2.0, double inertia = 1.5) {
  SystemCatalogEntry entry = build_sleigh(mass, inertia);
  entry.name = "sleigh-nonorthogonal";

  OneFormField f;
  f.dim = 3;
  f.eval = [](const Vector& q) { return Vector{{std::sin(q(2)), -std::cos(q(2)), 1.0}}; };
  f.analytic_jacobian = entry.constraints.forms[0].analytic_jacobian;

  VectorFieldOnQ y;
  y.dim = 3;
  y.eval = [mass, inertia](const Vector& q) {
    return Vector{{std::sin(q(2)) / mass, -std::cos(q(2)) / mass, 1.0 / inertia}};
  };
  entry.inputs = make_input_set({f}, {y});
  return entry;
}

/// Vertical rolling coin: contact kinematics x' = theta' cos(phi),
/// y' = theta' sin(phi) imposed as two virtual constraints with two drives.
inline SystemCatalogEntry build_rolling_coin(double mass = 2.0, double roll_inertia = 1.5,
                                             double steer_inertia = 1.1) {
  detail::require_positive(mass, "mass");
  detail::require_positive(roll_inertia, "roll inertia");
  detail::require_positive(steer_inertia, "steer inertia");

  SystemCatalogEntry entry;
  entry.name = "rolling-coin";
  entry.system.dim = 4;
  entry.system.coord_names = {"x", "y", "theta", "phi"};
  entry.system.metric =
      detail::constant_diagonal_metric(Vector{{mass, mass, roll_inertia, steer_inertia}});

  OneFormField mu1;
  mu1.dim = 4;
  mu1.eval = [](const Vector& q) { return Vector{{1.0, 0.0, -std::cos(q(3)), 0.0}}; };
  mu1.analytic_jacobian = [](const Vector& q) {
    Matrix j = Matrix::Zero(4, 4);
    j(2, 3) = std::sin(q(3));
    return j;
  };
  OneFormField mu2;
  mu2.dim = 4;
  mu2.eval = [](const Vector& q) { return Vector{{0.0, 1.0, -std::sin(q(3)), 0.0}}; };
  mu2.analytic_jacobian = [](const Vector& q) {
    Matrix j = Matrix::Zero(4, 4);
    j(2, 3) = -std::cos(q(3));
    return j;
  };
  entry.constraints = ConstraintSet{{mu1, mu2}};

  OneFormField f1;
  f1.dim = 4;
  f1.eval = [](const Vector& q) { return Vector{{1.0, 0.0, -std::cos(q(3)), 1.0}}; };
  f1.analytic_jacobian = mu1.analytic_jacobian;
  OneFormField f2;
  f2.dim = 4;
  f2.eval = [](const Vector& q) { return Vector{{0.0, 1.0, -std::sin(q(3)), 1.0}}; };
  f2.analytic_jacobian = mu2.analytic_jacobian;

  VectorFieldOnQ y1;
  y1.dim = 4;
  y1.eval = [mass, roll_inertia, steer_inertia](const Vector& q) {
    return Vector{{1.0 / mass, 0.0, -std::cos(q(3)) / roll_inertia, 1.0 / steer_inertia}};
  };
  VectorFieldOnQ y2;
  y2.dim = 4;
  y2.eval = [mass, roll_inertia, steer_inertia](const Vector& q) {
    return Vector{{0.0, 1.0 / mass, -std::sin(q(3)) / roll_inertia, 1.0 / steer_inertia}};
  };
  entry.inputs = make_input_set({f1, f2}, {y1, y2});

  entry.defaults.dt = 0.01;
  entry.defaults.t_final = 100.0;
  entry.defaults.gain = 1.0;
  entry.defaults.initial_state =
      State{Vector{{1.0, 1.0, M_PI, M_PI / 2.0}}, Vector{{0.5, 8.0, 0.1, -0.1}}};

  entry.reference_invariance = [mass](const State& s) {
    const double phi = s.q(3);
    return Vector{{-mass * s.v(2) * s.v(3) * std::sin(phi),
                   mass * s.v(2) * s.v(3) * std::cos(phi)}};
  };
  entry.reference_stabilizing = [mass, roll_inertia](const State& s) {
    const double phi = s.q(3);
    const double xd = s.v(0), yd = s.v(1), thd = s.v(2), phd = s.v(3);
    const double c1 = -xd + thd * std::cos(phi) - phd * thd * std::sin(phi);
    const double c2 = -yd + thd * std::sin(phi) + phd * thd * std::cos(phi);
    const double scale = mass * mass / (roll_inertia + mass);
    const double ratio = roll_inertia / mass;
    const double u1 = scale * (ratio * c1 + yd * std::cos(phi) * std::sin(phi) -
                               phd * thd * std::sin(phi) - xd * std::sin(phi) * std::sin(phi));
    const double u2 = scale * (xd * std::cos(phi) * std::sin(phi) + phd * thd * std::cos(phi) -
                               yd * std::cos(phi) * std::cos(phi) + ratio * c2);
    return Vector{{u1, u2}};
  };
  return entry;
}

inline const std::vector<SystemCatalogEntry>& catalog() {
  static const std::vector<SystemCatalogEntry> entries = {
      build_sleigh(), build_sleigh_nonorthogonal(), build_rolling_coin()};
  return entries;
}

inline const SystemCatalogEntry& find_system(const std::string& name) {
  for (const auto& entry : catalog())
    if (entry.name == name) return entry;
  std::string names;
  for (const auto& entry : catalog()) names += (names.empty() ? "" : ", ") + entry.name;
  throw ConfigError("unknown system '" + name + "' (available: " + names + ")");
}

}  // namespace vnc
