#pragma once

#include <Eigen/Dense>

#include <cmath>

#include "vnc/geometry.hpp"
#include "vnc/system.hpp"
#include "vnc/types.hpp"

namespace vnc {

/// Exponential decay rate of the stabilized constraint values (1/time).
/// The feedback enforces d/dt mu_hat^b = -k mu_hat^b; k = 1 gives the plain
/// e^{-t} decay.
struct ControlGain {
  double k = 1.0;

  ControlGain() = default;
  explicit ControlGain(double k_) : k(k_) {
    if (!(k > 0)) throw ConfigError("ControlGain: k must be positive");
  }
};

struct ControlOutput {
  Vector u;         // generalized-force magnitudes, one per input
  Vector mu_hat;    // constraint values at the state
  Vector drift_mu;  // derivative of mu_hat along the uncontrolled drift
};

/// Acceleration of the uncontrolled system: geodesic spray plus the sharped
/// external force minus the metric gradient of the potential.
inline Vector drift_acceleration(const ChartSystem& system, const State& state,
                                 double fd_step = kDefaultFdStep) {
  Vector a = geodesic_spray(system.metric, state.q, state.v, fd_step);
  if (system.external_force) {
    Vector f0 = system.external_force(state.q, state.v);
    if (f0.size() != system.dim) throw DimensionMismatch("external force has wrong length");
    a += sharp(system.metric, state.q, f0);
  }
  if (system.potential)
    a -= grad_potential(system.metric, *system.potential, state.q, fd_step);
  return a;
}

/// Derivative of each mu_hat^b along the drift vector field:
///   v^j d_j mu^b_i v^i + mu^b_i a_drift^i.
/// The drift includes the external force and the potential term, which is
/// what makes the closed-loop identity hold for forced systems.
inline Vector drift_derivative_of_muhat(const ChartSystem& system,
                                        const ConstraintSet& constraints, const State& state,
                                        double fd_step = kDefaultFdStep) {
  const Vector a = drift_acceleration(system, state, fd_step);
  Vector out(constraints.count());
  for (int b = 0; b < constraints.count(); ++b) {
    const OneFormField& form = constraints.forms[b];
    const Matrix jac = one_form_jacobian(form, state.q, fd_step);
    // v^j d_j mu_i v^i = v . (J^T v) with J(i,j) = d mu_i / dq^j
    out(b) = state.v.dot(jac.transpose() * state.v) + form.eval(state.q).dot(a);
  }
  return out;
}

/// The globally defined stabilizing law: solves
///   sum_a C(a,b) u_a = -k mu_hat^b - drift_mu^b
/// so that the closed loop satisfies d/dt mu_hat^b = -k mu_hat^b.
inline ControlOutput stabilizing_control(const ChartSystem& system,
                                         const ConstraintSet& constraints,
                                         const InputSet& inputs, const State& state,
                                         ControlGain gain = ControlGain{},
                                         double fd_step = kDefaultFdStep) {
  ControlOutput out;
  out.mu_hat = mu_hat(constraints, state);
  out.drift_mu = drift_derivative_of_muhat(system, constraints, state, fd_step);
  const Matrix c = detail::coupling_product(constraints, inputs, state.q);
  out.u = detail::solve_against_inputs(c, -gain.k * out.mu_hat - out.drift_mu);
  return out;
}

/// The exact-invariance law: cancels only the drift of mu_hat, keeping the
/// distribution invariant. On the distribution it coincides with the
/// stabilizing law; the same formula is evaluated at any state.
inline ControlOutput invariance_control(const ChartSystem& system,
                                        const ConstraintSet& constraints,
                                        const InputSet& inputs, const State& state,
                                        double fd_step = kDefaultFdStep) {
  ControlOutput out;
  out.mu_hat = mu_hat(constraints, state);
  out.drift_mu = drift_derivative_of_muhat(system, constraints, state, fd_step);
  const Matrix c = detail::coupling_product(constraints, inputs, state.q);
  out.u = detail::solve_against_inputs(c, -out.drift_mu);
  return out;
}

/// Single-constraint shortcut u = (-k mu_hat - drift_mu) / mu(Y).
inline double control_1d_simplified(const ChartSystem& system,
                                    const ConstraintSet& constraints, const InputSet& inputs,
                                    const State& state, ControlGain gain = ControlGain{},
                                    double fd_step = kDefaultFdStep) {
  if (constraints.count() != 1 || inputs.count() != 1)
    throw DimensionMismatch("control_1d_simplified needs exactly one constraint and one input");
  const double mu_of_y =
      constraints.forms[0].eval(state.q).dot(inputs.vectors[0].eval(state.q));
  if (mu_of_y == 0.0)
    throw TransversalityFailure("mu(Y) vanishes at the evaluated point");
  const double mh = mu_hat(constraints, state)(0);
  const double drift = drift_derivative_of_muhat(system, constraints, state, fd_step)(0);
  return (-gain.k * mh - drift) / mu_of_y;
}

}  // namespace vnc
