#pragma once

#include <Eigen/Dense>

#include <string>

#include "vnc/control.hpp"
#include "vnc/geometry.hpp"
#include "vnc/system.hpp"
#include "vnc/types.hpp"

namespace vnc {

/// Which right-hand side to integrate.
struct RhsKind {
  enum class Kind {
    OpenLoop,               // drift only, u = 0
    ClosedLoopStabilizing,  // u from the stabilizing law with the stored gain
    ClosedLoopInvariance,   // u from the exact-invariance law
    NonholonomicReference,  // constraint forces via Lagrange multipliers
  };

  Kind kind = Kind::ClosedLoopStabilizing;
  ControlGain gain{};

  static RhsKind open_loop() { return {Kind::OpenLoop, ControlGain{}}; }
  static RhsKind stabilizing(double k = 1.0) {
    return {Kind::ClosedLoopStabilizing, ControlGain{k}};
  }
  static RhsKind invariance() { return {Kind::ClosedLoopInvariance, ControlGain{}}; }
  static RhsKind nonholonomic() { return {Kind::NonholonomicReference, ControlGain{}}; }

  const char* name() const {
    switch (kind) {
      case Kind::OpenLoop: return "open";
      case Kind::ClosedLoopStabilizing: return "stabilizing";
      case Kind::ClosedLoopInvariance: return "invariance";
      case Kind::NonholonomicReference: return "nonholonomic";
    }
    return "?";
  }
};

struct StateDerivative {
  Vector dq;
  Vector dv;
};

/// Control vector the selected law applies at this state. Zero for the
/// open-loop and multiplier-based kinds.
inline Vector control_for(const ChartSystem& system, const ConstraintSet& constraints,
                          const InputSet& inputs, const RhsKind& kind, const State& state,
                          double fd_step = kDefaultFdStep) {
  switch (kind.kind) {
    case RhsKind::Kind::ClosedLoopStabilizing:
      return stabilizing_control(system, constraints, inputs, state, kind.gain, fd_step).u;
    case RhsKind::Kind::ClosedLoopInvariance:
      return invariance_control(system, constraints, inputs, state, fd_step).u;
    default:
      return Vector::Zero(constraints.count());
  }
}

/// Assembled equations of motion: dq = v and
///   dv = spray + Y0 - grad V + sum_a u_a Y^a          (controlled kinds)
///   dv = a_free + G^{-1} mu^T lambda                   (nonholonomic kind)
/// with lambda chosen so the constraint values stay constant along the flow.
inline StateDerivative rhs(const ChartSystem& system, const ConstraintSet& constraints,
                           const InputSet& inputs, const RhsKind& kind, const State& state,
                           double fd_step = kDefaultFdStep) {
  StateDerivative out;
  out.dq = state.v;

  if (kind.kind == RhsKind::Kind::NonholonomicReference) {
    const Vector a_free = drift_acceleration(system, state, fd_step);
    if (constraints.count() == 0) {
      out.dv = a_free;
      return out;
    }
    const Matrix mu = constraint_matrix(constraints, state.q);
    const Matrix ginv = metric_inverse(system.metric, state.q);
    const Matrix gram = mu * ginv * mu.transpose();
    Eigen::PartialPivLU<Matrix> lu(gram);
    if (!(lu.rcond() > kRcondFloor))
      throw RankDeficientConstraints("constraint forms are rank deficient at the evaluated point");
    Vector curvature(constraints.count());  // v^j d_j mu^b_i v^i
    for (int b = 0; b < constraints.count(); ++b) {
      const Matrix jac = one_form_jacobian(constraints.forms[b], state.q, fd_step);
      curvature(b) = state.v.dot(jac * state.v);
    }
    const Vector lambda = -lu.solve(mu * a_free + curvature);
    out.dv = a_free + ginv * mu.transpose() * lambda;
    return out;
  }

  out.dv = drift_acceleration(system, state, fd_step);
  if (kind.kind != RhsKind::Kind::OpenLoop) {
    const Vector u = control_for(system, constraints, inputs, kind, state, fd_step);
    for (int a = 0; a < inputs.count(); ++a)
      out.dv += u(a) * inputs.vectors[a].eval(state.q);
  }
  return out;
}

/// Total mechanical energy 1/2 v^T G(q) v + V(q).
inline double energy(const ChartSystem& system, const State& state) {
  const Matrix g = metric_matrix(system.metric, state.q);
  double e = 0.5 * state.v.dot(g * state.v);
  if (system.potential) e += system.potential->eval(state.q);
  return e;
}

}  // namespace vnc
