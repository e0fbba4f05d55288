#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "vnc/dynamics.hpp"
#include "vnc/system.hpp"
#include "vnc/types.hpp"

namespace vnc {

struct SimConfig {
  double dt = 0.01;
  double t_final = 1.0;
  State initial_state;
  RhsKind kind = RhsKind::stabilizing();
  int record_every = 1;  // steps per recorded sample; must divide the step count
  double fd_step = kDefaultFdStep;

  int64_t step_count() const { return static_cast<int64_t>(std::llround(t_final / dt)); }

  void validate(int dim) const {
    if (!(dt > 0)) throw ConfigError("dt must be positive");
    if (!(t_final >= dt)) throw ConfigError("t_final must be at least dt");
    if (!(t_final / dt < 1e12)) throw ConfigError("t_final/dt out of integer range");
    const int64_t steps = step_count();
    if (steps < 1) throw ConfigError("no steps to take");
    if (record_every < 1) throw ConfigError("record_every must be positive");
    if (steps % record_every != 0)
      throw ConfigError("record_every must divide the number of steps");
    if (initial_state.dim() != dim)
      throw DimensionMismatch("initial state has wrong dimension");
    if (!initial_state.q.allFinite() || !initial_state.v.allFinite())
      throw ConfigError("initial state must be finite");
  }
};

struct TrajectoryMeta {
  std::string system_name;
  std::string law;
  double gain = 1.0;
  double dt = 0.0;
  int record_every = 1;
};

/// Uniformly sampled run record. All arrays share one length; times are
/// i * dt * record_every.
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  std::vector<Vector> controls;
  std::vector<Vector> mu_hats;
  std::vector<double> energies;
  TrajectoryMeta meta;

  std::size_t size() const { return times.size(); }
  int constraint_count() const { return mu_hats.empty() ? 0 : static_cast<int>(mu_hats.front().size()); }
};

namespace detail {

inline State rk4_step(const ChartSystem& system, const ConstraintSet& constraints,
                      const InputSet& inputs, const RhsKind& kind, const State& s, double dt,
                      double fd_step) {
  const StateDerivative k1 = rhs(system, constraints, inputs, kind, s, fd_step);
  const State s2{s.q + 0.5 * dt * k1.dq, s.v + 0.5 * dt * k1.dv};
  const StateDerivative k2 = rhs(system, constraints, inputs, kind, s2, fd_step);
  const State s3{s.q + 0.5 * dt * k2.dq, s.v + 0.5 * dt * k2.dv};
  const StateDerivative k3 = rhs(system, constraints, inputs, kind, s3, fd_step);
  const State s4{s.q + dt * k3.dq, s.v + dt * k3.dv};
  const StateDerivative k4 = rhs(system, constraints, inputs, kind, s4, fd_step);
  return State{s.q + (dt / 6.0) * (k1.dq + 2.0 * k2.dq + 2.0 * k3.dq + k4.dq),
               s.v + (dt / 6.0) * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv)};
}

}  // namespace detail

/// Classical fixed-step RK4. Records every record_every steps, always
/// including t = 0 and t_final. Controls are re-evaluated at the recorded
/// states (zero for law-free kinds).
inline Trajectory integrate(const ChartSystem& system, const ConstraintSet& constraints,
                            const InputSet& inputs, const SimConfig& config) {
  system.validate();
  config.validate(system.dim);

  const int64_t steps = config.step_count();
  Trajectory traj;
  traj.meta.law = config.kind.name();
  traj.meta.gain = config.kind.gain.k;
  traj.meta.dt = config.dt;
  traj.meta.record_every = config.record_every;
  traj.times.reserve(static_cast<std::size_t>(steps / config.record_every) + 1);

  auto record = [&](double t, const State& s) {
    traj.times.push_back(t);
    traj.states.push_back(s);
    traj.controls.push_back(
        control_for(system, constraints, inputs, config.kind, s, config.fd_step));
    traj.mu_hats.push_back(mu_hat(constraints, s));
    traj.energies.push_back(energy(system, s));
  };

  State current = config.initial_state;
  record(0.0, current);
  for (int64_t i = 0; i < steps; ++i) {
    const double t_next = static_cast<double>(i + 1) * config.dt;
    try {
      current = detail::rk4_step(system, constraints, inputs, config.kind, current, config.dt,
                                 config.fd_step);
    } catch (const TransversalityFailure& e) {
      throw TransversalityFailure(std::string(e.what()) + " at t = " +
                                  std::to_string(static_cast<double>(i) * config.dt));
    }
    if (!current.q.allFinite() || !current.v.allFinite())
      throw NumericalFailure("state became non-finite; last good t = " +
                             std::to_string(static_cast<double>(i) * config.dt));
    if ((i + 1) % config.record_every == 0) record(t_next, current);
  }
  return traj;
}

/// Per-constraint log-linear fit of the decay mu_hat^b(t) ~ A e^{-rate t}.
struct DecayFit {
  struct PerConstraint {
    double rate = 0.0;       // -slope of ln|mu_hat| vs t
    double intercept = 0.0;  // fitted ln|mu_hat| at t = 0
    double residual = 0.0;   // rms residual of the line fit
    int samples_used = 0;
  };
  std::vector<PerConstraint> constraints;
  double window_begin = 0.0;
  double window_end = 0.0;
};

/// Samples with |mu_hat| below this are dominated by floating-point noise
/// and are excluded from the log fit.
inline constexpr double kDecayFitFloor = 1e-12;

inline double default_decay_window_end(const Trajectory& traj) {
  return traj.times.empty() ? 0.0 : std::min(10.0, traj.times.back());
}

inline DecayFit fit_decay_rate(const Trajectory& traj, double window_begin,
                               double window_end) {
  const int m = traj.constraint_count();
  DecayFit fit;
  fit.window_begin = window_begin;
  fit.window_end = window_end;
  fit.constraints.resize(m);
  if (m == 0) throw InsufficientData("trajectory has no constraint values");

  for (int b = 0; b < m; ++b) {
    std::vector<double> ts, ys;
    for (std::size_t i = 0; i < traj.size(); ++i) {
      const double t = traj.times[i];
      if (t < window_begin || t > window_end) continue;
      const double a = std::abs(traj.mu_hats[i](b));
      if (a < kDecayFitFloor) continue;
      ts.push_back(t);
      ys.push_back(std::log(a));
    }
    const int count = static_cast<int>(ts.size());
    if (count < 10)
      throw InsufficientData("decay fit for constraint " + std::to_string(b + 1) + " has " +
                             std::to_string(count) + " usable samples (needs 10)");
    double t_mean = 0.0, y_mean = 0.0;
    for (int i = 0; i < count; ++i) {
      t_mean += ts[i];
      y_mean += ys[i];
    }
    t_mean /= count;
    y_mean /= count;
    double stt = 0.0, sty = 0.0;
    for (int i = 0; i < count; ++i) {
      stt += (ts[i] - t_mean) * (ts[i] - t_mean);
      sty += (ts[i] - t_mean) * (ys[i] - y_mean);
    }
    if (stt == 0.0) throw InsufficientData("decay fit window has no time spread");
    const double slope = sty / stt;
    auto& pc = fit.constraints[b];
    pc.rate = -slope;
    pc.intercept = y_mean - slope * t_mean;
    double ss = 0.0;
    for (int i = 0; i < count; ++i) {
      const double r = ys[i] - (pc.intercept + slope * ts[i]);
      ss += r * r;
    }
    pc.residual = std::sqrt(ss / count);
    pc.samples_used = count;
  }
  return fit;
}

inline DecayFit fit_decay_rate(const Trajectory& traj) {
  return fit_decay_rate(traj, 0.0, default_decay_window_end(traj));
}

/// Euclidean norm of mu_hat per sample.
inline std::vector<double> constraint_violation_norm(const Trajectory& traj) {
  std::vector<double> out;
  out.reserve(traj.size());
  for (const auto& mh : traj.mu_hats) out.push_back(mh.norm());
  return out;
}

}  // namespace vnc
