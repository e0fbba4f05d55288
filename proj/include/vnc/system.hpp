#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vnc/geometry.hpp"
#include "vnc/types.hpp"

namespace vnc {

/// A mechanical system in one coordinate chart: kinetic-energy metric,
/// optional potential, optional external force covector F0(q, v).
struct ChartSystem {
  int dim = 0;
  std::vector<std::string> coord_names;
  MetricField metric;
  std::optional<ScalarField> potential;
  std::function<Vector(const Vector&, const Vector&)> external_force;

  void validate() const {
    if (dim <= 0) throw ConfigError("ChartSystem: dim must be positive");
    if (static_cast<int>(coord_names.size()) != dim)
      throw DimensionMismatch("ChartSystem: coord_names length must equal dim");
    if (metric.dim != dim) throw DimensionMismatch("ChartSystem: metric dim mismatch");
    if (!metric.eval) throw ConfigError("ChartSystem: metric eval missing");
  }
};

/// Build an input set from force one-forms, deriving the vector fields
/// Y^a = sharp(f^a) through the metric.
inline InputSet make_input_set(const MetricField& metric, std::vector<OneFormField> forms) {
  InputSet inputs;
  inputs.vectors.reserve(forms.size());
  for (const auto& form : forms) {
    if (form.dim != metric.dim) throw DimensionMismatch("input form dim mismatch");
    VectorFieldOnQ y;
    y.dim = metric.dim;
    y.eval = [metric, form](const Vector& q) { return sharp(metric, q, form.eval(q)); };
    inputs.vectors.push_back(std::move(y));
  }
  inputs.forms = std::move(forms);
  return inputs;
}

/// Build an input set from closed-form vector fields, keeping the one-forms
/// alongside for reference.
inline InputSet make_input_set(std::vector<OneFormField> forms,
                               std::vector<VectorFieldOnQ> vectors) {
  if (forms.size() != vectors.size())
    throw DimensionMismatch("input set: forms and vectors counts differ");
  return InputSet{std::move(forms), std::move(vectors)};
}

/// The constraint values mu_hat^b = mu^b_i(q) v^i, one per constraint.
inline Vector mu_hat(const ConstraintSet& constraints, const State& state) {
  return constraint_matrix(constraints, state.q) * state.v;
}

namespace detail {

/// Raw coupling product C(a,b) = mu^b(Y^a), no invertibility check.
inline Matrix coupling_product(const ConstraintSet& constraints, const InputSet& inputs,
                               const Vector& q) {
  if (constraints.count() != inputs.count())
    throw DimensionMismatch("number of inputs must equal number of constraints");
  const Matrix mu = constraint_matrix(constraints, q);
  const Matrix y = input_matrix(inputs, q);
  return y * mu.transpose();
}

inline Eigen::PartialPivLU<Matrix> transversal_lu(Matrix c) {
  Eigen::PartialPivLU<Matrix> lu(std::move(c));
  if (!(lu.rcond() > kRcondFloor))
    throw TransversalityFailure(
        "constraint and input distributions intersect at the evaluated point");
  return lu;
}

/// Solve sum_a C(a,b) u_a = rhs_b for u. This contraction over the input
/// index is the one the closed-loop identity d/dt mu_hat^b = -k mu_hat^b
/// requires; it is a transpose solve, which only matters when C is not
/// symmetric (all built-in systems have symmetric C).
inline Vector solve_against_inputs(const Matrix& c, const Vector& rhs) {
  return transversal_lu(c.transpose()).solve(rhs);
}

}  // namespace detail

/// The input/constraint coupling matrix C(a,b) = mu^b(Y^a). Invertible
/// exactly when the two distributions are transversal at q; loss of
/// invertibility is an error.
inline Matrix c_matrix(const ConstraintSet& constraints, const InputSet& inputs,
                       const Vector& q) {
  Matrix c = detail::coupling_product(constraints, inputs, q);
  detail::transversal_lu(c);
  return c;
}

/// Inverse of c_matrix.
inline Matrix c_inverse(const ConstraintSet& constraints, const InputSet& inputs,
                        const Vector& q) {
  return detail::transversal_lu(detail::coupling_product(constraints, inputs, q)).inverse();
}

/// Pointwise transversality diagnostic. Never throws.
struct TransversalityReport {
  int constraint_count = 0;
  int rank_mu = 0;         // rank of the stacked constraint covectors
  int rank_c = 0;          // rank of C
  double rcond_c = 0.0;    // reciprocal condition number of C
  bool constraints_full_rank = false;
  bool transversal = false;
};

inline TransversalityReport check_transversality(const ConstraintSet& constraints,
                                                 const InputSet& inputs, const Vector& q) {
  TransversalityReport report;
  report.constraint_count = constraints.count();
  if (constraints.count() == 0) {
    report.transversal = true;
    report.constraints_full_rank = true;
    return report;
  }
  try {
    const Matrix mu = constraint_matrix(constraints, q);
    Eigen::ColPivHouseholderQR<Matrix> qr(mu);
    qr.setThreshold(1e-10);
    report.rank_mu = static_cast<int>(qr.rank());
    report.constraints_full_rank = report.rank_mu == constraints.count();

    const Matrix c = detail::coupling_product(constraints, inputs, q);
    Eigen::ColPivHouseholderQR<Matrix> qc(c);
    qc.setThreshold(1e-10);
    report.rank_c = static_cast<int>(qc.rank());
    Eigen::PartialPivLU<Matrix> lu(c);
    report.rcond_c = lu.rcond();
    report.transversal = report.rcond_c > kRcondFloor;
  } catch (const Error&) {
    report.transversal = false;
  }
  return report;
}

}  // namespace vnc
