#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "vnc/errors.hpp"

namespace vnc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Default step for central finite differences. All smooth fields in the
/// built-in systems carry analytic derivatives, so this only matters for
/// user-supplied fields without them.
inline constexpr double kDefaultFdStep = 1e-5;

/// Threshold below which a reciprocal condition number counts as singular.
inline constexpr double kRcondFloor = 1e-12;

/// A point of the tangent bundle in one chart: configuration q and
/// velocity v, both of length dim.
struct State {
  Vector q;
  Vector v;

  State() = default;
  State(Vector q_, Vector v_) : q(std::move(q_)), v(std::move(v_)) {
    if (q.size() != v.size())
      throw DimensionMismatch("State: q and v must have the same length");
  }

  Eigen::Index dim() const { return q.size(); }
};

/// Riemannian metric in a chart. eval(q) must return a symmetric positive
/// definite dim x dim matrix. analytic_partials, when set, returns the
/// dim matrices dG/dq^k (partials[k](i,j) = dG_ij/dq^k); otherwise central
/// finite differences are used wherever derivatives are needed.
struct MetricField {
  int dim = 0;
  std::function<Matrix(const Vector&)> eval;
  std::function<std::vector<Matrix>(const Vector&)> analytic_partials;
};

/// Differential one-form in a chart: eval(q) is the covector of length dim.
/// analytic_jacobian, when set, returns J with J(i,j) = d mu_i / dq^j.
struct OneFormField {
  int dim = 0;
  std::function<Vector(const Vector&)> eval;
  std::function<Matrix(const Vector&)> analytic_jacobian;
};

/// Vector field on the configuration chart.
struct VectorFieldOnQ {
  int dim = 0;
  std::function<Vector(const Vector&)> eval;
};

/// Scalar function of the configuration, with optional analytic gradient
/// (the plain coordinate gradient dV/dq^i, not the metric gradient).
struct ScalarField {
  std::function<double(const Vector&)> eval;
  std::function<Vector(const Vector&)> analytic_gradient;
};

/// The m constraint one-forms mu^b whose joint kernel is the distribution
/// being stabilized. Requires m < dim.
struct ConstraintSet {
  std::vector<OneFormField> forms;

  ConstraintSet() = default;
  explicit ConstraintSet(std::vector<OneFormField> forms_) : forms(std::move(forms_)) {
    if (!forms.empty()) {
      const int n = forms.front().dim;
      for (const auto& f : forms)
        if (f.dim != n) throw DimensionMismatch("ConstraintSet: mixed form dimensions");
      if (static_cast<int>(forms.size()) >= n)
        throw DimensionMismatch("ConstraintSet: needs fewer constraints than coordinates");
    }
  }

  int count() const { return static_cast<int>(forms.size()); }
  int dim() const { return forms.empty() ? 0 : forms.front().dim; }
};

/// Stack the constraint covectors at q into an m x n matrix (row b = mu^b).
inline Matrix constraint_matrix(const ConstraintSet& constraints, const Vector& q) {
  Matrix mu(constraints.count(), q.size());
  for (int b = 0; b < constraints.count(); ++b) {
    Vector row = constraints.forms[b].eval(q);
    if (row.size() != q.size())
      throw DimensionMismatch("constraint form returned wrong length");
    mu.row(b) = row;
  }
  return mu;
}

/// The m input force one-forms f^a and their force vector fields Y^a.
/// Both representations are stored; the vectors are authoritative in all
/// computations. make_input_set derives the vectors by raising the index
/// through a metric; callers with closed-form Y^a can supply them directly.
struct InputSet {
  std::vector<OneFormField> forms;
  std::vector<VectorFieldOnQ> vectors;

  int count() const { return static_cast<int>(vectors.size()); }
  int dim() const { return vectors.empty() ? 0 : vectors.front().dim; }
};

/// Evaluate the input vector fields at q into an m x n matrix (row a = Y^a).
inline Matrix input_matrix(const InputSet& inputs, const Vector& q) {
  Matrix y(inputs.count(), q.size());
  for (int a = 0; a < inputs.count(); ++a) {
    Vector row = inputs.vectors[a].eval(q);
    if (row.size() != q.size())
      throw DimensionMismatch("input vector field returned wrong length");
    y.row(a) = row;
  }
  return y;
}

}  // namespace vnc
