#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "vnc/errors.hpp"
#include "vnc/types.hpp"

namespace vnc {

/// Christoffel symbols of the second kind at a fixed q.
/// gamma[i](j,k) = Gamma^i_{jk}, symmetric in (j,k).
struct Christoffels {
  std::vector<Matrix> gamma;

  double operator()(int i, int j, int k) const { return gamma[i](j, k); }
  int dim() const { return static_cast<int>(gamma.size()); }
};

namespace detail {

inline void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw NumericalFailure(std::string(what) + ": non-finite values");
}

inline void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw NumericalFailure(std::string(what) + ": non-finite values");
}

}  // namespace detail

/// Evaluate the metric at q, checking the symmetry and positive-definiteness
/// invariants. Violations are hard errors.
inline Matrix metric_matrix(const MetricField& metric, const Vector& q) {
  Matrix g = metric.eval(q);
  if (g.rows() != metric.dim || g.cols() != metric.dim)
    throw DimensionMismatch("metric eval returned wrong shape");
  detail::require_finite(g, "metric");
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw NumericalFailure("metric is not symmetric at the evaluated point");
  // Cholesky succeeds exactly on numerically positive definite matrices.
  Eigen::LLT<Matrix> llt(g);
  if (llt.info() != Eigen::Success)
    throw MetricSingular("metric is not positive definite at the evaluated point");
  return g;
}

/// G^{-1} at q via LU with partial pivoting; rcond below 1e-12 is an error.
inline Matrix metric_inverse(const MetricField& metric, const Vector& q) {
  Matrix g = metric_matrix(metric, q);
  Eigen::PartialPivLU<Matrix> lu(g);
  if (!(lu.rcond() > kRcondFloor))
    throw MetricSingular("metric inversion failed: rcond below 1e-12");
  return lu.inverse();
}

/// The dim partial-derivative matrices dG/dq^k, analytic when available,
/// central finite differences with step fd_step otherwise.
inline std::vector<Matrix> metric_partials(const MetricField& metric, const Vector& q,
                                           double fd_step = kDefaultFdStep) {
  const int n = metric.dim;
  if (metric.analytic_partials) {
    std::vector<Matrix> dg = metric.analytic_partials(q);
    if (static_cast<int>(dg.size()) != n)
      throw DimensionMismatch("metric analytic_partials returned wrong count");
    for (const auto& m : dg) detail::require_finite(m, "metric partials");
    return dg;
  }
  if (!(fd_step > 0)) throw ConfigError("fd_step must be positive");
  std::vector<Matrix> dg(n);
  Vector qp = q, qm = q;
  for (int k = 0; k < n; ++k) {
    qp(k) = q(k) + fd_step;
    qm(k) = q(k) - fd_step;
    dg[k] = (metric.eval(qp) - metric.eval(qm)) / (2.0 * fd_step);
    detail::require_finite(dg[k], "metric finite-difference partials");
    qp(k) = q(k);
    qm(k) = q(k);
  }
  return dg;
}

/// Levi-Civita Christoffel symbols
///   Gamma^i_{jk} = 1/2 G^{il} (d_j G_lk + d_k G_lj - d_l G_jk),
/// symmetrized over (j,k) as computed.
inline Christoffels christoffel(const MetricField& metric, const Vector& q,
                                double fd_step = kDefaultFdStep) {
  const int n = metric.dim;
  const Matrix ginv = metric_inverse(metric, q);
  const std::vector<Matrix> dg = metric_partials(metric, q, fd_step);

  Christoffels out;
  out.gamma.assign(n, Matrix::Zero(n, n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = j; k < n; ++k) {
        double s = 0.0;
        for (int l = 0; l < n; ++l)
          s += ginv(i, l) * (dg[j](l, k) + dg[k](l, j) - dg[l](j, k));
        s *= 0.5;
        out.gamma[i](j, k) = s;
        out.gamma[i](k, j) = s;
      }
    }
    detail::require_finite(out.gamma[i], "christoffel");
  }
  return out;
}

/// Geodesic spray acceleration a^i = -Gamma^i_{jk} v^j v^k.
inline Vector geodesic_spray(const MetricField& metric, const Vector& q, const Vector& v,
                             double fd_step = kDefaultFdStep) {
  if (v.size() != metric.dim) throw DimensionMismatch("geodesic_spray: wrong velocity length");
  const Christoffels gamma = christoffel(metric, q, fd_step);
  Vector a(metric.dim);
  for (int i = 0; i < metric.dim; ++i) a(i) = -v.dot(gamma.gamma[i] * v);
  return a;
}

/// Raise an index: sharp(omega)^i = G^{ij} omega_j.
inline Vector sharp(const MetricField& metric, const Vector& q, const Vector& omega) {
  if (omega.size() != metric.dim) throw DimensionMismatch("sharp: wrong covector length");
  return metric_inverse(metric, q) * omega;
}

/// Lower an index: flat(x)_i = G_ij x^j.
inline Vector flat(const MetricField& metric, const Vector& q, const Vector& x) {
  if (x.size() != metric.dim) throw DimensionMismatch("flat: wrong vector length");
  return metric_matrix(metric, q) * x;
}

/// Plain coordinate gradient dV/dq, analytic when supplied.
inline Vector potential_partials(const ScalarField& potential, const Vector& q,
                                 double fd_step = kDefaultFdStep) {
  if (potential.analytic_gradient) {
    Vector dv = potential.analytic_gradient(q);
    detail::require_finite(dv, "potential gradient");
    return dv;
  }
  if (!(fd_step > 0)) throw ConfigError("fd_step must be positive");
  Vector dv(q.size()), qp = q, qm = q;
  for (int k = 0; k < q.size(); ++k) {
    qp(k) = q(k) + fd_step;
    qm(k) = q(k) - fd_step;
    dv(k) = (potential.eval(qp) - potential.eval(qm)) / (2.0 * fd_step);
    qp(k) = q(k);
    qm(k) = q(k);
  }
  detail::require_finite(dv, "potential finite-difference gradient");
  return dv;
}

/// Metric gradient grad V = G^{ij} dV/dq^j.
inline Vector grad_potential(const MetricField& metric, const ScalarField& potential,
                             const Vector& q, double fd_step = kDefaultFdStep) {
  return metric_inverse(metric, q) * potential_partials(potential, q, fd_step);
}

/// Jacobian of a one-form: J(i,j) = d mu_i / dq^j.
inline Matrix one_form_jacobian(const OneFormField& form, const Vector& q,
                                double fd_step = kDefaultFdStep) {
  if (form.analytic_jacobian) {
    Matrix j = form.analytic_jacobian(q);
    detail::require_finite(j, "one-form jacobian");
    return j;
  }
  if (!(fd_step > 0)) throw ConfigError("fd_step must be positive");
  const int n = form.dim;
  Matrix j(n, n);
  Vector qp = q, qm = q;
  for (int k = 0; k < n; ++k) {
    qp(k) = q(k) + fd_step;
    qm(k) = q(k) - fd_step;
    j.col(k) = (form.eval(qp) - form.eval(qm)) / (2.0 * fd_step);
    qp(k) = q(k);
    qm(k) = q(k);
  }
  detail::require_finite(j, "one-form finite-difference jacobian");
  return j;
}

/// Complementary metric-orthogonal projectors onto the constraint
/// distribution and its orthogonal complement.
struct Projectors {
  Matrix tangent;  // P: TQ -> D (kernel of the constraint forms)
  Matrix normal;   // Q: TQ -> D-perp
};

/// P = I - Q with Q = G^{-1} mu^T (mu G^{-1} mu^T)^{-1} mu.
inline Projectors orthogonal_projectors(const MetricField& metric,
                                        const ConstraintSet& constraints, const Vector& q) {
  const int n = metric.dim;
  if (constraints.count() == 0)
    return Projectors{Matrix::Identity(n, n), Matrix::Zero(n, n)};

  const Matrix mu = constraint_matrix(constraints, q);
  const Matrix ginv = metric_inverse(metric, q);
  const Matrix gram = mu * ginv * mu.transpose();
  Eigen::PartialPivLU<Matrix> lu(gram);
  if (!(lu.rcond() > kRcondFloor))
    throw RankDeficientConstraints("constraint forms are rank deficient at the evaluated point");
  Matrix normal = ginv * mu.transpose() * lu.solve(mu);
  return Projectors{Matrix::Identity(n, n) - normal, std::move(normal)};
}

}  // namespace vnc
