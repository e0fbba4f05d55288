#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "vnc/builtin_systems.hpp"
#include "vnc/system.hpp"

using namespace vnc;
using Catch::Approx;

namespace {

OneFormField constant_form(Vector coeffs) {
  OneFormField f;
  f.dim = static_cast<int>(coeffs.size());
  f.eval = [coeffs](const Vector&) { return coeffs; };
  return f;
}

VectorFieldOnQ constant_vector(Vector comps) {
  VectorFieldOnQ v;
  v.dim = static_cast<int>(comps.size());
  v.eval = [comps](const Vector&) { return comps; };
  return v;
}

}  // namespace

TEST_CASE("mu_hat evaluates the constraint covectors on the velocity") {
  SECTION("sleigh at the default start") {
    auto sleigh = build_sleigh();
    Vector mh = mu_hat(sleigh.constraints, sleigh.defaults.initial_state);
    REQUIRE(mh.size() == 1);
    REQUIRE(mh(0) == Approx(8.0).margin(1e-12));
  }
  SECTION("rolling coin at the default start") {
    auto coin = build_rolling_coin();
    Vector mh = mu_hat(coin.constraints, coin.defaults.initial_state);
    REQUIRE(mh.size() == 2);
    CHECK(mh(0) == Approx(0.5).margin(1e-12));
    CHECK(mh(1) == Approx(7.9).margin(1e-12));
  }
  SECTION("velocities in the distribution give zero") {
    auto sleigh = build_sleigh();
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> coord(-5.0, 5.0);
    for (int trial = 0; trial < 30; ++trial) {
      Vector q{{coord(rng), coord(rng), coord(rng)}};
      Vector v{{coord(rng), coord(rng), coord(rng)}};
      Projectors p = orthogonal_projectors(sleigh.system.metric, sleigh.constraints, q);
      Vector mh = mu_hat(sleigh.constraints, State{q, Vector(p.tangent * v)});
      REQUIRE(mh.cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
  SECTION("linear in the velocity") {
    auto coin = build_rolling_coin();
    std::mt19937 rng(12);
    std::uniform_real_distribution<double> coord(-5.0, 5.0);
    for (int trial = 0; trial < 30; ++trial) {
      Vector q(4), v(4), w(4);
      for (int i = 0; i < 4; ++i) {
        q(i) = coord(rng);
        v(i) = coord(rng);
        w(i) = coord(rng);
      }
      const double alpha = coord(rng);
      Vector lhs = mu_hat(coin.constraints, State{q, Vector(alpha * v + w)});
      Vector rhs = alpha * mu_hat(coin.constraints, State{q, v}) +
                   mu_hat(coin.constraints, State{q, w});
      REQUIRE((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("coupling matrix for the sleigh is 1/mass at every heading") {
  auto sleigh = build_sleigh();
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> coord(-6.3, 6.3);
  for (int trial = 0; trial < 30; ++trial) {
    Vector q{{coord(rng), coord(rng), coord(rng)}};
    Matrix c = c_matrix(sleigh.constraints, sleigh.inputs, q);
    REQUIRE(c.rows() == 1);
    REQUIRE(c(0, 0) == Approx(0.5).margin(1e-14));
    Matrix cinv = c_inverse(sleigh.constraints, sleigh.inputs, q);
    REQUIRE(cinv(0, 0) == Approx(2.0).margin(1e-13));
  }
}

TEST_CASE("coupling matrix for the rolling coin matches its closed form") {
  const double m = 2.0, inertia = 1.5;
  auto coin = build_rolling_coin(m, inertia, 1.1);
  std::mt19937 rng(14);
  std::uniform_real_distribution<double> coord(-6.3, 6.3);
  for (int trial = 0; trial < 100; ++trial) {
    Vector q{{coord(rng), coord(rng), coord(rng), coord(rng)}};
    const double phi = q(3);
    const double c_ = std::cos(phi), s_ = std::sin(phi);

    Matrix expected(2, 2);
    expected << 1.0 / m + c_ * c_ / inertia, c_ * s_ / inertia,
        c_ * s_ / inertia, 1.0 / m + s_ * s_ / inertia;
    Matrix c = c_matrix(coin.constraints, coin.inputs, q);
    REQUIRE((c - expected).cwiseAbs().maxCoeff() <= 1e-12);

    Matrix expected_inv(2, 2);
    expected_inv << inertia + m * s_ * s_, -m * c_ * s_,
        -m * c_ * s_, inertia + m * c_ * c_;
    expected_inv *= m / (inertia + m);
    Matrix cinv = c_inverse(coin.constraints, coin.inputs, q);
    REQUIRE((cinv - expected_inv).cwiseAbs().maxCoeff() <= 1e-12);

    REQUIRE((c * cinv - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("inputs inside the distribution break transversality") {
  // 1-D case: mu = dx, Y along y, so mu(Y) = 0.
  MetricField metric;
  metric.dim = 2;
  metric.eval = [](const Vector&) { return Matrix(Matrix::Identity(2, 2)); };
  ConstraintSet constraints{{constant_form(Vector{{1.0, 0.0}})}};
  InputSet inputs = make_input_set({constant_form(Vector{{0.0, 1.0}})},
                                   {constant_vector(Vector{{0.0, 1.0}})});
  REQUIRE_THROWS_AS(c_matrix(constraints, inputs, Vector::Zero(2)), TransversalityFailure);
  REQUIRE_THROWS_AS(c_inverse(constraints, inputs, Vector::Zero(2)), TransversalityFailure);
}

TEST_CASE("transversality report") {
  SECTION("sleigh: scalar case has rcond one") {
    auto sleigh = build_sleigh();
    std::mt19937 rng(15);
    std::uniform_real_distribution<double> coord(-6.3, 6.3);
    for (int trial = 0; trial < 10; ++trial) {
      Vector q{{coord(rng), coord(rng), coord(rng)}};
      auto report = check_transversality(sleigh.constraints, sleigh.inputs, q);
      CHECK(report.rank_mu == 1);
      CHECK(report.rank_c == 1);
      CHECK(report.rcond_c == Approx(1.0));
      CHECK(report.transversal);
      CHECK(report.constraints_full_rank);
    }
  }
  SECTION("coin at phi = pi/2") {
    auto coin = build_rolling_coin();
    Vector q{{1.0, 1.0, M_PI, M_PI / 2.0}};
    auto report = check_transversality(coin.constraints, coin.inputs, q);
    CHECK(report.rank_mu == 2);
    CHECK(report.rank_c == 2);
    CHECK(report.transversal);
  }
  SECTION("duplicate constraint rows are flagged, not thrown") {
    auto sleigh = build_sleigh();
    ConstraintSet dup{{sleigh.constraints.forms[0], sleigh.constraints.forms[0]}};
    InputSet two_inputs =
        make_input_set({sleigh.inputs.forms[0], sleigh.inputs.forms[0]},
                       {sleigh.inputs.vectors[0], sleigh.inputs.vectors[0]});
    auto report = check_transversality(dup, two_inputs, Vector::Zero(3));
    CHECK(report.rank_mu == 1);
    CHECK_FALSE(report.constraints_full_rank);
    CHECK_FALSE(report.transversal);
  }
}

TEST_CASE("coupling matrix is invertible on transversal random samples") {
  // Random metric, constraints, and inputs; samples where the input span
  // meets the constraint kernel are rejected, everything accepted must
  // yield an invertible C.
  std::mt19937 rng(1234);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> dim_dist(2, 6);

  int accepted = 0;
  int rejected = 0;
  while (accepted < 1000) {
    const int n = dim_dist(rng);
    std::uniform_int_distribution<int> m_dist(1, n - 1);
    const int m = m_dist(rng);

    Matrix a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = gauss(rng);
    const Matrix g = a * a.transpose() + 0.1 * Matrix::Identity(n, n);

    Matrix mu(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) mu(i, j) = gauss(rng);

    Matrix f(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) f(i, j) = gauss(rng);
    const Matrix y = f * g.inverse();  // rows are Y^a = sharp(f^a)

    // Reject nearly dependent constraint rows.
    Matrix mu_unit = mu;
    for (int i = 0; i < m; ++i) mu_unit.row(i).normalize();
    Eigen::JacobiSVD<Matrix> mu_svd(mu_unit, Eigen::ComputeFullV);
    if (mu_svd.singularValues()(m - 1) < 1e-3) {
      ++rejected;
      continue;
    }

    // Reject samples where some combination of the inputs (nearly) lies in
    // ker mu: the kernel basis plus the inputs must span all of R^n.
    Matrix basis(n, n);
    basis.leftCols(n - m) = mu_svd.matrixV().rightCols(n - m);
    for (int i = 0; i < m; ++i) basis.col(n - m + i) = y.row(i).normalized();
    Eigen::JacobiSVD<Matrix> basis_svd(basis);
    if (basis_svd.singularValues()(n - 1) < 1e-3) {
      ++rejected;
      continue;
    }
    ++accepted;

    MetricField metric;
    metric.dim = n;
    metric.eval = [g](const Vector&) { return g; };
    std::vector<OneFormField> mu_forms, f_forms;
    std::vector<VectorFieldOnQ> y_fields;
    for (int i = 0; i < m; ++i) {
      mu_forms.push_back(constant_form(mu.row(i)));
      f_forms.push_back(constant_form(f.row(i)));
      y_fields.push_back(constant_vector(y.row(i)));
    }
    ConstraintSet constraints{mu_forms};
    InputSet inputs = make_input_set(f_forms, y_fields);

    REQUIRE_NOTHROW(c_inverse(constraints, inputs, Vector::Zero(n)));
    auto report = check_transversality(constraints, inputs, Vector::Zero(n));
    REQUIRE(report.transversal);
  }
  INFO("rejected " << rejected << " degenerate samples");
  REQUIRE(accepted == 1000);
}
