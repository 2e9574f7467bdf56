#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "support.hpp"
#include "zofd/errors.hpp"
#include "zofd/estimator.hpp"

using namespace zofd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

ScalarFunction linear(const VectorXd& a) {
  return [a](const VectorXd& x) { return a.dot(x); };
}

ScalarFunction counting(ScalarFunction f, int& calls) {
  return [f, &calls](const VectorXd& x) {
    ++calls;
    return f(x);
  };
}

DirectionMatrix dm(const MatrixXd& p, DirectionKind kind = DirectionKind::qr_haar) {
  return DirectionMatrix(p, kind);
}

}  // namespace

TEST_CASE("linear F with orthonormal ell = d = 2 recovers a") {
  const VectorXd a = (VectorXd(2) << 1, 2).finished();
  const double t = 0.3;
  MatrixXd rot(2, 2);
  rot << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  for (double h : {1e-7, 1e-3, 0.5}) {
    const GradEstimate est = forward_fd(linear(a), VectorXd::Zero(2), h, dm(rot));
    CHECK((est.g - a).norm() / a.norm() <= 1e-9);
  }
}

TEST_CASE("F = x_1, d = 4, ell = 1, P = e_1 gives (4, 0, 0, 0)") {
  const ScalarFunction f = [](const VectorXd& x) { return x[0]; };
  const GradEstimate est = forward_fd(f, VectorXd::Zero(4), 0.1, dm(VectorXd::Unit(4, 0)));
  CHECK(est.g[0] == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(est.g.tail(3).isZero(0.0));
}

TEST_CASE("F = 1/2 ||x||^2, d = 2, ell = 1, P = e_1, x = 0, h = 0.01 gives (0.01, 0)") {
  // By hand: (d/ell) * ((h^2 / 2 - 0) / h) = 2 * h / 2 = h = 0.01.
  const ScalarFunction f = [](const VectorXd& x) { return 0.5 * x.squaredNorm(); };
  const GradEstimate est = forward_fd(f, VectorXd::Zero(2), 0.01, dm(VectorXd::Unit(2, 0)));
  CHECK(est.g[0] == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(est.g[1] == 0.0);
}

TEST_CASE("evaluation accounting and base value") {
  int calls = 0;
  const ScalarFunction f = counting([](const VectorXd& x) { return x.sum() + 3.0; }, calls);
  auto rng = test::stream(1);
  const DirectionMatrix p = gen_qr_haar(6, 4, rng);

  const GradEstimate fresh = forward_fd(f, VectorXd::Zero(6), 1e-3, p);
  CHECK(fresh.evals_used == 5);
  CHECK(calls == 5);
  CHECK(fresh.base_value == 3.0);

  calls = 0;
  const GradEstimate cached = forward_fd(f, VectorXd::Zero(6), 1e-3, p, 3.0);
  CHECK(cached.evals_used == 4);
  CHECK(calls == 4);
  CHECK(cached.base_value == 3.0);
  CHECK(cached.g == fresh.g);
}

TEST_CASE("invalid arguments are rejected") {
  const ScalarFunction f = [](const VectorXd& x) { return x.sum(); };
  const DirectionMatrix p = dm(MatrixXd::Identity(3, 3), DirectionKind::coordinate);
  CHECK_THROWS_AS(forward_fd(f, VectorXd::Zero(3), 0.0, p), ParameterError);
  CHECK_THROWS_AS(forward_fd(f, VectorXd::Zero(3), -1e-3, p), ParameterError);
  CHECK_THROWS_AS(forward_fd(f, VectorXd::Zero(4), 1e-3, p), DimensionError);
}

TEST_CASE("non-finite values raise EvaluationError carrying the probe point") {
  const ScalarFunction f = [](const VectorXd& x) {
    return x[1] > 0.5 ? std::numeric_limits<double>::quiet_NaN() : x.sum();
  };
  const DirectionMatrix p = dm(MatrixXd::Identity(3, 3), DirectionKind::coordinate);
  try {
    forward_fd(f, VectorXd::Zero(3), 1.0, p);
    FAIL("expected EvaluationError");
  } catch (const EvaluationError& e) {
    CHECK(e.point() == VectorXd::Unit(3, 1));
  }

  const ScalarFunction inf_at_base = [](const VectorXd&) { return INFINITY; };
  CHECK_THROWS_AS(forward_fd(inf_at_base, VectorXd::Zero(3), 1.0, p), EvaluationError);
}

TEST_CASE("linear exactness at ell = d for every orthonormal kind and h in [1e-7, 1e-1]") {
  for (DirectionKind kind : kStructuredKinds) {
    for (int d : {2, 7, 16, 40}) {
      auto rng = test::stream(100 + d);
      VectorXd a(d);
      for (int i = 0; i < d; ++i) a[i] = rng.normal();
      const DirectionMatrix p = generate(kind, d, d, rng);
      for (double h : {1e-7, 1e-5, 1e-3, 1e-1}) {
        CAPTURE(to_string(kind));
        CAPTURE(d);
        CAPTURE(h);
        const GradEstimate est = forward_fd(linear(a), VectorXd::Zero(d), h, p);
        CHECK((est.g - a).norm() / a.norm() <= 1e-8);
      }
    }
  }
}

TEST_CASE("projection identity: g = (d / ell) P P^T a for linear F") {
  auto rng = test::stream(2);
  for (int ell : {1, 3, 9}) {
    const int d = 12;
    VectorXd a(d);
    for (int i = 0; i < d; ++i) a[i] = rng.normal();
    const DirectionMatrix p = gen_qr_haar(d, ell, rng);
    const VectorXd want = double(d) / ell * p.matrix() * (p.matrix().transpose() * a);
    const GradEstimate est = forward_fd(linear(a), VectorXd::Zero(d), 1e-2, p);
    CHECK((est.g - want).norm() <= 1e-9 * std::max(1.0, want.norm()));
  }
}

TEST_CASE("the error against the h -> 0 limit is first order in h for a quadratic") {
  const int d = 5;
  auto rng = test::stream(3);
  MatrixXd b(d, d);
  for (int i = 0; i < d * d; ++i) b.data()[i] = rng.normal();
  const MatrixXd q = b.transpose() * b + MatrixXd::Identity(d, d);
  VectorXd c(d);
  for (int i = 0; i < d; ++i) c[i] = rng.normal();
  const ScalarFunction f = [&](const VectorXd& x) { return 0.5 * x.dot(q * x) + c.dot(x); };
  const VectorXd x = VectorXd::LinSpaced(d, -1, 1);
  const DirectionMatrix p = gen_qr_haar(d, 3, rng);
  const VectorXd limit = double(d) / 3 * p.matrix() * (p.matrix().transpose() * (q * x + c));

  std::vector<double> err;
  for (double h : {1e-2, 1e-3, 1e-4}) err.push_back((forward_fd(f, x, h, p).g - limit).norm());
  const double slope1 = std::log10(err[0] / err[1]);
  const double slope2 = std::log10(err[1] / err[2]);
  CHECK(slope1 == doctest::Approx(1.0).epsilon(0.02));
  CHECK(slope2 == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("columns are summed in order so results are reproducible") {
  const ScalarFunction f = [](const VectorXd& x) { return std::exp(x.sum()) + x.squaredNorm(); };
  auto rng = test::stream(4);
  const DirectionMatrix p = gen_gaussian(30, 10, rng);
  const VectorXd x = VectorXd::Constant(30, 0.01);
  const GradEstimate a = forward_fd(f, x, 1e-4, p);
  const GradEstimate b = forward_fd(f, x, 1e-4, p);
  CHECK(a.g == b.g);
  VectorXd manual = VectorXd::Zero(30);
  const double fx = f(x);
  for (int i = 0; i < 10; ++i) manual += (f(x + 1e-4 * p.matrix().col(i)) - fx) / 1e-4 * p.matrix().col(i);
  manual *= 3.0;
  CHECK((a.g - manual).cwiseAbs().maxCoeff() <= 1e-12 * manual.cwiseAbs().maxCoeff());
}
