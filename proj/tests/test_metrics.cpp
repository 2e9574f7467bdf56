#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "support.hpp"
#include "zofd/errors.hpp"
#include "zofd/metrics.hpp"

using namespace zofd;
using Eigen::VectorXd;

namespace {

ProfileTable table_of(std::initializer_list<double> values) {
  ProfileTable t;
  int i = 0;
  for (double v : values) t.rows.push_back({"p" + std::to_string(i++), v});
  return t;
}

}  // namespace

TEST_CASE("relative gradient error") {
  const VectorXd grad = VectorXd::LinSpaced(4, -1, 2);
  CHECK(rel_grad_error(grad, grad) == 0.0);
  CHECK(rel_grad_error(VectorXd::Zero(4), grad) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rel_grad_error(2 * grad, grad) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(rel_grad_error(grad, VectorXd::Zero(4)), DomainError);
  CHECK_THROWS_AS(rel_grad_error(VectorXd::Zero(3), grad), DimensionError);

  auto rng = test::stream(1);
  for (int k = 0; k < 200; ++k) {
    VectorXd g(6), t(6);
    for (int i = 0; i < 6; ++i) {
      g[i] = rng.normal();
      t[i] = rng.normal();
    }
    const double alpha = std::exp(4 * rng.normal());
    CHECK(rel_grad_error(alpha * g, alpha * t) ==
          doctest::Approx(rel_grad_error(g, t)).epsilon(1e-13));
  }
}

TEST_CASE("value progress") {
  CHECK(value_progress(5, 5, 1) == 1.0);
  CHECK(value_progress(1, 5, 1) == 0.0);
  CHECK(value_progress(3, 5, 1) == 0.5);
  CHECK_THROWS_AS(value_progress(1, 1, 1), DomainError);
  CHECK_THROWS_AS(value_progress(0, 1, 2), DomainError);

  auto rng = test::stream(2);
  for (int k = 0; k < 200; ++k) {
    const double f_min = rng.normal();
    const double f0 = f_min + std::exp(rng.normal());
    const double fk = f_min + (f0 - f_min) * rng.uniform();
    const double a = std::exp(3 * rng.normal());
    const double b = 10 * rng.normal();
    CHECK(value_progress(a * fk + b, a * f0 + b, a * f_min + b) ==
          doctest::Approx(value_progress(fk, f0, f_min)).epsilon(1e-9).scale(1e-9));
  }
}

TEST_CASE("fraction solved") {
  CHECK(fraction_solved(table_of({0.05, 0.2}), 0.1) == 0.5);
  CHECK(fraction_solved(table_of({0, 0, 0}), 1e-300) == 1.0);
  CHECK(fraction_solved(table_of({0.3}), 0.1) == 0.0);
  CHECK_THROWS_AS(fraction_solved(ProfileTable{}, 0.1), DomainError);
  // right-continuous: a value exactly at tau counts as solved
  CHECK(fraction_solved(table_of({0.1, 0.2}), 0.1) == 0.5);
  CHECK(fraction_solved(table_of({0.1, 0.2}), std::nextafter(0.1, 0.0)) == 0.0);
}

TEST_CASE("fraction solved is nondecreasing in tau") {
  auto rng = test::stream(3);
  const std::vector<double> taus = log_tau_grid(1e-6, 1.0, 40);
  for (int k = 0; k < 1000; ++k) {
    ProfileTable t;
    const int n = 1 + static_cast<int>(rng.below(20));
    for (int i = 0; i < n; ++i) t.rows.push_back({"p", std::pow(10.0, -7 + 8 * rng.uniform())});
    const auto curve = fraction_solved_curve(t, taus);
    REQUIRE(curve.size() == taus.size());
    for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i].fraction >= curve[i - 1].fraction);
    for (std::size_t i = 0; i < curve.size(); ++i) {
      const auto solved = std::count_if(t.rows.begin(), t.rows.end(),
                                        [&](const ProfileRow& r) { return r.expected_value <= taus[i]; });
      CHECK(curve[i].fraction == static_cast<double>(solved) / n);
    }
  }
}

TEST_CASE("log-spaced tau grid") {
  const auto g = log_tau_grid();
  REQUIRE(g.size() == 25);
  CHECK(g.front() == 1e-6);
  CHECK(g.back() == 1.0);
  for (std::size_t i = 1; i < g.size(); ++i) {
    CHECK(std::log10(g[i]) - std::log10(g[i - 1]) == doctest::Approx(0.25).epsilon(1e-12));
  }
  CHECK(log_tau_grid(1e-3, 1e-3, 1) == std::vector<double>{1e-3});
  CHECK_THROWS_AS(log_tau_grid(0, 1, 5), ParameterError);
  CHECK_THROWS_AS(log_tau_grid(1, 0.5, 5), ParameterError);
  CHECK_THROWS_AS(log_tau_grid(1e-3, 1, 0), ParameterError);
}

TEST_CASE("profile and curve CSV layout") {
  ProfileTable t = table_of({0.5, 0.25});
  t.n_samples = 50;
  std::ostringstream a;
  write_profile_csv(a, t);
  CHECK(a.str() == "problem_id,expected_value,n_samples\np0,0.5,50\np1,0.25,50\n");
  std::ostringstream b;
  write_curve_csv(b, {{0.1, 0.5}, {1.0, 1.0}});
  CHECK(b.str() == "tau,fraction_solved\n0.10000000000000001,0.5\n1,1\n");
}

TEST_CASE("generation timing") {
  auto rng = test::stream(4);
  CHECK_THROWS_AS(time_generation(DirectionKind::gaussian, 8, 2, rng, {1, 0, true}), ParameterError);
  for (DirectionKind kind : kAllDirectionKinds) {
    const TimingStats s = time_generation(kind, 32, 8, rng, {50, 5, true});
    CHECK(s.mean_seconds > 0.0);
    CHECK(s.std_seconds >= 0.0);
    CHECK(s.repeats == 50);
  }
  const TimingStats coord = time_generation(DirectionKind::coordinate, 512, 512, rng, {20, 2, true});
  const TimingStats qr = time_generation(DirectionKind::qr_haar, 512, 512, rng, {20, 2, true});
  MESSAGE("d=512: coordinate " << coord.mean_seconds << " s, qr_haar " << qr.mean_seconds << " s");
  CHECK(5 * coord.mean_seconds <= qr.mean_seconds);
}
