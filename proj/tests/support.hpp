#pragma once

// Small oracles shared by the unit tests. Nothing here calls into the
// library code it is used to check.

#include <cmath>
#include <cstdint>
#include <functional>

#include <Eigen/Dense>

#include "zofd/rng.hpp"

namespace test {

inline zofd::RngStream stream(std::uint64_t id, std::uint64_t seed = 20261019) {
  return zofd::RngStream(seed, id);
}

/// Dense R(t_n) (x) ... (x) R(t_1) with R(t) = [[cos t, sin t], [-sin t, cos t]],
/// built by Kronecker products.
inline Eigen::MatrixXd butterfly_kron(const std::vector<double>& angles) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Ones(1, 1);
  for (double t : angles) {
    const double c = std::cos(t);
    const double s = std::sin(t);
    const Eigen::Index n = g.rows();
    Eigen::MatrixXd next(2 * n, 2 * n);
    next.topLeftCorner(n, n) = c * g;
    next.topRightCorner(n, n) = s * g;
    next.bottomLeftCorner(n, n) = -s * g;
    next.bottomRightCorner(n, n) = c * g;
    g = next;
  }
  return g;
}

/// Central differences, step s.
inline Eigen::VectorXd numeric_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                        const Eigen::VectorXd& x, double s = 1e-6) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd a = x;
    Eigen::VectorXd b = x;
    a[i] += s;
    b[i] -= s;
    g[i] = (f(a) - f(b)) / (2 * s);
  }
  return g;
}

/// max |P^T P - I|, computed densely.
inline double gram_defect(const Eigen::MatrixXd& p) {
  const Eigen::MatrixXd e = p.transpose() * p - Eigen::MatrixXd::Identity(p.cols(), p.cols());
  return e.cwiseAbs().maxCoeff();
}

/// Two-sided z bound for the max of m tests at the level of one 3-sigma test.
inline double sidak_z(int m) {
  const double alpha = std::erfc(3.0 / std::sqrt(2.0));
  const double per = 1.0 - std::pow(1.0 - alpha, 1.0 / m);
  double lo = 0.0;
  double hi = 50.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std::erfc(mid / std::sqrt(2.0)) > per ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace test
