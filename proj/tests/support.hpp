#pragma once

// Random instance generators and independent reference computations shared
// by the test binaries. Nothing here calls into the code paths it is used to
// check.

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "topoid/matops.hpp"

namespace topoid::testing {

using Rng = std::mt19937_64;

inline Matrix random_uniform(Rng& rng, Eigen::Index rows, Eigen::Index cols, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

inline Matrix random_gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> z(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = z(rng);
  return m;
}

inline double eigen_radius(const Matrix& m) {
  return Eigen::EigenSolver<Matrix>(m, false).eigenvalues().cwiseAbs().maxCoeff();
}

/// Gaussian matrix rescaled so that its spectral radius is uniform on
/// [0.05, rho_max].
inline Matrix random_stable(Rng& rng, Eigen::Index n, double rho_max = 0.95) {
  std::uniform_real_distribution<double> u(0.05, rho_max);
  Matrix m = random_gaussian(rng, n, n);
  const double rho = eigen_radius(m);
  return m * (u(rng) / rho);
}

/// Stable with |det| bounded away from zero relative to its scale.
inline Matrix random_stable_invertible(Rng& rng, Eigen::Index n, double rho_max = 0.95) {
  for (;;) {
    Matrix m = random_stable(rng, n, rho_max);
    Eigen::JacobiSVD<Matrix> svd(m);
    if (svd.singularValues().minCoeff() > 1e-3) return m;
  }
}

inline Matrix random_spd(Rng& rng, Eigen::Index n) {
  Matrix g = random_gaussian(rng, n, n);
  return g * g.transpose() + 0.5 * Matrix::Identity(n, n);
}

/// Textbook Kronecker product, written out entry by entry.
inline Matrix kron_reference(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index k = 0; k < b.rows(); ++k)
        for (Eigen::Index l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

/// vec(S) = (I − A⊗A)⁻¹ vec(Q) with an explicit inverse.
inline Matrix lyapunov_reference(const Matrix& a, const Matrix& q) {
  const Eigen::Index n = a.rows();
  Matrix big = Matrix::Identity(n * n, n * n) - kron_reference(a, a);
  Eigen::VectorXd vq = Eigen::Map<const Eigen::VectorXd>(q.data(), q.size());
  Eigen::VectorXd vs = big.inverse() * vq;
  return Eigen::Map<Matrix>(vs.data(), n, n);
}

/// Scalar rate function (θ′ − θ)² / (2(1 − θ²)).
inline double scalar_rate(double theta_prime, double theta) {
  const double d = theta_prime - theta;
  return d * d / (2.0 * (1.0 - theta * theta));
}

/// Brute-force argmin of the scalar rate function over θ ∈ (−0.999, 0.999).
inline double scalar_projection_grid(double theta_prime, double step = 1e-5) {
  double best = 0.0, best_val = INFINITY;
  const long steps = std::lround(1.998 / step);
  for (long i = 0; i <= steps; ++i) {
    const double theta = -0.999 + static_cast<double>(i) * step;
    const double v = scalar_rate(theta_prime, theta);
    if (v < best_val) {
      best_val = v;
      best = theta;
    }
  }
  return best;
}

inline double rel_err(double a, double b, double floor = 1e-300) {
  return std::abs(a - b) / std::max(std::abs(b), floor);
}

}  // namespace topoid::testing
