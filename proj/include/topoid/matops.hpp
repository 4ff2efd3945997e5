#pragma once

// Dense linear-algebra kernels: spectral quantities, determinant sign,
// discrete Lyapunov and Riccati solvers. Everything here is a pure function
// of its arguments.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

#include "topoid/error.hpp"

namespace topoid {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace matops {

/// Relative pivot threshold used for every rank decision in the library.
inline constexpr double kRankTolerance = 1e-12;
/// Largest dimension solved through the vectorized Kronecker system.
inline constexpr Eigen::Index kKroneckerLyapunovMaxDim = 12;
/// Smallest admissible eigenvalue when taking symmetric square roots.
inline constexpr double kEigenvalueFloor = 1e-14;

namespace detail {

inline std::string shape(const Matrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

}  // namespace detail

inline void require_square(const Matrix& m, const char* name) {
  if (m.rows() < 1 || m.rows() != m.cols()) {
    throw std::invalid_argument(std::string(name) + " must be a non-empty square matrix, got " +
                                detail::shape(m));
  }
}

inline void require_finite(const Matrix& m, const char* name) {
  if (!m.allFinite()) {
    throw std::invalid_argument(std::string(name) + " has non-finite entries");
  }
}

inline bool is_symmetric(const Matrix& m, double rel_tol = 1e-10) {
  if (m.rows() != m.cols()) return false;
  return (m - m.transpose()).norm() <= rel_tol * std::max(1.0, m.norm());
}

inline Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

/// Kronecker product A ⊗ B.
inline Matrix kronecker(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

/// Column-stacking vectorization.
inline Vector vec(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

inline Matrix unvec(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

inline Eigen::VectorXcd eigenvalues(const Matrix& m) {
  require_square(m, "matrix");
  require_finite(m, "matrix");
  Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigenvalue iteration failed to converge for " + detail::shape(m) +
                         " matrix");
  }
  return solver.eigenvalues();
}

inline double spectral_radius(const Matrix& m) { return eigenvalues(m).cwiseAbs().maxCoeff(); }

/// Asymptotic stability in discrete time: ρ(M) < 1, strictly.
inline bool is_stable(const Matrix& m) { return spectral_radius(m) < 1.0; }

inline Vector singular_values(const Matrix& m) {
  if (m.size() == 0) throw std::invalid_argument("singular values of an empty matrix");
  require_finite(m, "matrix");
  return Eigen::JacobiSVD<Matrix>(m).singularValues();
}

inline double sigma_min(const Matrix& m) { return singular_values(m).minCoeff(); }
inline double sigma_max(const Matrix& m) { return singular_values(m).maxCoeff(); }

/// Sign of det(M) from an LU factorization. Signs of the pivots are tracked
/// individually so the raw product is never formed. A pivot below
/// kRankTolerance times the largest row norm counts as singular (returns 0).
inline int det_sign(const Matrix& m) {
  require_square(m, "matrix");
  require_finite(m, "matrix");
  const double scale = m.rowwise().lpNorm<1>().maxCoeff();
  if (scale == 0.0) return 0;
  Eigen::PartialPivLU<Matrix> lu(m);
  const Matrix& packed = lu.matrixLU();
  int sign = static_cast<int>(lu.permutationP().determinant());
  for (Eigen::Index i = 0; i < packed.rows(); ++i) {
    const double pivot = packed(i, i);
    if (std::abs(pivot) < kRankTolerance * scale) return 0;
    if (pivot < 0) sign = -sign;
  }
  return sign;
}

/// Solves S = A S Aᵀ + Q through vec(S) = (I − A⊗A)⁻¹ vec(Q).
inline Matrix solve_discrete_lyapunov_kronecker(const Matrix& a, const Matrix& q) {
  const Eigen::Index n = a.rows();
  const Eigen::Index nn = n * n;
  Matrix system = Matrix::Identity(nn, nn) - kronecker(a, a);
  Eigen::FullPivLU<Matrix> lu(system);
  if (!lu.isInvertible()) {
    throw NumericalError("Lyapunov Kronecker system is singular");
  }
  return symmetrize(unvec(lu.solve(vec(q)), n, n));
}

/// Solves S = A S Aᵀ + Q by the doubling iteration
/// S ← S + Aₖ S Aₖᵀ, Aₖ₊₁ = Aₖ².
inline Matrix solve_discrete_lyapunov_doubling(const Matrix& a, const Matrix& q,
                                               int max_doublings = 100) {
  Matrix s = q;
  Matrix ak = a;
  for (int k = 0; k < max_doublings; ++k) {
    Matrix update = ak * s * ak.transpose();
    s = symmetrize(s + update);
    if (update.norm() <= 1e-14 * s.norm()) return s;
    ak = ak * ak;
  }
  throw NumericalError("Lyapunov doubling did not converge");
}

/// The unique S with S = A S Aᵀ + Q for stable A and symmetric Q.
inline Matrix solve_discrete_lyapunov(const Matrix& a, const Matrix& q) {
  require_square(a, "A");
  require_square(q, "Q");
  if (a.rows() != q.rows()) throw std::invalid_argument("Lyapunov: A and Q dimensions differ");
  require_finite(a, "A");
  require_finite(q, "Q");
  if (!is_symmetric(q)) throw std::invalid_argument("Lyapunov: Q must be symmetric");
  if (!is_stable(a)) throw std::invalid_argument("Lyapunov requires stable matrix");
  if (a.rows() <= kKroneckerLyapunovMaxDim) return solve_discrete_lyapunov_kronecker(a, q);
  return solve_discrete_lyapunov_doubling(a, q);
}

/// Square root and inverse square root of a symmetric positive-definite
/// matrix via its eigendecomposition.
struct SymmetricRoots {
  Matrix sqrt;
  Matrix inv_sqrt;
};

inline SymmetricRoots symmetric_roots(const Matrix& m) {
  require_square(m, "matrix");
  require_finite(m, "matrix");
  if (!is_symmetric(m)) throw std::invalid_argument("square root requires a symmetric matrix");
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m));
  if (es.info() != Eigen::Success) throw NumericalError("symmetric eigensolver failed");
  const Vector& lambda = es.eigenvalues();
  if (lambda.minCoeff() < kEigenvalueFloor) {
    std::ostringstream os;
    os << "matrix is not positive definite (smallest eigenvalue " << lambda.minCoeff() << ")";
    throw std::invalid_argument(os.str());
  }
  const Matrix& v = es.eigenvectors();
  return {v * lambda.cwiseSqrt().asDiagonal() * v.transpose(),
          v * lambda.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose()};
}

inline double lambda_min_symmetric(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("symmetric eigensolver failed");
  return es.eigenvalues().minCoeff();
}

struct DareOptions {
  double tolerance = 1e-12;
  long max_iterations = 100000;
};

struct DareSolution {
  Matrix cost;  // P
  Matrix gain;  // K, so that A − B·K is the closed loop
  long iterations = 0;
  double residual = 0.0;
};

namespace detail {

// One Riccati step in Joseph form, (A−BK)ᵀP(A−BK) + KᵀRK + Q, which keeps the
// iterate positive semidefinite even when R dwarfs BᵀPB.
inline Matrix riccati_step(const Matrix& a, const Matrix& b, const Matrix& q, const Matrix& r,
                           const Matrix& p, Matrix* gain_out) {
  Eigen::LLT<Matrix> llt(symmetrize(r + b.transpose() * p * b));
  if (llt.info() != Eigen::Success) throw NumericalError("R + BᵀPB lost positive definiteness");
  Matrix gain = llt.solve(b.transpose() * p * a);
  Matrix closed = a - b * gain;
  Matrix next = symmetrize(closed.transpose() * p * closed + gain.transpose() * r * gain + q);
  if (gain_out != nullptr) *gain_out = std::move(gain);
  return next;
}

}  // namespace detail

/// Infinite-horizon discrete LQR: P = AᵀPA − AᵀPB(R + BᵀPB)⁻¹BᵀPA + Q,
/// K = (R + BᵀPB)⁻¹BᵀPA, by fixed-point recursion from P₀ = Q.
inline DareSolution solve_dare(const Matrix& a, const Matrix& b, const Matrix& q, const Matrix& r,
                               const DareOptions& options = {}) {
  require_square(a, "A");
  require_square(q, "Q");
  require_square(r, "R");
  const Eigen::Index n = a.rows();
  if (b.rows() != n || q.rows() != n || b.cols() != r.rows()) {
    throw std::invalid_argument("DARE: inconsistent dimensions A " + detail::shape(a) + ", B " +
                                detail::shape(b) + ", Q " + detail::shape(q) + ", R " +
                                detail::shape(r));
  }
  require_finite(a, "A");
  require_finite(b, "B");
  require_finite(q, "Q");
  require_finite(r, "R");
  if (!is_symmetric(q)) throw std::invalid_argument("DARE: Q must be symmetric");
  if (!is_symmetric(r)) throw std::invalid_argument("DARE: R must be symmetric");
  Eigen::LLT<Matrix> r_llt(r);
  if (r_llt.info() != Eigen::Success) {
    throw std::invalid_argument("DARE: R must be positive definite");
  }
  Eigen::LDLT<Matrix> q_ldlt(q);
  if (q_ldlt.info() != Eigen::Success ||
      (q_ldlt.vectorD().array() < -1e-12 * std::max(1.0, q.norm())).any()) {
    throw std::invalid_argument("DARE: Q must be positive semidefinite");
  }

  DareSolution sol;
  Matrix p = q;
  double change = 0.0;
  long k = 0;
  for (; k < options.max_iterations; ++k) {
    Matrix next = detail::riccati_step(a, b, q, r, p, nullptr);
    if (!next.allFinite()) {
      throw NumericalError("DARE recursion diverged after " + std::to_string(k + 1) +
                           " iterations");
    }
    change = (next - p).norm() / std::max(1.0, p.norm());
    p = std::move(next);
    if (change <= options.tolerance) break;
  }
  if (k == options.max_iterations) {
    std::ostringstream os;
    os << "DARE did not converge in " << options.max_iterations
       << " iterations (last relative change " << change << ")";
    throw NumericalError(os.str());
  }

  Matrix fixed = detail::riccati_step(a, b, q, r, p, &sol.gain);
  sol.residual = (fixed - p).norm() / std::max(1.0, p.norm());
  sol.cost = std::move(p);
  sol.iterations = k + 1;
  const double rho = spectral_radius(a - b * sol.gain);
  if (!(rho < 1.0)) {
    std::ostringstream os;
    os << "DARE closed loop is not stable (spectral radius " << rho << ", residual "
       << sol.residual << ")";
    throw NumericalError(os.str());
  }
  return sol;
}

}  // namespace matops
}  // namespace topoid
