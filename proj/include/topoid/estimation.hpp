#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "topoid/error.hpp"
#include "topoid/matops.hpp"
#include "topoid/system.hpp"

namespace topoid {

namespace detail {

// θ̂ G = C with G symmetric, so θ̂ᵀ = G⁻¹ Cᵀ.
inline Matrix solve_normal_equations(const Matrix& cross, const Matrix& gram, long count) {
  const double scale = gram.rowwise().lpNorm<1>().maxCoeff();
  Eigen::LDLT<Matrix> ldlt(gram);
  if (scale == 0.0 || ldlt.info() != Eigen::Success ||
      (ldlt.vectorD().array().abs() < matops::kRankTolerance * scale).any()) {
    throw InsufficientExcitation("insufficient excitation: Gram matrix is singular after " +
                                 std::to_string(count) + " transitions");
  }
  return ldlt.solve(cross.transpose()).transpose();
}

}  // namespace detail

/// Running sums behind the least-squares estimate
/// θ̂ = (Σ x_t x_{t−1}ᵀ)(Σ x_{t−1} x_{t−1}ᵀ)⁻¹.
class LeastSquaresState {
 public:
  explicit LeastSquaresState(Eigen::Index n)
      : cross_sum_(Matrix::Zero(n, n)), gram_sum_(Matrix::Zero(n, n)) {}

  void add(const Eigen::Ref<const Vector>& x_prev, const Eigen::Ref<const Vector>& x_next) {
    if (x_prev.size() != dim() || x_next.size() != dim()) {
      throw std::invalid_argument("least squares: state dimension mismatch");
    }
    cross_sum_.noalias() += x_next * x_prev.transpose();
    gram_sum_.noalias() += x_prev * x_prev.transpose();
    ++count_;
  }

  /// Current estimate θ̂. Throws InsufficientExcitation when the Gram sum is
  /// numerically singular.
  Matrix estimate() const {
    if (count_ == 0) throw std::invalid_argument("least squares: no transitions ingested");
    return detail::solve_normal_equations(cross_sum_, gram_sum_, count_);
  }

  const Matrix& cross_sum() const { return cross_sum_; }
  const Matrix& gram_sum() const { return gram_sum_; }
  long count() const { return count_; }
  Eigen::Index dim() const { return cross_sum_.rows(); }

 private:
  Matrix cross_sum_;
  Matrix gram_sum_;
  long count_ = 0;
};

inline LeastSquaresState least_squares_incremental(LeastSquaresState state,
                                                   const Eigen::Ref<const Vector>& x_prev,
                                                   const Eigen::Ref<const Vector>& x_next) {
  state.add(x_prev, x_next);
  return state;
}

inline Matrix least_squares(const Trajectory& traj) {
  if (traj.horizon() < 1) throw std::invalid_argument("least squares needs at least one transition");
  const long t_max = traj.horizon();
  const auto prev = traj.states.leftCols(t_max);
  const auto next = traj.states.rightCols(t_max);
  return detail::solve_normal_equations(next * prev.transpose(), prev * prev.transpose(), t_max);
}

/// √(T/a_T)·(θ̂_T − θ) + θ.
inline Matrix transformed_estimator(const Matrix& theta_hat, const Matrix& theta, long horizon,
                                    double speed) {
  if (!(speed > 0.0)) throw std::invalid_argument("speed a_T must be positive");
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  if (theta_hat.rows() != theta.rows() || theta_hat.cols() != theta.cols()) {
    throw std::invalid_argument("transformed estimator: dimension mismatch");
  }
  return std::sqrt(static_cast<double>(horizon) / speed) * (theta_hat - theta) + theta;
}

}  // namespace topoid
