#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <variant>

#include "topoid/matops.hpp"

namespace topoid {

/// x_{t+1} = θ x_t + w_t with w_t ~ N(0, S_w) i.i.d.
class LtiSystem {
 public:
  LtiSystem(Matrix theta, Matrix noise_cov) : theta_(std::move(theta)), noise_cov_(std::move(noise_cov)) {
    matops::require_square(theta_, "theta");
    matops::require_square(noise_cov_, "noise covariance");
    if (theta_.rows() != noise_cov_.rows()) {
      throw std::invalid_argument("theta and noise covariance dimensions differ");
    }
    matops::require_finite(theta_, "theta");
    matops::require_finite(noise_cov_, "noise covariance");
    if (!matops::is_stable(theta_)) throw std::invalid_argument("theta must be stable");
    if (!matops::is_symmetric(noise_cov_)) {
      throw std::invalid_argument("noise covariance must be symmetric");
    }
    Eigen::LLT<Matrix> llt(noise_cov_);
    if (llt.info() != Eigen::Success) {
      throw std::invalid_argument("noise covariance must be positive definite");
    }
    noise_chol_ = llt.matrixL();
  }

  const Matrix& theta() const { return theta_; }
  const Matrix& noise_cov() const { return noise_cov_; }
  /// Lower Cholesky factor of S_w.
  const Matrix& noise_chol() const { return noise_chol_; }
  Eigen::Index dim() const { return theta_.rows(); }

 private:
  Matrix theta_;
  Matrix noise_cov_;
  Matrix noise_chol_;
};

/// States x₀,…,x_T stored as the columns of an n×(T+1) matrix.
struct Trajectory {
  Matrix states;

  long horizon() const { return static_cast<long>(states.cols()) - 1; }
  Eigen::Index dim() const { return states.rows(); }
  auto state(Eigen::Index t) const { return states.col(t); }
};

/// Random stream keyed by (seed, stream_id). Two streams with the same key
/// produce the same draws regardless of which thread consumes them. A stream
/// is stateful and must have a single consumer.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_id_(stream_id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_id),
                      static_cast<std::uint32_t>(stream_id >> 32), 0x746f706fU};
    engine_.seed(seq);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  double standard_normal() { return normal_(engine_); }

  Vector standard_normal_vector(Eigen::Index n) {
    Vector z(n);
    for (Eigen::Index i = 0; i < n; ++i) z(i) = normal_(engine_);
    return z;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Covariance S_θ of the invariant distribution: S = θ S θᵀ + S_w.
inline Matrix invariant_covariance(const LtiSystem& sys) {
  return matops::solve_discrete_lyapunov(sys.theta(), sys.noise_cov());
}

/// Draw from the invariant distribution N(0, S_θ) as L·z with L = chol(S_θ).
inline Vector sample_initial_state(const LtiSystem& sys, RngStream& rng) {
  Eigen::LLT<Matrix> llt(invariant_covariance(sys));
  if (llt.info() != Eigen::Success) {
    throw NumericalError("invariant covariance is numerically indefinite");
  }
  return llt.matrixL() * rng.standard_normal_vector(sys.dim());
}

namespace init {
struct Stationary {};
struct StandardNormal {};
struct Fixed {
  Vector x0;
};
}  // namespace init

using InitMode = std::variant<init::Stationary, init::StandardNormal, init::Fixed>;

struct SimulationOptions {
  InitMode init = init::Stationary{};
  /// Multiplies every noise draw. Values other than 1 are a test hook: a
  /// zero scale makes trajectories deterministic.
  double noise_scale = 1.0;
};

inline Trajectory simulate(const LtiSystem& sys, long horizon, RngStream& rng,
                           const SimulationOptions& options = {}) {
  if (horizon < 0) throw std::invalid_argument("horizon must be nonnegative");
  const Eigen::Index n = sys.dim();
  Trajectory traj{Matrix(n, horizon + 1)};

  if (std::holds_alternative<init::Stationary>(options.init)) {
    traj.states.col(0) = sample_initial_state(sys, rng);
  } else if (std::holds_alternative<init::StandardNormal>(options.init)) {
    traj.states.col(0) = rng.standard_normal_vector(n);
  } else {
    const Vector& x0 = std::get<init::Fixed>(options.init).x0;
    if (x0.size() != n) throw std::invalid_argument("fixed initial state has wrong dimension");
    traj.states.col(0) = x0;
  }

  const Matrix noise_factor = options.noise_scale * sys.noise_chol();
  for (long t = 0; t < horizon; ++t) {
    traj.states.col(t + 1) =
        sys.theta() * traj.states.col(t) + noise_factor * rng.standard_normal_vector(n);
  }
  return traj;
}

}  // namespace topoid
