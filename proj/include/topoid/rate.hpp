#pragma once

// Moderate-deviations rate function I(θ′, θ), the topological
// misclassification rate r = ½ λ_min(S_θ° − I) and the bounds relating r to
// strong controllability and strong stability of the whitened system.

#include <cmath>
#include <stdexcept>

#include "topoid/matops.hpp"

namespace topoid {

namespace detail {

inline void check_rate_inputs(const Matrix& theta, const Matrix& noise_cov) {
  matops::require_square(theta, "theta");
  matops::require_square(noise_cov, "noise covariance");
  if (theta.rows() != noise_cov.rows()) {
    throw std::invalid_argument("theta and noise covariance dimensions differ");
  }
  if (!matops::is_stable(theta)) {
    throw std::invalid_argument("rate function requires a stable theta");
  }
}

}  // namespace detail

/// I(θ′, θ) = ½ tr(S_w⁻¹ (θ′−θ) S_θ (θ′−θ)ᵀ) with S_θ = θ S_θ θᵀ + S_w.
inline double rate_function(const Matrix& theta_prime, const Matrix& theta, const Matrix& noise_cov) {
  detail::check_rate_inputs(theta, noise_cov);
  if (theta_prime.rows() != theta.rows() || theta_prime.cols() != theta.cols()) {
    throw std::invalid_argument("rate function: theta' has the wrong shape");
  }
  Eigen::LLT<Matrix> llt(noise_cov);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("noise covariance must be positive definite");
  }
  const Matrix s_theta = matops::solve_discrete_lyapunov(theta, noise_cov);
  const Matrix diff = theta_prime - theta;
  return 0.5 * llt.solve(diff * s_theta * diff.transpose()).trace();
}

/// Same quantity through ½ vec(S_w⁻¹)ᵀ Z vec(S_w) with
/// Z = (θ′−θ)⊗(θ′−θ) (I − θ⊗θ)⁻¹. Kept independent of rate_function so each
/// can check the other.
inline double rate_function_kronecker(const Matrix& theta_prime, const Matrix& theta,
                                      const Matrix& noise_cov) {
  detail::check_rate_inputs(theta, noise_cov);
  const Eigen::Index n = theta.rows();
  const Matrix diff = theta_prime - theta;
  const Matrix lyap = Matrix::Identity(n * n, n * n) - matops::kronecker(theta, theta);
  // Z = D⊗D · lyap⁻¹, formed as (lyap⁻ᵀ (D⊗D)ᵀ)ᵀ.
  const Matrix z = lyap.transpose()
                       .fullPivLu()
                       .solve(matops::kronecker(diff, diff).transpose())
                       .transpose();
  const Matrix noise_inv = noise_cov.fullPivLu().inverse();
  return 0.5 * matops::vec(noise_inv).dot(z * matops::vec(noise_cov));
}

struct WhitenedSystem {
  Matrix theta;     // θ° = S_w^{−1/2} θ S_w^{1/2}
  Matrix cov;       // S_θ° = S_w^{−1/2} S_θ S_w^{−1/2}
};

/// Coordinates x° = S_w^{−1/2} x, in which the noise covariance is the identity.
inline WhitenedSystem whitened_system(const Matrix& theta, const Matrix& noise_cov) {
  detail::check_rate_inputs(theta, noise_cov);
  const auto roots = matops::symmetric_roots(noise_cov);
  const Matrix s_theta = matops::solve_discrete_lyapunov(theta, noise_cov);
  return {roots.inv_sqrt * theta * roots.sqrt,
          matops::symmetrize(roots.inv_sqrt * s_theta * roots.inv_sqrt)};
}

/// r = ½ λ_min(S_θ° − I). Strictly positive for stable invertible θ.
inline double misclassification_rate(const Matrix& theta, const Matrix& noise_cov) {
  detail::check_rate_inputs(theta, noise_cov);
  if (matops::det_sign(theta) == 0) {
    throw std::invalid_argument("misclassification rate requires an invertible theta");
  }
  const auto w = whitened_system(theta, noise_cov);
  return 0.5 * (matops::lambda_min_symmetric(w.cov) - 1.0);
}

/// Predicted misclassification probability e^{−r·a_T}.
inline double theoretical_bound(double rate, double speed) {
  if (rate < 0.0) throw std::invalid_argument("rate must be nonnegative");
  if (!(speed > 0.0)) throw std::invalid_argument("speed must be positive");
  return std::exp(-rate * speed);
}

/// Smallest singular value ν of C_ℓ = (I, A, …, A^{ℓ−1}).
inline double strong_controllability_index(const Matrix& a, int ell) {
  matops::require_square(a, "A");
  if (ell < 1) throw std::invalid_argument("controllability horizon must be at least 1");
  const Eigen::Index n = a.rows();
  Matrix blocks(n, n * ell);
  Matrix power = Matrix::Identity(n, n);
  for (int i = 0; i < ell; ++i) {
    blocks.middleCols(i * n, n) = power;
    power = power * a;
  }
  return matops::sigma_min(blocks);
}

struct StrongStabilityParams {
  double kappa = 1.0;
  double gamma = 1.0;
};

/// Witness A = H L H⁻¹ for (κ, γ)-strong stability.
struct StrongStabilityCertificate {
  StrongStabilityParams params;
  Matrix h;
  Matrix l;
};

/// Builds the certificate from P ≻ 0 solving AᵀPA − P = −I:
/// L = P^{1/2} A P^{−1/2}, H = P^{−1/2}, γ = 1 − ‖L‖₂, κ = cond(P^{1/2}).
inline StrongStabilityCertificate strong_stability_certificate(const Matrix& a) {
  matops::require_square(a, "A");
  if (!matops::is_stable(a)) throw std::invalid_argument("strong stability requires a stable matrix");
  const Eigen::Index n = a.rows();
  const Matrix p = matops::solve_discrete_lyapunov(a.transpose(), Matrix::Identity(n, n));
  const auto roots = matops::symmetric_roots(p);
  StrongStabilityCertificate cert;
  cert.h = roots.inv_sqrt;
  cert.l = roots.sqrt * a * roots.inv_sqrt;
  cert.params.gamma = 1.0 - matops::sigma_max(cert.l);
  const Vector sv = matops::singular_values(roots.sqrt);
  cert.params.kappa = sv.maxCoeff() / sv.minCoeff();
  return cert;
}

inline StrongStabilityParams strong_stability_params(const Matrix& a) {
  return strong_stability_certificate(a).params;
}

struct RateReport {
  double rate = 0.0;             // r
  double lambda_min_cov = 0.0;   // λ_min(S_θ°)
  double lower_bound = 0.0;      // ν²
  double upper_bound = 0.0;      // κ²/(2γ − γ²)
  double sigma_min_bound = 0.0;  // ½ σ_min(θ°)²
  double controllability = 0.0;  // ν
  StrongStabilityParams stability;
  int ell = 1;
};

/// ½ σ_min(θ°)², a lower bound on the misclassification rate.
inline double sigma_min_rate_lower_bound(const Matrix& theta, const Matrix& noise_cov) {
  const auto w = whitened_system(theta, noise_cov);
  const double s = matops::sigma_min(w.theta);
  return 0.5 * s * s;
}

/// ℓ ≤ 0 selects the default horizon ℓ = n.
inline RateReport rate_bounds(const Matrix& theta, const Matrix& noise_cov, int ell = 0) {
  RateReport report;
  report.rate = misclassification_rate(theta, noise_cov);
  const auto w = whitened_system(theta, noise_cov);
  report.ell = ell > 0 ? ell : static_cast<int>(theta.rows());
  report.controllability = strong_controllability_index(w.theta, report.ell);
  report.stability = strong_stability_params(w.theta);
  report.lambda_min_cov = matops::lambda_min_symmetric(w.cov);
  report.lower_bound = report.controllability * report.controllability;
  const double g = report.stability.gamma;
  report.upper_bound = report.stability.kappa * report.stability.kappa / (2.0 * g - g * g);
  const double s = matops::sigma_min(w.theta);
  report.sigma_min_bound = 0.5 * s * s;
  return report;
}

}  // namespace topoid
