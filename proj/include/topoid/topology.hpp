#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "topoid/error.hpp"
#include "topoid/matops.hpp"

namespace topoid {

enum class Orientation : int { reversing = -1, preserving = 1 };

/// Sign of det(M). Undefined for non-invertible maps.
inline Orientation orientation(const Matrix& m) {
  const int sign = matops::det_sign(m);
  if (sign == 0) throw std::invalid_argument("orientation undefined for non-invertible map");
  return sign > 0 ? Orientation::preserving : Orientation::reversing;
}

/// Two stable linear isomorphisms are topologically equivalent exactly when
/// their orientations agree. Anything outside that domain is refused.
inline bool topologically_equivalent(const Matrix& f, const Matrix& g) {
  matops::require_square(f, "F");
  matops::require_square(g, "G");
  if (f.rows() != g.rows()) throw std::invalid_argument("equivalence test: dimensions differ");
  if (!matops::is_stable(f) || !matops::is_stable(g) || matops::det_sign(f) == 0 ||
      matops::det_sign(g) == 0) {
    throw std::invalid_argument("equivalence test requires stable isomorphisms");
  }
  return orientation(f) == orientation(g);
}

/// The seven topological classes of the scalar map x ↦ a·x, numbered from
/// the left of the real line: a < −1, a = −1, −1 < a < 0, a = 0,
/// 0 < a < 1, a = 1, a > 1.
struct ScalarTopoClass {
  enum class Kind { open_interval, singleton };

  int id = 0;
  Kind kind = Kind::open_interval;

  bool degenerate() const { return kind == Kind::singleton; }
  friend bool operator==(const ScalarTopoClass&, const ScalarTopoClass&) = default;
};

inline ScalarTopoClass scalar_class(double a) {
  using K = ScalarTopoClass::Kind;
  if (!std::isfinite(a)) throw std::invalid_argument("scalar class of a non-finite value");
  if (a < -1.0) return {1, K::open_interval};
  if (a == -1.0) return {2, K::singleton};
  if (a < 0.0) return {3, K::open_interval};
  if (a == 0.0) return {4, K::singleton};
  if (a < 1.0) return {5, K::open_interval};
  if (a == 1.0) return {6, K::singleton};
  return {7, K::open_interval};
}

/// Exponent c = log|b| / log|a| of the conjugacy φ(x) = x|x|^{c−1} carrying
/// x ↦ a·x onto y ↦ b·y.
inline double scalar_conjugacy_exponent(double a, double b) {
  const auto ca = scalar_class(a);
  const auto cb = scalar_class(b);
  if (ca != cb) {
    throw std::invalid_argument("conjugacy requires equal classes, got " + std::to_string(ca.id) +
                                " and " + std::to_string(cb.id));
  }
  if (ca.degenerate()) {
    throw std::invalid_argument("no conjugacy exponent for degenerate class " + std::to_string(ca.id));
  }
  return std::log(std::abs(b)) / std::log(std::abs(a));
}

/// φ(x) = x|x|^{c−1}; odd, with inverse exponent 1/c.
inline double apply_scalar_homeomorphism(double x, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("homeomorphism exponent must be positive");
  if (x == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(x), c), x);
}

inline constexpr double kDefaultProjectionDelta = 1e-9;

/// Approximate reverse I-projection of θ′ onto the stable matrices: the
/// closed loop θ′ − K of the LQR problem (A = θ′, B = I, Q = I,
/// R = (2δ S_w)⁻¹). Stable by construction, orientation-preserving, and close
/// to θ′ when θ′ is already stable and δ is small.
inline Matrix reverse_I_projection(const Matrix& theta_prime, const Matrix& noise_cov,
                                   double delta = kDefaultProjectionDelta,
                                   const matops::DareOptions& options = {}) {
  matops::require_square(theta_prime, "theta'");
  matops::require_square(noise_cov, "noise covariance");
  const Eigen::Index n = theta_prime.rows();
  if (noise_cov.rows() != n) throw std::invalid_argument("projection: dimension mismatch");
  if (!(delta > 0.0)) throw std::invalid_argument("projection delta must be positive");
  Eigen::LLT<Matrix> llt(noise_cov);
  if (llt.info() != Eigen::Success || !matops::is_symmetric(noise_cov)) {
    throw std::invalid_argument("noise covariance must be symmetric positive definite");
  }
  const Matrix identity = Matrix::Identity(n, n);
  const Matrix r = matops::symmetrize(llt.solve(identity) / (2.0 * delta));
  try {
    const auto sol = matops::solve_dare(theta_prime, identity, identity, r, options);
    return theta_prime - sol.gain;
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("reverse I-projection failed: ") + e.what());
  }
}

}  // namespace topoid
