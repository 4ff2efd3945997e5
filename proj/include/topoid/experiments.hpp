#pragma once

// Seeded Monte Carlo harness: empirical topological misclassification of the
// raw and projected least-squares estimators against the e^{−r·a_T} bound.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "topoid/error.hpp"
#include "topoid/estimation.hpp"
#include "topoid/matops.hpp"
#include "topoid/rate.hpp"
#include "topoid/system.hpp"
#include "topoid/topology.hpp"

namespace topoid {

enum class Coupling { separable, interconnected };
enum class InitKind { stationary, standard_normal };

inline const char* to_string(Coupling c) {
  return c == Coupling::separable ? "separable" : "interconnected";
}
inline const char* to_string(InitKind k) {
  return k == InitKind::stationary ? "stationary" : "standard_normal";
}

inline Matrix default_subblock() {
  Matrix y(2, 2);
  y << -0.1, 1.0, 0.1, 0.05;
  return y;
}

inline std::vector<long> default_horizons() { return {10, 20, 50, 100, 200, 500, 1000}; }

struct ExperimentConfig {
  Matrix subblock = default_subblock();
  Coupling coupling = Coupling::separable;
  long trials = 1000;
  std::vector<long> horizons = default_horizons();
  Matrix noise_cov = Matrix::Identity(4, 4);
  double epsilon = 1e-9;
  double delta = 1e-9;
  std::uint64_t seed = 1;
  InitKind init = InitKind::standard_normal;
  std::string output_path = ".";
  /// Explicit system matrix. When set, subblock and coupling are ignored.
  std::optional<Matrix> theta;
};

/// separable: blockdiag(Y, Y); interconnected: [[Y, I], [0, Y]].
inline Matrix build_theta(const Matrix& y, Coupling coupling) {
  matops::require_square(y, "Y");
  if (!matops::is_stable(y)) throw std::invalid_argument("sub-block Y must be stable");
  const Eigen::Index n = y.rows();
  Matrix theta = Matrix::Zero(2 * n, 2 * n);
  theta.topLeftCorner(n, n) = y;
  theta.bottomRightCorner(n, n) = y;
  if (coupling == Coupling::interconnected) theta.topRightCorner(n, n) = Matrix::Identity(n, n);
  return theta;
}

inline Matrix system_matrix(const ExperimentConfig& c) {
  if (c.theta) {
    matops::require_square(*c.theta, "theta");
    if (!matops::is_stable(*c.theta)) throw std::invalid_argument("theta must be stable");
    return *c.theta;
  }
  return build_theta(c.subblock, c.coupling);
}

/// Speed a_T = T^{1/(1+ε)}.
inline double a_schedule(long horizon, double epsilon) {
  if (horizon < 1) throw std::invalid_argument("a_T needs T >= 1");
  if (!(epsilon > 0.0)) throw std::invalid_argument("a_T needs epsilon > 0");
  return std::pow(static_cast<double>(horizon), 1.0 / (1.0 + epsilon));
}

inline void validate(const ExperimentConfig& c) {
  if (c.trials < 1) throw std::invalid_argument("trials must be positive");
  if (c.horizons.empty()) throw std::invalid_argument("horizons must be nonempty");
  for (std::size_t i = 0; i < c.horizons.size(); ++i) {
    if (c.horizons[i] < 1 || (i > 0 && c.horizons[i] <= c.horizons[i - 1])) {
      throw std::invalid_argument("horizons must be positive and strictly increasing");
    }
  }
  if (!(c.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (!(c.delta > 0.0)) throw std::invalid_argument("delta must be positive");
  const Matrix theta = system_matrix(c);
  if (matops::det_sign(theta) == 0) throw std::invalid_argument("theta must be invertible");
  if (c.noise_cov.rows() != theta.rows() || c.noise_cov.cols() != theta.cols()) {
    throw std::invalid_argument("noise covariance must be " + std::to_string(theta.rows()) + "x" +
                                std::to_string(theta.rows()));
  }
}

struct HorizonRow {
  long horizon = 0;
  double speed = 0.0;  // a_T
  double misclass_raw = 0.0;
  double misclass_projected = 0.0;
  long skipped = 0;
  double bound = 0.0;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<HorizonRow> rows;
  double rate = 0.0;
  double wall_clock_seconds = 0.0;
};

namespace detail {

// Runs body(i) for i in [0, count) on up to `workers` threads. Each index is
// handled exactly once; callers write into per-index slots so the outcome does
// not depend on scheduling.
inline void parallel_for(long count, int workers, const std::function<void(long)>& body) {
  workers = std::max(1, std::min<int>(workers, static_cast<int>(std::max(1L, count))));
  if (workers == 1) {
    for (long i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<long> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (long i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
        next.store(count);
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

enum class Outcome : std::uint8_t { correct, raw_only, both, projected_only, skipped };

}  // namespace detail

inline ExperimentResult run_monte_carlo(const ExperimentConfig& config, int workers = 1) {
  validate(config);
  const auto start = std::chrono::steady_clock::now();
  const Matrix theta = system_matrix(config);
  const LtiSystem sys(theta, config.noise_cov);
  const int true_sign = matops::det_sign(theta);
  const std::size_t num_h = config.horizons.size();
  const long t_max = config.horizons.back();

  SimulationOptions sim;
  if (config.init == InitKind::standard_normal) sim.init = init::StandardNormal{};

  std::vector<detail::Outcome> outcomes(static_cast<std::size_t>(config.trials) * num_h);
  detail::parallel_for(config.trials, workers, [&](long trial) {
    RngStream rng(config.seed, static_cast<std::uint64_t>(trial) + 1);
    const Trajectory traj = simulate(sys, t_max, rng, sim);
    LeastSquaresState ls(sys.dim());
    std::size_t h = 0;
    for (long t = 1; t <= t_max && h < num_h; ++t) {
      ls.add(traj.state(t - 1), traj.state(t));
      if (t != config.horizons[h]) continue;
      auto& slot = outcomes[static_cast<std::size_t>(trial) * num_h + h++];
      slot = detail::Outcome::skipped;
      Matrix estimate;
      try {
        estimate = ls.estimate();
      } catch (const InsufficientExcitation&) {
        continue;
      }
      const int sign = matops::det_sign(estimate);
      if (sign == 0) continue;
      const bool raw_wrong = sign != true_sign;
      bool projected_wrong = false;
      try {
        const Matrix projected = reverse_I_projection(estimate, config.noise_cov, config.delta);
        projected_wrong = !topologically_equivalent(projected, theta);
      } catch (const NumericalError&) {
        continue;
      } catch (const std::invalid_argument&) {
        continue;
      }
      using detail::Outcome;
      slot = raw_wrong ? (projected_wrong ? Outcome::both : Outcome::raw_only)
                       : (projected_wrong ? Outcome::projected_only : Outcome::correct);
    }
  });

  ExperimentResult result;
  result.config = config;
  result.rate = misclassification_rate(theta, config.noise_cov);
  for (std::size_t h = 0; h < num_h; ++h) {
    long skipped = 0, raw = 0, projected = 0;
    for (long trial = 0; trial < config.trials; ++trial) {
      using detail::Outcome;
      switch (outcomes[static_cast<std::size_t>(trial) * num_h + h]) {
        case Outcome::skipped: ++skipped; break;
        case Outcome::raw_only: ++raw; break;
        case Outcome::projected_only: ++projected; break;
        case Outcome::both: ++raw; ++projected; break;
        case Outcome::correct: break;
      }
    }
    if (2 * skipped > config.trials) {
      throw NumericalError("experiment invalid: " + std::to_string(skipped) + " of " +
                           std::to_string(config.trials) + " trials skipped at T = " +
                           std::to_string(config.horizons[h]));
    }
    HorizonRow row;
    row.horizon = config.horizons[h];
    row.speed = a_schedule(row.horizon, config.epsilon);
    const double used = static_cast<double>(config.trials - skipped);
    row.misclass_raw = static_cast<double>(raw) / used;
    row.misclass_projected = static_cast<double>(projected) / used;
    row.skipped = skipped;
    row.bound = theoretical_bound(result.rate, row.speed);
    result.rows.push_back(row);
  }
  result.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

// Scalar moderate-deviations check: P(|θ̂_T − θ| > ε√(a_T/T)) against
// exp(−½ ε² a_T / (1 − θ²)).

struct ScalarMdpConfig {
  double theta = 0.5;
  double sigma_w = 1.0;
  double eps = 0.5;
  long trials = 10000;
  std::vector<long> horizons = {200, 500, 1000};
  std::uint64_t seed = 1;
  /// a_T = T^{1/(1+speed_epsilon)}; 1 gives √T.
  double speed_epsilon = 1.0;
};

struct ScalarMdpRow {
  long horizon = 0;
  double speed = 0.0;
  double threshold = 0.0;
  long exceedances = 0;
  double probability = 0.0;
  /// True when no exceedance was seen and the probability was floored at
  /// 1/(2E) before taking the logarithm.
  bool floored = false;
  double empirical_slope = 0.0;  // −log p̂ / a_T
  double predicted_slope = 0.0;  // ½ ε² / (1 − θ²)
};

inline std::vector<ScalarMdpRow> validate_scalar_mdp(const ScalarMdpConfig& c, int workers = 1) {
  if (!(std::abs(c.theta) < 1.0)) throw std::invalid_argument("scalar MDP needs |theta| < 1");
  if (!(c.sigma_w > 0.0) || !(c.eps > 0.0)) {
    throw std::invalid_argument("sigma_w and eps must be positive");
  }
  if (c.trials < 1 || c.horizons.empty()) throw std::invalid_argument("empty MDP experiment");
  for (std::size_t i = 0; i < c.horizons.size(); ++i) {
    if (c.horizons[i] < 1 || (i > 0 && c.horizons[i] <= c.horizons[i - 1])) {
      throw std::invalid_argument("horizons must be positive and strictly increasing");
    }
  }
  const LtiSystem sys(Matrix::Constant(1, 1, c.theta), Matrix::Constant(1, 1, c.sigma_w * c.sigma_w));
  const std::size_t num_h = c.horizons.size();
  const long t_max = c.horizons.back();
  std::vector<double> thresholds(num_h), speeds(num_h);
  for (std::size_t h = 0; h < num_h; ++h) {
    speeds[h] = a_schedule(c.horizons[h], c.speed_epsilon);
    thresholds[h] = c.eps * std::sqrt(speeds[h] / static_cast<double>(c.horizons[h]));
  }

  std::vector<std::uint8_t> exceeded(static_cast<std::size_t>(c.trials) * num_h, 0);
  detail::parallel_for(c.trials, workers, [&](long trial) {
    RngStream rng(c.seed, static_cast<std::uint64_t>(trial) + 1);
    const Trajectory traj = simulate(sys, t_max, rng);
    double cross = 0.0, gram = 0.0;
    std::size_t h = 0;
    for (long t = 1; t <= t_max && h < num_h; ++t) {
      const double prev = traj.states(0, t - 1);
      cross += traj.states(0, t) * prev;
      gram += prev * prev;
      if (t != c.horizons[h]) continue;
      exceeded[static_cast<std::size_t>(trial) * num_h + h] =
          std::abs(cross / gram - c.theta) > thresholds[h];
      ++h;
    }
  });

  std::vector<ScalarMdpRow> rows;
  const double predicted = 0.5 * c.eps * c.eps / (1.0 - c.theta * c.theta);
  for (std::size_t h = 0; h < num_h; ++h) {
    ScalarMdpRow row;
    row.horizon = c.horizons[h];
    row.speed = speeds[h];
    row.threshold = thresholds[h];
    for (long trial = 0; trial < c.trials; ++trial) {
      row.exceedances += exceeded[static_cast<std::size_t>(trial) * num_h + h];
    }
    row.probability = static_cast<double>(row.exceedances) / static_cast<double>(c.trials);
    row.floored = row.exceedances == 0;
    const double p = row.floored ? 0.5 / static_cast<double>(c.trials) : row.probability;
    row.empirical_slope = -std::log(p) / row.speed;
    row.predicted_slope = predicted;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace topoid
