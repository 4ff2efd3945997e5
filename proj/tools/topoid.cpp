// topoid: experiment runner and matrix utilities.
//
//   topoid run --config exp.cfg [--trials N] [--seed S] [--coupling C] ...
//   topoid classify --matrix theta.txt
//   topoid project --matrix theta.txt --delta 1e-9 [--noise-cov sw.txt]
//   topoid mdp --theta 0.5 --sigma-w 1 --eps 0.5
//
// Exit codes: 0 success, 1 usage error, 2 numerical or I/O failure.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "topoid/topoid.hpp"

namespace {

constexpr int kUsageError = 1;
constexpr int kFailure = 2;

void print_matrix(std::ostream& os, const topoid::Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      os << (j ? " " : "") << buf;
    }
    os << "\n";
  }
}

struct RunArgs {
  std::string config_path;
  std::optional<long> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> coupling;
  std::optional<double> epsilon;
  std::optional<double> delta;
  std::optional<std::string> horizons;
  std::optional<std::string> init_mode;
  std::optional<std::string> out;
  bool plot = false;
  int threads = 0;
};

int cmd_run(const RunArgs& args) {
  auto config = args.config_path.empty() ? topoid::ExperimentConfig{}
                                          : topoid::io::load_config(args.config_path);
  if (args.trials) config.trials = *args.trials;
  if (args.seed) config.seed = *args.seed;
  if (args.coupling) config.coupling = topoid::io::parse_coupling(*args.coupling);
  if (args.epsilon) config.epsilon = *args.epsilon;
  if (args.delta) config.delta = *args.delta;
  if (args.horizons) config.horizons = topoid::io::parse_horizons(*args.horizons);
  if (args.init_mode) config.init = topoid::io::parse_init(*args.init_mode);
  if (args.out) config.output_path = *args.out;
  topoid::validate(config);

  const int threads =
      args.threads > 0 ? args.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const auto result = topoid::run_monte_carlo(config, threads);

  std::error_code ec;
  std::filesystem::create_directories(config.output_path, ec);
  if (ec) throw topoid::IoError("cannot create output directory '" + config.output_path + "'");
  const auto dir = std::filesystem::path(config.output_path);
  const std::string csv_path = (dir / "results.csv").string();
  topoid::emit_csv(result, csv_path);

  std::printf("system=%s trials=%ld seed=%llu rate=%.6g\n",
              config.theta ? "theta" : topoid::to_string(config.coupling), config.trials,
              static_cast<unsigned long long>(config.seed), result.rate);
  std::printf("%8s %12s %12s %12s %8s %12s\n", "T", "a_T", "raw", "projected", "skipped", "bound");
  for (const auto& row : result.rows) {
    std::printf("%8ld %12.4f %12.6f %12.6f %8ld %12.6g\n", row.horizon, row.speed,
                row.misclass_raw, row.misclass_projected, row.skipped, row.bound);
  }
  std::printf("wrote %s\n", csv_path.c_str());
  if (args.plot) {
    const std::string svg_path = (dir / "results.svg").string();
    topoid::emit_plot(result, svg_path);
    std::printf("wrote %s\n", svg_path.c_str());
  }
  return 0;
}

int cmd_classify(const std::string& matrix_path) {
  const topoid::Matrix m = topoid::io::read_matrix_file(matrix_path);
  topoid::matops::require_square(m, "matrix");
  const double rho = topoid::matops::spectral_radius(m);
  const int sign = topoid::matops::det_sign(m);
  std::printf("dimension: %ld\n", static_cast<long>(m.rows()));
  std::printf("spectral_radius: %.17g\n", rho);
  std::printf("stable: %s\n", rho < 1.0 ? "yes" : "no");
  std::printf("det_sign: %d\n", sign);
  std::printf("orientation: %s\n",
              sign > 0 ? "preserving" : (sign < 0 ? "reversing" : "undefined (singular)"));
  if (m.rows() == 1) std::printf("scalar_class: %d\n", topoid::scalar_class(m(0, 0)).id);
  return 0;
}

int cmd_project(const std::string& matrix_path, const std::string& noise_path, double delta) {
  const topoid::Matrix m = topoid::io::read_matrix_file(matrix_path);
  topoid::matops::require_square(m, "matrix");
  const topoid::Matrix noise = noise_path.empty() ? topoid::Matrix::Identity(m.rows(), m.rows())
                                                  : topoid::io::read_matrix_file(noise_path);
  const topoid::Matrix projected = topoid::reverse_I_projection(m, noise, delta);
  print_matrix(std::cout, projected);
  std::printf("spectral_radius: %.17g\n", topoid::matops::spectral_radius(projected));
  return 0;
}

int cmd_mdp(const topoid::ScalarMdpConfig& config, int threads) {
  const auto rows = topoid::validate_scalar_mdp(
      config, threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency())));
  std::printf("%8s %10s %12s %10s %12s %12s\n", "T", "a_T", "threshold", "p_hat", "slope", "predicted");
  for (const auto& r : rows) {
    std::printf("%8ld %10.4f %12.6g %10.6f %12.6f %12.6f%s\n", r.horizon, r.speed, r.threshold,
                r.probability, r.empirical_slope, r.predicted_slope, r.floored ? " (floored)" : "");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topological class identification of stable linear systems"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Monte Carlo misclassification experiment");
  run_cmd->add_option("--config", run.config_path, "key = value experiment config");
  run_cmd->add_option("--trials", run.trials, "number of trials E");
  run_cmd->add_option("--seed", run.seed, "base RNG seed");
  run_cmd->add_option("--coupling", run.coupling, "separable | interconnected");
  run_cmd->add_option("--epsilon", run.epsilon, "a_T = T^(1/(1+epsilon))");
  run_cmd->add_option("--delta", run.delta, "projection parameter");
  run_cmd->add_option("--horizons", run.horizons, "comma-separated horizons");
  run_cmd->add_option("--init-mode", run.init_mode, "stationary | standard_normal");
  run_cmd->add_option("--out", run.out, "output directory");
  run_cmd->add_flag("--plot", run.plot, "also write results.svg");
  run_cmd->add_option("--threads", run.threads, "worker threads (default: all cores)");

  std::string matrix_path;
  auto* classify_cmd = app.add_subcommand("classify", "spectral radius, stability and orientation");
  classify_cmd->add_option("--matrix", matrix_path, "whitespace-delimited square matrix")->required();

  std::string project_matrix, noise_path;
  double delta = topoid::kDefaultProjectionDelta;
  auto* project_cmd = app.add_subcommand("project", "reverse I-projection onto stable matrices");
  project_cmd->add_option("--matrix", project_matrix, "matrix to project")->required();
  project_cmd->add_option("--delta", delta, "projection parameter");
  project_cmd->add_option("--noise-cov", noise_path, "noise covariance (default identity)");

  topoid::ScalarMdpConfig mdp;
  std::string mdp_horizons;
  int mdp_threads = 0;
  auto* mdp_cmd = app.add_subcommand("mdp", "scalar moderate-deviations decay check");
  mdp_cmd->add_option("--theta", mdp.theta, "scalar system coefficient");
  mdp_cmd->add_option("--sigma-w", mdp.sigma_w, "noise standard deviation");
  mdp_cmd->add_option("--eps", mdp.eps, "deviation level");
  mdp_cmd->add_option("--trials", mdp.trials, "number of trials");
  mdp_cmd->add_option("--horizons", mdp_horizons, "comma-separated horizons");
  mdp_cmd->add_option("--seed", mdp.seed, "base RNG seed");
  mdp_cmd->add_option("--threads", mdp_threads, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*classify_cmd) return cmd_classify(matrix_path);
    if (*project_cmd) return cmd_project(project_matrix, noise_path, delta);
    if (*mdp_cmd) {
      if (!mdp_horizons.empty()) mdp.horizons = topoid::io::parse_horizons(mdp_horizons);
      return cmd_mdp(mdp, mdp_threads);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "topoid: " << e.what() << "\n";
    return kUsageError;
  } catch (const topoid::NumericalError& e) {
    std::cerr << "topoid: numerical failure: " << e.what() << "\n";
    return kFailure;
  } catch (const std::exception& e) {
    std::cerr << "topoid: " << e.what() << "\n";
    return kFailure;
  }
  return kUsageError;
}
