#pragma once

// Text formats: whitespace-delimited matrix files and the `key = value`
// experiment config.
//
//   # comment
//   Y         = -0.1 1; 0.1 0.05     (rows separated by ';')
//   theta     = 0.9                  (optional; replaces Y and coupling)
//   coupling  = interconnected
//   trials    = 200
//   horizons  = 10, 20, 50
//   noise_cov = identity            (or a matrix literal)
//   epsilon   = 1e-9
//   delta     = 1e-9
//   seed      = 7
//   init_mode = standard_normal     (or stationary)
//   output    = results

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "topoid/error.hpp"
#include "topoid/experiments.hpp"
#include "topoid/matops.hpp"

namespace topoid::io {

namespace detail {

inline std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline double parse_double(const std::string& token, const std::string& context) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != token.size()) {
    throw std::invalid_argument(context + ": not a number: '" + token + "'");
  }
  return value;
}

inline Matrix from_rows(const std::vector<std::vector<double>>& rows, const std::string& context) {
  if (rows.empty()) throw std::invalid_argument(context + ": empty matrix");
  const std::size_t cols = rows.front().size();
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw std::invalid_argument(context + ": ragged matrix rows");
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

inline std::vector<double> parse_row(const std::string& line, const std::string& context) {
  std::string cleaned = line;
  for (char& ch : cleaned) {
    if (ch == ',') ch = ' ';
  }
  std::istringstream is(cleaned);
  std::vector<double> row;
  for (std::string tok; is >> tok;) row.push_back(parse_double(tok, context));
  return row;
}

}  // namespace detail

/// One matrix row per line; blank lines and `#` comments are ignored.
inline Matrix read_matrix(std::istream& in, const std::string& context = "matrix") {
  std::vector<std::vector<double>> rows;
  for (std::string line; std::getline(in, line);) {
    line = detail::trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    rows.push_back(detail::parse_row(line, context));
  }
  return detail::from_rows(rows, context);
}

inline Matrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open matrix file '" + path + "'");
  return read_matrix(in, path);
}

/// "a b; c d" → [[a, b], [c, d]].
inline Matrix parse_matrix_literal(const std::string& text, const std::string& context) {
  std::vector<std::vector<double>> rows;
  std::istringstream is(text);
  for (std::string part; std::getline(is, part, ';');) {
    part = detail::trim(part);
    if (!part.empty()) rows.push_back(detail::parse_row(part, context));
  }
  return detail::from_rows(rows, context);
}

inline std::vector<long> parse_horizons(const std::string& text) {
  std::vector<long> out;
  std::istringstream is(text);
  for (std::string tok; std::getline(is, tok, ',');) {
    tok = detail::trim(tok);
    if (tok.empty()) throw std::invalid_argument("empty entry in list '" + text + "'");
    std::size_t used = 0;
    long value = 0;
    try {
      value = std::stol(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != tok.size()) throw std::invalid_argument("bad horizon '" + tok + "'");
    out.push_back(value);
  }
  return out;
}

inline Coupling parse_coupling(const std::string& s) {
  if (s == "separable") return Coupling::separable;
  if (s == "interconnected") return Coupling::interconnected;
  throw std::invalid_argument("coupling must be separable or interconnected, got '" + s + "'");
}

inline InitKind parse_init(const std::string& s) {
  if (s == "stationary") return InitKind::stationary;
  if (s == "standard_normal") return InitKind::standard_normal;
  throw std::invalid_argument("init_mode must be stationary or standard_normal, got '" + s + "'");
}

/// Applies `key = value` lines from `in` on top of `config`. A noise_cov of
/// "identity" is resolved against the dimension of θ after all keys are read.
inline ExperimentConfig parse_config(std::istream& in, ExperimentConfig config = {},
                                     const std::string& context = "config") {
  bool identity_noise = true;
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    line = detail::trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = context + ":" + std::to_string(line_no);
    if (eq == std::string::npos) throw std::invalid_argument(where + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key == "Y") {
      config.subblock = parse_matrix_literal(value, where);
    } else if (key == "theta") {
      config.theta = parse_matrix_literal(value, where);
    } else if (key == "coupling") {
      config.coupling = parse_coupling(value);
    } else if (key == "trials") {
      const auto parsed = parse_horizons(value);
      if (parsed.size() != 1) throw std::invalid_argument(where + ": trials must be an integer");
      config.trials = parsed.front();
    } else if (key == "horizons") {
      config.horizons = parse_horizons(value);
    } else if (key == "noise_cov") {
      identity_noise = value == "identity";
      if (!identity_noise) config.noise_cov = parse_matrix_literal(value, where);
    } else if (key == "epsilon") {
      config.epsilon = detail::parse_double(value, where);
    } else if (key == "delta") {
      config.delta = detail::parse_double(value, where);
    } else if (key == "seed") {
      config.seed = std::stoull(value);
    } else if (key == "init_mode") {
      config.init = parse_init(value);
    } else if (key == "output") {
      config.output_path = value;
    } else {
      throw std::invalid_argument(where + ": unknown key '" + key + "'");
    }
  }
  if (identity_noise) {
    const Eigen::Index n = config.theta ? config.theta->rows() : 2 * config.subblock.rows();
    config.noise_cov = Matrix::Identity(n, n);
  }
  return config;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  return parse_config(in, {}, path);
}

inline std::string format_matrix_literal(const Matrix& m) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (i > 0) os << "; ";
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j > 0 ? " " : "") << m(i, j);
  }
  return os.str();
}

/// Canonical text of every field that influences the numbers (the output
/// path does not). Parsing it back yields the same experiment.
inline std::string format_config(const ExperimentConfig& c) {
  std::ostringstream os;
  os << std::setprecision(17);
  if (c.theta) {
    os << "theta = " << format_matrix_literal(*c.theta) << "\n";
  } else {
    os << "Y = " << format_matrix_literal(c.subblock) << "\n";
  }
  os << "coupling = " << to_string(c.coupling) << "\n";
  os << "trials = " << c.trials << "\n";
  os << "horizons = ";
  for (std::size_t i = 0; i < c.horizons.size(); ++i) os << (i ? "," : "") << c.horizons[i];
  os << "\n";
  os << "noise_cov = " << format_matrix_literal(c.noise_cov) << "\n";
  os << "epsilon = " << c.epsilon << "\n";
  os << "delta = " << c.delta << "\n";
  os << "seed = " << c.seed << "\n";
  os << "init_mode = " << to_string(c.init) << "\n";
  return os.str();
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t config_hash(const ExperimentConfig& c) { return fnv1a(format_config(c)); }

}  // namespace topoid::io
