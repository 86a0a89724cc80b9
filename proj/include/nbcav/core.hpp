// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors

#pragma once

#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nbcav {

// Physical constants (CODATA 2018). Internal unit system is SI throughout:
// Hz, K, J, m, s. Angular frequencies are computed where used, never stored.
namespace constants {
inline constexpr double hbar = 1.054571817e-34;     // J s
inline constexpr double kB = 1.380649e-23;          // J / K
inline constexpr double mu0 = 1.25663706212e-6;     // H / m
inline constexpr double nbDensity = 8.57;           // g / cm^3
inline constexpr double twoPi = 2.0 * std::numbers::pi;
}  // namespace constants

/// Input outside an operation's domain (non-positive frequency, bad window, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A model produced a non-finite value during fitting.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file (bad header, unparsable number, ragged rows).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense row-major matrix; just enough for Jacobians and covariances.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Strictly positive frequency in Hz.
class FrequencyPoint {
 public:
  explicit FrequencyPoint(double hz);
  double hz() const { return hz_; }
  double angular() const { return constants::twoPi * hz_; }

 private:
  double hz_;
};

/// Outcome of any fit. Parameters are named and ordered; frozen parameters
/// carry zero sigma and zero covariance.
struct FitResult {
  std::vector<std::string> names;
  std::vector<double> values;
  std::vector<double> sigmas;
  std::vector<bool> frozen;
  Matrix covariance;
  double residualRms = 0.0;
  double chiSquare = 0.0;
  std::size_t dof = 0;
  bool converged = false;
  int iterations = 0;
  bool degenerate = false;
  // Short machine-readable codes ("degenerate", "non_physical", "at_bound:tau", ...).
  std::vector<std::string> flags;
  std::vector<std::string> warnings;
  // Objective after every accepted iteration, starting with the initial point.
  std::vector<double> objectiveTrace;

  std::optional<std::size_t> index(std::string_view name) const;
  double value(std::string_view name) const;
  double sigma(std::string_view name) const;
  bool hasFlag(std::string_view flag) const;
  void addFlag(std::string flag);
  void addWarning(std::string message);
};

/// Energy decay time tau = Q / (2 pi f0).
double qToEnergyDecayTime(double q, double f0);
/// Inverse of qToEnergyDecayTime: Q = 2 pi f0 tau.
double timeToQ(double tau, double f0);
/// hbar * 2 pi f0.
double singlePhotonEnergy(double f0);

/// Parallel combination (1/a + 1/b)^-1.
inline double parallelQ(double a, double b) { return 1.0 / (1.0 / a + 1.0 / b); }

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace nbcav
