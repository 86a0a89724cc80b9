// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nbcav/core.hpp"

namespace nbcav {

/// One fit parameter. Frozen parameters are held at `initial`.
struct ParamSpec {
  std::string name;
  double initial = 0.0;
  double lower = -kInf;
  double upper = kInf;
  bool frozen = false;
  // Typical magnitude, used as the finite-difference step floor. 0 means
  // |initial| (or 1 when initial is 0).
  double scale = 0.0;
};

/// Throws DomainError unless lower <= initial <= upper and the name is non-empty.
void validateParamSpecs(std::span<const ParamSpec> specs);

/// Deterministic map from a full parameter vector to a prediction vector of
/// fixed length. The grid is captured by the evaluation function.
class ResidualModel {
 public:
  using Evaluate = std::function<void(std::span<const double> params, std::span<double> out)>;
  using Pointwise = std::function<double(std::span<const double> params, double x)>;

  ResidualModel(std::size_t outputs, Evaluate evaluate);
  /// Convenience for scalar models y_i = f(p, x_i).
  static ResidualModel pointwise(std::vector<double> grid, Pointwise f);

  std::size_t outputs() const { return outputs_; }

  /// Evaluates into `out`; throws EvaluationError naming the parameter vector
  /// if any output is non-finite.
  void evaluate(std::span<const double> params, std::span<double> out) const;
  std::vector<double> evaluate(std::span<const double> params) const;

 private:
  std::size_t outputs_;
  Evaluate evaluate_;
};

/// Central-difference Jacobian, shape (outputs, params). Step for column j is
/// max(1e-6 |p_j|, 1e-9 * stepFloorScale_j); stepFloorScale defaults to 1.
/// If bounds are given, a step that would leave them becomes one-sided.
Matrix finiteDifferenceJacobian(const ResidualModel& model, std::span<const double> p,
                                std::span<const double> lower = {},
                                std::span<const double> upper = {},
                                std::span<const double> stepFloorScale = {});

struct LeastSquaresOptions {
  int maxIterations = 500;
  double objectiveTolerance = 1e-10;  // relative decrease
  double stepTolerance = 1e-10;       // relative step norm
  // Multi-start: this many seeded perturbations of the initial guess in
  // addition to the guess itself and any explicit starts.
  int multiStart = 0;
  std::uint64_t seed = 0;
  double multiStartSpread = 0.5;  // in the scale-normalised internal coordinates
  std::vector<std::vector<double>> extraStarts;  // full parameter vectors
  bool parallel = true;
};

/// Bounded Levenberg-Marquardt on sum_i w_i (y_i - model_i(p))^2.
/// Covariance = s^2 (J^T W J)^-1 with s^2 the reduced chi-square. Parameters
/// that are not identifiable get infinite sigma and the result is flagged
/// "degenerate". Hitting the iteration cap yields converged = false.
FitResult leastSquares(const ResidualModel& model, std::span<const ParamSpec> specs,
                       std::span<const double> y, std::span<const double> weights = {},
                       const LeastSquaresOptions& options = {});

struct BootstrapOptions {
  int resamples = 200;
  std::uint64_t seed = 0;
};

/// Residual bootstrap around an existing fit: resample residuals, refit from
/// the fitted values, and replace sigmas/covariance by the sample statistics.
FitResult bootstrapUncertainty(const ResidualModel& model, std::span<const ParamSpec> specs,
                               std::span<const double> y, std::span<const double> weights,
                               const FitResult& fit, const BootstrapOptions& options = {},
                               const LeastSquaresOptions& lsq = {});

/// Builds specs from a fit so it can be restarted from its solution.
std::vector<ParamSpec> specsAtSolution(std::span<const ParamSpec> specs, const FitResult& fit);

/// Full parameter vector of a fit in spec order.
std::vector<double> parameterVector(const FitResult& fit);

/// 64-bit mixing function used to derive independent RNG streams.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace nbcav
