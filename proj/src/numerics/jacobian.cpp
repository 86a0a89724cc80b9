// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors

#include <cmath>
#include <sstream>

#include "nbcav/numerics.hpp"
#include "numerics/detail.hpp"

namespace nbcav {

ResidualModel::ResidualModel(std::size_t outputs, Evaluate evaluate)
    : outputs_(outputs), evaluate_(std::move(evaluate)) {
  if (!evaluate_) throw std::invalid_argument("ResidualModel needs an evaluation function");
}

ResidualModel ResidualModel::pointwise(std::vector<double> grid, Pointwise f) {
  const std::size_t n = grid.size();
  return ResidualModel(n, [grid = std::move(grid), f = std::move(f)](
                              std::span<const double> p, std::span<double> out) {
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] = f(p, grid[i]);
  });
}

void ResidualModel::evaluate(std::span<const double> params, std::span<double> out) const {
  if (out.size() != outputs_) throw std::invalid_argument("model output span has wrong length");
  evaluate_(params, out);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!std::isfinite(out[i])) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "model produced a non-finite value at output " << i << " for parameters [";
      for (std::size_t j = 0; j < params.size(); ++j) msg << (j ? ", " : "") << params[j];
      msg << "]";
      throw EvaluationError(msg.str());
    }
  }
}

std::vector<double> ResidualModel::evaluate(std::span<const double> params) const {
  std::vector<double> out(outputs_);
  evaluate(params, out);
  return out;
}

namespace detail {

std::vector<std::vector<double>> jacobianColumns(const ResidualModel& model,
                                                 std::span<const double> p,
                                                 std::span<const double> base,
                                                 std::span<const std::size_t> columns,
                                                 std::span<const double> lower,
                                                 std::span<const double> upper,
                                                 std::span<const double> stepFloorScale) {
  const std::size_t n = model.outputs();
  std::vector<std::vector<double>> cols;
  cols.reserve(columns.size());
  std::vector<double> work(p.begin(), p.end());
  std::vector<double> plus(n), minus(n);

  for (std::size_t j : columns) {
    const double lo = lower.empty() ? -kInf : lower[j];
    const double hi = upper.empty() ? kInf : upper[j];
    const double floorScale = stepFloorScale.empty() ? 1.0 : stepFloorScale[j];
    double h = std::max(1e-6 * std::abs(p[j]), 1e-9 * floorScale);
    std::vector<double> col(n, 0.0);

    const bool upOk = p[j] + h <= hi;
    const bool downOk = p[j] - h >= lo;
    if (upOk && downOk) {
      work[j] = p[j] + h;
      model.evaluate(work, plus);
      work[j] = p[j] - h;
      model.evaluate(work, minus);
      const double dx = 2.0 * h;
      for (std::size_t i = 0; i < n; ++i) col[i] = (plus[i] - minus[i]) / dx;
    } else if (upOk) {
      work[j] = p[j] + h;
      model.evaluate(work, plus);
      for (std::size_t i = 0; i < n; ++i) col[i] = (plus[i] - base[i]) / h;
    } else if (downOk) {
      work[j] = p[j] - h;
      model.evaluate(work, minus);
      for (std::size_t i = 0; i < n; ++i) col[i] = (base[i] - minus[i]) / h;
    } else {
      // Interval narrower than the step: use whatever room exists on each side.
      const double hu = hi - p[j];
      const double hd = p[j] - lo;
      if (hu > 0.0 && hd > 0.0) {
        work[j] = hi;
        model.evaluate(work, plus);
        work[j] = lo;
        model.evaluate(work, minus);
        for (std::size_t i = 0; i < n; ++i) col[i] = (plus[i] - minus[i]) / (hu + hd);
      }
    }
    work[j] = p[j];
    cols.push_back(std::move(col));
  }
  return cols;
}

}  // namespace detail

Matrix finiteDifferenceJacobian(const ResidualModel& model, std::span<const double> p,
                                std::span<const double> lower, std::span<const double> upper,
                                std::span<const double> stepFloorScale) {
  const std::vector<double> base = model.evaluate(p);
  std::vector<std::size_t> all(p.size());
  for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
  const auto cols = detail::jacobianColumns(model, p, base, all, lower, upper, stepFloorScale);
  Matrix jac(model.outputs(), p.size());
  for (std::size_t j = 0; j < p.size(); ++j) {
    for (std::size_t i = 0; i < model.outputs(); ++i) jac(i, j) = cols[j][i];
  }
  return jac;
}

}  // namespace nbcav
