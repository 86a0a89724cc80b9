// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors

#pragma once

#include <span>
#include <vector>

#include "nbcav/numerics.hpp"

namespace nbcav::detail {

// Jacobian columns (one vector per requested parameter index); `base` is the
// model evaluated at p and is reused for one-sided differences.
std::vector<std::vector<double>> jacobianColumns(const ResidualModel& model,
                                                 std::span<const double> p,
                                                 std::span<const double> base,
                                                 std::span<const std::size_t> columns,
                                                 std::span<const double> lower,
                                                 std::span<const double> upper,
                                                 std::span<const double> stepFloorScale);

}  // namespace nbcav::detail
