// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors

#pragma once

#include <cmath>
#include <string>

namespace testing {

inline double relErr(double got, double want) { return std::abs(got - want) / std::abs(want); }

inline std::string fixture(const std::string& name) { return std::string(NBCAV_FIXTURE_DIR) + "/" + name; }

}  // namespace testing
