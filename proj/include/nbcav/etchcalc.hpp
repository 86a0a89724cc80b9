// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors

#pragma once

#include "nbcav/core.hpp"

namespace nbcav {

/// Chemical etch plan. Units follow bench practice: m^2, um, L, um/min, W/m^2.
struct EtchPlan {
  double surfaceArea = 0.0;
  double etchDepth = 0.0;
  double bathVolume = 0.0;
  double etchRate = 0.0;
  double powerDensityLo = 480.0;  // at 1 um/min
  double powerDensityHi = 900.0;

  /// Area and volume must be positive; depth and rate may be zero.
  void validate() const;
};

inline constexpr double kDissolvedNbLimit = 20.0;   // g/L, solution capacity
inline constexpr double kDissolvedNbDesign = 10.0;  // g/L, recipe target

struct DissolvedNb {
  double gramsPerLiter = 0.0;
  double grams = 0.0;
  bool belowLimit = true;   // < 20 g/L
  bool belowDesign = true;  // < 10 g/L
};

/// Elemental Nb mass removed, per litre of bath.
DissolvedNb dissolvedConcentration(const EtchPlan& plan);

struct DissipatedPower {
  double lo = 0.0;  // W
  double hi = 0.0;
};

/// Power density scaled linearly with etch rate, times area.
DissipatedPower dissipatedPower(const EtchPlan& plan);

}  // namespace nbcav
