// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors

#include "nbcav/etchcalc.hpp"

#include <cmath>

namespace nbcav {

void EtchPlan::validate() const {
  const auto finite = [](double v) { return std::isfinite(v); };
  if (!(surfaceArea > 0.0) || !finite(surfaceArea)) throw DomainError("surface area must be positive");
  if (!(bathVolume > 0.0) || !finite(bathVolume)) throw DomainError("bath volume must be positive");
  if (!(etchDepth >= 0.0) || !finite(etchDepth)) throw DomainError("etch depth must be >= 0");
  if (!(etchRate >= 0.0) || !finite(etchRate)) throw DomainError("etch rate must be >= 0");
  if (!(powerDensityLo > 0.0) || !(powerDensityHi >= powerDensityLo) || !finite(powerDensityHi)) {
    throw DomainError("power density band must satisfy 0 < lo <= hi");
  }
}

DissolvedNb dissolvedConcentration(const EtchPlan& plan) {
  plan.validate();
  // m^2 * um = 1e4 cm^2 * 1e-4 cm = cm^3.
  const double volumeCm3 = plan.surfaceArea * plan.etchDepth;
  DissolvedNb out;
  out.grams = constants::nbDensity * volumeCm3;
  out.gramsPerLiter = out.grams / plan.bathVolume;
  out.belowLimit = out.gramsPerLiter < kDissolvedNbLimit;
  out.belowDesign = out.gramsPerLiter < kDissolvedNbDesign;
  return out;
}

DissipatedPower dissipatedPower(const EtchPlan& plan) {
  plan.validate();
  const double scale = plan.surfaceArea * plan.etchRate;  // rate in units of 1 um/min
  return {plan.powerDensityLo * scale, plan.powerDensityHi * scale};
}

}  // namespace nbcav
