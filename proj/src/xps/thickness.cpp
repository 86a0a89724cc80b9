// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nbcav/xps.hpp"

namespace nbcav {

void ThicknessInputs::validate() const {
  if (!(iOxide >= 0.0) || !(iMetal >= 0.0) || !std::isfinite(iOxide) || !std::isfinite(iMetal)) {
    throw DomainError("intensities must be finite and >= 0");
  }
  if (!(lambdaOxide > 0.0) || !(lambdaMetal > 0.0)) throw DomainError("IMFPs must be positive");
  if (!(densityRatio > 0.0) || !std::isfinite(densityRatio)) {
    throw DomainError("density ratio must be positive");
  }
  if (!(theta > 0.0 && theta <= std::numbers::pi / 2.0)) {
    throw DomainError("emission angle must lie in (0, pi/2]");
  }
}

IndirectThickness oxideThicknessIndirect(const ThicknessInputs& in, ImfpPrefactor prefactor) {
  in.validate();
  if (in.iMetal == 0.0) {
    if (in.iOxide == 0.0) throw DomainError("no oxide or metal signal");
    return {kInf, true};
  }
  const double lambda = prefactor == ImfpPrefactor::Oxide ? in.lambdaOxide : in.lambdaMetal;
  const double ratio = in.densityRatio * in.lambdaMetal * in.iOxide / (in.lambdaOxide * in.iMetal);
  return {lambda * std::sin(in.theta) * std::log1p(ratio), false};
}

IndirectThickness totalOxideThicknessIndirect(std::span<const ThicknessInputs> species,
                                              ImfpPrefactor prefactor) {
  IndirectThickness total;
  for (const auto& s : species) {
    const auto d = oxideThicknessIndirect(s, prefactor);
    total.nm += d.nm;
    total.infinite = total.infinite || d.infinite;
  }
  return total;
}

DirectThickness oxideThicknessDirect(std::span<const ProfilePoint> profile, double nmPerCycle,
                                     const DirectThicknessOptions& options) {
  if (profile.size() < 4) throw DomainError("depth profile needs at least 4 points");
  if (!(nmPerCycle > 0.0) || !std::isfinite(nmPerCycle)) {
    throw DomainError("nm per cycle must be positive");
  }
  if (options.tailPoints < 1 || static_cast<std::size_t>(options.tailPoints) > profile.size()) {
    throw DomainError("tail point count out of range");
  }
  if (!(options.relativeBand >= 0.0)) throw DomainError("stability band must be >= 0");
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const auto& p = profile[i];
    if (!(p.oxygenFraction >= 0.0 && p.oxygenFraction <= 1.0)) {
      throw DomainError("oxygen fraction must lie in [0, 1]");
    }
    if (!std::isfinite(p.cycle) || (i > 0 && !(p.cycle > profile[i - 1].cycle))) {
      throw DomainError("cycles must be strictly increasing");
    }
  }

  const std::size_t n = profile.size(), tail = static_cast<std::size_t>(options.tailPoints);
  DirectThickness out;
  for (std::size_t i = n - tail; i < n; ++i) out.plateau += profile[i].oxygenFraction;
  out.plateau /= static_cast<double>(tail);
  const double band = options.relativeBand * std::abs(out.plateau);
  const auto inside = [&](double f) { return std::abs(f - out.plateau) <= band; };

  for (std::size_t i = n - tail; i < n; ++i) {
    if (!inside(profile[i].oxygenFraction)) out.resolved = false;
  }

  std::size_t first = n - tail;
  for (std::size_t i = 0; i < n; ++i) {
    if (inside(profile[i].oxygenFraction)) {
      first = i;
      break;
    }
  }
  if (first == 0) {
    out.fractionalCycle = profile[0].cycle;
  } else {
    const auto& a = profile[first - 1];
    const auto& b = profile[first];
    const double edge = out.plateau + (a.oxygenFraction > out.plateau ? band : -band);
    const double t = (edge - a.oxygenFraction) / (b.oxygenFraction - a.oxygenFraction);
    out.fractionalCycle = a.cycle + std::clamp(t, 0.0, 1.0) * (b.cycle - a.cycle);
  }
  out.nm = out.fractionalCycle * nmPerCycle;
  return out;
}

SputterRate sputterRateCalibration(double filmThicknessNm, int cyclesToSubstrate, double dwellS) {
  if (!(filmThicknessNm > 0.0) || cyclesToSubstrate <= 0 || !(dwellS > 0.0)) {
    throw DomainError("sputter calibration inputs must be positive");
  }
  const double angstrom = 10.0 * filmThicknessNm;
  const double c = cyclesToSubstrate;
  return {angstrom / (c * dwellS), angstrom / ((c + 0.5) * dwellS), angstrom / ((c - 0.5) * dwellS)};
}

}  // namespace nbcav
