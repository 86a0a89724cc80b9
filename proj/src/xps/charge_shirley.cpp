// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nbcav/xps.hpp"

namespace nbcav {

void XpsSpectrum::validate(std::size_t minPoints, bool requireNonNegative) const {
  const auto& e = bindingEnergy;
  if (e.size() != counts.size()) throw DomainError("spectrum length mismatch");
  if (e.size() < minPoints) throw DomainError("spectrum has too few points");
  if (sputterCycle < 0) throw DomainError("sputter cycle must be >= 0");
  if (!(dwellPerCycle >= 0.0)) throw DomainError("dwell must be >= 0");
  const bool ascending = e.size() < 2 || e[1] > e[0];
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (!std::isfinite(e[i]) || !std::isfinite(counts[i])) {
      throw DomainError("spectrum contains non-finite values");
    }
    if (requireNonNegative && counts[i] < 0.0) throw DomainError("counts must be >= 0");
    if (i > 0 && (ascending ? !(e[i] > e[i - 1]) : !(e[i] < e[i - 1]))) {
      throw DomainError("binding energies must be strictly monotone");
    }
  }
}

XpsSpectrum chargeCorrect(const XpsSpectrum& spectrum, double measuredC1s) {
  if (!(measuredC1s >= kC1sWindowLo && measuredC1s <= kC1sWindowHi)) {
    throw DomainError("C 1s position outside [280, 292] eV; probably not the adventitious carbon peak");
  }
  spectrum.validate(1, false);
  XpsSpectrum out = spectrum;
  const double shift = kAdventitiousCarbonEv - measuredC1s;
  for (double& e : out.bindingEnergy) e += shift;
  return out;
}

XpsSpectrum ShirleyBackground::subtracted() const {
  XpsSpectrum s;
  s.bindingEnergy = energies;
  s.counts.resize(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) s.counts[i] = counts[i] - background[i];
  return s;
}

ShirleyBackground shirleyBackground(const XpsSpectrum& spectrum, double windowLo, double windowHi,
                                    const ShirleyOptions& options) {
  spectrum.validate(2, false);
  if (!(windowLo < windowHi)) throw DomainError("Shirley window must have lo < hi");
  if (options.endpointPoints < 1 || options.maxIterations < 1) {
    throw DomainError("Shirley options must be positive");
  }
  const auto [eMin, eMax] =
      std::minmax_element(spectrum.bindingEnergy.begin(), spectrum.bindingEnergy.end());
  if (windowLo < *eMin || windowHi > *eMax) throw DomainError("Shirley window outside spectrum");

  ShirleyBackground out;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < spectrum.bindingEnergy.size(); ++i) {
    const double e = spectrum.bindingEnergy[i];
    if (e >= windowLo && e <= windowHi) idx.push_back(i);
  }
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return spectrum.bindingEnergy[a] < spectrum.bindingEnergy[b];
  });
  const std::size_t n = idx.size();
  const std::size_t k = static_cast<std::size_t>(options.endpointPoints);
  if (n < 2 * k + 1) throw DomainError("Shirley window holds too few points");
  for (std::size_t i : idx) {
    out.energies.push_back(spectrum.bindingEnergy[i]);
    out.counts.push_back(spectrum.counts[i]);
  }
  const auto& e = out.energies;
  const auto& y = out.counts;

  out.levelLo = std::accumulate(y.begin(), y.begin() + k, 0.0) / static_cast<double>(k);
  out.levelHi = std::accumulate(y.end() - k, y.end(), 0.0) / static_cast<double>(k);
  if (!std::isfinite(out.levelLo) || !std::isfinite(out.levelHi)) {
    throw DomainError("Shirley endpoint levels are not finite");
  }
  const double step = out.levelHi - out.levelLo;
  const double tol = options.relativeTolerance * std::abs(step);

  std::vector<double> b(n, out.levelLo), cum(n, 0.0);
  for (int it = 1; it <= options.maxIterations; ++it) {
    cum[0] = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
      const double s0 = y[i - 1] - b[i - 1], s1 = y[i] - b[i];
      cum[i] = cum[i - 1] + 0.5 * (s0 + s1) * (e[i] - e[i - 1]);
    }
    const double total = cum[n - 1];
    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double frac = total != 0.0 ? std::clamp(cum[i] / total, 0.0, 1.0) : 0.0;
      const double next = out.levelLo + step * frac;
      delta = std::max(delta, std::abs(next - b[i]));
      b[i] = next;
    }
    out.iterations = it;
    out.residual = delta;
    if (delta <= tol) {
      out.converged = true;
      break;
    }
  }
  out.background = std::move(b);
  return out;
}

}  // namespace nbcav
