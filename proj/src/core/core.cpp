// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors

#include "nbcav/core.hpp"

#include <algorithm>
#include <cmath>

namespace nbcav {

namespace {
void requirePositive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(what) + " must be positive and finite");
  }
}
}  // namespace

FrequencyPoint::FrequencyPoint(double hz) : hz_(hz) { requirePositive(hz, "frequency"); }

std::optional<std::size_t> FitResult::index(std::string_view name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names.begin());
}

double FitResult::value(std::string_view name) const {
  auto i = index(name);
  if (!i) throw std::out_of_range("no fit parameter named " + std::string(name));
  return values[*i];
}

double FitResult::sigma(std::string_view name) const {
  auto i = index(name);
  if (!i) throw std::out_of_range("no fit parameter named " + std::string(name));
  return sigmas[*i];
}

bool FitResult::hasFlag(std::string_view flag) const {
  return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

void FitResult::addFlag(std::string flag) {
  if (!hasFlag(flag)) flags.push_back(std::move(flag));
}

void FitResult::addWarning(std::string message) { warnings.push_back(std::move(message)); }

double qToEnergyDecayTime(double q, double f0) {
  requirePositive(q, "Q");
  requirePositive(f0, "f0");
  return q / (constants::twoPi * f0);
}

double timeToQ(double tau, double f0) {
  requirePositive(tau, "tau");
  requirePositive(f0, "f0");
  return tau * (constants::twoPi * f0);
}

double singlePhotonEnergy(double f0) {
  requirePositive(f0, "f0");
  return constants::hbar * (constants::twoPi * f0);
}

}  // namespace nbcav
