// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors

#include <algorithm>
#include <cmath>

#include "nbcav/resonator.hpp"

namespace nbcav {

void RingdownTrace::validate(std::size_t minPoints) const {
  if (delays.size() != power.size()) throw DomainError("ringdown length mismatch");
  if (delays.size() < minPoints) throw DomainError("ringdown needs at least 6 points");
  for (std::size_t i = 0; i < delays.size(); ++i) {
    if (!std::isfinite(delays[i]) || !std::isfinite(power[i])) {
      throw DomainError("ringdown contains non-finite values");
    }
    if (delays[i] < 0.0) throw DomainError("ringdown delays must be non-negative");
    if (i > 0 && !(delays[i] > delays[i - 1])) {
      throw DomainError("ringdown delays must be increasing");
    }
  }
}

double loadedQFromRingdown(double tau, double f0) { return timeToQ(tau, f0); }

namespace {

struct LogLinearGuess {
  double tau;
  double amplitude;
};

// Straight-line fit of ln(power) over the strictly positive points.
LogLinearGuess logLinearGuess(const RingdownTrace& t) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < t.delays.size(); ++i) {
    if (t.power[i] <= 0.0) continue;
    const double x = t.delays[i], y = std::log(t.power[i]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++n;
  }
  const double span = t.delays.back() - t.delays.front();
  const double pMax = *std::max_element(t.power.begin(), t.power.end());
  const double pMin = *std::min_element(t.power.begin(), t.power.end());
  if (n >= 2) {
    const double den = n * sxx - sx * sx;
    const double slope = den != 0.0 ? (n * sxy - sx * sy) / den : 0.0;
    if (slope < 0.0) {
      const double intercept = (sy - slope * sx) / n;
      return {-1.0 / slope, std::exp(intercept)};
    }
  }
  return {span, std::max(pMax - pMin, pMax * 1e-3 + 1e-300)};
}

}  // namespace

FitResult fitRingdown(const RingdownTrace& trace, const RingdownFitOptions& options) {
  trace.validate();
  const std::size_t n = trace.delays.size();
  const double span = trace.delays.back() - trace.delays.front();
  double minSpacing = span;
  for (std::size_t i = 1; i < n; ++i) minSpacing = std::min(minSpacing, trace.delays[i] - trace.delays[i - 1]);
  const double tauLo = 1e-3 * minSpacing;
  const double tauHi = 1e4 * span;

  const auto guess = logLinearGuess(trace);
  const double pScale = std::max(std::abs(guess.amplitude), 1e-300);
  const double tau0 = std::clamp(guess.tau, tauLo * 10.0, tauHi / 10.0);

  const std::vector<double> t = trace.delays;
  auto linearModel = ResidualModel::pointwise(t, [](std::span<const double> p, double x) {
    return p[1] * std::exp(-x / p[0]) + p[2];
  });
  std::vector<ParamSpec> specs{
      {"tau", tau0, tauLo, tauHi, false, tau0},
      {"amplitude", std::max(guess.amplitude, 1e-12 * pScale), 0.0, kInf, false, pScale},
      {"offset", 0.0, -kInf, kInf, false, pScale},
  };
  FitResult fit = leastSquares(linearModel, specs, trace.power, {}, options.solver);
  RingdownDomain domain = options.domain;

  if (domain == RingdownDomain::Auto) {
    double floor = 0.0;
    if (options.noiseFloor) {
      floor = *options.noiseFloor;
    } else {
      // Additive floor from the scatter of the tail, where the decay is smallest.
      const auto fitted = linearModel.evaluate(fit.values);
      const std::size_t tail = std::max<std::size_t>(3, n / 5);
      double ss = 0.0;
      for (std::size_t i = n - tail; i < n; ++i) ss += std::pow(trace.power[i] - fitted[i], 2);
      floor = std::sqrt(ss / static_cast<double>(tail));
    }
    const double pMin = *std::min_element(trace.power.begin(), trace.power.end());
    domain = (pMin > 3.0 * floor && pMin > 0.0) ? RingdownDomain::Log : RingdownDomain::Linear;
  }

  if (domain == RingdownDomain::Log) {
    const double pMin = *std::min_element(trace.power.begin(), trace.power.end());
    if (!(pMin > 0.0)) throw DomainError("log-domain ringdown fit needs positive power");
    std::vector<double> logPower(n);
    for (std::size_t i = 0; i < n; ++i) logPower[i] = std::log(trace.power[i]);
    auto logModel = ResidualModel::pointwise(t, [](std::span<const double> p, double x) {
      return std::log(p[1] * std::exp(-x / p[0]) + p[2]);
    });
    std::vector<ParamSpec> logSpecs = specs;
    logSpecs[0].initial = std::clamp(fit.values[0], tauLo, tauHi);
    logSpecs[1].initial = std::max(fit.values[1], 1e-12 * pScale);
    logSpecs[2].initial = std::max(fit.values[2], 0.0);
    logSpecs[2].lower = 0.0;
    fit = leastSquares(logModel, logSpecs, logPower, {}, options.solver);
    fit.addFlag("log_domain");
  }

  const double tau = fit.value("tau");
  const double amp = fit.value("amplitude");
  const bool tauAtBound = fit.hasFlag("at_bound:tau");
  const bool ampVanishes = !(amp > 3.0 * fit.sigma("amplitude")) || fit.hasFlag("at_bound:amplitude");
  if (tauAtBound || ampVanishes || !(tau > 0.0)) {
    fit.addFlag("non_physical");
    fit.addWarning("no resolvable decay: best-fit time constant or amplitude is unphysical");
  } else if (span < tau) {
    fit.addWarning("delays span less than one decay time; tau is weakly constrained");
  }
  return fit;
}

}  // namespace nbcav
