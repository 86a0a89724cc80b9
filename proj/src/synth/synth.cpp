// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors

#include "nbcav/synth.hpp"

#include <cmath>
#include <random>

namespace nbcav::synth {

namespace {

enum class Tag : std::uint64_t { S11 = 1, Temperature, Qubit, Decay, Revival, Nb3d };

class Stream {
 public:
  Stream(const NoiseSpec& noise, Tag tag)
      : noise_(noise), rng_(splitmix64(noise.seed ^ splitmix64(static_cast<std::uint64_t>(tag)))) {}

  double apply(double value) {
    if (noise_.sigma == 0.0) return value;
    const double z = normal_(rng_);
    return noise_.kind == NoiseKind::Additive ? value + noise_.sigma * z
                                              : value * (1.0 + noise_.sigma * z);
  }

 private:
  NoiseSpec noise_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

void requireIncreasing(std::span<const double> grid, const char* what) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i]) || (i > 0 && !(grid[i] > grid[i - 1]))) {
      throw DomainError(std::string(what) + " must be finite and strictly increasing");
    }
  }
}

}  // namespace

void NoiseSpec::validate() const {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw DomainError("noise sigma must be >= 0");
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return out;
}

ComplexTrace genS11(const ResonatorParams& params, std::span<const double> frequencies,
                    const NoiseSpec& noise) {
  noise.validate();
  requireIncreasing(frequencies, "frequency grid");
  ComplexTrace t;
  t.frequencies.assign(frequencies.begin(), frequencies.end());
  t.values = s11Model(params, frequencies);
  Stream s(noise, Tag::S11);
  for (auto& v : t.values) {
    const double re = s.apply(v.real());
    const double im = s.apply(v.imag());
    v = {re, im};
  }
  return t;
}

TemperatureSeries genTemperatureSeries(const TlsParams& params, std::span<const double> temperatures,
                                       const NoiseSpec& noise) {
  noise.validate();
  requireIncreasing(temperatures, "temperature grid");
  TemperatureSeries out;
  out.temperatures.assign(temperatures.begin(), temperatures.end());
  Stream s(noise, Tag::Temperature);
  for (double t : temperatures) out.qInt.push_back(s.apply(tlsModel(params, t)));
  return out;
}

QubitSpectrum genQubitSpectrum(const DispersiveParams& params, std::span<const double> detunings,
                               const NoiseSpec& noise) {
  noise.validate();
  requireIncreasing(detunings, "detuning grid");
  QubitSpectrum out;
  out.detunings.assign(detunings.begin(), detunings.end());
  out.population = numberSplitSpectrum(params, detunings);
  Stream s(noise, Tag::Qubit);
  for (double& v : out.population) v = s.apply(v);
  return out;
}

RingdownTrace genDecay(double tau, double amplitude, double offset, std::span<const double> delays,
                       const NoiseSpec& noise) {
  noise.validate();
  requireIncreasing(delays, "delay grid");
  if (!(tau > 0.0)) throw DomainError("tau must be positive");
  RingdownTrace out;
  out.delays.assign(delays.begin(), delays.end());
  Stream s(noise, Tag::Decay);
  for (double t : delays) out.power.push_back(s.apply(amplitude * std::exp(-t / tau) + offset));
  return out;
}

VacuumRevival genVacuumRevival(double nbar0, double t1, std::span<const double> delays,
                               const NoiseSpec& noise) {
  noise.validate();
  requireIncreasing(delays, "delay grid");
  VacuumRevival out;
  out.delays.assign(delays.begin(), delays.end());
  Stream s(noise, Tag::Revival);
  for (double t : delays) out.weights.push_back(s.apply(vacuumPeakDecay(nbar0, t1, t)));
  return out;
}

XpsSpectrum genNb3d(std::span<const DoubletSpec> doublets, std::span<const double> energies,
                    const XpsBackground& background, const NoiseSpec& noise) {
  noise.validate();
  requireIncreasing(energies, "energy grid");
  for (const auto& d : doublets) d.validate();
  XpsSpectrum out;
  out.bindingEnergy.assign(energies.begin(), energies.end());
  const auto peaks = nb3dModel(doublets, energies);
  const std::size_t n = peaks.size();

  // Shirley fixed point: the background above the low level is proportional
  // to the peak area at lower binding energy (trapezoid, as in the analysis).
  std::vector<double> cum(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    cum[i] = cum[i - 1] + 0.5 * (peaks[i - 1] + peaks[i]) * (energies[i] - energies[i - 1]);
  }
  const double total = n ? cum[n - 1] : 0.0;
  const double step = background.levelHi - background.levelLo;
  out.counts.resize(n);
  Stream s(noise, Tag::Nb3d);
  for (std::size_t i = 0; i < n; ++i) {
    const double b = background.levelLo + (total > 0.0 ? step * cum[i] / total : 0.0);
    out.counts[i] = s.apply(peaks[i] + b);
  }
  return out;
}

}  // namespace nbcav::synth
