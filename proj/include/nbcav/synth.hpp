// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nbcav/dispersive.hpp"
#include "nbcav/resonator.hpp"
#include "nbcav/tls.hpp"
#include "nbcav/xps.hpp"

// Seeded synthetic data from the forward models. Each generator draws from
// its own stream derived from (seed, generator tag), so outputs do not depend
// on call order or threading.
namespace nbcav::synth {

enum class NoiseKind { Additive, Multiplicative };

struct NoiseSpec {
  NoiseKind kind = NoiseKind::Additive;
  double sigma = 0.0;  // data units (additive) or relative (multiplicative)
  std::uint64_t seed = 0;

  void validate() const;
};

/// Noise on real and imaginary parts independently.
ComplexTrace genS11(const ResonatorParams& params, std::span<const double> frequencies,
                    const NoiseSpec& noise = {});

TemperatureSeries genTemperatureSeries(const TlsParams& params, std::span<const double> temperatures,
                                       const NoiseSpec& noise = {});

QubitSpectrum genQubitSpectrum(const DispersiveParams& params, std::span<const double> detunings,
                               const NoiseSpec& noise = {});

RingdownTrace genDecay(double tau, double amplitude, double offset, std::span<const double> delays,
                       const NoiseSpec& noise = {});

VacuumRevival genVacuumRevival(double nbar0, double t1, std::span<const double> delays,
                               const NoiseSpec& noise = {});

/// Endpoint levels of the inelastic background added under the doublets.
struct XpsBackground {
  double levelLo = 0.0;  // low binding-energy side
  double levelHi = 0.0;
};

/// Doublets on a Shirley background, i.e. one that is a fixed point of
/// shirleyBackground for the noiseless spectrum.
XpsSpectrum genNb3d(std::span<const DoubletSpec> doublets, std::span<const double> energies,
                    const XpsBackground& background = {}, const NoiseSpec& noise = {});

/// Evenly spaced grid of n points on [lo, hi].
std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace nbcav::synth
