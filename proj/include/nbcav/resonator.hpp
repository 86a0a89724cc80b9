// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors

#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "nbcav/core.hpp"
#include "nbcav/numerics.hpp"

namespace nbcav {

/// Single-port reflection resonator. Frequencies in Hz, phases in rad, delay in s.
struct ResonatorParams {
  double f0 = 0.0;
  double qInt = 0.0;
  double qCoupling = 0.0;
  double asymmetryPhase = 0.0;  // rotation of the resonant circle from impedance mismatch
  double amplitude = 1.0;
  double electricalDelay = 0.0;
  double backgroundPhase = 0.0;

  double qLoaded() const { return parallelQ(qInt, qCoupling); }
  /// Throws DomainError on non-positive f0 / Q or non-finite fields.
  void validate() const;
};

struct ComplexTrace {
  std::vector<double> frequencies;  // Hz, strictly increasing
  std::vector<std::complex<double>> values;
  std::optional<double> meanPhotonNumber;

  /// Throws DomainError on length mismatch, non-increasing grid, or fewer than minPoints.
  void validate(std::size_t minPoints = 8) const;
};

struct RingdownTrace {
  std::vector<double> delays;  // s, non-negative, increasing
  std::vector<double> power;   // linear detected power, background subtracted

  void validate(std::size_t minPoints = 6) const;
};

/// amplitude * exp(i(backgroundPhase - 2 pi f tau)) *
///   [1 - (2 qL / qC) exp(i asymmetryPhase) / (1 + 2i qL (f - f0) / f0)]
std::complex<double> s11Model(const ResonatorParams& params, double f);
std::vector<std::complex<double>> s11Model(const ResonatorParams& params,
                                           std::span<const double> frequencies);

enum class DelayMode {
  Auto,    // free only when the span can resolve it (see kDelayResolvableSpanHz)
  Free,
  Frozen,  // held at the guess; backgroundPhase absorbs the constant part
};

/// Below this span a cable delay only adds a phase ramp smaller than typical
/// noise, so Auto mode freezes it.
inline constexpr double kDelayResolvableSpanHz = 1e6;

struct S11FitOptions {
  std::optional<ResonatorParams> guess;
  DelayMode delay = DelayMode::Auto;
  LeastSquaresOptions solver;
};

/// Parameter names: f0, qInt, qCoupling, asymmetryPhase, amplitude,
/// electricalDelay, backgroundPhase (SI units).
FitResult fitS11(const ComplexTrace& trace, const S11FitOptions& options = {});

/// Automatic initial guess: f0 at min |S11|, qL from the half-depth width of
/// 1 - |S11|^2, qC from dip depth and on-resonance phase, delay from the
/// off-resonant phase slope.
ResonatorParams estimateS11Guess(const ComplexTrace& trace);

ResonatorParams resonatorParamsFrom(const FitResult& fit);

enum class RingdownDomain { Auto, Linear, Log };

struct RingdownFitOptions {
  RingdownDomain domain = RingdownDomain::Auto;
  // Detection noise floor (power units). When absent, estimated from the
  // residuals of a linear-domain fit.
  std::optional<double> noiseFloor;
  LeastSquaresOptions solver;
};

/// Fits power(t) = amplitude exp(-t / tau) + offset. Parameter names: tau,
/// amplitude, offset. Non-decaying data are flagged "non_physical".
FitResult fitRingdown(const RingdownTrace& trace, const RingdownFitOptions& options = {});

/// Loaded Q from an energy decay time: 2 pi f0 tau.
double loadedQFromRingdown(double tau, double f0);

/// Steady-state on-resonance occupation 4 kc P / (hbar w0 (ki + kc)^2) with
/// k = w0 / Q in rad/s.
double meanPhotonNumber(double pInput, const ResonatorParams& params);
/// Inverse of meanPhotonNumber in pInput.
double inputPowerForPhotons(double nbar, const ResonatorParams& params);

/// Delivered power from a source level and a chain of attenuations.
double deliveredPower(double sourcePowerDbm, std::span<const double> attenuationDb);

struct PowerSweepPoint {
  ComplexTrace trace;
  double inputPower = 0.0;  // W at the cavity port
};

struct PowerSweepRow {
  double inputPower = 0.0;
  double meanPhotons = 0.0;
  double qInt = 0.0, qIntSigma = 0.0;
  double qCoupling = 0.0, qCouplingSigma = 0.0;
  double f0 = 0.0;
  bool converged = false;
};

/// Fits each trace and reports Q against photon number.
std::vector<PowerSweepRow> powerSweep(std::span<const PowerSweepPoint> points,
                                      const S11FitOptions& options = {});

}  // namespace nbcav
