// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nbcav/core.hpp"
#include "nbcav/numerics.hpp"

namespace nbcav {

/// Qubit coupled dispersively to a storage cavity in a coherent state.
/// Frequencies in Hz (not angular), times in s.
struct DispersiveParams {
  double chi = 0.0;          // full shift per photon; peak n sits at -n chi
  double nbar = 0.0;
  double qubitT2 = 0.0;
  double cavityKappa = 0.0;  // extra full width per photon
  double qubitF = 0.0;       // informational only
  double amplitude = 1.0;
  int nMax = 0;              // Poisson truncation; 0 picks at least requiredNMax(nbar)

  void validate() const;
  int truncation() const;
};

struct QubitSpectrum {
  std::vector<double> detunings;  // Hz relative to the bare qubit, increasing
  std::vector<double> population;

  void validate(std::size_t minPoints = 8) const;
};

struct PurcellInputs {
  double gOverDelta = 0.0;
  double qubitGamma = 0.0;  // 1/s

  void validate() const;
};

inline constexpr double kDispersiveBound = 0.3;
inline constexpr double kPoissonTailLimit = 1e-6;

/// ceil(nbar + 5 sqrt(nbar + 1)).
int requiredNMax(double nbar);
/// Poisson probability of n, computed in log space.
double poissonWeight(int n, double nbar);
/// Probability mass beyond nMax.
double poissonTailMass(double nbar, int nMax);

/// Full width of peak n: 1 / (pi T2) + n kappa.
double peakLinewidth(const DispersiveParams& p, int n);
/// True when chi exceeds the vacuum-peak full width.
bool isResolved(const DispersiveParams& p);

/// amplitude * sum_n P(n; nbar) L(detuning + n chi; width_n), L unit-peak.
double numberSplitSpectrum(const DispersiveParams& p, double detuning);
std::vector<double> numberSplitSpectrum(const DispersiveParams& p,
                                        std::span<const double> detunings);
/// Warnings for a parameter set (Poisson truncation beyond the tail limit).
std::vector<std::string> spectrumWarnings(const DispersiveParams& p);

struct NumberSplitFitOptions {
  std::optional<DispersiveParams> guess;  // cavityKappa is held at guess->cavityKappa
  LeastSquaresOptions solver = defaultSolver();

  static LeastSquaresOptions defaultSolver() {
    LeastSquaresOptions o;
    o.multiStart = 6;
    o.seed = 0x5eed;
    return o;
  }
};

/// Parameter names: chi, nbar, qubitT2, amplitude. Flags "unresolved" when
/// the fitted chi is below the fitted vacuum linewidth.
FitResult fitNumberSplit(const QubitSpectrum& spectrum, const NumberSplitFitOptions& options = {});

/// Peak-finding initial guess used when none is supplied.
DispersiveParams estimateNumberSplitGuess(const QubitSpectrum& spectrum);

DispersiveParams dispersiveParamsFrom(const FitResult& fit, double cavityKappa = 0.0);

/// Vacuum weight of a decaying coherent state: exp(-nbar0 exp(-t / t1)).
double vacuumPeakDecay(double nbar0, double t1, double t);

struct VacuumRevival {
  std::vector<double> delays;   // s, increasing
  std::vector<double> weights;  // vacuum-peak weight in [0, 1]

  void validate(std::size_t minPoints = 3) const;
};

/// Parameter names: t1, nbar0. Data that do not rise toward 1 are flagged
/// "non_physical".
FitResult fitCavityT1(const VacuumRevival& points, const LeastSquaresOptions& solver = {});

/// T_p = 1 / ((g / Delta)^2 Gamma_q).
double purcellLimit(const PurcellInputs& inputs);

}  // namespace nbcav
