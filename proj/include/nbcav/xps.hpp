// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors

#pragma once

#include <array>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nbcav/core.hpp"
#include "nbcav/numerics.hpp"

namespace nbcav {

struct XpsSpectrum {
  std::vector<double> bindingEnergy;  // eV, strictly monotone (either direction)
  std::vector<double> counts;
  int sputterCycle = 0;
  double dwellPerCycle = 0.0;  // s

  /// Raw spectra must have non-negative counts; background-subtracted ones
  /// may dip below zero from noise.
  void validate(std::size_t minPoints = 2, bool requireNonNegative = true) const;
};

inline constexpr double kAdventitiousCarbonEv = 284.8;
inline constexpr double kC1sWindowLo = 280.0;
inline constexpr double kC1sWindowHi = 292.0;

/// Shifts binding energies so the measured C 1s line lands at 284.8 eV.
XpsSpectrum chargeCorrect(const XpsSpectrum& spectrum, double measuredC1s);

struct ShirleyOptions {
  int endpointPoints = 3;      // points averaged for each endpoint level
  int maxIterations = 50;
  double relativeTolerance = 1e-6;  // of |y_hi - y_lo|
};

struct ShirleyBackground {
  // Window points in ascending binding energy.
  std::vector<double> energies;
  std::vector<double> counts;
  std::vector<double> background;
  double levelLo = 0.0;  // low binding-energy endpoint level
  double levelHi = 0.0;
  int iterations = 0;
  double residual = 0.0;  // last max |delta B|
  bool converged = false;

  /// Window spectrum with the background removed.
  XpsSpectrum subtracted() const;
};

/// Iterative Shirley background over [windowLo, windowHi] eV. The background
/// at E rises from the low-BE level in proportion to the peak area at lower
/// binding energy.
ShirleyBackground shirleyBackground(const XpsSpectrum& spectrum, double windowLo, double windowHi,
                                    const ShirleyOptions& options = {});

enum class NbSpecies { NbMetal, Nb2O5, NbO2, NbO, NbOx, NbHx };

std::string_view speciesName(NbSpecies s);
/// Accepts the names returned by speciesName; throws DomainError otherwise.
NbSpecies parseSpecies(std::string_view name);

inline constexpr double kNb3dSplitting = 2.7;        // eV, 3d3/2 above 3d5/2
inline constexpr double kNb3dAreaFraction52 = 0.6;   // 3:2 ratio
inline constexpr double kNb3dAreaFraction32 = 0.4;

struct DoubletSpec {
  NbSpecies species = NbSpecies::NbMetal;
  double position52 = 0.0;  // eV
  double fwhm = 1.0;        // eV, shared by both lines
  double glMix = 0.3;       // Lorentzian fraction
  double asymmetry = 0.0;   // high-BE tail fraction, metal only
  double area = 0.0;        // total doublet area, counts eV

  void validate() const;
};

/// One line of a doublet.
struct PeakComponent {
  double center = 0.0;
  double area = 0.0;
  double fwhm = 0.0;
  double glMix = 0.0;
  double asymmetry = 0.0;
};

std::array<PeakComponent, 2> doubletComponents(const DoubletSpec& d);

/// Unit-area line shape: pseudo-Voigt, blended with an exponentially
/// modified Gaussian tail toward high BE when asymmetry > 0.
double peakShape(double energy, double center, double fwhm, double glMix, double asymmetry);

/// Sum of doublets at each energy.
std::vector<double> nb3dModel(std::span<const DoubletSpec> doublets, std::span<const double> energies);

/// Default 3d5/2 positions and shapes for the six species.
std::vector<DoubletSpec> defaultDoublets();
/// Path of the shipped default doublet file.
std::string defaultDoubletPath();

struct Nb3dFit {
  FitResult fit;  // names area_<species>, position_<species>, fwhm_<species>
  std::vector<DoubletSpec> doublets;  // fitted
  std::vector<double> fractions;      // area / total area, same order
};

struct Nb3dFitOptions {
  double positionWindow = 0.5;  // eV either side of the supplied position
  double fwhmLo = 0.2, fwhmHi = 3.0;
  bool fitPositions = true;  // false holds positions at the supplied values
  bool fitWidths = true;
  double correlationWarning = 0.95;  // |corr| between areas
  LeastSquaresOptions solver;
};

/// Constrained doublet deconvolution of a background-subtracted spectrum.
Nb3dFit fitNb3d(const XpsSpectrum& spectrum, std::span<const DoubletSpec> doublets,
                const Nb3dFitOptions& options = {});

enum class ImfpPrefactor { Oxide, Metal };

struct ThicknessInputs {
  double iOxide = 0.0;
  double iMetal = 0.0;
  double lambdaOxide = 0.0;  // nm
  double lambdaMetal = 0.0;  // nm
  double densityRatio = 0.0; // N_m / N_o
  double theta = std::numbers::pi / 2.0;

  void validate() const;
};

struct IndirectThickness {
  double nm = 0.0;
  bool infinite = false;  // no metal signal: oxide exceeds the information depth
};

/// lambda sin(theta) ln(N_m lambda_m I_o / (N_o lambda_o I_m) + 1), with lambda
/// the oxide IMFP unless `prefactor` selects the metal one.
IndirectThickness oxideThicknessIndirect(const ThicknessInputs& inputs,
                                         ImfpPrefactor prefactor = ImfpPrefactor::Oxide);
/// Sum over species.
IndirectThickness totalOxideThicknessIndirect(std::span<const ThicknessInputs> species,
                                              ImfpPrefactor prefactor = ImfpPrefactor::Oxide);

struct ProfilePoint {
  double cycle = 0.0;
  double oxygenFraction = 0.0;
};

struct DirectThicknessOptions {
  double relativeBand = 0.05;
  int tailPoints = 3;
};

struct DirectThickness {
  double nm = 0.0;
  double fractionalCycle = 0.0;
  double plateau = 0.0;   // mean of the tail points
  bool resolved = true;   // false when the tail itself is not inside the band
};

/// Thickness from the first cycle at which the oxygen fraction enters the
/// stability band around the tail mean, interpolated linearly.
DirectThickness oxideThicknessDirect(std::span<const ProfilePoint> profile, double nmPerCycle,
                                     const DirectThicknessOptions& options = {});

struct SputterRate {
  double angstromPerSecond = 0.0;
  double lo = 0.0;  // at cycles + 1/2
  double hi = 0.0;  // at cycles - 1/2
};

SputterRate sputterRateCalibration(double filmThicknessNm, int cyclesToSubstrate, double dwellS);

struct HeightMap {
  std::size_t rows = 0, cols = 0;
  double pixelPitch = 0.0;     // m
  std::vector<double> heights; // row-major, m

  double at(std::size_t r, std::size_t c) const { return heights[r * cols + c]; }
  void validate() const;
};

struct Roughness {
  double ra = 0.0;
  double rms = 0.0;
};

/// Ra and RMS after least-squares plane removal. Needs at least 4x4 points.
Roughness roughnessStats(const HeightMap& map);

}  // namespace nbcav
