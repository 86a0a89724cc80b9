// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "nbcav/core.hpp"
#include "nbcav/numerics.hpp"

namespace nbcav {

/// Temperature-dependent TLS loss model:
///   1/Q(T) = 1/q0 + lossTangentProduct * tanh(alpha * hbar w0 / (2 kB T))
struct TlsParams {
  double q0 = 0.0;
  double lossTangentProduct = 0.0;  // F_e tan(delta_TLS)
  double alpha = 1.0;
  double f0 = 0.0;

  void validate() const;
};

inline constexpr double kTlsAlphaMin = 0.1;
inline constexpr double kTlsAlphaMax = 3.0;

/// Surface participation geometry. sE, sM in 1/m; tOx in m.
struct CavityGeometry {
  double sE = 0.0;
  double sM = 0.0;
  double tOx = 0.0;
  double epsR = 0.0;

  void validate() const;
};

struct TemperatureSeries {
  std::vector<double> temperatures;  // K, strictly increasing
  std::vector<double> qInt;
  std::vector<double> qSigma;  // optional; empty when absent

  void validate() const;
};

double tlsModel(const TlsParams& p, double temperature);
/// The TLS term alone: lossTangentProduct * tanh(...). 1/tlsModel = 1/q0 + this.
double tlsLoss(const TlsParams& p, double temperature);

struct TlsFitOptions {
  bool freezeAlpha = false;  // hold alpha at 1
  LeastSquaresOptions solver;
};

/// Fits in 1/Q space; per-point weights come from qSigma when present.
/// Parameter names: q0, lossTangentProduct, alpha.
FitResult fitTls(const TemperatureSeries& series, double f0, const TlsFitOptions& options = {});

TlsParams tlsParamsFrom(const FitResult& fit, double f0);

/// R_s = mu0 w0 / (q0 sM), ohms.
double deriveResidualResistance(double q0, double f0, double sM);
/// Inverse: q0 = mu0 w0 / (R_s sM).
double deriveQ0(double residualResistance, double f0, double sM);

/// Threshold above which a derived loss tangent suggests bad geometry inputs.
inline constexpr double kLossTangentSanityLimit = 0.1;

/// tan(delta) = product * epsR / (tOx sE).
double deriveLossTangent(double product, const CavityGeometry& geom);
/// Filling factor F_e = tOx sE / epsR.
double fillingFactor(const CavityGeometry& geom);

}  // namespace nbcav
